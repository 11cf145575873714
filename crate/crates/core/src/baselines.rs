//! Greedy reference algorithms. Both produce an ordered seed list; every
//! prefix of it is a candidate solution, which [`prefix_sweep`] turns into a
//! front comparable with the optimizer's.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::ParetoFront;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objectives::{Evaluator, NormalizationContext};
use crate::propagation::{monte_carlo, PropagationModel, Tau};

/// Label written into reports for [`gdd`].
pub const GDD_LABEL: &str = "gdd (degree-discount variant)";

/// Seeds in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub ordered_seeds: Vec<usize>,
    /// Mean spread gained by each pick; empty for [`gdd`].
    pub marginal_gain: Vec<f64>,
    /// Spread estimates computed while selecting.
    pub evaluations_used: usize,
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k > g.node_count() {
        return Err(Error::Config(format!(
            "k = {k} exceeds node count {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Degree-discount selection. A node's score starts at its out-degree `d`
/// and becomes `d - 2t - (d - t) t p` once `t` of its in-neighbors are
/// selected, with `p = 1 / average in-degree`. Ties go to the lower id.
pub fn gdd(g: &Graph, k: usize) -> Result<GreedyTrace> {
    check_k(g, k)?;
    let n = g.node_count();
    let avg_in = g.average_in_degree();
    let p = if avg_in > 0.0 { 1.0 / avg_in } else { 0.0 };
    let mut t = vec![0usize; n];
    let mut score: Vec<f64> = (0..n).map(|v| g.out_degree(v) as f64).collect();
    let mut selected = vec![false; n];
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for v in (0..n).filter(|&v| !selected[v]) {
            if best.is_none_or(|b| score[v] > score[b]) {
                best = Some(v);
            }
        }
        let u = best.expect("k <= n");
        selected[u] = true;
        order.push(u);
        for &v in g.out_neighbors(u) {
            if selected[v] {
                continue;
            }
            t[v] += 1;
            let d = g.out_degree(v) as f64;
            let tv = t[v] as f64;
            score[v] = d - 2.0 * tv - (d - tv) * tv * p;
        }
    }
    Ok(GreedyTrace {
        ordered_seeds: order,
        marginal_gain: Vec::new(),
        evaluations_used: 0,
    })
}

/// Summed spread over all simulations. Every call uses the same `rng_seed`,
/// so estimates for different sets share their simulated worlds.
struct SpreadOracle<'g> {
    g: &'g Graph,
    model: PropagationModel,
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
}

impl SpreadOracle<'_> {
    fn total(&self, seeds: &[usize]) -> u64 {
        monte_carlo(self.g, self.model, seeds, self.tau, self.n_sims, self.rng_seed, None).total_activated
    }

    fn with(&self, base: &[usize], v: usize) -> u64 {
        let mut s = base.to_vec();
        s.push(v);
        self.total(&s)
    }
}

#[derive(PartialEq, Eq)]
struct Candidate {
    gain: i64,
    node: usize,
    round: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.cmp(&other.gain).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy-forward greedy (CELF) on Monte Carlo spread. Stale gains are upper
/// bounds under the independent and weighted cascade, so the output matches
/// [`exhaustive_greedy`] there; under linear threshold a fixed set of
/// thresholds is not submodular and the two may differ.
pub fn celf(
    g: &Graph,
    model: PropagationModel,
    k: usize,
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
) -> Result<GreedyTrace> {
    check_k(g, k)?;
    model.validate()?;
    let oracle = SpreadOracle { g, model, tau, n_sims, rng_seed };
    let n = g.node_count();
    let first: Vec<u64> = (0..n).into_par_iter().map(|v| oracle.total(&[v])).collect();
    let mut evaluations = n;
    let mut heap: BinaryHeap<Candidate> = first
        .iter()
        .enumerate()
        .map(|(node, &total)| Candidate { gain: total as i64, node, round: 0 })
        .collect();
    let mut seeds = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut current = 0u64;
    while seeds.len() < k {
        let top = heap.pop().expect("k <= n");
        if top.round == seeds.len() {
            current = (current as i64 + top.gain) as u64;
            gains.push(top.gain as f64 / n_sims as f64);
            seeds.push(top.node);
        } else {
            let total = oracle.with(&seeds, top.node);
            evaluations += 1;
            heap.push(Candidate {
                gain: total as i64 - current as i64,
                node: top.node,
                round: seeds.len(),
            });
        }
    }
    Ok(GreedyTrace {
        ordered_seeds: seeds,
        marginal_gain: gains,
        evaluations_used: evaluations,
    })
}

/// Plain greedy: every round re-estimates every remaining node. Ties go to
/// the lower id.
pub fn exhaustive_greedy(
    g: &Graph,
    model: PropagationModel,
    k: usize,
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
) -> Result<GreedyTrace> {
    check_k(g, k)?;
    model.validate()?;
    let oracle = SpreadOracle { g, model, tau, n_sims, rng_seed };
    let n = g.node_count();
    let mut seeds: Vec<usize> = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut evaluations = 0;
    let mut current = 0i64;
    for _ in 0..k {
        let remaining: Vec<usize> = (0..n).filter(|v| !seeds.contains(v)).collect();
        let totals: Vec<i64> = remaining
            .par_iter()
            .map(|&v| oracle.with(&seeds, v) as i64)
            .collect();
        evaluations += remaining.len();
        let (at, &best) = totals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("k <= n");
        gains.push((best - current) as f64 / n_sims as f64);
        current = best;
        seeds.push(remaining[at]);
    }
    Ok(GreedyTrace {
        ordered_seeds: seeds,
        marginal_gain: gains,
        evaluations_used: evaluations,
    })
}

/// Evaluates every prefix of `ordered_seeds` and keeps the non-dominated
/// ones on `ctx.active`.
pub fn prefix_sweep(
    evaluator: &Evaluator,
    ordered_seeds: &[usize],
    ctx: NormalizationContext,
) -> Result<ParetoFront> {
    if ordered_seeds.len() > ctx.max_seed_size {
        return Err(Error::Config(format!(
            "trace of length {} exceeds k = {}",
            ordered_seeds.len(),
            ctx.max_seed_size
        )));
    }
    let candidates: Vec<(Vec<usize>, _)> = (1..=ordered_seeds.len())
        .into_par_iter()
        .map(|len| {
            let prefix = ordered_seeds[..len].to_vec();
            evaluator.evaluate(&prefix).map(|v| (prefix, v))
        })
        .collect::<Result<_>>()?;
    ParetoFront::from_candidates(candidates, ctx)
}
