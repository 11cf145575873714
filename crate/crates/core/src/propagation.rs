//! Stochastic propagation models (independent cascade, weighted cascade,
//! linear threshold) and their Monte Carlo estimators.
//!
//! Propagation is breadth-synchronous: at every step each node activated in
//! the previous step makes one attempt on each of its not-yet-active
//! out-neighbors. The loop stops when a step activates nothing or after `tau`
//! steps.
//!
//! Randomness is counter-based. A simulation is identified by a 64-bit key;
//! the coin of arc `a` and the threshold of node `v` are pure functions of
//! `(key, a)` and `(key, v)`. A simulation therefore samples one live-edge
//! world (and one threshold vector), independently of the seed set, so
//! coupled runs with the same key are monotone in the seed set and the spread
//! estimate of a fixed key is a coverage function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Activation rule applied on every arc attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PropagationModel {
    /// Each attempt succeeds with the same probability `p`.
    IndependentCascade { p: f64 },
    /// An attempt on `v` succeeds with probability `1 / in_degree(v)`.
    WeightedCascade,
    /// `v` activates once the active fraction of its in-neighbors reaches a
    /// threshold drawn uniformly from `[low, high]` per simulation.
    LinearThreshold { low: f64, high: f64 },
}

impl PropagationModel {
    pub fn independent_cascade(p: f64) -> Result<Self> {
        let m = PropagationModel::IndependentCascade { p };
        m.validate()?;
        Ok(m)
    }

    pub fn linear_threshold(low: f64, high: f64) -> Result<Self> {
        let m = PropagationModel::LinearThreshold { low, high };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PropagationModel::IndependentCascade { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::Config(format!("IC probability {p} outside [0, 1]")))
            }
            PropagationModel::LinearThreshold { low, high }
                if !(0.0 <= low && low <= high && high <= 1.0) =>
            {
                Err(Error::Config(format!("LT thresholds [{low}, {high}] not ordered within [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// Maximum number of propagation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tau {
    Steps(u32),
    Unbounded,
}

impl Tau {
    pub fn steps(&self) -> Option<u32> {
        match *self {
            Tau::Steps(s) => Some(s),
            Tau::Unbounded => None,
        }
    }

    fn limit(&self) -> u32 {
        self.steps().unwrap_or(u32::MAX)
    }
}

impl Serialize for Tau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau::Steps(n) => s.serialize_u32(*n),
            Tau::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Steps(u32),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Steps(n) => Ok(Tau::Steps(n)),
            Raw::Word(w) if w == "unbounded" => Ok(Tau::Unbounded),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "tau must be an integer or \"unbounded\", got {w:?}"
            ))),
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const THRESHOLD_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random numbers of one simulation, addressed by arc or node id.
#[derive(Debug, Clone, Copy)]
pub struct SimStream {
    key: u64,
}

impl SimStream {
    pub fn new(seed: u64) -> Self {
        SimStream { key: mix64(seed) }
    }

    /// Stream of simulation `index` within a Monte Carlo block.
    pub fn for_simulation(rng_seed: u64, index: u64) -> Self {
        Self::new(rng_seed ^ index)
    }

    /// Uniform in `[0, 1)` for arc `arc`.
    #[inline]
    pub fn arc_uniform(&self, arc: usize) -> f64 {
        unit(mix64(self.key.wrapping_add((arc as u64).wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))))
    }

    /// Uniform in `[0, 1)` for node `v`, independent of the arc coins.
    #[inline]
    pub fn node_uniform(&self, v: usize) -> f64 {
        unit(mix64(
            (self.key ^ THRESHOLD_SALT).wrapping_add((v as u64).wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        ))
    }
}

/// Outcome of one simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadSample {
    /// Activated nodes in activation order, seeds first.
    pub activated: Vec<usize>,
    /// Number of steps that activated at least one node.
    pub hops: u32,
}

/// Monte Carlo averages.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub mean_influence: f64,
    pub mean_hops: f64,
    /// Mean number of activated non-seed nodes per community; empty when no
    /// assignment was supplied.
    pub mean_community_hits: Vec<f64>,
    pub samples: usize,
    /// Sum of activated counts over all simulations (exact).
    pub total_activated: u64,
}

/// Reusable simulation workspace for one graph and model.
pub struct Simulator<'g> {
    graph: &'g Graph,
    model: PropagationModel,
    epoch: u32,
    active: Vec<u32>,
    touched: Vec<u32>,
    hits: Vec<u32>,
    frontier: Vec<usize>,
    next: Vec<usize>,
    activated: Vec<usize>,
}

impl<'g> Simulator<'g> {
    pub fn new(graph: &'g Graph, model: PropagationModel) -> Self {
        let n = graph.node_count();
        Simulator {
            graph,
            model,
            epoch: 0,
            active: vec![0; n],
            touched: vec![0; n],
            hits: vec![0; n],
            frontier: Vec::new(),
            next: Vec::new(),
            activated: Vec::new(),
        }
    }

    fn next_epoch(&mut self) {
        if self.epoch == u32::MAX {
            self.active.fill(0);
            self.touched.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Runs one simulation and returns the number of productive steps. The
    /// activated nodes are available from [`Simulator::activated`] until the
    /// next call.
    pub fn run(&mut self, seeds: &[usize], tau: Tau, stream: &SimStream) -> u32 {
        self.next_epoch();
        let epoch = self.epoch;
        let g = self.graph;
        self.activated.clear();
        self.frontier.clear();
        for &s in seeds {
            if self.active[s] != epoch {
                self.active[s] = epoch;
                self.activated.push(s);
                self.frontier.push(s);
            }
        }
        let limit = tau.limit();
        let mut step = 0u32;
        let mut hops = 0u32;
        while !self.frontier.is_empty() && step < limit {
            self.next.clear();
            for &n in &self.frontier {
                let base = g.arc_offset(n);
                for (i, &m) in g.out_neighbors(n).iter().enumerate() {
                    if self.active[m] == epoch {
                        continue;
                    }
                    let fires = match self.model {
                        PropagationModel::IndependentCascade { p } => stream.arc_uniform(base + i) < p,
                        PropagationModel::WeightedCascade => {
                            stream.arc_uniform(base + i) * (g.in_degree(m) as f64) < 1.0
                        }
                        PropagationModel::LinearThreshold { low, high } => {
                            if self.touched[m] != epoch {
                                self.touched[m] = epoch;
                                self.hits[m] = 0;
                            }
                            self.hits[m] += 1;
                            let theta = low + (high - low) * stream.node_uniform(m);
                            self.hits[m] as f64 / g.in_degree(m) as f64 >= theta
                        }
                    };
                    if fires {
                        self.active[m] = epoch;
                        self.next.push(m);
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
            self.activated.extend_from_slice(&self.frontier);
            step += 1;
            if !self.frontier.is_empty() {
                hops += 1;
            }
        }
        hops
    }

    pub fn activated(&self) -> &[usize] {
        &self.activated
    }
}

/// One simulation with a fresh workspace.
pub fn simulate_once(
    g: &Graph,
    model: PropagationModel,
    seeds: &[usize],
    tau: Tau,
    stream: &SimStream,
) -> SpreadSample {
    let mut sim = Simulator::new(g, model);
    let hops = sim.run(seeds, tau, stream);
    SpreadSample {
        activated: sim.activated().to_vec(),
        hops,
    }
}

const CHUNK: u64 = 64;

#[derive(Clone)]
struct Tally {
    activated: u64,
    hops: u64,
    hits: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.activated += other.activated;
        self.hops += other.hops;
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        self
    }
}

/// Averages `n_sims` simulations. Simulation `i` uses the stream
/// `rng_seed ^ i`, so the result does not depend on how work is scheduled.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo(
    g: &Graph,
    model: PropagationModel,
    seeds: &[usize],
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
    communities: Option<&CommunityAssignment>,
) -> SpreadEstimate {
    assert!(n_sims >= 1, "at least one simulation is required");
    let c = communities.map_or(0, |a| a.community_count());
    let mut is_seed = vec![false; if communities.is_some() { g.node_count() } else { 0 }];
    if communities.is_some() {
        for &s in seeds {
            is_seed[s] = true;
        }
    }
    let n = n_sims as u64;
    let chunks = n.div_ceil(CHUNK);
    let empty = Tally {
        activated: 0,
        hops: 0,
        hits: vec![0; c],
    };
    let run_chunk = |chunk: u64| {
        let mut sim = Simulator::new(g, model);
        let mut tally = empty.clone();
        for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
            let hops = sim.run(seeds, tau, &SimStream::for_simulation(rng_seed, i));
            tally.hops += hops as u64;
            tally.activated += sim.activated().len() as u64;
            if let Some(a) = communities {
                for &v in sim.activated() {
                    if !is_seed[v] {
                        tally.hits[a.community_of(v)] += 1;
                    }
                }
            }
        }
        tally
    };
    let total = if chunks == 1 {
        run_chunk(0)
    } else {
        (0..chunks)
            .into_par_iter()
            .map(run_chunk)
            .reduce(|| empty.clone(), Tally::merge)
    };
    let nf = n_sims as f64;
    SpreadEstimate {
        mean_influence: total.activated as f64 / nf,
        mean_hops: total.hops as f64 / nf,
        mean_community_hits: total.hits.iter().map(|&h| h as f64 / nf).collect(),
        samples: n_sims,
        total_activated: total.activated,
    }
}

/// Mean spread of every single node, best first. Ties go to the higher
/// out-degree, then the lower id.
pub fn solo_spread_ranking(
    g: &Graph,
    model: PropagationModel,
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, u64)> = (0..g.node_count())
        .into_par_iter()
        .map(|v| (v, monte_carlo(g, model, &[v], tau, n_sims, rng_seed, None).total_activated))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(g.out_degree(b.0).cmp(&g.out_degree(a.0)))
            .then(a.0.cmp(&b.0))
    });
    ranked
        .into_iter()
        .map(|(v, total)| (v, total as f64 / n_sims as f64))
        .collect()
}
