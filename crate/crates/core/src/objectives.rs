//! The six influence-maximization objectives and their normalization into a
//! common "bigger is better" unit box.
//!
//! | objective | raw value | normalized |
//! |---|---|---|
//! | influence | expected activated count `I` | `I / |V|` |
//! | seed size | `|S|` | `1 - |S| / k` |
//! | communities | `1 - JSD_N` of activated non-seeds | as is |
//! | fairness | `1 - JSD_N` of seeds | as is |
//! | budget | sum of seed out-degrees `B` | `1 - min(B, b) / b` |
//! | time | mean productive hops `T` | `1 - T / tau` |
//!
//! `JSD_N` is the Jensen–Shannon divergence (base 2) to the uniform
//! distribution over communities, divided by its largest possible value,
//! which is reached by a one-hot distribution.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::propagation::{monte_carlo, PropagationModel, SimStream, Simulator, SpreadEstimate, Tau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Influence,
    SeedSize,
    Communities,
    Fairness,
    Budget,
    Time,
}

impl Objective {
    pub const ALL: [Objective; 6] = [
        Objective::Influence,
        Objective::SeedSize,
        Objective::Communities,
        Objective::Fairness,
        Objective::Budget,
        Objective::Time,
    ];

    pub fn symbol(self) -> char {
        match self {
            Objective::Influence => 'I',
            Objective::SeedSize => 'S',
            Objective::Communities => 'C',
            Objective::Fairness => 'F',
            Objective::Budget => 'B',
            Objective::Time => 'T',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Influence => "influence",
            Objective::SeedSize => "seed_size",
            Objective::Communities => "communities",
            Objective::Fairness => "fairness",
            Objective::Budget => "budget",
            Objective::Time => "time",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn from_symbol(c: char) -> Option<Objective> {
        Objective::ALL.into_iter().find(|o| o.symbol() == c)
    }
}

/// Subset of the six objectives, iterated in canonical order
/// (I, S, C, F, B, T).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ObjectiveMask(u8);

impl ObjectiveMask {
    pub const ALL: ObjectiveMask = ObjectiveMask(0b11_1111);

    pub fn new(objectives: &[Objective]) -> ObjectiveMask {
        ObjectiveMask(objectives.iter().fold(0, |m, o| m | (1 << o.index())))
    }

    pub fn contains(self, o: Objective) -> bool {
        self.0 & (1 << o.index()) != 0
    }

    pub fn is_subset_of(self, other: ObjectiveMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Objective> {
        Objective::ALL.into_iter().filter(move |o| self.contains(*o))
    }

    /// The six masks used to report results: influence and seed size alone,
    /// each of the four other objectives added to them, and all six.
    pub fn evaluation_masks() -> [ObjectiveMask; 6] {
        use Objective::*;
        [
            ObjectiveMask::new(&[Influence, SeedSize]),
            ObjectiveMask::new(&[Influence, SeedSize, Communities]),
            ObjectiveMask::new(&[Influence, SeedSize, Fairness]),
            ObjectiveMask::new(&[Influence, SeedSize, Budget]),
            ObjectiveMask::new(&[Influence, SeedSize, Time]),
            ObjectiveMask::ALL,
        ]
    }

    /// Position of `o` among the mask's coordinates.
    pub fn position(self, o: Objective) -> Option<usize> {
        self.iter().position(|x| x == o)
    }
}

impl fmt::Display for ObjectiveMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == ObjectiveMask::ALL {
            return f.write_str("all");
        }
        let parts: Vec<String> = self.iter().map(|o| o.symbol().to_string()).collect();
        f.write_str(&parts.join("-"))
    }
}

impl FromStr for ObjectiveMask {
    type Err = Error;

    /// Accepts `all`, symbol strings such as `I-S-C` or `ISC`, or
    /// comma-separated names such as `influence,seed_size`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(ObjectiveMask::ALL);
        }
        let mut objs = Vec::new();
        if s.contains(',') || s.chars().any(|c| c.is_ascii_lowercase()) {
            for name in s.split(',') {
                let name = name.trim();
                let o = Objective::ALL
                    .into_iter()
                    .find(|o| o.name() == name)
                    .ok_or_else(|| Error::Config(format!("unknown objective {name:?}")))?;
                objs.push(o);
            }
        } else {
            for c in s.chars().filter(|c| *c != '-') {
                objs.push(
                    Objective::from_symbol(c)
                        .ok_or_else(|| Error::Config(format!("unknown objective symbol {c:?}")))?,
                );
            }
        }
        Ok(ObjectiveMask::new(&objs))
    }
}

impl Serialize for ObjectiveMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ObjectiveMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<Objective>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(ObjectiveMask::new(&v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Raw objective values of one seed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub influence: f64,
    pub seed_size: usize,
    /// `NaN` when no community assignment was available.
    pub communities_score: f64,
    /// `NaN` when no community assignment was available.
    pub fairness_score: f64,
    pub budget: usize,
    pub time: f64,
}

impl ObjectiveVector {
    pub fn get(&self, o: Objective) -> f64 {
        match o {
            Objective::Influence => self.influence,
            Objective::SeedSize => self.seed_size as f64,
            Objective::Communities => self.communities_score,
            Objective::Fairness => self.fairness_score,
            Objective::Budget => self.budget as f64,
            Objective::Time => self.time,
        }
    }
}

/// Ranges used to map raw objectives into the unit box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationContext {
    pub node_count: usize,
    pub max_seed_size: usize,
    pub budget_cap: usize,
    pub tau: Tau,
    pub active: ObjectiveMask,
}

impl NormalizationContext {
    pub fn new(g: &Graph, k: usize, tau: Tau, active: ObjectiveMask) -> Result<Self> {
        if k == 0 || k > g.node_count() {
            return Err(Error::Config(format!(
                "k = {k} outside [1, {}]",
                g.node_count()
            )));
        }
        let ctx = NormalizationContext {
            node_count: g.node_count(),
            max_seed_size: k,
            budget_cap: budget_cap(g, k),
            tau,
            active,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    fn validate(&self) -> Result<()> {
        if self.active.contains(Objective::Time) && self.tau.steps().is_none() {
            return Err(Error::Config("time objective requires a finite tau".into()));
        }
        Ok(())
    }

    pub fn with_active(&self, active: ObjectiveMask) -> Result<Self> {
        let ctx = NormalizationContext { active, ..*self };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Normalized coordinate of one objective; `None` if the objective cannot
    /// be normalized (missing communities, or time with unbounded tau).
    pub fn normalize(&self, v: &ObjectiveVector, o: Objective) -> Option<f64> {
        let x = match o {
            Objective::Influence => v.influence / self.node_count as f64,
            Objective::SeedSize => 1.0 - v.seed_size as f64 / self.max_seed_size as f64,
            Objective::Communities => v.communities_score,
            Objective::Fairness => v.fairness_score,
            Objective::Budget => {
                if self.budget_cap == 0 {
                    1.0
                } else {
                    1.0 - v.budget.min(self.budget_cap) as f64 / self.budget_cap as f64
                }
            }
            Objective::Time => 1.0 - v.time / self.tau.steps()? as f64,
        };
        if x.is_nan() {
            None
        } else {
            Some(x.clamp(0.0, 1.0))
        }
    }

    /// Coordinates of `v` for the active objectives.
    pub fn to_maximize_space(&self, v: &ObjectiveVector) -> Result<Vec<f64>> {
        self.active
            .iter()
            .map(|o| {
                self.normalize(v, o).ok_or_else(|| {
                    Error::Config(format!("objective {} cannot be normalized", o.name()))
                })
            })
            .collect()
    }

    /// All six normalized coordinates, `None` where unavailable.
    pub fn normalize_all(&self, v: &ObjectiveVector) -> [Option<f64>; 6] {
        Objective::ALL.map(|o| self.normalize(v, o))
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::Distribution(format!("{what} has negative or NaN entries")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Distribution(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen–Shannon divergence with base-2 logarithms, in `[0, 1]`.
pub fn jsd(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::Distribution(format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    check_distribution(p, "p")?;
    check_distribution(q, "q")?;
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let d = 0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m);
    Ok(d.clamp(0.0, 1.0))
}

/// Divergence of `p` from the uniform distribution over `c` outcomes,
/// divided by the divergence of a one-hot distribution from it.
pub fn jsd_normalized(p: &[f64], c: usize) -> Result<f64> {
    if c < 2 {
        return Err(Error::Distribution(format!(
            "normalization needs at least 2 outcomes, got {c}"
        )));
    }
    if p.len() != c {
        return Err(Error::Distribution(format!("expected {c} entries, got {}", p.len())));
    }
    let uniform = vec![1.0 / c as f64; c];
    let mut delta = vec![0.0; c];
    delta[0] = 1.0;
    Ok((jsd(p, &uniform)? / jsd(&delta, &uniform)?).clamp(0.0, 1.0))
}

/// `1 - JSD_N` of the distribution proportional to `counts`; 0 when all
/// counts are zero.
pub fn balance_score(counts: &[f64]) -> Result<f64> {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let p: Vec<f64> = counts.iter().map(|&x| x / total).collect();
    Ok(1.0 - jsd_normalized(&p, counts.len())?)
}

/// How evenly the activated non-seed nodes spread over communities.
pub fn communities_objective(estimate: &SpreadEstimate, assignment: &CommunityAssignment) -> Result<f64> {
    if estimate.mean_community_hits.len() != assignment.community_count() {
        return Err(Error::Assignment(
            "estimate was computed without this community assignment".into(),
        ));
    }
    balance_score(&estimate.mean_community_hits)
}

/// How evenly the seeds spread over communities; 0 for an empty seed set.
pub fn fairness_objective(seeds: &[usize], assignment: &CommunityAssignment) -> Result<f64> {
    let mut counts = vec![0.0; assignment.community_count()];
    for &s in seeds {
        counts[assignment.community_of(s)] += 1.0;
    }
    balance_score(&counts)
}

/// Sum of the seeds' out-degrees.
pub fn budget(g: &Graph, seeds: &[usize]) -> usize {
    seeds.iter().map(|&v| g.out_degree(v)).sum()
}

/// Sum of the `k` largest out-degrees.
pub fn budget_cap(g: &Graph, k: usize) -> usize {
    let mut d = g.out_degrees();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d.iter().take(k).sum()
}

/// How the communities objective aggregates Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunityScoring {
    /// Score the distribution of per-community mean counts.
    #[default]
    DistributionOfMeans,
    /// Average the score of every individual simulation.
    MeanOfRunScores,
}

/// Evaluates seed sets with a fixed Monte Carlo configuration. Identical
/// seed sets always receive identical vectors.
#[derive(Clone)]
pub struct Evaluator<'a> {
    pub graph: &'a Graph,
    pub communities: Option<&'a CommunityAssignment>,
    pub model: PropagationModel,
    pub tau: Tau,
    pub n_sims: usize,
    pub rng_seed: u64,
    pub scoring: CommunityScoring,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        graph: &'a Graph,
        communities: Option<&'a CommunityAssignment>,
        model: PropagationModel,
        tau: Tau,
        n_sims: usize,
        rng_seed: u64,
    ) -> Result<Self> {
        if n_sims == 0 {
            return Err(Error::Config("n_sims must be at least 1".into()));
        }
        model.validate()?;
        if let Some(a) = communities {
            if a.node_count() != graph.node_count() {
                return Err(Error::Assignment(format!(
                    "assignment covers {} nodes, graph has {}",
                    a.node_count(),
                    graph.node_count()
                )));
            }
            if a.community_count() < 2 {
                return Err(Error::Assignment("at least two communities are required".into()));
            }
        }
        Ok(Evaluator {
            graph,
            communities,
            model,
            tau,
            n_sims,
            rng_seed,
            scoring: CommunityScoring::default(),
        })
    }

    pub fn with_scoring(mut self, scoring: CommunityScoring) -> Self {
        self.scoring = scoring;
        self
    }

    pub fn evaluate(&self, seeds: &[usize]) -> Result<ObjectiveVector> {
        if let Some(&bad) = seeds.iter().find(|&&v| v >= self.graph.node_count()) {
            return Err(Error::NodeOutOfRange(bad));
        }
        let est = monte_carlo(
            self.graph,
            self.model,
            seeds,
            self.tau,
            self.n_sims,
            self.rng_seed,
            self.communities,
        );
        let (communities_score, fairness_score) = match self.communities {
            Some(a) => {
                let c = match self.scoring {
                    CommunityScoring::DistributionOfMeans => communities_objective(&est, a)?,
                    CommunityScoring::MeanOfRunScores => self.mean_of_run_scores(seeds, a)?,
                };
                (c, fairness_objective(seeds, a)?)
            }
            None => (f64::NAN, f64::NAN),
        };
        Ok(ObjectiveVector {
            influence: est.mean_influence,
            seed_size: seeds.len(),
            communities_score,
            fairness_score,
            budget: budget(self.graph, seeds),
            time: est.mean_hops,
        })
    }

    fn mean_of_run_scores(&self, seeds: &[usize], a: &CommunityAssignment) -> Result<f64> {
        let mut sim = Simulator::new(self.graph, self.model);
        let mut is_seed = vec![false; self.graph.node_count()];
        for &s in seeds {
            is_seed[s] = true;
        }
        let mut counts = vec![0.0; a.community_count()];
        let mut sum = 0.0;
        for i in 0..self.n_sims as u64 {
            sim.run(seeds, self.tau, &SimStream::for_simulation(self.rng_seed, i));
            counts.iter_mut().for_each(|c| *c = 0.0);
            for &v in sim.activated() {
                if !is_seed[v] {
                    counts[a.community_of(v)] += 1.0;
                }
            }
            sum += balance_score(&counts)?;
        }
        Ok(sum / self.n_sims as f64)
    }
}

/// One-shot evaluation of a seed set.
pub fn evaluate(
    g: &Graph,
    communities: Option<&CommunityAssignment>,
    model: PropagationModel,
    seeds: &[usize],
    tau: Tau,
    n_sims: usize,
    rng_seed: u64,
) -> Result<ObjectiveVector> {
    Evaluator::new(g, communities, model, tau, n_sims, rng_seed)?.evaluate(seeds)
}
