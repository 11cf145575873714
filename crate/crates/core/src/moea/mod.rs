//! NSGA-II over seed sets for any subset of the six objectives.
//!
//! A run draws two values from its generator before anything else: the seed
//! for the Monte Carlo evaluations and the seed for the solo-spread ranking
//! used by smart initialization. All later randomness (selection, variation)
//! comes from the same generator, so a run is reproducible from its seed.

pub mod init;
pub mod sorting;
pub mod variation;

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{FrontEntry, ParetoFront};
use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objectives::{
    CommunityScoring, Evaluator, NormalizationContext, Objective, ObjectiveMask, ObjectiveVector,
};
use crate::propagation::{PropagationModel, Tau};

pub use init::smart_initialize;
pub use sorting::{crowding_distance, dominates, fast_nondominated_sort, non_dominated_indices};
pub use variation::{mutate, one_point_crossover, Mutation};

/// A seed set and its standing in the current population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    /// Sorted, duplicate-free node ids.
    pub nodes: Vec<usize>,
    pub objectives: Option<ObjectiveVector>,
    /// Maximize-space coordinates for the active objectives; empty before
    /// evaluation.
    pub point: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn new(nodes: Vec<usize>) -> Individual {
        Individual {
            nodes,
            objectives: None,
            point: Vec::new(),
            rank: usize::MAX,
            crowding: 0.0,
        }
    }
}

fn default_population() -> usize {
    100
}
fn default_elites() -> usize {
    2
}
fn default_tournament() -> usize {
    5
}
fn default_lambda() -> f64 {
    0.33
}
fn default_crossover_rate() -> f64 {
    1.0
}
fn default_mutation_rate() -> f64 {
    0.1
}
fn default_init_tau() -> u32 {
    3
}
fn default_active() -> ObjectiveMask {
    ObjectiveMask::ALL
}

/// Optimizer settings. `k` and `active` are filled from the experiment when
/// the block is read from a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoeaConfig {
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_population")]
    pub offspring_size: usize,
    #[serde(default = "default_elites")]
    pub elites: usize,
    #[serde(default = "default_tournament")]
    pub tournament_size: usize,
    #[serde(default = "default_population")]
    pub generations: usize,
    #[serde(default)]
    pub k: usize,
    /// Fraction of the initial population built by smart initialization.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Out-degree threshold for the smart pool; the average out-degree when
    /// absent.
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default = "default_active")]
    pub active: ObjectiveMask,
    #[serde(default = "default_crossover_rate")]
    pub crossover_rate: f64,
    #[serde(default = "default_mutation_rate")]
    pub mutation_rate: f64,
    /// Propagation bound for the solo-spread ranking.
    #[serde(default = "default_init_tau")]
    pub init_tau: u32,
    #[serde(default)]
    pub scoring: CommunityScoring,
}

impl MoeaConfig {
    /// Settings of the reference experiments for a given `k` and mask.
    pub fn new(k: usize, active: ObjectiveMask) -> MoeaConfig {
        MoeaConfig {
            population_size: default_population(),
            offspring_size: default_population(),
            elites: default_elites(),
            tournament_size: default_tournament(),
            generations: default_population(),
            k,
            lambda: default_lambda(),
            theta: None,
            active,
            crossover_rate: default_crossover_rate(),
            mutation_rate: default_mutation_rate(),
            init_tau: default_init_tau(),
            scoring: CommunityScoring::default(),
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.population_size == 0 {
            return fail("population_size must be at least 1".into());
        }
        if self.offspring_size == 0 {
            return fail("offspring_size must be at least 1".into());
        }
        if self.elites >= self.population_size {
            return fail(format!(
                "elites ({}) must be below population_size ({})",
                self.elites, self.population_size
            ));
        }
        if self.tournament_size == 0 {
            return fail("tournament_size must be at least 1".into());
        }
        if self.k == 0 || self.k > node_count {
            return fail(format!("k = {} outside [1, {node_count}]", self.k));
        }
        for (name, x) in [
            ("lambda", self.lambda),
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return fail(format!("{name} = {x} outside [0, 1]"));
            }
        }
        if let Some(t) = self.theta {
            if !t.is_finite() || t < 0.0 {
                return fail(format!("theta = {t} must be a non-negative number"));
            }
        }
        if self.active.len() < 2 {
            return fail(format!("at least two objectives required, got {}", self.active));
        }
        if self.init_tau == 0 {
            return fail("init_tau must be at least 1".into());
        }
        Ok(())
    }
}

/// State of one generation after environmental selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation: usize,
    /// Rank-0 members of the population.
    pub front: Vec<FrontEntry>,
    pub archive_size: usize,
    /// Distinct seed sets evaluated so far.
    pub evaluations: usize,
    pub wall_time_secs: f64,
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub rng_seed: u64,
    /// Seed of the Monte Carlo evaluations used throughout the run.
    pub evaluation_seed: u64,
    /// Generation 0 is the initial population.
    pub generations: Vec<GenerationSnapshot>,
    /// Non-dominated set of every seed set evaluated during the run, one
    /// seed set per distinct point (the first one found).
    pub archive: ParetoFront,
    pub population: Vec<Individual>,
}

/// Non-dominated set maintained incrementally. Seed sets whose point
/// equals one already stored are not added.
struct Archive {
    entries: Vec<FrontEntry>,
}

impl Archive {
    fn offer(&mut self, entry: FrontEntry) {
        if self
            .entries
            .iter()
            .any(|e| e.point == entry.point || dominates(&e.point, &entry.point))
        {
            return;
        }
        self.entries.retain(|e| !dominates(&entry.point, &e.point));
        self.entries.push(entry);
    }
}

struct Run<'a> {
    evaluator: Evaluator<'a>,
    ctx: NormalizationContext,
    cache: HashMap<Vec<usize>, (ObjectiveVector, Vec<f64>)>,
    archive: Archive,
}

impl Run<'_> {
    /// Evaluates the unseen members of `batch` in parallel and fills in every
    /// member's objectives.
    fn evaluate(&mut self, batch: &mut [Individual]) -> Result<()> {
        let mut fresh: Vec<Vec<usize>> = Vec::new();
        let mut queued = HashSet::new();
        for ind in batch.iter() {
            if !self.cache.contains_key(&ind.nodes) && queued.insert(ind.nodes.clone()) {
                fresh.push(ind.nodes.clone());
            }
        }
        let evaluator = &self.evaluator;
        let ctx = &self.ctx;
        let results: Vec<Result<(ObjectiveVector, Vec<f64>)>> = fresh
            .par_iter()
            .map(|nodes| {
                let v = evaluator.evaluate(nodes)?;
                let p = ctx.to_maximize_space(&v)?;
                Ok((v, p))
            })
            .collect();
        for (nodes, r) in fresh.into_iter().zip(results) {
            let (v, p) = r?;
            self.archive.offer(FrontEntry {
                seeds: nodes.clone(),
                objectives: v,
                point: p.clone(),
            });
            self.cache.insert(nodes, (v, p));
        }
        for ind in batch.iter_mut() {
            let (v, p) = &self.cache[&ind.nodes];
            ind.objectives = Some(*v);
            ind.point = p.clone();
        }
        Ok(())
    }
}

/// Assigns rank and crowding to every member and returns the fronts.
fn rank_population(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let points: Vec<Vec<f64>> = pop.iter().map(|i| i.point.clone()).collect();
    let fronts = fast_nondominated_sort(&points);
    for (r, front) in fronts.iter().enumerate() {
        let fp: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&fp)) {
            pop[i].rank = r;
            pop[i].crowding = d;
        }
    }
    fronts
}

/// Crowded comparison: `a` before `b` when its rank is lower, or equal rank
/// and larger crowding.
fn crowded_order(a: &Individual, b: &Individual) -> std::cmp::Ordering {
    a.rank
        .cmp(&b.rank)
        .then_with(|| b.crowding.total_cmp(&a.crowding))
}

fn tournament<'p, R: Rng + ?Sized>(pop: &'p [Individual], size: usize, rng: &mut R) -> &'p Individual {
    let entrants = sample(rng, pop.len(), size.min(pop.len()));
    let mut best = entrants.index(0);
    let mut ties = 1;
    for i in entrants.iter().skip(1) {
        match crowded_order(&pop[i], &pop[best]) {
            std::cmp::Ordering::Less => {
                best = i;
                ties = 1;
            }
            std::cmp::Ordering::Equal => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = i;
                }
            }
            std::cmp::Ordering::Greater => {}
        }
    }
    &pop[best]
}

/// Keeps `size` members of `union` by rank, then by crowding.
fn environmental_selection(mut union: Vec<Individual>, size: usize) -> Vec<Individual> {
    let fronts = rank_population(&mut union);
    let mut keep = Vec::with_capacity(size);
    for front in fronts {
        if keep.len() + front.len() <= size {
            keep.extend(front);
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| union[b].crowding.total_cmp(&union[a].crowding).then(a.cmp(&b)));
            last.truncate(size - keep.len());
            keep.extend(last);
        }
        if keep.len() == size {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("selected once")).collect()
}

fn front_of(pop: &[Individual]) -> Vec<FrontEntry> {
    pop.iter()
        .filter(|i| i.rank == 0)
        .map(|i| FrontEntry {
            seeds: i.nodes.clone(),
            objectives: i.objectives.expect("evaluated"),
            point: i.point.clone(),
        })
        .collect()
}

/// Runs NSGA-II. `assignment` is required when the communities or fairness
/// objective is active; when given otherwise it is still used so that the
/// reported vectors carry both scores.
#[allow(clippy::too_many_arguments)]
pub fn run_nsga2(
    g: &Graph,
    assignment: Option<&CommunityAssignment>,
    model: PropagationModel,
    tau: Tau,
    n_sims: usize,
    cfg: &MoeaConfig,
    rng_seed: u64,
) -> Result<RunHistory> {
    cfg.validate(g.node_count())?;
    let needs_communities =
        cfg.active.contains(Objective::Communities) || cfg.active.contains(Objective::Fairness);
    if needs_communities && assignment.is_none() {
        return Err(Error::Config(format!(
            "objectives {} need a community assignment",
            cfg.active
        )));
    }
    let ctx = NormalizationContext::new(g, cfg.k, tau, cfg.active)?;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let evaluation_seed: u64 = rng.random();
    let evaluator =
        Evaluator::new(g, assignment, model, tau, n_sims, evaluation_seed)?.with_scoring(cfg.scoring);
    let mut run = Run {
        evaluator,
        ctx,
        cache: HashMap::new(),
        archive: Archive { entries: Vec::new() },
    };

    let started = Instant::now();
    let mut population: Vec<Individual> = smart_initialize(g, model, cfg, n_sims, &mut rng)
        .into_iter()
        .map(Individual::new)
        .collect();
    run.evaluate(&mut population)?;
    rank_population(&mut population);
    let mut generations = vec![GenerationSnapshot {
        generation: 0,
        front: front_of(&population),
        archive_size: run.archive.entries.len(),
        evaluations: run.cache.len(),
        wall_time_secs: started.elapsed().as_secs_f64(),
    }];

    for generation in 1..=cfg.generations {
        let started = Instant::now();
        let mut offspring: Vec<Individual> = Vec::with_capacity(cfg.offspring_size + cfg.elites);
        while offspring.len() < cfg.offspring_size {
            let a = tournament(&population, cfg.tournament_size, &mut rng).nodes.clone();
            let b = tournament(&population, cfg.tournament_size, &mut rng).nodes.clone();
            let (c1, c2) = if rng.random_bool(cfg.crossover_rate) {
                one_point_crossover(&a, &b, cfg.k, &mut rng)
            } else {
                (a, b)
            };
            for child in [c1, c2] {
                if offspring.len() == cfg.offspring_size {
                    break;
                }
                let child = if rng.random_bool(cfg.mutation_rate) {
                    mutate(&child, g, cfg.k, &mut rng)
                } else {
                    child
                };
                offspring.push(Individual::new(child));
            }
        }
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| crowded_order(&population[a], &population[b]).then(a.cmp(&b)));
        offspring.extend(order.iter().take(cfg.elites).map(|&i| population[i].clone()));

        run.evaluate(&mut offspring)?;
        population.extend(offspring);
        population = environmental_selection(population, cfg.population_size);
        generations.push(GenerationSnapshot {
            generation,
            front: front_of(&population),
            archive_size: run.archive.entries.len(),
            evaluations: run.cache.len(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        });
    }

    let mut entries = run.archive.entries;
    entries.sort_by(|a, b| a.seeds.cmp(&b.seeds));
    Ok(RunHistory {
        rng_seed,
        evaluation_seed,
        generations,
        archive: ParetoFront { entries, ctx },
        population,
    })
}
