//! Population initialization seeded by single-node spread.

use rand::seq::index::sample;
use rand::Rng;

use crate::graph::Graph;
use crate::propagation::{solo_spread_ranking, PropagationModel, Tau};

use super::MoeaConfig;

/// Number of smart individuals in a population of `population` for a
/// fraction `lambda`, i.e. `ceil(lambda * population)`.
pub fn smart_count(lambda: f64, population: usize) -> usize {
    // the epsilon keeps 0.33 * 100 from rounding up to 34
    ((lambda * population as f64 - 1e-9).ceil().max(0.0) as usize).min(population)
}

/// Candidate pool for smart individuals: the `k` best solo spreaders whose
/// out-degree reaches `theta`. Falls back to the unfiltered top `k` when the
/// filter removes everything.
pub fn smart_pool(g: &Graph, model: PropagationModel, k: usize, theta: f64, tau: Tau, n_sims: usize, rng_seed: u64) -> Vec<usize> {
    let top: Vec<usize> = solo_spread_ranking(g, model, tau, n_sims, rng_seed)
        .into_iter()
        .take(k)
        .map(|(v, _)| v)
        .collect();
    let filtered: Vec<usize> = top
        .iter()
        .copied()
        .filter(|&v| g.out_degree(v) as f64 >= theta)
        .collect();
    if filtered.is_empty() {
        log::warn!("no top-{k} node has out-degree >= {theta}; using the unfiltered pool");
        top
    } else {
        filtered
    }
}

fn random_individual<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let size = rng.random_range(1..=k);
    let mut nodes = sample(rng, n, size).into_vec();
    nodes.sort_unstable();
    nodes
}

fn roulette_individual<R: Rng + ?Sized>(g: &Graph, pool: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    let size = rng.random_range(1..=k);
    let mut remaining: Vec<usize> = pool.to_vec();
    let mut nodes = Vec::with_capacity(size);
    while nodes.len() < size && !remaining.is_empty() {
        let total: usize = remaining.iter().map(|&v| g.out_degree(v)).sum();
        let at = if total == 0 {
            rng.random_range(0..remaining.len())
        } else {
            let mut ticket = rng.random_range(0..total);
            remaining
                .iter()
                .position(|&v| {
                    let d = g.out_degree(v);
                    if ticket < d {
                        true
                    } else {
                        ticket -= d;
                        false
                    }
                })
                .expect("ticket below total")
        };
        nodes.push(remaining.swap_remove(at));
    }
    let n = g.node_count();
    while nodes.len() < size {
        let v = rng.random_range(0..n);
        if !nodes.contains(&v) {
            nodes.push(v);
        }
    }
    nodes.sort_unstable();
    nodes
}

/// Builds the initial population: `ceil(lambda * population_size)` smart
/// individuals sampled by out-degree roulette from [`smart_pool`], the rest
/// uniformly random. Every individual has a uniform random size in `1..=k`.
pub fn smart_initialize<R: Rng + ?Sized>(
    g: &Graph,
    model: PropagationModel,
    cfg: &MoeaConfig,
    n_sims: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let smart = smart_count(cfg.lambda, cfg.population_size);
    let mut population = Vec::with_capacity(cfg.population_size);
    if smart > 0 {
        let theta = cfg.theta.unwrap_or_else(|| g.average_out_degree());
        let ranking_seed = rng.random();
        let pool = smart_pool(g, model, cfg.k, theta, Tau::Steps(cfg.init_tau), n_sims, ranking_seed);
        for _ in 0..smart {
            population.push(roulette_individual(g, &pool, cfg.k, rng));
        }
    }
    while population.len() < cfg.population_size {
        population.push(random_individual(n, cfg.k, rng));
    }
    population
}
