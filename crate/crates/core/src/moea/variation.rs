//! Set-based variation: one-point crossover and the five graph-aware and
//! random mutation operators.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::graph::Graph;

/// The five mutation operators, picked uniformly by [`mutate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Add a uniformly random non-member.
    GlobalRandomInsert,
    /// Drop a uniformly random member.
    GlobalRandomRemoval,
    /// Replace a member by one of its out-neighbors.
    LocalNeighbor,
    /// Replace a member by a node two out-hops away, weighted by out-degree.
    LocalNeighborSecondDegree,
    /// Replace a member by any non-member, weighted by `1 / (out-degree + 1)`.
    GlobalLowDegree,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::GlobalRandomInsert,
        Mutation::GlobalRandomRemoval,
        Mutation::LocalNeighbor,
        Mutation::LocalNeighborSecondDegree,
        Mutation::GlobalLowDegree,
    ];
}

fn normalize(mut nodes: Vec<usize>) -> Vec<usize> {
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

fn concat_dedup(prefix: &[usize], suffix: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(prefix.len() + suffix.len());
    for &v in prefix.iter().chain(suffix) {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn truncate_random<R: Rng + ?Sized>(mut nodes: Vec<usize>, k: usize, rng: &mut R) -> Vec<usize> {
    if nodes.len() > k {
        let keep = sample(rng, nodes.len(), k);
        nodes = keep.iter().map(|i| nodes[i]).collect();
    }
    nodes
}

/// One-point crossover with explicit cut positions: `a[..cut_a] ++ b[cut_b..]`
/// and `b[..cut_b] ++ a[cut_a..]`, duplicates dropped (first occurrence
/// kept). Children are returned unsorted and untruncated.
pub fn crossover_at(a: &[usize], b: &[usize], cut_a: usize, cut_b: usize) -> (Vec<usize>, Vec<usize>) {
    (
        concat_dedup(&a[..cut_a], &b[cut_b..]),
        concat_dedup(&b[..cut_b], &a[cut_a..]),
    )
}

/// One-point crossover of two seed sets. Cut points are drawn uniformly in
/// `1..=len` for each parent. Oversized children are cut down to a uniform
/// random `k`-subset; an empty child receives one random parent node.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &[usize],
    b: &[usize],
    k: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let cut_a = rng.random_range(1..=a.len().max(1)).min(a.len());
    let cut_b = rng.random_range(1..=b.len().max(1)).min(b.len());
    let (c1, c2) = crossover_at(a, b, cut_a, cut_b);
    let mut finish = |c: Vec<usize>| {
        let c = if c.is_empty() {
            let pool: Vec<usize> = a.iter().chain(b).copied().collect();
            pool.choose(rng).map(|&v| vec![v]).unwrap_or_default()
        } else {
            c
        };
        normalize(truncate_random(c, k, rng))
    };
    let c1 = finish(c1);
    let c2 = finish(c2);
    (c1, c2)
}

/// Applies one uniformly chosen mutation operator.
pub fn mutate<R: Rng + ?Sized>(nodes: &[usize], g: &Graph, k: usize, rng: &mut R) -> Vec<usize> {
    let op = *Mutation::ALL.choose(rng).expect("non-empty");
    mutate_with(op, nodes, g, k, rng)
}

/// Applies `op`; infeasible operators return the input unchanged.
pub fn mutate_with<R: Rng + ?Sized>(
    op: Mutation,
    nodes: &[usize],
    g: &Graph,
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let n = g.node_count();
    let mut out = nodes.to_vec();
    if nodes.is_empty() {
        return out;
    }
    let is_member = |v: usize| nodes.binary_search(&v).is_ok();
    match op {
        Mutation::GlobalRandomInsert => {
            if nodes.len() >= k || nodes.len() >= n {
                return out;
            }
            loop {
                let v = rng.random_range(0..n);
                if !is_member(v) {
                    out.push(v);
                    break;
                }
            }
        }
        Mutation::GlobalRandomRemoval => {
            if nodes.len() <= 1 {
                return out;
            }
            out.remove(rng.random_range(0..nodes.len()));
        }
        Mutation::LocalNeighbor => {
            let at = rng.random_range(0..nodes.len());
            let candidates: Vec<usize> = g
                .out_neighbors(nodes[at])
                .iter()
                .copied()
                .filter(|&v| !is_member(v))
                .collect();
            match candidates.choose(rng) {
                Some(&v) => out[at] = v,
                None => return out,
            }
        }
        Mutation::LocalNeighborSecondDegree => {
            let at = rng.random_range(0..nodes.len());
            let mut candidates: Vec<usize> = g
                .out_neighbors(nodes[at])
                .iter()
                .flat_map(|&w| g.out_neighbors(w).iter().copied())
                .filter(|&v| !is_member(v))
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            if candidates.is_empty() {
                return out;
            }
            let weights: Vec<f64> = candidates.iter().map(|&v| g.out_degree(v) as f64).collect();
            out[at] = match WeightedIndex::new(&weights) {
                Ok(dist) => candidates[dist.sample(rng)],
                Err(_) => *candidates.choose(rng).expect("non-empty"),
            };
        }
        Mutation::GlobalLowDegree => {
            if nodes.len() >= n {
                return out;
            }
            let at = rng.random_range(0..nodes.len());
            let weights: Vec<f64> = (0..n)
                .map(|v| if is_member(v) { 0.0 } else { 1.0 / (g.out_degree(v) as f64 + 1.0) })
                .collect();
            let dist = WeightedIndex::new(&weights).expect("a non-member exists");
            out[at] = dist.sample(rng);
        }
    }
    normalize(out)
}
