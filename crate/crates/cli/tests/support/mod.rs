//! Synthetic graphs shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use imopt::{CommunityAssignment, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Degree-corrected block model: `arcs` distinct directed arcs over `n`
/// nodes split into `c` equal blocks. Endpoints are drawn with Pareto
/// activity weights; a target stays in the source's block with
/// probability `p_in`.
pub fn dc_sbm(n: usize, c: usize, arcs: usize, p_in: f64, seed: u64) -> (Graph, CommunityAssignment) {
    assert!(arcs <= n * (n - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block: Vec<usize> = (0..n).map(|v| v * c / n).collect();
    let weight: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / 2.5))
        .collect();
    let members: Vec<Vec<usize>> = (0..c).map(|b| (0..n).filter(|&v| block[v] == b).collect()).collect();
    let all: Vec<usize> = (0..n).collect();
    let pick = |rng: &mut ChaCha8Rng, pool: &[usize]| {
        let total: f64 = pool.iter().map(|&v| weight[v]).sum();
        let mut t = rng.random::<f64>() * total;
        for &v in pool {
            t -= weight[v];
            if t <= 0.0 {
                return v;
            }
        }
        *pool.last().unwrap()
    };
    let mut edges = BTreeSet::new();
    while edges.len() < arcs {
        let u = pick(&mut rng, &all);
        let v = if rng.random_bool(p_in) {
            pick(&mut rng, &members[block[u]])
        } else {
            pick(&mut rng, &all)
        };
        if u != v {
            edges.insert((u, v));
        }
    }
    let g = Graph::from_edges(n, edges, true).unwrap();
    (g, CommunityAssignment::from_labels(&block))
}

/// Largest weakly connected component of `g` with the assignment
/// restricted to it.
pub fn lwcc(g: &Graph, a: &CommunityAssignment) -> (Graph, CommunityAssignment) {
    let sub = g.largest_weakly_connected_component();
    let a = a.restrict(g, &sub).unwrap();
    (sub, a)
}

/// Dense undirected block graph in the size range of the jazz musicians
/// network (198 nodes, about 2,700 edges).
pub fn jazz_like(seed: u64) -> Graph {
    let (d, _) = dc_sbm(198, 4, 5484, 0.7, seed);
    let edges: BTreeSet<(usize, usize)> = (0..d.node_count())
        .flat_map(|u| d.out_neighbors(u).iter().map(move |&v| (u.min(v), u.max(v))))
        .collect();
    Graph::from_edges(198, edges, false)
        .unwrap()
        .largest_weakly_connected_component()
}

/// Random directed graph with `nodes` nodes and `arcs` distinct arcs.
pub fn random_digraph(rng: &mut ChaCha8Rng, nodes: usize, arcs: usize) -> Graph {
    let mut edges = BTreeSet::new();
    while edges.len() < arcs.min(nodes * (nodes - 1)) {
        let u = rng.random_range(0..nodes);
        let v = rng.random_range(0..nodes);
        if u != v {
            edges.insert((u, v));
        }
    }
    Graph::from_edges(nodes, edges, true).unwrap()
}
