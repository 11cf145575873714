//! Community partitions: modularity-based detection, modularity scoring and
//! assignment files.
//!
//! Detection runs Louvain-style greedy modularity optimization on the
//! symmetrized graph: repeated sweeps of single-node moves, aggregation of the
//! resulting communities into super-nodes, and so on until a level makes no
//! move. A final sweep of single-node moves on the original graph leaves the
//! partition locally optimal with respect to moving any one node.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

/// Dense node-to-community labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl CommunityAssignment {
    /// Builds an assignment from arbitrary community ids, renumbering them
    /// densely in ascending order of the original id.
    pub fn from_labels(raw: &[usize]) -> CommunityAssignment {
        let ids: BTreeMap<usize, usize> = raw
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(dense, id)| (id, dense))
            .collect();
        let labels: Vec<usize> = raw.iter().map(|id| ids[id]).collect();
        let mut sizes = vec![0; ids.len()];
        for &c in &labels {
            sizes[c] += 1;
        }
        CommunityAssignment { labels, sizes }
    }

    /// Renumbers in order of first appearance over node ids.
    fn from_labels_first_seen(raw: &[usize]) -> CommunityAssignment {
        let mut ids = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|c| {
                let next = ids.len();
                *ids.entry(*c).or_insert(next)
            })
            .collect();
        let mut sizes = vec![0; ids.len()];
        for &c in &labels {
            sizes[c] += 1;
        }
        CommunityAssignment { labels, sizes }
    }

    #[inline]
    pub fn community_of(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Nodes whose community has fewer than `min_size` members.
    pub fn nodes_in_small_communities(&self, min_size: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&v| self.sizes[self.labels[v]] < min_size)
            .collect()
    }

    /// Restricts the assignment to the nodes of `sub`, matched by label
    /// against `parent`. Communities left empty disappear.
    pub fn restrict(&self, parent: &Graph, sub: &Graph) -> Result<CommunityAssignment> {
        let index = parent.label_index();
        let raw = sub
            .labels()
            .iter()
            .map(|l| {
                index
                    .get(l)
                    .map(|&v| self.labels[v])
                    .ok_or_else(|| Error::Assignment(format!("node {l} not in parent graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CommunityAssignment::from_labels(&raw))
    }

    /// Reads a `node_label community_id` file for graph `g`.
    pub fn load(path: impl AsRef<Path>, g: &Graph) -> Result<CommunityAssignment> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), g, path)
    }

    pub fn read<R: BufRead>(reader: R, g: &Graph, origin: impl AsRef<Path>) -> Result<CommunityAssignment> {
        let origin = origin.as_ref();
        let index = g.label_index();
        let mut raw = vec![usize::MAX; g.node_count()];
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                message,
            };
            let mut tok = t.split_whitespace();
            let (Some(a), Some(b)) = (tok.next(), tok.next()) else {
                return Err(parse_err("expected \"node community\"".into()));
            };
            let label: Label = a
                .parse()
                .map_err(|_| parse_err(format!("invalid node id {a:?}")))?;
            let community: usize = b
                .parse()
                .map_err(|_| parse_err(format!("invalid community id {b:?}")))?;
            let &v = index
                .get(&label)
                .ok_or_else(|| Error::Assignment(format!("node {label} unknown")))?;
            if raw[v] != usize::MAX {
                return Err(Error::Assignment(format!("node {label} assigned twice")));
            }
            raw[v] = community;
        }
        if let Some(v) = raw.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Assignment(format!("node {} unassigned", g.label(v))));
        }
        Ok(CommunityAssignment::from_labels(&raw))
    }

    pub fn write<W: Write>(&self, g: &Graph, mut out: W) -> std::io::Result<()> {
        for (v, &c) in self.labels.iter().enumerate() {
            writeln!(out, "{} {}", g.label(v), c)?;
        }
        Ok(())
    }

    pub fn save(&self, g: &Graph, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write(g, &mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// Undirected weighted graph used during detection. `loops[i]` holds the
/// weight of edges internal to super-node `i`, counted once.
struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl WeightedGraph {
    fn symmetrized(g: &Graph) -> WeightedGraph {
        let n = g.node_count();
        let mut sets: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        for u in 0..n {
            for &v in g.out_neighbors(u) {
                sets[u].insert(v);
                sets[v].insert(u);
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = sets
            .into_iter()
            .map(|s| {
                let mut v: Vec<(usize, f64)> = s.into_iter().map(|j| (j, 1.0)).collect();
                v.sort_by_key(|&(j, _)| j);
                v
            })
            .collect();
        Self::from_parts(adj, vec![0.0; n])
    }

    fn from_parts(adj: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> WeightedGraph {
        let strength: Vec<f64> = adj
            .iter()
            .zip(&loops)
            .map(|(a, l)| a.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        let two_m = strength.iter().sum();
        WeightedGraph {
            adj,
            loops,
            strength,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Sweeps single-node moves until none improves modularity. Returns
    /// whether any node moved.
    fn local_moves(&self, comm: &mut [usize], rng: &mut ChaCha8Rng) -> bool {
        const EPS: f64 = 1e-12;
        let n = self.len();
        if self.two_m == 0.0 {
            return false;
        }
        let mut tot = vec![0.0; n];
        for i in 0..n {
            tot[comm[i]] += self.strength[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut links: HashMap<usize, f64> = HashMap::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let own = comm[i];
                let k = self.strength[i];
                links.clear();
                for &(j, w) in &self.adj[i] {
                    *links.entry(comm[j]).or_insert(0.0) += w;
                }
                tot[own] -= k;
                let gain = |c: usize, links: &HashMap<usize, f64>| {
                    links.get(&c).copied().unwrap_or(0.0) - tot[c] * k / self.two_m
                };
                let mut best = own;
                let mut best_gain = gain(own, &links);
                let mut candidates: Vec<usize> = links.keys().copied().collect();
                candidates.sort_unstable();
                for c in candidates {
                    let g = gain(c, &links);
                    if g > best_gain + EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k;
                if best != own {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                return moved_any;
            }
        }
    }

    fn aggregate(&self, comm: &[usize]) -> WeightedGraph {
        let count = comm.iter().max().map_or(0, |&c| c + 1);
        let mut loops = vec![0.0; count];
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        for i in 0..self.len() {
            loops[comm[i]] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let (ci, cj) = (comm[i], comm[j]);
                if ci == cj {
                    // each internal edge is seen from both endpoints
                    loops[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        Self::from_parts(adj, loops)
    }
}

fn renumber(comm: &mut [usize]) {
    let mut ids = HashMap::new();
    for c in comm.iter_mut() {
        let next = ids.len();
        *c = *ids.entry(*c).or_insert(next);
    }
}

/// Louvain passes from singletons, finished by a single-node refinement on
/// the original graph. Returns the membership of every node.
fn louvain(base: &WeightedGraph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut membership: Vec<usize> = (0..base.len()).collect();
    let mut level = base.aggregate(&membership);
    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        if !level.local_moves(&mut comm, rng) {
            break;
        }
        renumber(&mut comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        level = level.aggregate(&comm);
    }
    base.local_moves(&mut membership, rng);
    membership
}

/// Number of independent Louvain orderings tried by [`detect_communities`].
const RESTARTS: usize = 8;

/// Greedy modularity community detection: the best of several Louvain runs
/// with shuffled node orders. Deterministic for a fixed `rng_seed`; directed
/// graphs are symmetrized.
pub fn detect_communities(g: &Graph, rng_seed: u64) -> CommunityAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let base = WeightedGraph::symmetrized(g);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..RESTARTS {
        let membership = louvain(&base, &mut rng);
        let q = modularity_weighted(&base, &membership);
        if best.as_ref().is_none_or(|(bq, _)| q > *bq + 1e-12) {
            best = Some((q, membership));
        }
    }
    let (_, membership) = best.expect("at least one restart");
    CommunityAssignment::from_labels_first_seen(&membership)
}

/// Newman–Girvan modularity of `a` on the symmetrized, unweighted graph.
/// Zero for graphs without edges.
pub fn modularity(g: &Graph, a: &CommunityAssignment) -> f64 {
    let w = WeightedGraph::symmetrized(g);
    modularity_weighted(&w, a.labels())
}

fn modularity_weighted(w: &WeightedGraph, comm: &[usize]) -> f64 {
    if w.two_m == 0.0 {
        return 0.0;
    }
    let count = comm.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0.0; count];
    let mut tot = vec![0.0; count];
    for i in 0..w.len() {
        tot[comm[i]] += w.strength[i];
        inside[comm[i]] += 2.0 * w.loops[i];
        for &(j, wij) in &w.adj[i] {
            if comm[j] == comm[i] {
                inside[comm[i]] += wij;
            }
        }
    }
    inside
        .iter()
        .zip(&tot)
        .map(|(&i, &t)| i / w.two_m - (t / w.two_m).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                e.push((a, b));
            }
        }
        e
    }

    #[test]
    fn modularity_reference_values() {
        let k3 = Graph::from_edges(3, clique_edges(&[0, 1, 2]), false).unwrap();
        let one = CommunityAssignment::from_labels(&[0, 0, 0]);
        assert!(modularity(&k3, &one).abs() < 1e-15);
        let singletons = CommunityAssignment::from_labels(&[0, 1, 2]);
        assert!((modularity(&k3, &singletons) + 1.0 / 3.0).abs() < 1e-15);

        let mut e = clique_edges(&[0, 1, 2, 3]);
        e.extend(clique_edges(&[4, 5, 6, 7]));
        let g = Graph::from_edges(8, e, false).unwrap();
        let split = CommunityAssignment::from_labels(&[0, 0, 0, 0, 1, 1, 1, 1]);
        assert!((modularity(&g, &split) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn detects_joined_cliques() {
        let mut e = clique_edges(&[0, 1, 2, 3]);
        e.extend(clique_edges(&[4, 5, 6, 7]));
        e.push((3, 4));
        let g = Graph::from_edges(8, e, false).unwrap();
        for seed in 0..5 {
            let a = detect_communities(&g, seed);
            assert_eq!(a.community_count(), 2);
            assert_eq!(a.sizes(), &[4, 4]);
            assert!((0..4).all(|v| a.community_of(v) == a.community_of(0)));
            assert!((4..8).all(|v| a.community_of(v) == a.community_of(4)));
        }
    }

    #[test]
    fn complete_graph_is_one_community() {
        let g = Graph::from_edges(5, clique_edges(&[0, 1, 2, 3, 4]), false).unwrap();
        let a = detect_communities(&g, 7);
        assert_eq!(a.community_count(), 1);
    }

    #[test]
    fn detection_is_deterministic_per_seed() {
        let mut e = Vec::new();
        for i in 0..30usize {
            e.push((i, (i * 7 + 3) % 30));
            e.push((i, (i + 1) % 30));
        }
        let g = Graph::from_edges(30, e, true).unwrap();
        assert_eq!(detect_communities(&g, 3), detect_communities(&g, 3));
    }

    #[test]
    fn edgeless_graph_keeps_singletons() {
        let g = Graph::from_edges(3, Vec::new(), false).unwrap();
        let a = detect_communities(&g, 0);
        assert_eq!(a.community_count(), 3);
        assert_eq!(modularity(&g, &a), 0.0);
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let mut e = clique_edges(&[0, 1, 2]);
        e.extend(clique_edges(&[3, 4, 5]));
        e.push((2, 3));
        let g = Graph::from_edges(6, e, false).unwrap();
        let w = WeightedGraph::symmetrized(&g);
        let comm = vec![0, 0, 0, 1, 1, 1];
        let agg = w.aggregate(&comm);
        assert!((modularity_weighted(&w, &comm) - modularity_weighted(&agg, &[0, 1])).abs() < 1e-12);
        assert_eq!(agg.two_m, w.two_m);
    }

    #[test]
    fn assignment_file_round_trip_and_errors() {
        let g = Graph::read_edge_list("10 11\n11 12\n".as_bytes(), false, "mem").unwrap().0;
        let a = CommunityAssignment::read("10 0\n11 0\n12 1\n".as_bytes(), &g, "mem").unwrap();
        assert_eq!(a.community_count(), 2);
        assert_eq!(a.sizes(), &[2, 1]);

        let mut buf = Vec::new();
        a.write(&g, &mut buf).unwrap();
        let back = CommunityAssignment::read(buf.as_slice(), &g, "mem").unwrap();
        assert_eq!(back, a);

        let g3 = Graph::from_edges(3, vec![(0, 1), (1, 2)], false).unwrap();
        let err = CommunityAssignment::read("0 0\n1 0\n".as_bytes(), &g3, "mem").unwrap_err();
        assert_eq!(err.to_string(), "community assignment: node 2 unassigned");
        let err = CommunityAssignment::read("0 0\n1 0\n2 1\n9 1\n".as_bytes(), &g3, "mem").unwrap_err();
        assert!(err.to_string().contains("node 9 unknown"));
        let err = CommunityAssignment::read("0 0\n1 0\n1 1\n2 1\n".as_bytes(), &g3, "mem").unwrap_err();
        assert!(err.to_string().contains("node 1 assigned twice"));
    }

    #[test]
    fn dense_renumbering() {
        let a = CommunityAssignment::from_labels(&[7, 3, 7, 9]);
        assert_eq!(a.labels(), &[1, 0, 1, 2]);
        assert_eq!(a.sizes(), &[1, 2, 1]);
        assert_eq!(a.nodes_in_small_communities(2), vec![1, 3]);
    }
}
