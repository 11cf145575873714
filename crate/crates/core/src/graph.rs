//! Immutable compressed-adjacency graphs, edge-list ingestion and the
//! preprocessing steps applied before optimization (largest weakly connected
//! component extraction, node removal).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Original node identifier as found in an edge-list file.
pub type Label = i64;

/// A static graph in compressed sparse row form.
///
/// Node ids are dense in `0..node_count()`. Each node keeps the label it had
/// in the source file. Undirected graphs store every edge in both directions,
/// so `out_degree == in_degree` for every node. Adjacency lists are sorted
/// ascending and contain neither self-loops nor duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    labels: Vec<Label>,
}

/// Counts of what was discarded while reading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

/// Population statistics of a degree sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub avg: f64,
    pub std: f64,
    pub max: usize,
    pub min: usize,
}

impl Graph {
    /// Builds a graph over nodes `0..node_count` labelled by their index.
    pub fn from_edges<I>(node_count: usize, edges: I, directed: bool) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..node_count as Label).collect();
        Self::build(labels, edges, directed).map(|(g, _)| g)
    }

    /// Builds a graph with explicit labels. Self-loops and duplicate edges are
    /// dropped and counted in the returned report.
    pub fn with_labels<I>(labels: Vec<Label>, edges: I, directed: bool) -> Result<(Graph, LoadReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build(labels, edges, directed)
    }

    fn build<I>(labels: Vec<Label>, edges: I, directed: bool) -> Result<(Graph, LoadReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut report = LoadReport::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            report.lines += 1;
            if u >= n {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(Error::NodeOutOfRange(v));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            if directed {
                pairs.push((u, v));
            } else {
                pairs.push((u.min(v), u.max(v)));
            }
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicate_edges = before - pairs.len();

        let arcs: Vec<(usize, usize)> = if directed {
            pairs
        } else {
            let mut both = Vec::with_capacity(pairs.len() * 2);
            for &(u, v) in &pairs {
                both.push((u, v));
                both.push((v, u));
            }
            both
        };

        let (out_offsets, out_targets) = csr(n, arcs.iter().copied());
        let (in_offsets, in_sources) = csr(n, arcs.iter().map(|&(u, v)| (v, u)));
        Ok((
            Graph {
                directed,
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
                labels,
            },
            report,
        ))
    }

    /// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
    /// are comments. Labels are compacted to `0..n` in first-seen order.
    pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
        Self::load_edge_list_with_report(path, directed).map(|(g, _)| g)
    }

    pub fn load_edge_list_with_report(
        path: impl AsRef<Path>,
        directed: bool,
    ) -> Result<(Graph, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_edge_list(BufReader::new(file), directed, path)
    }

    /// Parses an edge list from any reader; `origin` is only used in error messages.
    pub fn read_edge_list<R: BufRead>(
        reader: R,
        directed: bool,
        origin: impl AsRef<Path>,
    ) -> Result<(Graph, LoadReport)> {
        let origin = origin.as_ref();
        let mut index: HashMap<Label, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut intern = |label: Label| {
            *index.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            })
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut next_id = || -> Result<Label> {
                let token = tokens.next().ok_or_else(|| Error::Parse {
                    path: origin.to_path_buf(),
                    line: lineno + 1,
                    message: "expected two node ids".into(),
                })?;
                token.parse::<Label>().map_err(|_| Error::Parse {
                    path: origin.to_path_buf(),
                    line: lineno + 1,
                    message: format!("invalid node id {token:?}"),
                })
            };
            let u = next_id()?;
            let v = next_id()?;
            edges.push((intern(u), intern(v)));
        }
        Self::build(labels, edges, directed)
    }

    /// Writes the graph as an edge list using the original labels. Undirected
    /// edges are written once.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for u in 0..self.node_count() {
            for &v in self.out_neighbors(u) {
                if self.directed || u < v {
                    writeln!(out, "{} {}", self.labels[u], self.labels[v])?;
                }
            }
        }
        Ok(())
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_edge_list(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct edges; an undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.out_targets.len()
        } else {
            self.out_targets.len() / 2
        }
    }

    /// Number of stored arcs (twice the edge count for undirected graphs).
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Position of `v`'s first out-arc in the global arc array. Arc `i` of
    /// node `v` has id `arc_offset(v) + i`.
    #[inline]
    pub fn arc_offset(&self, v: usize) -> usize {
        self.out_offsets[v]
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.out_degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Map from original label to internal id.
    pub fn label_index(&self) -> HashMap<Label, usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    pub fn average_out_degree(&self) -> f64 {
        self.out_targets.len() as f64 / self.node_count() as f64
    }

    pub fn average_in_degree(&self) -> f64 {
        // every arc has one head and one tail
        self.average_out_degree()
    }

    /// Induced subgraph on the nodes flagged in `keep`, preserving relative
    /// order and labels.
    pub fn induced_subgraph(&self, keep: &[bool]) -> Result<Graph> {
        assert_eq!(keep.len(), self.node_count());
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut labels = Vec::new();
        for (v, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            remap[v] = labels.len();
            labels.push(self.labels[v]);
        }
        if labels.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut edges = Vec::new();
        for u in 0..self.node_count() {
            if remap[u] == usize::MAX {
                continue;
            }
            for &v in self.out_neighbors(u) {
                if remap[v] != usize::MAX && (self.directed || u < v) {
                    edges.push((remap[u], remap[v]));
                }
            }
        }
        Self::build(labels, edges, self.directed).map(|(g, _)| g)
    }

    /// Removes `nodes` and every incident edge.
    pub fn remove_nodes(&self, nodes: &[usize]) -> Result<Graph> {
        let mut keep = vec![true; self.node_count()];
        for &v in nodes {
            if v >= self.node_count() {
                return Err(Error::NodeOutOfRange(v));
            }
            keep[v] = false;
        }
        self.induced_subgraph(&keep)
    }

    /// Weakly connected component id of every node (edge direction ignored).
    /// Components are numbered in order of their smallest node id.
    pub fn weak_components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut uf = UnionFind::new(n);
        for u in 0..n {
            for &v in self.out_neighbors(u) {
                uf.union(u, v);
            }
        }
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|v| {
                let r = uf.find(v);
                if ids[r] == usize::MAX {
                    ids[r] = next;
                    next += 1;
                }
                ids[r]
            })
            .collect()
    }

    /// Induced subgraph on the largest weakly connected component. Ties go to
    /// the component holding the smallest original label.
    pub fn largest_weakly_connected_component(&self) -> Graph {
        let comp = self.weak_components();
        let count = comp.iter().max().map_or(0, |&c| c + 1);
        let mut sizes = vec![0usize; count];
        let mut min_label = vec![Label::MAX; count];
        for (v, &c) in comp.iter().enumerate() {
            sizes[c] += 1;
            min_label[c] = min_label[c].min(self.labels[v]);
        }
        let best = (0..count)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(min_label[b].cmp(&min_label[a])))
            .expect("non-empty graph has a component");
        let keep: Vec<bool> = comp.iter().map(|&c| c == best).collect();
        self.induced_subgraph(&keep)
            .expect("largest component is non-empty")
    }

    /// Statistics over out-degrees.
    pub fn degree_summary(&self) -> DegreeStats {
        degree_stats((0..self.node_count()).map(|v| self.out_degree(v)))
    }

    /// Statistics over in+out degree for directed graphs; equal to
    /// [`Graph::degree_summary`] for undirected ones.
    pub fn total_degree_summary(&self) -> DegreeStats {
        if self.directed {
            degree_stats((0..self.node_count()).map(|v| self.out_degree(v) + self.in_degree(v)))
        } else {
            self.degree_summary()
        }
    }
}

fn degree_stats(degrees: impl Iterator<Item = usize> + Clone) -> DegreeStats {
    let n = degrees.clone().count() as f64;
    let sum: usize = degrees.clone().sum();
    let avg = sum as f64 / n;
    let var = degrees.clone().map(|d| (d as f64 - avg).powi(2)).sum::<f64>() / n;
    DegreeStats {
        avg,
        std: var.sqrt(),
        max: degrees.clone().max().unwrap_or(0),
        min: degrees.min().unwrap_or(0),
    }
}

fn csr(n: usize, arcs: impl Iterator<Item = (usize, usize)> + Clone) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    for (u, _) in arcs.clone() {
        offsets[u + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0usize; offsets[n]];
    for (u, v) in arcs {
        targets[cursor[u]] = v;
        cursor[u] += 1;
    }
    for u in 0..n {
        targets[offsets[u]..offsets[u + 1]].sort_unstable();
    }
    (offsets, targets)
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}
