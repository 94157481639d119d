//! Directed multigraphs, admissible paths and reachability.
//!
//! Convention used throughout the crate: an edge `i -> k` carries a
//! contraction sending the k-th attractor piece *into* the i-th one, so a
//! path is traversed forwards along edge directions while its composed map
//! acts backwards, from the terminal piece to the initial piece. This is
//! fixed once here and enforced by the `Path` chaining invariant; it is
//! easy to invert by accident otherwise.

use serde::Serialize;
use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on path-enumeration depth; two edges per vertex already
/// yield about a million paths at depth 20.
pub const DEFAULT_PATH_CAP: usize = 20;

/// 1-based vertex id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex(pub usize);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type EdgeId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub source: Vertex,
    pub target: Vertex,
}

/// A finite admissible path: consecutive edges chain target-to-source.
/// Infinite addresses are handled as truncations of growing `Path`s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    edges: Vec<usize>, // indices into DirectedMultigraph::edges
    initial: Vertex,
    terminal: Vertex,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn initial(&self) -> Vertex {
        self.initial
    }

    pub fn terminal(&self) -> Vertex {
        self.terminal
    }

    pub fn edge_indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn edge_ids(&self, graph: &DirectedMultigraph) -> Vec<EdgeId> {
        self.edges.iter().map(|&i| graph.edges[i].id).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub vertices_without_outgoing: Vec<usize>,
    pub dangling_edges: Vec<EdgeId>,
    pub valid: bool,
}

#[derive(Clone, Debug)]
pub struct DirectedMultigraph {
    n: usize,
    edges: Vec<Edge>,             // sorted by edge id
    out: Vec<Vec<usize>>,         // per vertex, edge indices, id order
    incoming: Vec<Vec<usize>>,    // per vertex, edge indices, id order
}

impl DirectedMultigraph {
    /// Build from an edge list. Edge ids must be unique; endpoints are
    /// range-checked but the outgoing-edge requirement is left to
    /// `validate`, which reports rather than fails.
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("vertex count must be >= 1".into()));
        }
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidGraph(format!("duplicate edge id {}", w[0].id)));
            }
        }
        let mut out = vec![Vec::new(); n + 1];
        let mut incoming = vec![Vec::new(); n + 1];
        for (idx, e) in edges.iter().enumerate() {
            if e.source.0 == 0 || e.source.0 > n {
                return Err(Error::VertexOutOfRange(e.source.0, n));
            }
            if e.target.0 == 0 || e.target.0 > n {
                return Err(Error::VertexOutOfRange(e.target.0, n));
            }
            out[e.source.0].push(idx);
            incoming[e.target.0].push(idx);
        }
        Ok(DirectedMultigraph {
            n,
            edges,
            out,
            incoming,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (1..=self.n).map(Vertex)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn outgoing(&self, v: Vertex) -> &[usize] {
        &self.out[v.0]
    }

    pub fn incoming(&self, v: Vertex) -> &[usize] {
        &self.incoming[v.0]
    }

    /// `C[i][k]` = number of edges from i to k.
    pub fn adjacency_counts(&self) -> Vec<Vec<u128>> {
        let mut c = vec![vec![0u128; self.n + 1]; self.n + 1];
        for e in &self.edges {
            c[e.source.0][e.target.0] += 1;
        }
        c
    }

    pub fn validate(&self) -> ValidationReport {
        let mut missing = Vec::new();
        for v in 1..=self.n {
            if self.out[v].is_empty() {
                missing.push(v);
            }
        }
        // endpoints are range-checked at construction, so dangling edges can
        // only enter through deserialization paths that bypass `new`
        let dangling = Vec::new();
        ValidationReport {
            valid: missing.is_empty(),
            vertices_without_outgoing: missing,
            dangling_edges: dangling,
        }
    }

    fn reachable(&self, start: Vertex, reversed: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n + 1];
        seen[start.0] = true;
        let mut queue = VecDeque::from([start.0]);
        while let Some(v) = queue.pop_front() {
            let nbrs = if reversed {
                &self.incoming[v]
            } else {
                &self.out[v]
            };
            for &ei in nbrs {
                let w = if reversed {
                    self.edges[ei].source.0
                } else {
                    self.edges[ei].target.0
                };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// True iff every ordered vertex pair is joined by a path.
    pub fn is_strongly_connected(&self) -> Result<bool> {
        let report = self.validate();
        if !report.valid {
            return Err(Error::InvalidGraph(format!(
                "vertices without outgoing edges: {:?}",
                report.vertices_without_outgoing
            )));
        }
        let fwd = self.reachable(Vertex(1), false);
        let bwd = self.reachable(Vertex(1), true);
        Ok((1..=self.n).all(|v| fwd[v] && bwd[v]))
    }

    /// Number of depth-`p` paths from i to j, via the p-th power of the
    /// adjacency-count matrix.
    pub fn path_count(&self, i: Vertex, j: Vertex, p: usize) -> u128 {
        let cp = self.count_matrix_power(p);
        cp[i.0][j.0]
    }

    /// Number of depth-`p` paths leaving i, any terminal vertex.
    pub fn path_count_from(&self, i: Vertex, p: usize) -> u128 {
        let cp = self.count_matrix_power(p);
        (1..=self.n).map(|j| cp[i.0][j]).sum()
    }

    pub fn count_matrix_power(&self, p: usize) -> Vec<Vec<u128>> {
        let c = self.adjacency_counts();
        let mut acc = identity_counts(self.n);
        for _ in 0..p {
            acc = mul_counts(&acc, &c, self.n);
        }
        acc
    }

    /// All depth-`p` paths from `i` to `j`, depth-first in edge-id order.
    pub fn enumerate_paths(&self, i: Vertex, j: Vertex, p: usize, cap: usize) -> Result<Vec<Path>> {
        self.enumerate_filtered(i, Some(j), p, cap)
    }

    /// All depth-`p` paths leaving `i`, regardless of terminal vertex.
    pub fn enumerate_terminal_paths(&self, i: Vertex, p: usize, cap: usize) -> Result<Vec<Path>> {
        self.enumerate_filtered(i, None, p, cap)
    }

    fn enumerate_filtered(
        &self,
        i: Vertex,
        j: Option<Vertex>,
        p: usize,
        cap: usize,
    ) -> Result<Vec<Path>> {
        if p == 0 {
            return Err(Error::InvalidGraph("path length must be >= 1".into()));
        }
        if p > cap {
            return Err(Error::DepthCap { depth: p, cap });
        }
        if i.0 == 0 || i.0 > self.n {
            return Err(Error::VertexOutOfRange(i.0, self.n));
        }
        let mut paths = Vec::new();
        let mut stack = Vec::with_capacity(p);
        self.dfs_paths(i, j, p, &mut stack, &mut paths);
        Ok(paths)
    }

    fn dfs_paths(
        &self,
        v: Vertex,
        goal: Option<Vertex>,
        remaining: usize,
        stack: &mut Vec<usize>,
        paths: &mut Vec<Path>,
    ) {
        if remaining == 0 {
            if goal.map_or(true, |g| g == v) {
                paths.push(Path {
                    edges: stack.clone(),
                    initial: Vertex(self.edges[stack[0]].source.0),
                    terminal: v,
                });
            }
            return;
        }
        for &ei in &self.out[v.0] {
            stack.push(ei);
            self.dfs_paths(self.edges[ei].target, goal, remaining - 1, stack, paths);
            stack.pop();
        }
    }

    /// Build a path from explicit edge indices, validating the chaining.
    pub fn path_from_indices(&self, indices: &[usize]) -> Result<Path> {
        if indices.is_empty() {
            return Err(Error::InvalidGraph("path length must be >= 1".into()));
        }
        for w in indices.windows(2) {
            let a = &self.edges[w[0]];
            let b = &self.edges[w[1]];
            if a.target != b.source {
                return Err(Error::InvalidGraph(format!(
                    "edges {} and {} do not chain: target {} != source {}",
                    a.id, b.id, a.target, b.source
                )));
            }
        }
        Ok(Path {
            edges: indices.to_vec(),
            initial: self.edges[indices[0]].source,
            terminal: self.edges[*indices.last().unwrap()].target,
        })
    }

    /// Concatenation of two chaining paths.
    pub fn concat(&self, a: &Path, b: &Path) -> Result<Path> {
        if a.terminal != b.initial {
            return Err(Error::InvalidGraph(format!(
                "cannot concatenate: terminal {} != initial {}",
                a.terminal, b.initial
            )));
        }
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        Ok(Path {
            edges,
            initial: a.initial,
            terminal: b.terminal,
        })
    }

    /// Shortest closed path through `v` (lexicographically first among the
    /// shortest, by edge id), or None when no cycle passes through `v`.
    pub fn shortest_cycle_through(&self, v: Vertex) -> Option<Path> {
        // BFS over vertices from v; parent edge chosen in id order.
        let mut parent: Vec<Option<usize>> = vec![None; self.n + 1];
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([v.0]);
        seen[v.0] = true;
        let mut closing: Option<usize> = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for &ei in &self.out[u] {
                let w = self.edges[ei].target.0;
                if w == v.0 {
                    closing = Some(ei);
                    break 'bfs;
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(ei);
                    queue.push_back(w);
                }
            }
        }
        let closing = closing?;
        let mut rev = vec![closing];
        let mut u = self.edges[closing].source.0;
        while u != v.0 {
            let ei = parent[u].expect("BFS parent chain broken");
            rev.push(ei);
            u = self.edges[ei].source.0;
        }
        rev.reverse();
        Some(Path {
            edges: rev,
            initial: v,
            terminal: v,
        })
    }

    /// Decode the `rank`-th depth-`p` path leaving `i` in depth-first
    /// edge-id order, without enumerating the rest.
    pub fn unrank_path(&self, i: Vertex, p: usize, rank: u128) -> Path {
        let mut counts = Vec::with_capacity(p);
        for q in 0..p {
            counts.push(self.count_matrix_power(q));
        }
        let mut edges = Vec::with_capacity(p);
        let mut v = i;
        let mut r = rank;
        for q in (0..p).rev() {
            for &ei in &self.out[v.0] {
                let w = self.edges[ei].target;
                let below: u128 = (1..=self.n).map(|j| counts[q][w.0][j]).sum();
                if r < below {
                    edges.push(ei);
                    v = w;
                    break;
                }
                r -= below;
            }
        }
        debug_assert_eq!(edges.len(), p);
        Path {
            edges,
            initial: i,
            terminal: v,
        }
    }
}

fn identity_counts(n: usize) -> Vec<Vec<u128>> {
    let mut m = vec![vec![0u128; n + 1]; n + 1];
    for (i, row) in m.iter_mut().enumerate().skip(1) {
        row[i] = 1;
    }
    m
}

fn mul_counts(a: &[Vec<u128>], b: &[Vec<u128>], n: usize) -> Vec<Vec<u128>> {
    let mut out = vec![vec![0u128; n + 1]; n + 1];
    for i in 1..=n {
        for k in 1..=n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 1..=n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(id: EdgeId, s: usize, t: usize) -> Edge {
        Edge {
            id,
            source: Vertex(s),
            target: Vertex(t),
        }
    }

    #[test]
    fn single_self_loop_is_valid() {
        let g = DirectedMultigraph::new(1, vec![edge(1, 1, 1)]).unwrap();
        assert!(g.validate().valid);
    }

    #[test]
    fn missing_outgoing_edge_reported() {
        let g = DirectedMultigraph::new(2, vec![edge(1, 1, 2)]).unwrap();
        let r = g.validate();
        assert!(!r.valid);
        assert_eq!(r.vertices_without_outgoing, vec![2]);
    }

    #[test]
    fn two_cycle_valid_and_strongly_connected() {
        let g = DirectedMultigraph::new(2, vec![edge(1, 1, 2), edge(2, 2, 1)]).unwrap();
        assert!(g.validate().valid);
        assert!(g.is_strongly_connected().unwrap());
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let err = DirectedMultigraph::new(2, vec![edge(1, 1, 5), edge(2, 2, 1)]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange(5, 2)));
    }

    #[test]
    fn one_vertex_two_loops_strongly_connected() {
        let g = DirectedMultigraph::new(1, vec![edge(1, 1, 1), edge(2, 1, 1)]).unwrap();
        assert!(g.is_strongly_connected().unwrap());
    }

    #[test]
    fn chain_plus_loop_not_strongly_connected() {
        let g = DirectedMultigraph::new(2, vec![edge(1, 1, 2), edge(2, 2, 2)]).unwrap();
        assert!(!g.is_strongly_connected().unwrap());
    }

    #[test]
    fn invalid_graph_refused_by_connectivity() {
        let g = DirectedMultigraph::new(2, vec![edge(1, 1, 2)]).unwrap();
        assert!(g.is_strongly_connected().is_err());
    }

    #[test]
    fn cantor_paths_depth_three() {
        let g = DirectedMultigraph::new(1, vec![edge(1, 1, 1), edge(2, 1, 1)]).unwrap();
        let paths = g
            .enumerate_paths(Vertex(1), Vertex(1), 3, DEFAULT_PATH_CAP)
            .unwrap();
        assert_eq!(paths.len(), 8);
        assert_eq!(g.path_count(Vertex(1), Vertex(1), 3), 8);
    }

    #[test]
    fn no_route_gives_empty_list() {
        let g = DirectedMultigraph::new(2, vec![edge(1, 1, 1), edge(2, 2, 1)]).unwrap();
        let paths = g
            .enumerate_paths(Vertex(1), Vertex(2), 1, DEFAULT_PATH_CAP)
            .unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn fibonacci_counts() {
        // C = [[1,1],[1,0]]
        let g =
            DirectedMultigraph::new(2, vec![edge(1, 1, 1), edge(2, 1, 2), edge(3, 2, 1)]).unwrap();
        let paths = g
            .enumerate_paths(Vertex(1), Vertex(1), 4, DEFAULT_PATH_CAP)
            .unwrap();
        assert_eq!(paths.len(), 5);
        let from1 = g.enumerate_terminal_paths(Vertex(1), 3, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(from1.len(), 5); // sum of row 1 of C^3
        assert_eq!(g.path_count_from(Vertex(1), 3), 5);
    }

    #[test]
    fn terminal_paths_cantor() {
        let g = DirectedMultigraph::new(1, vec![edge(1, 1, 1), edge(2, 1, 1)]).unwrap();
        assert_eq!(
            g.enumerate_terminal_paths(Vertex(1), 2, DEFAULT_PATH_CAP)
                .unwrap()
                .len(),
            4
        );
        let single = DirectedMultigraph::new(1, vec![edge(1, 1, 1)]).unwrap();
        assert_eq!(
            single
                .enumerate_terminal_paths(Vertex(1), 5, DEFAULT_PATH_CAP)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn depth_cap_enforced() {
        let g = DirectedMultigraph::new(1, vec![edge(1, 1, 1), edge(2, 1, 1)]).unwrap();
        assert!(matches!(
            g.enumerate_paths(Vertex(1), Vertex(1), 25, DEFAULT_PATH_CAP),
            Err(Error::DepthCap { depth: 25, cap: 20 })
        ));
    }

    #[test]
    fn shortest_cycle_through_each_vertex() {
        let g =
            DirectedMultigraph::new(2, vec![edge(1, 1, 1), edge(2, 1, 2), edge(3, 2, 1)]).unwrap();
        let c1 = g.shortest_cycle_through(Vertex(1)).unwrap();
        assert_eq!(c1.len(), 1);
        let c2 = g.shortest_cycle_through(Vertex(2)).unwrap();
        assert_eq!(c2.len(), 2);
        assert_eq!(c2.initial(), Vertex(2));
        assert_eq!(c2.terminal(), Vertex(2));
    }

    #[test]
    fn unrank_matches_enumeration() {
        let g =
            DirectedMultigraph::new(2, vec![edge(1, 1, 1), edge(2, 1, 2), edge(3, 2, 1)]).unwrap();
        let all = g.enumerate_terminal_paths(Vertex(1), 5, DEFAULT_PATH_CAP).unwrap();
        let total = g.path_count_from(Vertex(1), 5);
        assert_eq!(all.len() as u128, total);
        for (r, p) in all.iter().enumerate() {
            let q = g.unrank_path(Vertex(1), 5, r as u128);
            assert_eq!(&q, p);
        }
    }
}
