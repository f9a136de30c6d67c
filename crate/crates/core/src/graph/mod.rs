//! Undirected simple graphs grown one vertex or edge at a time.
//!
//! Vertices are dense integers `0..n` assigned in creation order and never
//! relabeled. Adjacency is a dense bit matrix; degrees are cached.

mod class;
mod io;

pub use class::GraphClass;
pub use io::parse_edge_list;

use std::collections::VecDeque;
use std::fmt;

use crate::error::{invalid, Result};

/// Hop distance between two vertices; `None` when no path exists.
pub type Distance = Option<u32>;

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
    degrees: Vec<u32>,
    edges: usize,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let stride = words_for(n);
        Graph {
            n,
            stride,
            bits: vec![0; n * stride],
            degrees: vec![0; n],
            edges: 0,
        }
    }

    /// The single-vertex graph every construction starts from.
    pub fn singleton() -> Self {
        Self::empty(1)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are simple")
    }

    /// Cycle `0-1-...-(n-1)-0`. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Self::from_edges(n, &edges).expect("cycle edges are simple")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v);
            }
        }
        g
    }

    /// Star with center 0 and `leaves` pendant vertices.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are simple")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.degrees.iter().map(|&d| d as usize)
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.row(u)[v / WORD] >> (v % WORD)) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * WORD + bit)
            })
        })
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    fn set(&mut self, u: usize, v: usize) {
        let s = self.stride;
        self.bits[u * s + v / WORD] |= 1 << (v % WORD);
        self.bits[v * s + u / WORD] |= 1 << (u % WORD);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edges += 1;
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(invalid(format!("vertex {v} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    /// Adds an isolated vertex, returning its label.
    pub fn push_vertex(&mut self) -> usize {
        let n = self.n + 1;
        let stride = words_for(n);
        if stride != self.stride {
            let mut bits = vec![0; n * stride];
            for v in 0..self.n {
                bits[v * stride..v * stride + self.stride].copy_from_slice(self.row(v));
            }
            self.bits = bits;
            self.stride = stride;
        } else {
            self.bits.resize(n * stride, 0);
        }
        self.degrees.push(0);
        self.n = n;
        n - 1
    }

    /// In-place form of [`Graph::add_vertex_attached`].
    pub fn attach_vertex(&mut self, anchor: usize) -> Result<usize> {
        self.check_vertex(anchor)?;
        let v = self.push_vertex();
        self.set(anchor, v);
        Ok(v)
    }

    /// In-place form of [`Graph::add_edge`].
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(invalid(format!("self-loop on vertex {u}")));
        }
        if self.has_edge(u, v) {
            return Err(invalid(format!("edge {u}-{v} already present")));
        }
        self.set(u, v);
        Ok(())
    }

    /// Returns a copy with a new vertex `n` joined only to `anchor`.
    pub fn add_vertex_attached(&self, anchor: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.attach_vertex(anchor)?;
        Ok(g)
    }

    pub fn add_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.insert_edge(u, v)?;
        Ok(g)
    }

    pub fn bfs_distances(&self, source: usize) -> Result<Vec<Distance>> {
        self.check_vertex(source)?;
        Ok(self.bfs_limited(source, u32::MAX))
    }

    /// BFS that stops expanding past `limit` hops; farther vertices read as `None`.
    fn bfs_limited(&self, source: usize, limit: u32) -> Vec<Distance> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::with_capacity(self.n);
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            if dx >= limit {
                continue;
            }
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Row-major `n x n` table of hop distances.
    pub fn all_pairs_distances(&self) -> Vec<Distance> {
        let mut table = Vec::with_capacity(self.n * self.n);
        for s in 0..self.n {
            table.extend(self.bfs_limited(s, u32::MAX));
        }
        table
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_limited(0, u32::MAX).iter().all(Option::is_some)
    }

    /// Length of the shortest cycle, `None` for forests.
    ///
    /// For every edge `uv`, the shortest cycle through it is one more than the
    /// `u`-`v` distance with the edge removed.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut scratch = self.clone();
        for (u, v) in self.edges().collect::<Vec<_>>() {
            scratch.clear(u, v);
            let limit = best.map_or(u32::MAX, |b| b as u32);
            if let Some(d) = scratch.bfs_limited(u, limit)[v] {
                let len = d as usize + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
            scratch.set(u, v);
        }
        best
    }

    fn clear(&mut self, u: usize, v: usize) {
        let s = self.stride;
        self.bits[u * s + v / WORD] &= !(1 << (v % WORD));
        self.bits[v * s + u / WORD] &= !(1 << (u % WORD));
        self.degrees[u] -= 1;
        self.degrees[v] -= 1;
        self.edges -= 1;
    }

    /// Whether `self + uv` still belongs to `class`, assuming `uv` is a legal
    /// simple-graph edge and `self` is already in the class.
    ///
    /// A new edge closes a shortest new cycle of length `dist(u, v) + 1`.
    pub fn edge_is_class_legal(&self, u: usize, v: usize, class: GraphClass) -> bool {
        match class.min_new_edge_distance() {
            None => false,
            Some(0) => true,
            Some(min) => match self.bfs_limited(u, min)[v] {
                None => true,
                Some(d) => d >= min,
            },
        }
    }

    /// Every absent pair `(u, v)`, `u < v`, whose addition keeps the graph in `class`.
    pub fn class_legal_edges(&self, class: GraphClass) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match class.min_new_edge_distance() {
            None => {}
            Some(0) | Some(1) | Some(2) => {
                for u in 0..self.n {
                    for v in u + 1..self.n {
                        if !self.has_edge(u, v) {
                            out.push((u, v));
                        }
                    }
                }
            }
            Some(min) => {
                for u in 0..self.n {
                    let dist = self.bfs_limited(u, min);
                    for (v, d) in dist.iter().enumerate().skip(u + 1) {
                        if d.map_or(true, |d| d >= min) {
                            out.push((u, v));
                        }
                    }
                }
            }
        }
        out
    }

    /// Copy with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(invalid("permutation length differs from vertex count"));
        }
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.insert_edge(perm[u], perm[v])?;
        }
        Ok(g)
    }

    /// Comma-plus-space separated `u-v` pairs in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        self.edges()
            .map(|(u, v)| format!("{u}-{v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            if self.degree(v) == 0 {
                out.push_str(&format!("    {v};\n"));
            }
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("    {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, [{}])", self.n, self.to_edge_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attach_grows_forced_shapes() {
        let k2 = Graph::singleton().add_vertex_attached(0).unwrap();
        assert_eq!(k2.edge_count(), 1);
        let p3 = k2.add_vertex_attached(1).unwrap();
        assert_eq!(p3.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let star = p3.add_vertex_attached(1).unwrap();
        assert_eq!(star.degree(1), 3);
        assert_eq!(star, Graph::star(3).relabeled(&[1, 0, 2, 3]).unwrap());
        assert!(matches!(k2.add_vertex_attached(2), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn add_edge_cases() {
        let c3 = Graph::path(3).add_edge(0, 2).unwrap();
        assert_eq!(c3, Graph::cycle(3));
        let chord = Graph::cycle(4).add_edge(0, 2).unwrap();
        assert_eq!(chord.edge_count(), 5);
        assert_eq!(chord.degree(0), 3);
        assert!(Graph::path(2).add_edge(0, 1).is_err());
        assert!(Graph::path(2).add_edge(1, 1).is_err());
    }

    #[test]
    fn distances() {
        let c4 = Graph::cycle(4);
        assert_eq!(c4.bfs_distances(0).unwrap(), vec![Some(0), Some(1), Some(2), Some(1)]);
        assert_eq!(Graph::path(3).bfs_distances(0).unwrap(), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(Graph::empty(2).bfs_distances(0).unwrap(), vec![Some(0), None]);
        assert!(Graph::empty(2).bfs_distances(2).is_err());
        assert!(!Graph::empty(2).is_connected());
    }

    #[test]
    fn girth_examples() {
        assert_eq!(Graph::cycle(5).girth(), Some(5));
        assert_eq!(Graph::path(6).girth(), None);
        assert_eq!(Graph::star(5).girth(), None);
        assert_eq!(Graph::cycle(4).add_edge(0, 2).unwrap().girth(), Some(3));
        assert_eq!(Graph::complete(4).girth(), Some(3));
    }

    #[test]
    fn class_legality_examples() {
        assert!(!Graph::path(3).edge_is_class_legal(0, 2, GraphClass::TriangleFree));
        assert!(Graph::path(5).edge_is_class_legal(0, 4, GraphClass::GirthAtLeast5));
        assert!(!Graph::path(4).edge_is_class_legal(0, 3, GraphClass::GirthAtLeast5));
        assert!(!Graph::path(4).edge_is_class_legal(0, 3, GraphClass::Tree));
        assert!(Graph::path(3).edge_is_class_legal(0, 2, GraphClass::Any));
        let legal = Graph::path(4).class_legal_edges(GraphClass::TriangleFree);
        assert_eq!(legal, vec![(0, 3)]);
        assert!(Graph::path(4).class_legal_edges(GraphClass::Tree).is_empty());
    }

    #[test]
    fn grows_across_word_boundary() {
        let mut g = Graph::singleton();
        for v in 0..130 {
            g.attach_vertex(v).unwrap();
        }
        g.insert_edge(0, 130).unwrap();
        assert_eq!(g, Graph::cycle(131));
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1, 130]);
        assert_eq!(g.girth(), Some(131));
    }

    #[test]
    fn serialization() {
        assert_eq!(Graph::path(2).to_edge_list(), "0-1");
        assert_eq!(Graph::cycle(3).to_edge_list(), "0-1, 0-2, 1-2");
        assert_eq!(Graph::singleton().to_edge_list(), "");
        let dot = Graph::path(2).to_dot();
        assert!(dot.starts_with("graph G {"));
        assert!(dot.contains("0 -- 1;"));
        assert!(Graph::singleton().to_dot().contains("    0;"));
    }
}
