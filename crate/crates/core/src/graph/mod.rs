//! Simple undirected graphs, hypergraphs, and the distance machinery shared by
//! every algorithm in the crate.

mod decomposition;
mod generators;
pub mod io;
mod reductions;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

pub use decomposition::{validate_decomposition, Decomposition, ValidationReport};
pub use generators::{generate, FamilySpec, MpxLayout};
pub use reductions::{dominating_gadget, min_dominating_set_size, min_vertex_cover_size, subdivide};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("decomposition covers {got} vertices, graph has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid family spec: {0}")]
    InvalidFamily(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Hop distance, with `Infinite` ordered above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Which metric a set diameter is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    /// Distances in the whole graph.
    Weak,
    /// Distances in the subgraph induced by the set.
    Strong,
}

/// An immutable simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops and duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::InvalidVertex { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adjacency, edge_count: edges.len() })
    }

    /// Builds a graph from edges that may repeat; duplicates collapse.
    pub(crate) fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            debug_assert!(u != v && u < n && v < n);
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Graph { adjacency, edge_count: edge_count / 2 }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, n: self.vertex_count() })
        }
    }

    /// Breadth-first distances from `sources`, stopping at `radius`.
    /// Unreached vertices get `usize::MAX`.
    pub fn bfs_distances(&self, sources: &[usize], radius: usize) -> Vec<usize> {
        self.bfs_filtered(sources, radius, |_| true)
    }

    /// BFS restricted to vertices accepted by `allow`; sources not allowed are skipped.
    pub(crate) fn bfs_filtered(&self, sources: &[usize], radius: usize, allow: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if allow(s) && dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX && allow(w) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `N^r(v)`: all vertices within distance `r` of `v`, sorted.
    pub fn neighborhood(&self, v: usize, r: usize) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(v)?;
        let dist = self.bfs_distances(&[v], r);
        Ok((0..self.vertex_count()).filter(|&u| dist[u] != usize::MAX).collect())
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Distance, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let d = self.bfs_distances(&[u], usize::MAX - 1)[v];
        Ok(if d == usize::MAX { Distance::Infinite } else { Distance::Finite(d) })
    }

    /// Weak or strong diameter of a nonempty vertex set.
    pub fn set_diameter(&self, set: &[usize], mode: DiameterMode) -> Result<Distance, GraphError> {
        if set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let mut member = vec![false; self.vertex_count()];
        for &v in set {
            self.check_vertex(v)?;
            member[v] = true;
        }
        let mut best = 0;
        for &u in set {
            let dist = match mode {
                DiameterMode::Weak => self.bfs_distances(&[u], usize::MAX - 1),
                DiameterMode::Strong => self.bfs_filtered(&[u], usize::MAX - 1, |x| member[x]),
            };
            for &v in set {
                if dist[v] == usize::MAX {
                    return Ok(Distance::Infinite);
                }
                best = best.max(dist[v]);
            }
        }
        Ok(Distance::Finite(best))
    }

    /// Induced subgraph on `vertices`; local id `i` maps back to `to_parent[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Subgraph {
        let mut local = vec![usize::MAX; self.vertex_count()];
        let mut to_parent = vertices.to_vec();
        to_parent.sort_unstable();
        to_parent.dedup();
        for (i, &v) in to_parent.iter().enumerate() {
            local[v] = i;
        }
        let adjacency = to_parent
            .iter()
            .map(|&v| self.adjacency[v].iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Subgraph { graph: Graph { adjacency, edge_count }, to_parent }
    }

    /// Connected component id per vertex, numbered in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Two-colouring check.
    pub fn is_bipartite(&self) -> bool {
        let n = self.vertex_count();
        let mut colour = vec![u8::MAX; n];
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if colour[w] == u8::MAX {
                        colour[w] = 1 - colour[u];
                        queue.push_back(w);
                    } else if colour[w] == colour[u] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A derived graph carrying the translation table back to its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    pub to_parent: Vec<usize>,
}

/// A hypergraph on `0..n` with nonempty hyperedges (stored sorted, deduplicated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertex_count: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let mut clean = Vec::with_capacity(hyperedges.len());
        for (i, mut e) in hyperedges.into_iter().enumerate() {
            if e.is_empty() {
                return Err(GraphError::EmptyHyperedge(i));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertex_count) {
                return Err(GraphError::InvalidVertex { vertex: v, n: vertex_count });
            }
            e.sort_unstable();
            e.dedup();
            clean.push(e);
        }
        Ok(Hypergraph { vertex_count, hyperedges: clean })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn edge_count(&self) -> usize {
        self.hyperedges.len()
    }

    /// Per-vertex list of incident hyperedge ids.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.hyperedges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    /// The primal graph: `u ~ v` iff some hyperedge contains both.
    pub fn gaifman_graph(&self) -> Graph {
        let edges = self
            .hyperedges
            .iter()
            .flat_map(|e| e.iter().enumerate().flat_map(move |(i, &u)| e[i + 1..].iter().map(move |&v| (u, v))));
        Graph::from_edges_dedup(self.vertex_count, edges)
    }
}

/// Free-function form of [`Graph::neighborhood`].
pub fn neighborhood(g: &Graph, v: usize, r: usize) -> Result<Vec<usize>, GraphError> {
    g.neighborhood(v, r)
}

/// Free-function form of [`Graph::set_diameter`].
pub fn set_diameter(g: &Graph, set: &[usize], mode: DiameterMode) -> Result<Distance, GraphError> {
    g.set_diameter(set, mode)
}

/// Free-function form of [`Hypergraph::gaifman_graph`].
pub fn gaifman_graph(h: &Hypergraph) -> Graph {
    h.gaifman_graph()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        generate(&FamilySpec::Path(n), 0).unwrap()
    }

    #[test]
    fn neighborhood_on_path() {
        let g = path(5);
        assert_eq!(g.neighborhood(2, 1).unwrap(), vec![1, 2, 3]);
        assert_eq!(g.neighborhood(4, 0).unwrap(), vec![4]);
        assert!(matches!(g.neighborhood(5, 1), Err(GraphError::InvalidVertex { .. })));
    }

    #[test]
    fn neighborhood_clique_covers_everything() {
        let g = generate(&FamilySpec::Clique(5), 0).unwrap();
        assert_eq!(g.neighborhood(0, 3).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cycle_diameters() {
        let g = generate(&FamilySpec::Cycle(6), 0).unwrap();
        assert_eq!(g.set_diameter(&[0, 3], DiameterMode::Weak).unwrap(), Distance::Finite(3));
        assert_eq!(g.set_diameter(&[0, 3], DiameterMode::Strong).unwrap(), Distance::Infinite);
        assert_eq!(g.set_diameter(&[4], DiameterMode::Strong).unwrap(), Distance::Finite(0));
        assert_eq!(g.set_diameter(&[], DiameterMode::Weak), Err(GraphError::EmptySet));
    }

    #[test]
    fn infinite_sorts_last() {
        assert!(Distance::Finite(usize::MAX - 1) < Distance::Infinite);
    }

    #[test]
    fn gaifman_examples() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(h.gaifman_graph(), generate(&FamilySpec::Clique(3), 0).unwrap());
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(h.gaifman_graph(), path(3));
        let h = Hypergraph::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(h.gaifman_graph().edge_count(), 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::from_edges(2, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(Hypergraph::new(2, vec![vec![]]).is_err());
        assert!(Hypergraph::new(2, vec![vec![2]]).is_err());
    }

    #[test]
    fn induced_keeps_translation() {
        let g = path(5);
        let sub = g.induced(&[3, 1, 2]);
        assert_eq!(sub.to_parent, vec![1, 2, 3]);
        assert_eq!(sub.graph.edge_count(), 2);
    }
}
