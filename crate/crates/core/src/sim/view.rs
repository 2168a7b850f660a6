use crate::graph::Graph;

use super::{Residual, SimContext};

/// An immutable copy of the radius-`r` neighbourhood of a source set in the
/// residual topology. It owns all data it exposes, so computations over a
/// view cannot read beyond it.
#[derive(Debug, Clone)]
pub struct View {
    sources: Vec<usize>,
    radius: usize,
    /// Global ids, ascending.
    vertices: Vec<usize>,
    /// Residual distance from the source set, aligned with `vertices`.
    dist: Vec<usize>,
    /// Residual adjacency among `vertices`, in local ids.
    graph: Graph,
    inside: Vec<usize>,
    boundary: Vec<usize>,
}

impl View {
    pub(super) fn build(ctx: &SimContext, sources: &[usize], radius: usize, reached: Vec<(usize, usize)>, residual: &Residual) -> Self {
        let mut pairs = reached;
        pairs.sort_unstable();
        let (vertices, dist): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let local = |v: usize| vertices.binary_search(&v).ok();

        let (mut inside, mut boundary) = (Vec::new(), Vec::new());
        let graph = match (ctx.hypergraph(), &residual.hyperedges) {
            (Some(h), mask) => {
                let mut seen = Vec::new();
                for &v in &vertices {
                    seen.extend(ctx.incidence()[v].iter().copied().filter(|&e| mask.as_ref().is_none_or(|m| m[e])));
                }
                seen.sort_unstable();
                seen.dedup();
                let mut edges = Vec::new();
                for e in seen {
                    let members: Vec<usize> = h.hyperedges()[e].iter().filter(|&&u| residual.is_live(u)).copied().collect();
                    let locals: Vec<usize> = members.iter().filter_map(|&u| local(u)).collect();
                    if locals.len() == members.len() {
                        inside.push(e);
                    } else {
                        boundary.push(e);
                    }
                    for (i, &x) in locals.iter().enumerate() {
                        for &y in &locals[i + 1..] {
                            edges.push((x.min(y), x.max(y)));
                        }
                    }
                }
                Graph::from_edges_dedup(vertices.len(), edges)
            }
            (None, _) => {
                let g = ctx.graph();
                let edges = vertices.iter().enumerate().flat_map(|(i, &v)| {
                    g.neighbors(v).iter().filter_map(move |&w| if w > v { local(w).map(|j| (i, j)) } else { None })
                });
                Graph::from_edges_dedup(vertices.len(), edges.collect::<Vec<_>>())
            }
        };
        let mut sources = sources.to_vec();
        sources.sort_unstable();
        sources.dedup();
        Self { sources, radius, vertices, dist, graph, inside, boundary }
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Residual distance of global vertex `v` from the sources, if visible.
    pub fn dist_of(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok().map(|i| self.dist[i])
    }

    /// Pairs `(global id, distance)`, ascending by id.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.iter().copied().zip(self.dist.iter().copied())
    }

    /// `S_j`: visible vertices at distance exactly `j`.
    pub fn layer(&self, j: usize) -> Vec<usize> {
        self.iter().filter(|&(_, d)| d == j).map(|(v, _)| v).collect()
    }

    /// Visible vertices at distance at most `r`.
    pub fn ball(&self, r: usize) -> Vec<usize> {
        self.iter().filter(|&(_, d)| d <= r).map(|(v, _)| v).collect()
    }

    /// `|S_j|` for `j = 0..=radius` (zero where the residual ends early).
    pub fn layer_sizes(&self) -> Vec<usize> {
        let len = self.dist.iter().max().map_or(0, |&m| m + 1);
        let mut sizes = vec![0; len];
        for &d in &self.dist {
            sizes[d] += 1;
        }
        sizes
    }

    /// Residual adjacency among the view's vertices; local id `i` is `vertices()[i]`.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Live hyperedges whose live vertices all lie in the view.
    pub fn inside_hyperedges(&self) -> &[usize] {
        &self.inside
    }

    /// Live hyperedges only partly visible.
    pub fn boundary_hyperedges(&self) -> &[usize] {
        &self.boundary
    }
}
