//! Graph reductions used by the round lower bounds, plus exhaustive solvers
//! small enough to confirm their defining properties.

use super::Graph;

/// Replaces every edge by a path of length `2x + 1` through `2x` fresh vertices.
///
/// Original ids are kept; fresh ids follow in edge-scan order, `2x` per edge,
/// listed from the lower endpoint towards the higher one.
pub fn subdivide(g: &Graph, x: usize) -> Graph {
    if x == 0 {
        return g.clone();
    }
    let n = g.vertex_count();
    let mut edges = Vec::with_capacity((2 * x + 1) * g.edge_count());
    let mut next = n;
    for (u, v) in g.edges() {
        let mut prev = u;
        for _ in 0..2 * x {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, v));
    }
    Graph::from_edges(next, &edges).expect("subdivision of a simple graph is simple")
}

/// Adds, for every edge `{u, v}`, a vertex `w_e` adjacent to exactly `u` and `v`.
/// Fresh ids follow the originals in edge-scan order.
pub fn dominating_gadget(g: &Graph) -> Graph {
    let n = g.vertex_count();
    let mut edges: Vec<_> = g.edges().collect();
    for (i, (u, v)) in g.edges().enumerate() {
        edges.push((u, n + i));
        edges.push((v, n + i));
    }
    Graph::from_edges(n + g.edge_count(), &edges).expect("gadget graph is simple")
}

/// Minimum vertex cover size by enumerating every vertex subset.
///
/// # Panics
/// If the graph has more than 24 vertices.
pub fn min_vertex_cover_size(g: &Graph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 24, "exhaustive vertex cover limited to 24 vertices");
    let edges: Vec<(usize, usize)> = g.edges().collect();
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Minimum dominating set size.
///
/// Complete branching: the lowest undominated vertex must be dominated by one
/// of its closed neighbours, so branch over those. Every dominating set is
/// reachable, so the minimum is exact.
pub fn min_dominating_set_size(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut covered = vec![0u32; n];
    let mut best = n;
    dominate(g, &mut covered, 0, &mut best);
    best
}

fn dominate(g: &Graph, covered: &mut [u32], chosen: usize, best: &mut usize) {
    if chosen >= *best {
        return;
    }
    let Some(x) = covered.iter().position(|&c| c == 0) else {
        *best = chosen;
        return;
    };
    if chosen + 1 >= *best {
        return;
    }
    for &y in std::iter::once(&x).chain(g.neighbors(x)) {
        covered[y] += 1;
        for &z in g.neighbors(y) {
            covered[z] += 1;
        }
        dominate(g, covered, chosen + 1, best);
        covered[y] -= 1;
        for &z in g.neighbors(y) {
            covered[z] -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, FamilySpec};

    /// Dominating number by subset enumeration; only for tiny graphs.
    fn gamma_by_subsets(g: &Graph) -> usize {
        let n = g.vertex_count();
        (0u32..1 << n)
            .filter(|mask| (0..n).all(|v| mask >> v & 1 == 1 || g.neighbors(v).iter().any(|&u| mask >> u & 1 == 1)))
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn subdivide_single_edge() {
        let g = generate(&FamilySpec::Path(2), 0).unwrap();
        let s = subdivide(&g, 1);
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.distance(0, 1).unwrap().finite(), Some(3));
    }

    #[test]
    fn subdivide_identity_and_counts() {
        let k4 = generate(&FamilySpec::Clique(4), 0).unwrap();
        assert_eq!(subdivide(&k4, 0), k4);
        let s = subdivide(&k4, 2);
        assert_eq!(s.vertex_count(), 28);
        assert_eq!(s.edge_count(), 30);
        // odd paths keep odd cycles odd: bipartite exactly when the input is
        assert!(!s.is_bipartite());
        let c6 = generate(&FamilySpec::Cycle(6), 0).unwrap();
        assert!(subdivide(&c6, 3).is_bipartite());
    }

    #[test]
    fn gadget_examples() {
        let e = generate(&FamilySpec::Path(2), 0).unwrap();
        let star = dominating_gadget(&e);
        assert_eq!(star.vertex_count(), 3);
        assert_eq!(star.edge_count(), 3);
        assert_eq!(min_dominating_set_size(&star), 1);
        assert_eq!(min_vertex_cover_size(&e), 1);

        let empty = Graph::empty(4);
        assert_eq!(dominating_gadget(&empty), empty);

        let k3 = generate(&FamilySpec::Clique(3), 0).unwrap();
        let g = dominating_gadget(&k3);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(min_dominating_set_size(&g), 2);
        assert_eq!(min_vertex_cover_size(&k3), 2);
    }

    #[test]
    fn branching_matches_subset_enumeration() {
        for seed in 0..40 {
            let g = generate(&FamilySpec::Gnp(11, 0.3), seed).unwrap();
            assert_eq!(min_dominating_set_size(&g), gamma_by_subsets(&g), "seed {seed}");
            let gadget = dominating_gadget(&generate(&FamilySpec::Gnp(6, 0.4), seed).unwrap());
            if gadget.vertex_count() <= 20 {
                assert_eq!(min_dominating_set_size(&gadget), gamma_by_subsets(&gadget), "gadget seed {seed}");
            }
        }
    }
}
