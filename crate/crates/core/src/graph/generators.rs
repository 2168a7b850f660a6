use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// A named, parameterised graph family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Path(usize),
    Cycle(usize),
    Clique(usize),
    Grid(usize, usize),
    Gnp(usize, f64),
    /// The two-hub bipartite gadget on which exponential-shift clustering
    /// cuts almost every edge with non-negligible probability.
    MpxAdversarial(usize),
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path(n) => write!(f, "path:{n}"),
            FamilySpec::Cycle(n) => write!(f, "cycle:{n}"),
            FamilySpec::Clique(n) => write!(f, "clique:{n}"),
            FamilySpec::Grid(w, h) => write!(f, "grid:{w}x{h}"),
            FamilySpec::Gnp(n, p) => write!(f, "gnp:{n}:{p}"),
            FamilySpec::MpxAdversarial(t) => write!(f, "mpx:{t}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = GraphError;

    /// Parses `path:N`, `cycle:N`, `clique:N`, `grid:WxH`, `gnp:N:P`, `mpx:T`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidFamily(s.to_string());
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let arg = parts.next().ok_or_else(bad)?;
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let spec = match kind {
            "path" => FamilySpec::Path(num(arg)?),
            "cycle" => FamilySpec::Cycle(num(arg)?),
            "clique" => FamilySpec::Clique(num(arg)?),
            "mpx" | "mpx_adversarial" => FamilySpec::MpxAdversarial(num(arg)?),
            "grid" => {
                let (w, h) = arg.split_once('x').ok_or_else(bad)?;
                FamilySpec::Grid(num(w)?, num(h)?)
            }
            "gnp" => {
                let p = parts.next().ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
                FamilySpec::Gnp(num(arg)?, p)
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(spec)
    }
}

/// Vertex layout of `mpx_adversarial(t)`: `u`, `v`, then `S_L`, `S_R`, `L`, `R`
/// as consecutive blocks of `t` ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MpxLayout {
    pub t: usize,
}

impl MpxLayout {
    pub fn u(&self) -> usize {
        0
    }
    pub fn v(&self) -> usize {
        1
    }
    pub fn s_left(&self) -> std::ops::Range<usize> {
        2..2 + self.t
    }
    pub fn s_right(&self) -> std::ops::Range<usize> {
        2 + self.t..2 + 2 * self.t
    }
    pub fn left(&self) -> std::ops::Range<usize> {
        2 + 2 * self.t..2 + 3 * self.t
    }
    pub fn right(&self) -> std::ops::Range<usize> {
        2 + 3 * self.t..2 + 4 * self.t
    }
}

/// Builds a graph from a family spec. Only `gnp` consumes the seed.
pub fn generate(spec: &FamilySpec, seed: u64) -> Result<Graph, GraphError> {
    let invalid = || GraphError::InvalidFamily(spec.to_string());
    match *spec {
        FamilySpec::Path(n) => {
            if n == 0 {
                return Err(invalid());
            }
            Graph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
        }
        FamilySpec::Cycle(n) => {
            if n < 3 {
                return Err(invalid());
            }
            let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            edges.push((0, n - 1));
            Graph::from_edges(n, &edges)
        }
        FamilySpec::Clique(n) => {
            if n == 0 {
                return Err(invalid());
            }
            let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            Graph::from_edges(n, &edges)
        }
        FamilySpec::Grid(w, h) => {
            if w == 0 || h == 0 {
                return Err(invalid());
            }
            let id = |x: usize, y: usize| y * w + x;
            let mut edges = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if x + 1 < w {
                        edges.push((id(x, y), id(x + 1, y)));
                    }
                    if y + 1 < h {
                        edges.push((id(x, y), id(x, y + 1)));
                    }
                }
            }
            Graph::from_edges(w * h, &edges)
        }
        FamilySpec::Gnp(n, p) => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(invalid());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
        FamilySpec::MpxAdversarial(t) => {
            if t == 0 {
                return Err(invalid());
            }
            let lay = MpxLayout { t };
            let mut edges = Vec::with_capacity(t * t + 4 * t);
            for a in lay.left() {
                for b in lay.right() {
                    edges.push((a, b));
                }
            }
            for a in lay.s_left().chain(lay.left()) {
                edges.push((lay.u(), a));
            }
            for b in lay.s_right().chain(lay.right()) {
                edges.push((lay.v(), b));
            }
            Graph::from_edges(4 * t + 2, &edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mpx_adversarial_counts() {
        let g = generate(&FamilySpec::MpxAdversarial(3), 0).unwrap();
        assert_eq!(g.vertex_count(), 14);
        assert_eq!(g.edge_count(), 21);
        for t in 1..8 {
            let g = generate(&FamilySpec::MpxAdversarial(t), 0).unwrap();
            assert_eq!(g.vertex_count(), 4 * t + 2);
            assert_eq!(g.edge_count(), t * t + 4 * t);
        }
    }

    #[test]
    fn mpx_layout_wiring() {
        let lay = MpxLayout { t: 4 };
        let g = generate(&FamilySpec::MpxAdversarial(4), 0).unwrap();
        for s in lay.s_left() {
            assert_eq!(g.neighbors(s), &[lay.u()]);
        }
        for r in lay.right() {
            assert!(g.has_edge(r, lay.v()));
            assert_eq!(g.degree(r), 5);
        }
        assert!(!g.has_edge(lay.u(), lay.v()));
    }

    #[test]
    fn small_families() {
        assert_eq!(generate(&FamilySpec::Clique(5), 0).unwrap().edge_count(), 10);
        let p = generate(&FamilySpec::Path(1), 0).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (1, 0));
        assert_eq!(generate(&FamilySpec::Grid(3, 2), 0).unwrap().edge_count(), 7);
        assert_eq!(generate(&FamilySpec::Cycle(6), 0).unwrap().edge_count(), 6);
    }

    #[test]
    fn gnp_is_seeded() {
        let a = generate(&FamilySpec::Gnp(60, 0.1), 7).unwrap();
        let b = generate(&FamilySpec::Gnp(60, 0.1), 7).unwrap();
        let c = generate(&FamilySpec::Gnp(60, 0.1), 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(generate(&FamilySpec::Gnp(10, 1.0), 0).unwrap().edge_count(), 45);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate(&FamilySpec::Path(0), 0).is_err());
        assert!(generate(&FamilySpec::Gnp(5, 1.5), 0).is_err());
        assert!(generate(&FamilySpec::Gnp(5, -0.1), 0).is_err());
        assert!(generate(&FamilySpec::MpxAdversarial(0), 0).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["path:4", "cycle:200", "clique:5", "grid:3x4", "gnp:500:0.006", "mpx:20"] {
            let spec: FamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("tree:4".parse::<FamilySpec>().is_err());
        assert!("gnp:4".parse::<FamilySpec>().is_err());
    }
}
