//! Execution context for simulated LOCAL-model algorithms.
//!
//! An `r`-round LOCAL algorithm is equivalent to every vertex gathering its
//! radius-`r` neighbourhood and computing locally. Algorithms here read the
//! topology only through [`View`]s obtained from [`SimContext::gather`], and
//! the context charges each gather radius to the current phase of its
//! [`RoundLedger`].

mod profile;
mod view;

use std::collections::VecDeque;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Hypergraph};

pub use profile::ConstantProfile;
pub use view::View;

#[derive(Debug, Clone)]
pub enum Topology {
    Graph(Graph),
    /// A hypergraph; locality is measured in its Gaifman graph.
    Hypergraph(Hypergraph),
}

/// Per-phase maximum gather radius. The simulated round count is the sum
/// over phases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLedger {
    phases: Vec<(String, usize)>,
}

impl RoundLedger {
    pub fn begin_phase(&mut self, tag: impl Into<String>) {
        self.phases.push((tag.into(), 0));
    }

    pub fn record(&mut self, radius: usize) {
        if self.phases.is_empty() {
            self.begin_phase("main");
        }
        let last = self.phases.last_mut().expect("nonempty");
        last.1 = last.1.max(radius);
    }

    pub fn phases(&self) -> &[(String, usize)] {
        &self.phases
    }

    pub fn cumulative(&self) -> usize {
        self.phases.iter().map(|p| p.1).sum()
    }

    /// Rounds of all phases whose tag does not start with `prefix`.
    pub fn cumulative_excluding(&self, prefix: &str) -> usize {
        self.phases.iter().filter(|p| !p.0.starts_with(prefix)).map(|p| p.1).sum()
    }
}

/// Which parameter set an algorithm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Ldd,
    Packing,
    Covering,
}

/// Derived integer parameters `t` and `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub t: usize,
    pub r: usize,
}

/// The live part of the topology: surviving vertices and, for hypergraphs
/// whose hyperedges can be deleted, surviving hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub vertices: Vec<bool>,
    pub hyperedges: Option<Vec<bool>>,
}

impl Residual {
    pub fn is_live(&self, v: usize) -> bool {
        self.vertices[v]
    }

    pub fn edge_live(&self, e: usize) -> bool {
        self.hyperedges.as_ref().is_none_or(|h| h[e])
    }

    pub fn live_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v]).collect()
    }

    pub fn live_count(&self) -> usize {
        self.vertices.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone)]
pub struct SimContext {
    topology: Topology,
    graph: Graph,
    incidence: Vec<Vec<usize>>,
    n_tilde: usize,
    seed: u64,
    profile: ConstantProfile,
    ledger: RoundLedger,
}

pub fn make_context(topology: Topology, n_tilde: usize, seed: u64, profile: ConstantProfile) -> Result<SimContext> {
    SimContext::new(topology, n_tilde, seed, profile)
}

impl SimContext {
    pub fn new(topology: Topology, n_tilde: usize, seed: u64, profile: ConstantProfile) -> Result<Self> {
        profile.validate()?;
        let (graph, incidence) = match &topology {
            Topology::Graph(g) => (g.clone(), Vec::new()),
            Topology::Hypergraph(h) => (h.gaifman_graph(), h.incidence()),
        };
        let n = graph.vertex_count();
        if n_tilde < n.max(1) {
            return Err(Error::NTildeTooSmall { n_tilde, n });
        }
        Ok(Self { topology, graph, incidence, n_tilde, seed, profile, ledger: RoundLedger::default() })
    }

    /// The same context with another seed and an empty ledger.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self { seed, ledger: RoundLedger::default(), ..self.clone() }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// The communication graph (the Gaifman graph for hypergraphs).
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn hypergraph(&self) -> Option<&Hypergraph> {
        match &self.topology {
            Topology::Hypergraph(h) => Some(h),
            Topology::Graph(_) => None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn n_tilde(&self) -> usize {
        self.n_tilde
    }

    pub fn ln_n_tilde(&self) -> f64 {
        (self.n_tilde as f64).ln()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile(&self) -> &ConstantProfile {
        &self.profile
    }

    pub fn ledger(&self) -> &RoundLedger {
        &self.ledger
    }

    pub fn begin_phase(&mut self, tag: impl Into<String>) {
        self.ledger.begin_phase(tag);
    }

    /// Charges `radius` rounds to the current phase without materialising a view.
    pub fn charge(&mut self, radius: usize) {
        self.ledger.record(radius);
    }

    /// Every vertex and hyperedge live.
    pub fn full_residual(&self) -> Residual {
        Residual { vertices: vec![true; self.vertex_count()], hyperedges: None }
    }

    /// Random stream owned by entity `key` (a vertex or a component) in the
    /// step named `tag`. Independent of the order in which streams are drawn.
    pub fn stream(&self, tag: &str, key: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ splitmix(fnv1a(tag))));
        rng.set_stream(key);
        rng
    }

    pub fn vertex_rng(&self, tag: &str, v: usize) -> ChaCha8Rng {
        self.stream(tag, v as u64)
    }

    pub fn params(&self, flavor: Flavor, eps: f64) -> Result<Params> {
        check_eps(eps)?;
        let ln_n = self.ln_n_tilde();
        let p = &self.profile;
        let t = match flavor {
            Flavor::Ldd | Flavor::Packing => (p.t_offset / eps).log2().ceil(),
            Flavor::Covering => (ln_n.log2() + (1.0 / eps).log2() + p.covering_t_offset).ceil(),
        };
        let t = if t.is_finite() && t >= 1.0 { t as usize } else { 1 };
        let r = (p.c_r * t as f64 * ln_n / eps).ceil();
        let r = if r >= 1.0 { r as usize } else { 1 };
        Ok(Params { t, r })
    }

    /// The carving intervals `[a_i, b_i]`, listed for `i = 1, 2, ...` (outermost first).
    pub fn intervals(&self, flavor: Flavor, eps: f64) -> Result<Vec<(usize, usize)>> {
        Ok(intervals_for(flavor, self.params(flavor, eps)?))
    }

    /// Gathers the radius-`r` neighbourhood of `sources` in the residual and
    /// charges `r` to the current phase.
    pub fn gather(&mut self, sources: &[usize], r: usize, residual: &Residual) -> Result<View> {
        for &s in sources {
            self.graph.check_vertex(s)?;
        }
        self.ledger.record(r);
        let dist = self.residual_bfs(sources, r, residual);
        Ok(View::build(self, sources, r, dist, residual))
    }

    /// BFS distances in the residual; returns `(vertex, distance)` in BFS order.
    pub(crate) fn residual_bfs(&self, sources: &[usize], radius: usize, residual: &Residual) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        let mut dist = vec![usize::MAX; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if residual.is_live(s) && dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        let visit = |w: usize, d: usize, dist: &mut Vec<usize>, queue: &mut VecDeque<usize>| {
            if dist[w] == usize::MAX && residual.is_live(w) {
                dist[w] = d;
                queue.push_back(w);
            }
        };
        while let Some(u) = queue.pop_front() {
            let d = dist[u];
            order.push((u, d));
            if d == radius {
                continue;
            }
            match &residual.hyperedges {
                None => {
                    for &w in self.graph.neighbors(u) {
                        visit(w, d + 1, &mut dist, &mut queue);
                    }
                }
                Some(live) => {
                    let h = self.hypergraph().expect("hyperedge mask needs a hypergraph");
                    for &e in &self.incidence[u] {
                        if live[e] {
                            for &w in &h.hyperedges()[e] {
                                visit(w, d + 1, &mut dist, &mut queue);
                            }
                        }
                    }
                }
            }
        }
        order
    }

    pub(crate) fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }
}

pub fn intervals_for(flavor: Flavor, Params { t, r }: Params) -> Vec<(usize, usize)> {
    match flavor {
        Flavor::Ldd => (1..=t + 1).map(|i| ((t + 2 - i) * r + 1, (t + 3 - i) * r)).collect(),
        Flavor::Packing => {
            let len = 3 * (r + 1);
            (1..=t + 1).map(|i| ((t + 2 - i) * len + 1, (t + 3 - i) * len)).collect()
        }
        Flavor::Covering => (1..=t).map(|i| ((t + 1 - i) * 2 * r + 1, (t + 2 - i) * 2 * r)).collect(),
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eps must lie in (0, 1), got {eps}")))
    }
}

pub(crate) fn check_rate(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("lambda must be positive, got {lambda}")))
    }
}

/// Uniform in `[0, 1)` from the top 53 bits of one draw.
pub fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential with rate `lambda` by inverse CDF.
pub fn exponential(rng: &mut impl RngCore, lambda: f64) -> f64 {
    -(1.0 - unit_uniform(rng)).ln() / lambda
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
