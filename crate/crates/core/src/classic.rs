//! Exponential-clock decompositions: vertex low-diameter decomposition,
//! MPX-style partition with edge cuts, hypergraph sparse covers, and the
//! covering solver that ORs local optima over a sparse cover.
//!
//! Every vertex `u` draws `T_u ~ Exp(lambda)` (reset to 0 when
//! `T_u >= 4 ln ñ / lambda`) and broadcasts it. Vertex `v` ranks the values
//! `m_u = T_u - dist(u, v)` it receives, highest first, ties to the smaller id.
//! Since `v` always sees its own `m_v = T_v >= 0`, a value below `-1` can
//! never matter to any rule, so the broadcast from `u` reaches `floor(T_u) + 1`
//! hops: exactly the values with `m_u >= -1`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Decomposition;
use crate::ilp::{brute_force_opt, local_restrict_filtered, Assignment, FixedState, IlpError, IlpInstance, Sense};
use crate::sim::{check_rate, exponential, Residual, SimContext};

/// Per-vertex clock values `T_v` after the reset rule; 0 for non-live vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockAssignment {
    pub clocks: Vec<f64>,
}

/// `4 ln ñ / lambda`: clocks at or above it are reset, and no broadcast goes further.
pub fn reset_threshold(ctx: &SimContext, lambda: f64) -> f64 {
    4.0 * ctx.ln_n_tilde() / lambda
}

/// The rounds charged for one clock run.
pub fn clock_rounds(ctx: &SimContext, lambda: f64) -> usize {
    reset_threshold(ctx, lambda).ceil() as usize
}

/// Cluster weak (and, for the vertex decomposition, strong) diameter bound `8 ln ñ / lambda`.
pub fn diameter_bound(ctx: &SimContext, lambda: f64) -> f64 {
    8.0 * ctx.ln_n_tilde() / lambda
}

pub fn sample_clocks(ctx: &SimContext, tag: &str, lambda: f64, residual: &Residual) -> ClockAssignment {
    let limit = reset_threshold(ctx, lambda);
    let clocks = (0..ctx.vertex_count())
        .map(|v| {
            if !residual.is_live(v) {
                return 0.0;
            }
            let t = exponential(&mut ctx.vertex_rng(tag, v), lambda);
            if t >= limit {
                0.0
            } else {
                t
            }
        })
        .collect();
    ClockAssignment { clocks }
}

/// A received value `(m, sender)`.
type Shifted = (f64, usize);

fn rank(a: &Shifted, b: &Shifted) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// For every live vertex, every received `(m, sender)` with `m >= -1`,
/// ranked best first.
pub fn shifted_values(ctx: &SimContext, clocks: &ClockAssignment, residual: &Residual) -> Vec<Vec<(f64, usize)>> {
    let mut received: Vec<Vec<Shifted>> = vec![Vec::new(); ctx.vertex_count()];
    for u in residual.live_vertices() {
        let t = clocks.clocks[u];
        for (v, d) in ctx.residual_bfs(&[u], t.floor() as usize + 1, residual) {
            received[v].push((t - d as f64, u));
        }
    }
    for list in &mut received {
        list.sort_by(rank);
    }
    received
}

#[derive(Debug, Clone)]
pub struct ClockRun {
    pub clocks: ClockAssignment,
    /// Centre joined by each vertex; `None` if deleted or not live.
    pub centre: Vec<Option<usize>>,
    pub deleted: Vec<usize>,
}

/// The vertex decomposition on the residual, charged to a phase named `tag`.
pub fn exp_clock_run(ctx: &mut SimContext, lambda: f64, residual: &Residual, tag: &str) -> Result<ClockRun> {
    check_rate(lambda)?;
    ctx.begin_phase(tag);
    ctx.charge(clock_rounds(ctx, lambda));
    let clocks = sample_clocks(ctx, tag, lambda, residual);
    let received = shifted_values(ctx, &clocks, residual);
    let mut centre = vec![None; ctx.vertex_count()];
    let mut deleted = Vec::new();
    for v in residual.live_vertices() {
        let r = &received[v];
        if r.len() >= 2 && r[1].0 >= r[0].0 - 1.0 {
            deleted.push(v);
        } else {
            centre[v] = Some(r[0].1);
        }
    }
    Ok(ClockRun { clocks, centre, deleted })
}

pub fn exp_clock_ldd(ctx: &mut SimContext, lambda: f64) -> Result<Decomposition> {
    let full = ctx.full_residual();
    let run = exp_clock_run(ctx, lambda, &full, "expclock")?;
    Ok(Decomposition::from_labels(&run.centre))
}

#[derive(Debug, Clone)]
pub struct MpxOutcome {
    pub clocks: ClockAssignment,
    /// Centre of every vertex's cluster.
    pub centre: Vec<usize>,
    /// Edges `(u, v)`, `u < v`, whose endpoints joined different clusters.
    pub cut_edges: Vec<(usize, usize)>,
}

pub fn mpx_cluster(ctx: &mut SimContext, lambda: f64) -> Result<MpxOutcome> {
    check_rate(lambda)?;
    ctx.begin_phase("mpx");
    ctx.charge(clock_rounds(ctx, lambda));
    let full = ctx.full_residual();
    let clocks = sample_clocks(ctx, "mpx", lambda, &full);
    let received = shifted_values(ctx, &clocks, &full);
    let centre: Vec<usize> = received.iter().map(|r| r[0].1).collect();
    let cut_edges = ctx.graph().edges().filter(|&(u, v)| centre[u] != centre[v]).collect();
    Ok(MpxOutcome { clocks, centre, cut_edges })
}

/// Overlapping clusters such that every hyperedge lies inside one of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCover {
    /// Sorted member lists, one per centre, in centre order.
    pub clusters: Vec<Vec<usize>>,
    pub centres: Vec<usize>,
    /// `X_v`: number of clusters containing `v`.
    pub multiplicity: Vec<usize>,
}

impl SparseCover {
    /// Cluster ids containing each vertex.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.multiplicity.len()];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                m[v].push(i);
            }
        }
        m
    }

    /// Some cluster containing every vertex of `set`.
    pub fn covering_cluster(&self, memberships: &[Vec<usize>], set: &[usize]) -> Option<usize> {
        let (first, rest) = set.split_first()?;
        memberships[*first].iter().copied().find(|&c| rest.iter().all(|&v| memberships[v].binary_search(&c).is_ok()))
    }
}

pub fn sparse_cover(ctx: &mut SimContext, lambda: f64) -> Result<SparseCover> {
    let full = ctx.full_residual();
    sparse_cover_on(ctx, lambda, &full, "cover")
}

/// Sparse cover of the residual. With a hypergraph topology, coverage of
/// every live hyperedge is verified.
pub fn sparse_cover_on(ctx: &mut SimContext, lambda: f64, residual: &Residual, tag: &str) -> Result<SparseCover> {
    check_rate(lambda)?;
    ctx.begin_phase(tag);
    ctx.charge(clock_rounds(ctx, lambda));
    let clocks = sample_clocks(ctx, tag, lambda, residual);
    let received = shifted_values(ctx, &clocks, residual);
    let n = ctx.vertex_count();
    let mut by_centre: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut multiplicity = vec![0; n];
    for v in residual.live_vertices() {
        let r = &received[v];
        let top = r[0].0;
        for &(m, u) in r.iter().take_while(|(m, _)| *m >= top - 1.0) {
            debug_assert!(m >= top - 1.0);
            by_centre[u].push(v);
            multiplicity[v] += 1;
        }
    }
    let (centres, clusters): (Vec<usize>, Vec<Vec<usize>>) =
        by_centre.into_iter().enumerate().filter(|(_, c)| !c.is_empty()).unzip();
    let cover = SparseCover { clusters, centres, multiplicity };
    if let Some(h) = ctx.hypergraph() {
        let memberships = cover.memberships();
        for (e, members) in h.hyperedges().iter().enumerate() {
            if residual.edge_live(e) && members.iter().all(|&v| residual.is_live(v)) && cover.covering_cluster(&memberships, members).is_none() {
                return Err(Error::Uncovered(e));
            }
        }
    }
    Ok(cover)
}

/// Result of [`cover_and_solve_live`].
#[derive(Debug, Clone)]
pub struct CoverSolution {
    pub assignment: Assignment,
    /// `sum_i W(Q^local_{S_i}, S_i)` over the clusters.
    pub local_weight_sum: u64,
}

/// Solves every cluster's local covering program exactly and ORs the local
/// optima together with the fixed ones.
pub fn cover_and_solve(ctx: &SimContext, inst: &IlpInstance, cover: &SparseCover, fixed: &FixedState) -> Result<Assignment> {
    Ok(cover_and_solve_live(inst, cover, fixed, |_| true, ctx.profile().brute_force_cap)?.assignment)
}

/// [`cover_and_solve`] over the constraints accepted by `live`. Every live
/// constraint must lie inside some cluster.
pub fn cover_and_solve_live(
    inst: &IlpInstance,
    cover: &SparseCover,
    fixed: &FixedState,
    live: impl Fn(usize) -> bool + Copy,
    cap: usize,
) -> Result<CoverSolution> {
    if inst.sense() != Sense::Covering {
        return Err(Error::Parameter("cover_and_solve needs a covering instance".into()));
    }
    if cover.multiplicity.len() != inst.var_count() {
        return Err(Error::Parameter("cover and instance disagree on the variable count".into()));
    }
    let memberships = cover.memberships();
    for (j, c) in inst.constraints().iter().enumerate() {
        if !live(j) {
            continue;
        }
        if c.vars.is_empty() {
            if c.bound > num_traits::Zero::zero() {
                return Err(IlpError::Infeasible.into());
            }
        } else if cover.covering_cluster(&memberships, &c.vars).is_none() {
            return Err(Error::Uncovered(j));
        }
    }
    let mut out = fixed.as_assignment();
    let mut local_weight_sum = 0;
    for (i, cluster) in cover.clusters.iter().enumerate() {
        let local = local_restrict_filtered(inst, cluster, live);
        let sol = brute_force_opt(&local, fixed, cap).map_err(|source| Error::Component { component: i, source })?;
        local_weight_sum += local.weight_of(&sol);
        for v in sol.ones_iter() {
            out.values[local.to_parent[v]] = true;
        }
    }
    Ok(CoverSolution { assignment: out, local_weight_sum })
}
