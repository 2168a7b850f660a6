//! The three-phase low-diameter decomposition that holds with high
//! probability: sampled ball carving with geometrically growing sampling
//! rates, one boosted round, then an exponential-clock decomposition of what
//! is left.

use serde::{Deserialize, Serialize};

use crate::classic::{clock_rounds, exp_clock_run};
use crate::error::{ensure, Result};
use crate::graph::{Decomposition, Graph};
use crate::sim::{check_eps, intervals_for, unit_uniform, Flavor, Params, Residual, SimContext, View};

/// Outcome of carving one ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarveResult {
    /// The sparsest layer `S_{j*}`.
    pub deleted: Vec<usize>,
    /// The ball of radius `j* - 1`.
    pub removed: Vec<usize>,
    pub j_star: usize,
}

/// Picks the sparsest layer `j*` in `[a, b]` (ties to the smallest),
/// deletes it, and removes the ball inside it.
pub fn grow_and_carve(view: &View, (a, b): (usize, usize)) -> Result<CarveResult> {
    ensure!(a >= 1 && a <= b, "bad interval [{a}, {b}]");
    ensure!(view.radius() >= b, "view radius {} below interval end {b}", view.radius());
    let sizes = view.layer_sizes();
    let size = |j: usize| sizes.get(j).copied().unwrap_or(0);
    let j_star = (a..=b).min_by_key(|&j| (size(j), j)).expect("nonempty interval");
    let within = |r: usize| sizes.iter().take(r + 1).sum::<usize>();
    ensure!(
        size(j_star) * (b - a + 1) <= within(b) - within(a - 1),
        "sparsest layer {j_star} breaks the pigeonhole bound"
    );
    Ok(CarveResult { deleted: view.layer(j_star), removed: view.ball(j_star - 1), j_star })
}

/// A carved ball and the vertices it kept after conflict resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub centre: usize,
    pub iteration: usize,
    pub interval: (usize, usize),
    pub j_star: usize,
    pub members: Vec<usize>,
}

/// Residual state between phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub eps: f64,
    pub params: Params,
    pub live: Vec<bool>,
    pub deleted: Vec<bool>,
    pub balls: Vec<Ball>,
    /// `|N^{4tR}(v)|` in the original graph.
    pub n_v: Vec<usize>,
}

impl PhaseState {
    pub fn live_vertices(&self) -> Vec<usize> {
        (0..self.live.len()).filter(|&v| self.live[v]).collect()
    }

    pub fn deleted_vertices(&self) -> Vec<usize> {
        (0..self.deleted.len()).filter(|&v| self.deleted[v]).collect()
    }

    /// Checks that live vertices, ball members, and deleted vertices partition `V`.
    pub fn check_partition(&self) -> Result<()> {
        let mut seen = vec![0u8; self.live.len()];
        for v in 0..self.live.len() {
            seen[v] += self.live[v] as u8 + self.deleted[v] as u8;
        }
        for ball in &self.balls {
            for &v in &ball.members {
                seen[v] += 1;
            }
        }
        if let Some(v) = seen.iter().position(|&c| c != 1) {
            return Err(crate::Error::Invariant(format!("vertex {v} is in {} parts", seen[v])));
        }
        Ok(())
    }
}

/// Sizes of the radius-`r` neighbourhoods in the original graph.
fn neighbourhood_sizes(g: &Graph, r: usize) -> Vec<usize> {
    let n = g.vertex_count();
    if r >= n {
        let comp = g.components();
        let mut size = vec![0; n];
        for &c in &comp {
            size[c] += 1;
        }
        return comp.iter().map(|&c| size[c]).collect();
    }
    (0..n).map(|v| g.bfs_distances(&[v], r).iter().filter(|&&d| d != usize::MAX).count()).collect()
}

/// Phase 1: `t` rounds of sampling centres with probability
/// `min(1, 2^i ln ñ / n_v)` and carving with interval `I_i`.
pub fn whp_phase1(ctx: &mut SimContext, eps: f64) -> Result<PhaseState> {
    let params = ctx.params(Flavor::Ldd, eps)?;
    let Params { t, r } = params;
    ctx.begin_phase("whp/nv");
    let radius = 4 * t * r;
    ctx.charge(radius);
    let n_v = neighbourhood_sizes(ctx.graph(), radius);
    let n = ctx.vertex_count();
    let mut state = PhaseState { eps, params, live: vec![true; n], deleted: vec![false; n], balls: Vec::new(), n_v };
    let intervals = intervals_for(Flavor::Ldd, params);
    let ln_n = ctx.ln_n_tilde();
    for i in 1..=t {
        let scale = 2f64.powi(i as i32) * ln_n;
        carve_round(ctx, &mut state, i, intervals[i - 1], &format!("whp/phase1/{i}"), |nv| scale / nv as f64)?;
    }
    Ok(state)
}

/// Phase 2: one round with probability `min(1, 2^{t+1} ln ñ ln(20/eps) / n_v)`
/// and interval `I_{t+1} = [R+1, 2R]`.
pub fn whp_phase2(ctx: &mut SimContext, mut state: PhaseState) -> Result<PhaseState> {
    let Params { t, .. } = state.params;
    let interval = intervals_for(Flavor::Ldd, state.params)[t];
    let scale = 2f64.powi(t as i32 + 1) * ctx.ln_n_tilde() * (ctx.profile().t_offset / state.eps).ln();
    carve_round(ctx, &mut state, t + 1, interval, "whp/phase2", |nv| scale / nv as f64)?;
    Ok(state)
}

/// One concurrent carving round against a snapshot of the residual.
/// A vertex deleted by any carve is deleted; a vertex removed by several
/// balls belongs to the one with the smallest centre id.
fn carve_round(
    ctx: &mut SimContext,
    state: &mut PhaseState,
    iteration: usize,
    interval: (usize, usize),
    tag: &str,
    prob: impl Fn(usize) -> f64,
) -> Result<()> {
    ctx.begin_phase(tag);
    let snapshot = Residual { vertices: state.live.clone(), hyperedges: None };
    let centres: Vec<usize> = snapshot
        .live_vertices()
        .into_iter()
        .filter(|&v| unit_uniform(&mut ctx.vertex_rng(tag, v)) < prob(state.n_v[v]).min(1.0))
        .collect();
    let mut claimed = vec![usize::MAX; state.live.len()];
    let mut deleted_now = Vec::new();
    let mut pending = Vec::new();
    for &c in &centres {
        let view = ctx.gather(&[c], interval.1, &snapshot)?;
        let carve = grow_and_carve(&view, interval)?;
        deleted_now.extend_from_slice(&carve.deleted);
        let slot = pending.len();
        for &v in &carve.removed {
            if claimed[v] == usize::MAX {
                claimed[v] = slot;
            }
        }
        pending.push((c, carve.j_star));
    }
    for v in deleted_now {
        state.deleted[v] = true;
        state.live[v] = false;
        claimed[v] = usize::MAX;
    }
    let mut members = vec![Vec::new(); pending.len()];
    for v in 0..claimed.len() {
        if claimed[v] != usize::MAX {
            members[claimed[v]].push(v);
            state.live[v] = false;
        }
    }
    for ((centre, j_star), members) in pending.into_iter().zip(members) {
        if !members.is_empty() {
            state.balls.push(Ball { centre, iteration, interval, j_star, members });
        }
    }
    state.check_partition()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClusterKind {
    Ball { j_star: usize, interval: (usize, usize) },
    Clock { centre: usize },
}

/// Full output of a run, with per-cluster provenance.
#[derive(Debug, Clone)]
pub struct WhpRun {
    pub decomposition: Decomposition,
    pub params: Params,
    pub clusters: Vec<(ClusterKind, Vec<usize>)>,
    /// `(t+1)(t+2)R + ceil(4 ln ñ / lambda_3)`: the rounds the phases after
    /// the `n_v` estimate may use.
    pub round_bound: usize,
}

/// Phases 1-3. Phase 3 runs the exponential-clock decomposition with rate
/// `eps / phase3_lambda_divisor` on the residual.
pub fn whp_run(ctx: &mut SimContext, eps: f64) -> Result<WhpRun> {
    check_eps(eps)?;
    let state = whp_phase1(ctx, eps)?;
    let state = whp_phase2(ctx, state)?;
    let lambda = eps / ctx.profile().phase3_lambda_divisor;
    let residual = Residual { vertices: state.live.clone(), hyperedges: None };
    let clock = exp_clock_run(ctx, lambda, &residual, "whp/phase3")?;

    let n = ctx.vertex_count();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut clusters = Vec::new();
    for ball in &state.balls {
        for &v in &ball.members {
            label[v] = Some(clusters.len());
        }
        clusters.push((ClusterKind::Ball { j_star: ball.j_star, interval: ball.interval }, ball.members.clone()));
    }
    let mut by_centre: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(c) = clock.centre[v] {
            by_centre[c].push(v);
        }
    }
    for (centre, members) in by_centre.into_iter().enumerate().filter(|(_, m)| !m.is_empty()) {
        for &v in &members {
            label[v] = Some(clusters.len());
        }
        clusters.push((ClusterKind::Clock { centre }, members));
    }
    let Params { t, r } = state.params;
    let round_bound = (t + 1) * (t + 2) * r + clock_rounds(ctx, lambda);
    Ok(WhpRun { decomposition: Decomposition::from_labels(&label), params: state.params, clusters, round_bound })
}

/// The decomposition; with `refine`, runs at `eps / 2` and then splits every
/// cluster with [`refine_clusters`].
pub fn whp_ldd(ctx: &mut SimContext, eps: f64, refine: bool) -> Result<Decomposition> {
    if refine {
        let base = whp_run(ctx, eps / 2.0)?;
        Ok(refine_clusters(ctx.graph(), &base.decomposition, eps)?.decomposition)
    } else {
        Ok(whp_run(ctx, eps)?.decomposition)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedBall {
    pub members: Vec<usize>,
    pub radius: usize,
    /// Size of the cluster the ball was carved from.
    pub parent_size: usize,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub decomposition: Decomposition,
    pub balls: Vec<RefinedBall>,
}

/// Largest radius a refined ball can reach inside a cluster of `size`
/// vertices with growth threshold `delta`: every step multiplies the ball by
/// more than `1 + delta`.
pub fn refine_radius_bound(size: usize, delta: f64) -> f64 {
    (size as f64).ln() / (1.0 + delta).ln()
}

/// Splits every cluster into balls of small strong diameter. Inside the
/// cluster, a BFS ball grows from the lowest remaining vertex until the next
/// layer has at most `(eps/2)·|ball|` vertices; that layer is deleted and
/// the ball emitted. At most `(eps/2)·|cluster|` vertices are deleted per
/// cluster.
pub fn refine_clusters(g: &Graph, d: &Decomposition, eps: f64) -> Result<Refinement> {
    check_eps(eps)?;
    let delta = eps / 2.0;
    let n = g.vertex_count();
    ensure!(d.vertex_count() == n, "decomposition covers {} vertices, graph has {n}", d.vertex_count());
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut balls = Vec::new();
    let mut remaining = vec![false; n];
    for cluster in d.clusters() {
        for &v in &cluster {
            remaining[v] = true;
        }
        let mut deleted = 0usize;
        for &start in &cluster {
            if !remaining[start] {
                continue;
            }
            let mut ball = vec![start];
            let mut in_ball = vec![start];
            remaining[start] = false;
            let mut frontier = vec![start];
            let mut radius = 0;
            loop {
                let mut next: Vec<usize> = frontier.iter().flat_map(|&u| g.neighbors(u).iter().copied()).filter(|&w| remaining[w]).collect();
                next.sort_unstable();
                next.dedup();
                if next.len() as f64 <= delta * ball.len() as f64 {
                    for &w in &next {
                        remaining[w] = false;
                    }
                    deleted += next.len();
                    break;
                }
                for &w in &next {
                    remaining[w] = false;
                }
                ball.extend_from_slice(&next);
                in_ball.extend_from_slice(&next);
                frontier = next;
                radius += 1;
            }
            ensure!(
                radius == 0 || (radius as f64) < refine_radius_bound(cluster.len(), delta) + 1e-9,
                "refined ball radius {radius} exceeds the growth bound"
            );
            ball.sort_unstable();
            for &v in &ball {
                label[v] = Some(balls.len());
            }
            balls.push(RefinedBall { members: ball, radius, parent_size: cluster.len() });
        }
        ensure!(deleted as f64 <= delta * cluster.len() as f64 + 1e-9, "refinement deleted {deleted} of {}", cluster.len());
    }
    Ok(Refinement { decomposition: Decomposition::from_labels(&label), balls })
}
