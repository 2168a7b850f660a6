//! `(1 - eps)`-approximate packing: preparation estimates, weighted ball
//! carving that deletes the lightest layer of the local optimum, two sampled
//! phases, an exponential-clock phase, and exact local solves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::exp_clock_run;
use crate::components::{check_topology, estimate_components, local_opt, resolve_claims, ComponentEstimates};
use crate::error::{ensure, Error, Result};
use crate::ilp::{feasible, local_restrict, weight, Assignment, FixedState, IlpInstance, Sense};
use crate::sim::{check_eps, intervals_for, unit_uniform, Flavor, Params, Residual, SimContext, View};
use crate::whp::CarveResult;

/// Rate of the preparation decompositions.
pub const PREP_LAMBDA: f64 = 0.5;

/// Number of independent preparation runs, `ceil(prep_copies * ln ñ)`.
pub fn prep_runs(ctx: &SimContext) -> usize {
    ((ctx.profile().prep_copies * ctx.ln_n_tilde()).ceil() as usize).max(1)
}

fn check_packing(ctx: &SimContext, inst: &IlpInstance) -> Result<()> {
    if inst.sense() != Sense::Packing {
        return Err(Error::Parameter("expected a packing instance".into()));
    }
    check_topology(ctx, inst)
}

/// Clusters of `ceil(prep_copies * ln ñ)` exponential-clock decompositions
/// with rate 1/2, each with its own and region (`N^{8tR}(C)`) optimum.
pub fn pack_prepare(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<ComponentEstimates> {
    check_packing(ctx, inst)?;
    let Params { t, r } = ctx.params(Flavor::Packing, eps)?;
    let full = ctx.full_residual();
    let mut runs = Vec::new();
    for k in 0..prep_runs(ctx) {
        let run = exp_clock_run(ctx, PREP_LAMBDA, &full, &format!("pack/prep/{k}"))?;
        let mut by_centre = vec![Vec::new(); ctx.vertex_count()];
        for (v, c) in run.centre.iter().enumerate() {
            if let Some(c) = c {
                by_centre[*c].push(v);
            }
        }
        runs.push(by_centre.into_iter().filter(|c| !c.is_empty()).collect());
    }
    estimate_components(ctx, inst, runs, 8 * t * r, "pack/prep/estimates")
}

/// Weighted carve. Solves the local packing program on `N^{b-1}(C)`
/// (the view), picks `j* ≡ a (mod 3)` in `[a, b-1]` minimising the
/// optimum's weight on `S_{j*} ∪ S_{j*+1} ∪ S_{j*+2}` (layer `b` lies
/// outside and counts 0), deletes `S_{j*+1}`, and removes `N^{j*}(C)`.
pub fn grow_and_carve_packing(
    view: &View,
    (a, b): (usize, usize),
    inst: &IlpInstance,
    fixed: &FixedState,
    cap: usize,
) -> Result<CarveResult> {
    ensure!(a >= 1 && a % 3 == 1 && b > a && (b - a + 1) % 3 == 0, "bad packing interval [{a}, {b}]");
    ensure!(view.radius() + 1 >= b, "view radius {} below b - 1 = {}", view.radius(), b - 1);
    let local = local_restrict(inst, view.vertices());
    let (sol, total) = local_opt(&local, fixed, cap, view.sources().first().copied().unwrap_or(0))?;
    let lifted = local.lift(&sol, inst.var_count());
    let layer_weight = |j: usize| if j < b { weight(&lifted, &view.layer(j), inst.weights()) } else { 0 };
    let candidates: Vec<usize> = (a..b).step_by(3).collect();
    let triple = |j: usize| layer_weight(j) + layer_weight(j + 1) + layer_weight(j + 2);
    let j_star = *candidates.iter().min_by_key(|&&j| (triple(j), j)).expect("interval has a candidate");
    ensure!(
        triple(j_star) * candidates.len() as u64 <= total,
        "lightest triple {} times {} candidates exceeds the local optimum {total}",
        triple(j_star),
        candidates.len()
    );
    Ok(CarveResult { deleted: view.layer(j_star + 1), removed: view.ball(j_star), j_star })
}

/// Everything [`approx_pack`] produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackOutcome {
    pub assignment: Assignment,
    pub weight: u64,
    /// Solving units: carved balls, then final-phase clusters.
    pub units: Vec<Vec<usize>>,
    /// Variables forced to zero.
    pub deleted: Vec<usize>,
    pub params: Params,
    pub estimates: ComponentEstimates,
}

struct PackState {
    live: Vec<bool>,
    fixed: FixedState,
    units: Vec<Vec<usize>>,
}

fn pack_round(
    ctx: &mut SimContext,
    inst: &IlpInstance,
    est: &ComponentEstimates,
    state: &mut PackState,
    interval: (usize, usize),
    factor: f64,
    tag: &str,
) -> Result<()> {
    ctx.begin_phase(tag);
    let cap = ctx.profile().brute_force_cap;
    let snapshot = Residual { vertices: state.live.clone(), hyperedges: None };
    let mut carves = Vec::new();
    for (k, comp) in est.components.iter().enumerate() {
        let p = comp.sampling_probability(factor);
        if p == 0.0 || unit_uniform(&mut ctx.stream(tag, k as u64)) >= p {
            continue;
        }
        let sources: Vec<usize> = comp.vertices.iter().copied().filter(|&v| snapshot.is_live(v)).collect();
        if sources.is_empty() {
            continue;
        }
        let view = ctx.gather(&sources, interval.1 - 1, &snapshot)?;
        let carve = grow_and_carve_packing(&view, interval, inst, &state.fixed, cap)
            .map_err(|e| relabel_component(e, k))?;
        carves.push(carve);
    }
    let n = state.live.len();
    let mut deleted = vec![false; n];
    for carve in &carves {
        for &v in &carve.deleted {
            deleted[v] = true;
        }
    }
    for v in (0..n).filter(|&v| deleted[v]) {
        state.fixed.delete(v)?;
        state.live[v] = false;
    }
    let removed: Vec<Vec<usize>> = carves.into_iter().map(|c| c.removed).collect();
    for members in resolve_claims(n, &removed, &deleted) {
        if !members.is_empty() {
            for &v in &members {
                state.live[v] = false;
            }
            state.units.push(members);
        }
    }
    Ok(())
}

fn relabel_component(e: Error, k: usize) -> Error {
    match e {
        Error::Component { source, .. } => Error::Component { component: k, source },
        other => other,
    }
}

/// The packing pipeline. The output is always feasible.
pub fn approx_pack(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<Assignment> {
    Ok(approx_pack_run(ctx, inst, eps)?.assignment)
}

/// [`approx_pack`] with its intermediate structure.
pub fn approx_pack_run(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<PackOutcome> {
    check_eps(eps)?;
    let est = pack_prepare(ctx, inst, eps)?;
    let params = ctx.params(Flavor::Packing, eps)?;
    let intervals = intervals_for(Flavor::Packing, params);
    let n = inst.var_count();
    let mut state = PackState { live: vec![true; n], fixed: FixedState::all_free(n), units: Vec::new() };
    for i in 1..=params.t {
        let factor = 2f64.powi(i as i32);
        pack_round(ctx, inst, &est, &mut state, intervals[i - 1], factor, &format!("pack/phase1/{i}"))?;
    }
    let boost = 2f64.powi(params.t as i32 + 1) * (ctx.profile().t_offset / eps).ln();
    pack_round(ctx, inst, &est, &mut state, intervals[params.t], boost, "pack/phase2")?;

    let lambda = eps / ctx.profile().phase3_lambda_divisor;
    let residual = Residual { vertices: state.live.clone(), hyperedges: None };
    let clock = exp_clock_run(ctx, lambda, &residual, "pack/phase3")?;
    for &v in &clock.deleted {
        state.fixed.delete(v)?;
    }
    let mut by_centre = vec![Vec::new(); n];
    for (v, c) in clock.centre.iter().enumerate() {
        if let Some(c) = c {
            by_centre[*c].push(v);
        }
    }
    state.units.extend(by_centre.into_iter().filter(|c| !c.is_empty()));

    let cap = ctx.profile().brute_force_cap;
    let fixed = &state.fixed;
    let solutions: Vec<Result<Vec<usize>>> = state
        .units
        .par_iter()
        .enumerate()
        .map(|(u, unit)| {
            let local = local_restrict(inst, unit);
            let (sol, _) = local_opt(&local, fixed, cap, u)?;
            Ok(sol.ones_iter().map(|i| local.to_parent[i]).collect())
        })
        .collect();
    let mut assignment = Assignment::zeros(n);
    for ones in solutions {
        for v in ones? {
            assignment.values[v] = true;
        }
    }
    let violations = feasible(inst, &assignment)?;
    ensure!(violations.is_empty(), "packing output violates constraints {:?}", violations.iter().map(|v| v.constraint).collect::<Vec<_>>());
    let deleted = (0..n).filter(|&v| fixed.status(v) == crate::ilp::VarStatus::DeletedZero).collect();
    Ok(PackOutcome { weight: assignment.total(inst.weights()), assignment, units: state.units, deleted, params, estimates: est })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{brute_force_opt, Constraint};
    use crate::sim::{ConstantProfile, Topology};

    pub(crate) fn mis(n: usize, edges: &[(usize, usize)]) -> IlpInstance {
        IlpInstance::new(Sense::Packing, vec![1; n], edges.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect())
            .unwrap()
    }

    fn ctx_for(inst: &IlpInstance, seed: u64, profile: ConstantProfile) -> SimContext {
        let n = inst.var_count().max(1);
        SimContext::new(Topology::Hypergraph(inst.associated_hypergraph()), n, seed, profile).unwrap()
    }

    fn two_cycles() -> IlpInstance {
        let mut edges = Vec::new();
        for base in [0, 9] {
            for i in 0..9 {
                edges.push((base + i, base + (i + 1) % 9));
            }
        }
        mis(18, &edges)
    }

    #[test]
    fn trivial_instances() {
        let free = IlpInstance::new(Sense::Packing, vec![3, 1, 4], vec![]).unwrap();
        let mut ctx = ctx_for(&free, 0, ConstantProfile::desk());
        assert_eq!(approx_pack(&mut ctx, &free, 0.3).unwrap(), Assignment::ones(3));

        let single = IlpInstance::new(Sense::Packing, vec![7], vec![]).unwrap();
        let mut ctx = ctx_for(&single, 0, ConstantProfile::desk());
        let est = pack_prepare(&mut ctx, &single, 0.3).unwrap();
        assert!(est.components.iter().all(|c| c.vertices == vec![0] && c.own_weight == 7 && c.region_weight == 7));

        let k3 = mis(3, &[(0, 1), (1, 2), (0, 2)]);
        for seed in 0..20 {
            let mut ctx = ctx_for(&k3, seed, ConstantProfile::desk());
            let out = approx_pack_run(&mut ctx, &k3, 0.3).unwrap();
            assert_eq!(out.weight, 1);
            assert!(out.estimates.components.iter().all(|c| c.own_weight <= 1));
        }
        let vc = IlpInstance::new(Sense::Covering, vec![1], vec![]).unwrap();
        let mut ctx = ctx_for(&vc, 0, ConstantProfile::desk());
        assert!(approx_pack(&mut ctx, &vc, 0.3).is_err());
    }

    #[test]
    fn carve_on_a_path() {
        let n = 30;
        let inst = mis(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>());
        let mut ctx = ctx_for(&inst, 0, ConstantProfile::desk());
        let full = ctx.full_residual();
        let view = ctx.gather(&[0], 8, &full).unwrap();
        let c = grow_and_carve_packing(&view, (4, 9), &inst, &FixedState::all_free(n), 24).unwrap();
        assert!(c.j_star == 4 || c.j_star == 7);
        assert_eq!(c.deleted, vec![c.j_star + 1]);
        assert_eq!(c.removed, (0..=c.j_star).collect::<Vec<_>>());
        assert!(grow_and_carve_packing(&view, (5, 10), &inst, &FixedState::all_free(n), 24).is_err());

        let zero = IlpInstance::new(Sense::Packing, vec![0; n], inst.constraints().to_vec()).unwrap();
        let c = grow_and_carve_packing(&view, (4, 9), &zero, &FixedState::all_free(n), 24).unwrap();
        assert_eq!(c.j_star, 4);
    }

    #[test]
    fn two_nine_cycles() {
        let inst = two_cycles();
        let opt = brute_force_opt(&local_restrict(&inst, &(0..18).collect::<Vec<_>>()), &FixedState::all_free(18), 24).unwrap();
        assert_eq!(opt.total(&[1; 18]), 8);
        let mut good = 0;
        for seed in 0..40 {
            let mut ctx = ctx_for(&inst, seed, ConstantProfile::desk());
            let out = approx_pack_run(&mut ctx, &inst, 0.3).unwrap();
            assert!(feasible(&inst, &out.assignment).unwrap().is_empty());
            good += (out.weight as f64 >= 0.7 * 8.0) as usize;
        }
        assert!(good >= 36, "{good}");
    }

    #[test]
    fn small_radius_units_are_separated() {
        let n = 24;
        let inst = mis(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>());
        let profile = ConstantProfile { c_r: 0.01, t_offset: 2.5, ..ConstantProfile::desk() };
        let g = inst.associated_hypergraph().gaifman_graph();
        for seed in 0..20 {
            let mut ctx = ctx_for(&inst, seed, profile.clone());
            let out = approx_pack_run(&mut ctx, &inst, 0.5).unwrap();
            let mut unit = vec![usize::MAX; n];
            for (k, u) in out.units.iter().enumerate() {
                for &v in u {
                    assert_eq!(unit[v], usize::MAX);
                    unit[v] = k;
                }
            }
            for (u, v) in g.edges() {
                assert!(unit[u] == unit[v] || unit[u] == usize::MAX || unit[v] == usize::MAX);
            }
        }
    }
}
