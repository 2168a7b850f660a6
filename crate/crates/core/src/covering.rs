//! `(1 + eps)`-approximate covering: preparation via sparse covers, carving
//! that permanently fixes the local optimum on the lightest pair of layers
//! and deletes the hyperedges between them, isolated-unit solves, and a
//! final sparse-cover solve of the residual hypergraph.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{cover_and_solve_live, sparse_cover_on};
use crate::components::{check_topology, estimate_components, local_opt, resolve_claims, ComponentEstimates};
use crate::error::{ensure, Error, Result};
use crate::ilp::{feasible, local_restrict_filtered, weight, Assignment, FixedState, IlpError, IlpInstance, Rational, Sense};
use crate::packing::prep_runs;
use crate::sim::{check_eps, intervals_for, unit_uniform, Flavor, Params, Residual, SimContext, View};

/// Rate of the preparation covers: geometric parameter `e^{-λ} = 20/21`.
pub fn prep_lambda() -> f64 {
    (21.0f64 / 20.0).ln()
}

/// Rate of the final cover, `ln((eps + 5) / 5)`.
pub fn final_lambda(eps: f64) -> f64 {
    ((eps + 5.0) / 5.0).ln()
}

fn check_covering(ctx: &SimContext, inst: &IlpInstance) -> Result<()> {
    if inst.sense() != Sense::Covering {
        return Err(Error::Parameter("expected a covering instance".into()));
    }
    check_topology(ctx, inst)?;
    if inst.constraints().iter().any(|c| c.vars.is_empty() && c.bound > Rational::zero()) {
        return Err(IlpError::Infeasible.into());
    }
    Ok(())
}

/// Every cluster of `ceil(prep_copies * ln ñ)` sparse covers with rate
/// `ln(21/20)`, with its own and region (`N^{8tR}(C)`) covering optimum.
pub fn cover_prepare(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<ComponentEstimates> {
    check_covering(ctx, inst)?;
    let Params { t, r } = ctx.params(Flavor::Covering, eps)?;
    let full = ctx.full_residual();
    let mut runs = Vec::new();
    for k in 0..prep_runs(ctx) {
        runs.push(sparse_cover_on(ctx, prep_lambda(), &full, &format!("cover/prep/{k}"))?.clusters);
    }
    estimate_components(ctx, inst, runs, 8 * t * r, "cover/prep/estimates")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCarveResult {
    /// Variables of `S_{j*} ∪ S_{j*+1}` set by the local optimum.
    pub fixed_ones: Vec<usize>,
    /// Constraint ids of the live hyperedges meeting both layers.
    pub deleted_hyperedges: Vec<usize>,
    /// `N^{j*}(C)`.
    pub removed: Vec<usize>,
    pub j_star: usize,
}

/// Covering carve. Solves the covering program of the live constraints
/// inside `N^b(C)` (the view) with the fixed ones forced, picks odd `j*` in
/// `[a, b]` minimising the optimum's weight on `S_{j*} ∪ S_{j*+1}`, fixes
/// the optimum's ones there, and deletes the hyperedges meeting both
/// layers, which those ones satisfy.
pub fn grow_and_carve_covering(
    view: &View,
    (a, b): (usize, usize),
    inst: &IlpInstance,
    fixed: &FixedState,
    cap: usize,
) -> Result<CoverCarveResult> {
    ensure!(a % 2 == 1 && b > a && (b - a + 1) % 2 == 0, "bad covering interval [{a}, {b}]");
    ensure!(view.radius() >= b, "view radius {} below b = {b}", view.radius());
    let edge_constraint = inst.hyperedge_constraints();
    let mut inside: Vec<usize> = view.inside_hyperedges().iter().map(|&e| edge_constraint[e]).collect();
    inside.sort_unstable();
    let local = local_restrict_filtered(inst, view.vertices(), |j| inside.binary_search(&j).is_ok());
    let (sol, total) = local_opt(&local, fixed, cap, view.sources().first().copied().unwrap_or(0))?;
    let lifted = local.lift(&sol, inst.var_count());
    let layer_weight = |j: usize| weight(&lifted, &view.layer(j), inst.weights());
    let candidates: Vec<usize> = (a..b).step_by(2).collect();
    let pair = |j: usize| layer_weight(j) + layer_weight(j + 1);
    let j_star = *candidates.iter().min_by_key(|&&j| (pair(j), j)).expect("interval has a candidate");
    ensure!(
        pair(j_star) * candidates.len() as u64 <= total,
        "lightest pair {} times {} candidates exceeds the local optimum {total}",
        pair(j_star),
        candidates.len()
    );
    let in_pair = |v: usize| matches!(view.dist_of(v), Some(d) if d == j_star || d == j_star + 1);
    let mut fixed_ones: Vec<usize> = view.layer(j_star);
    fixed_ones.extend(view.layer(j_star + 1));
    fixed_ones.retain(|&v| lifted.values[v]);
    fixed_ones.sort_unstable();

    let mut deleted_hyperedges = Vec::new();
    for &j in &inside {
        let c = &inst.constraints()[j];
        let meets = |d: usize| c.vars.iter().any(|&v| view.dist_of(v) == Some(d));
        if !(meets(j_star) && meets(j_star + 1)) {
            continue;
        }
        ensure!(c.vars.iter().all(|&v| in_pair(v)), "hyperedge {j} spans more than two layers");
        let value: Rational = c.vars.iter().zip(&c.coeffs).filter(|(&v, _)| lifted.values[v]).map(|(_, &a)| a).sum();
        ensure!(value >= c.bound, "deleted hyperedge {j} is not satisfied by the fixed ones");
        deleted_hyperedges.push(j);
    }
    Ok(CoverCarveResult { fixed_ones, deleted_hyperedges, removed: view.ball(j_star), j_star })
}

/// State of a hyperedge during the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeState {
    Live,
    /// Satisfied by fixed ones and removed.
    Deleted,
    /// Inside the given isolated unit.
    Unit(usize),
}

/// Everything [`approx_cover`] produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverOutcome {
    pub assignment: Assignment,
    pub weight: u64,
    pub fixed_ones: Vec<usize>,
    /// Isolated units (removed balls).
    pub units: Vec<Vec<usize>>,
    /// Per hyperedge of the associated hypergraph.
    pub edge_state: Vec<EdgeState>,
    /// Sum of the residual clusters' local optima.
    pub residual_weight_sum: u64,
    pub params: Params,
    pub estimates: ComponentEstimates,
}

struct CoverState {
    live: Vec<bool>,
    edges: Vec<EdgeState>,
    fixed: FixedState,
    units: Vec<Vec<usize>>,
}

impl CoverState {
    fn residual(&self) -> Residual {
        Residual { vertices: self.live.clone(), hyperedges: Some(self.edges.iter().map(|&s| s == EdgeState::Live).collect()) }
    }
}

fn cover_round(
    ctx: &mut SimContext,
    inst: &IlpInstance,
    est: &ComponentEstimates,
    state: &mut CoverState,
    interval: (usize, usize),
    factor: f64,
    tag: &str,
) -> Result<()> {
    ctx.begin_phase(tag);
    let cap = ctx.profile().brute_force_cap;
    let snapshot = state.residual();
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
        let view = ctx.gather(&sources, interval.1, &snapshot)?;
        let carve = grow_and_carve_covering(&view, interval, inst, &state.fixed, cap).map_err(|e| match e {
            Error::Component { source, .. } => Error::Component { component: k, source },
            other => other,
        })?;
        carves.push(carve);
    }

    let edge_of: Vec<Option<usize>> = {
        let mut m = vec![None; inst.constraints().len()];
        for (e, j) in inst.hyperedge_constraints().into_iter().enumerate() {
            m[j] = Some(e);
        }
        m
    };
    for carve in &carves {
        for &v in &carve.fixed_ones {
            state.fixed.fix_one(v)?;
        }
        for &j in &carve.deleted_hyperedges {
            state.edges[edge_of[j].expect("deleted constraints have support")] = EdgeState::Deleted;
        }
    }
    let n = state.live.len();
    let removed: Vec<Vec<usize>> = carves.into_iter().map(|c| c.removed).collect();
    let mut unit_of = vec![usize::MAX; n];
    for members in resolve_claims(n, &removed, &vec![false; n]) {
        if !members.is_empty() {
            for &v in &members {
                state.live[v] = false;
                unit_of[v] = state.units.len();
            }
            state.units.push(members);
        }
    }
    let h = ctx.hypergraph().expect("checked topology");
    for (e, members) in h.hyperedges().iter().enumerate() {
        if state.edges[e] != EdgeState::Live || members.iter().all(|&v| state.live[v]) {
            continue;
        }
        let u = unit_of[members[0]];
        ensure!(
            u != usize::MAX && members.iter().all(|&v| unit_of[v] == u),
            "live hyperedge {e} crosses the boundary of a removed ball"
        );
        state.edges[e] = EdgeState::Unit(u);
    }
    Ok(())
}

/// The covering pipeline. The output always satisfies every constraint.
pub fn approx_cover(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<Assignment> {
    Ok(approx_cover_run(ctx, inst, eps)?.assignment)
}

/// [`approx_cover`] with its intermediate structure.
pub fn approx_cover_run(ctx: &mut SimContext, inst: &IlpInstance, eps: f64) -> Result<CoverOutcome> {
    check_eps(eps)?;
    let est = cover_prepare(ctx, inst, eps)?;
    let params = ctx.params(Flavor::Covering, eps)?;
    let intervals = intervals_for(Flavor::Covering, params);
    let n = inst.var_count();
    let edge_count = ctx.hypergraph().expect("checked topology").edge_count();
    let mut state =
        CoverState { live: vec![true; n], edges: vec![EdgeState::Live; edge_count], fixed: FixedState::all_free(n), units: Vec::new() };
    for i in 1..=params.t {
        let factor = 2f64.powi(i as i32);
        cover_round(ctx, inst, &est, &mut state, intervals[i - 1], factor, &format!("cover/phase1/{i}"))?;
    }

    let cap = ctx.profile().brute_force_cap;
    let edge_constraint = inst.hyperedge_constraints();
    let mut constraint_state = vec![None; inst.constraints().len()];
    for (e, &j) in edge_constraint.iter().enumerate() {
        constraint_state[j] = Some(state.edges[e]);
    }
    let fixed = &state.fixed;
    let unit_solutions: Vec<Result<Vec<usize>>> = state
        .units
        .par_iter()
        .enumerate()
        .map(|(u, unit)| {
            let local = local_restrict_filtered(inst, unit, |j| constraint_state[j] == Some(EdgeState::Unit(u)));
            let (sol, _) = local_opt(&local, fixed, cap, u)?;
            Ok(sol.ones_iter().map(|i| local.to_parent[i]).collect())
        })
        .collect();

    let residual = state.residual();
    let cover = sparse_cover_on(ctx, final_lambda(eps), &residual, "cover/phase2")?;
    let rest = cover_and_solve_live(inst, &cover, fixed, |j| constraint_state[j] == Some(EdgeState::Live), cap)?;

    let mut assignment = rest.assignment;
    for ones in unit_solutions {
        for v in ones? {
            assignment.values[v] = true;
        }
    }
    let violations = feasible(inst, &assignment)?;
    ensure!(violations.is_empty(), "covering output violates constraints {:?}", violations.iter().map(|v| v.constraint).collect::<Vec<_>>());
    Ok(CoverOutcome {
        weight: assignment.total(inst.weights()),
        assignment,
        fixed_ones: fixed.fixed_ones().collect(),
        units: state.units,
        edge_state: state.edges,
        residual_weight_sum: rest.local_weight_sum,
        params,
        estimates: est,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, min_dominating_set_size, FamilySpec, Graph};
    use crate::ilp::Constraint;
    use crate::sim::{ConstantProfile, Topology};

    fn ctx_for(inst: &IlpInstance, seed: u64, profile: ConstantProfile) -> SimContext {
        let n = inst.var_count().max(1);
        SimContext::new(Topology::Hypergraph(inst.associated_hypergraph()), n, seed, profile).unwrap()
    }

    fn dominating_set(g: &Graph) -> IlpInstance {
        let n = g.vertex_count();
        let rows = (0..n)
            .map(|v| {
                let mut vars = vec![v];
                vars.extend_from_slice(g.neighbors(v));
                vars.sort_unstable();
                Constraint::unit(vars, 1)
            })
            .collect();
        IlpInstance::new(Sense::Covering, vec![1; n], rows).unwrap()
    }

    fn vertex_cover(n: usize, edges: &[(usize, usize)]) -> IlpInstance {
        IlpInstance::new(Sense::Covering, vec![1; n], edges.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect())
            .unwrap()
    }

    #[test]
    fn trivial_instances() {
        let one = IlpInstance::new(Sense::Covering, vec![5, 2], vec![Constraint::unit(vec![0], 1)]).unwrap();
        let mut ctx = ctx_for(&one, 0, ConstantProfile::desk());
        let out = approx_cover_run(&mut ctx, &one, 0.5).unwrap();
        assert_eq!((out.assignment.values.clone(), out.weight), (vec![true, false], 5));

        let free = IlpInstance::new(Sense::Covering, vec![1; 3], vec![]).unwrap();
        let mut ctx = ctx_for(&free, 0, ConstantProfile::desk());
        let out = approx_cover_run(&mut ctx, &free, 0.5).unwrap();
        assert_eq!(out.weight, 0);
        assert!(out.estimates.components.iter().all(|c| c.sampling_probability(1e9) == 0.0));

        let pair = vertex_cover(2, &[(0, 1)]);
        let mut ctx = ctx_for(&pair, 0, ConstantProfile::desk());
        let est = cover_prepare(&mut ctx, &pair, 0.5).unwrap();
        assert!(est.components.iter().any(|c| c.vertices == vec![0, 1] && c.own_weight == 1));

        let bad = IlpInstance::new(Sense::Covering, vec![1], vec![Constraint::unit(vec![], 1)]).unwrap();
        let mut ctx = SimContext::new(Topology::Hypergraph(bad.associated_hypergraph()), 1, 0, ConstantProfile::desk()).unwrap();
        assert!(matches!(approx_cover(&mut ctx, &bad, 0.5), Err(Error::Ilp(IlpError::Infeasible))));
    }

    #[test]
    fn carve_without_crossing_hyperedges() {
        let path = vertex_cover(8, &(0..7).map(|i| (i, i + 1)).collect::<Vec<_>>());
        let mut ctx = ctx_for(&path, 0, ConstantProfile::desk());
        let res = ctx.full_residual();
        let view = ctx.gather(&[0], 6, &res).unwrap();
        let c = grow_and_carve_covering(&view, (3, 6), &path, &FixedState::all_free(8), 24).unwrap();
        assert!(c.j_star % 2 == 1);
        assert!(c.fixed_ones.iter().all(|&v| v == c.j_star || v == c.j_star + 1));
        assert_eq!(c.deleted_hyperedges, vec![c.j_star]);
        assert_eq!(c.removed, (0..=c.j_star).collect::<Vec<_>>());

        let isolated = IlpInstance::new(Sense::Covering, vec![1; 8], vec![Constraint::unit(vec![0], 1)]).unwrap();
        let mut ctx = ctx_for(&isolated, 0, ConstantProfile::desk());
        let res = ctx.full_residual();
        let view = ctx.gather(&[0], 6, &res).unwrap();
        let c = grow_and_carve_covering(&view, (3, 6), &isolated, &FixedState::all_free(8), 24).unwrap();
        assert_eq!((c.j_star, c.deleted_hyperedges.len()), (3, 0));
    }

    #[test]
    fn dominating_set_on_c12() {
        let g = generate(&FamilySpec::Cycle(12), 0).unwrap();
        assert_eq!(min_dominating_set_size(&g), 4);
        let inst = dominating_set(&g);
        let mut total = 0;
        for seed in 0..30 {
            let mut ctx = ctx_for(&inst, seed, ConstantProfile::desk());
            let out = approx_cover_run(&mut ctx, &inst, 0.5).unwrap();
            assert!(feasible(&inst, &out.assignment).unwrap().is_empty());
            total += out.weight;
        }
        assert!(total as f64 / 30.0 <= 1.5 * 4.0);
    }

    #[test]
    fn small_radius_pipeline() {
        let edges: Vec<(usize, usize)> = (0..60).filter(|i| i % 20 != 19).map(|i| (i, i + 1)).collect();
        let inst = dominating_set(&Graph::from_edges(60, &edges).unwrap());
        let profile = ConstantProfile { c_r: 0.01, covering_t_offset: 0.5, ..ConstantProfile::desk() };
        let mut carved = 0;
        for seed in 0..20 {
            let mut ctx = ctx_for(&inst, seed, profile.clone());
            let out = approx_cover_run(&mut ctx, &inst, 0.5).unwrap();
            assert!(feasible(&inst, &out.assignment).unwrap().is_empty());
            carved += out.units.len();
            for (e, s) in out.edge_state.iter().enumerate() {
                if *s == EdgeState::Deleted {
                    let c = &inst.constraints()[inst.hyperedge_constraints()[e]];
                    assert!(c.vars.iter().any(|v| out.fixed_ones.contains(v)));
                }
            }
        }
        assert!(carved > 0);
    }
}
