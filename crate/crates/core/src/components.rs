//! Pieces shared by the packing and covering pipelines: preparation
//! components with their local-optimum estimates, and conflict resolution
//! between concurrent carves.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::ilp::{brute_force_opt, local_restrict, Assignment, FixedState, IlpInstance, LocalInstance};
use crate::sim::SimContext;

/// A cluster of one preparation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Which preparation run produced it.
    pub run: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// `W(local optimum on C)`.
    pub own_weight: u64,
    /// `W(local optimum on N^{8tR}(C))`.
    pub region_weight: u64,
}

impl Component {
    /// `min(1, factor * own / region)`, or 0 when the region optimum is 0.
    pub fn sampling_probability(&self, factor: f64) -> f64 {
        if self.region_weight == 0 {
            0.0
        } else {
            (factor * self.own_weight as f64 / self.region_weight as f64).min(1.0)
        }
    }
}

/// All preparation components, ordered by `(run, cluster)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEstimates {
    pub components: Vec<Component>,
    /// Radius of the region `N^{8tR}(C)`.
    pub region_radius: usize,
}

/// Checks that the context's topology is the hypergraph associated with `inst`.
pub(crate) fn check_topology(ctx: &SimContext, inst: &IlpInstance) -> Result<()> {
    let h = ctx.hypergraph().ok_or(Error::NotHypergraph)?;
    let supports: Vec<&Vec<usize>> = inst.constraints().iter().map(|c| &c.vars).filter(|v| !v.is_empty()).collect();
    let same = h.vertex_count() == inst.var_count()
        && h.edge_count() == supports.len()
        && h.hyperedges().iter().zip(&supports).all(|(e, s)| {
            let mut s = s.to_vec();
            s.sort_unstable();
            s.dedup();
            *e == s
        });
    if !same {
        return Err(Error::Parameter("context topology is not the instance's hypergraph".into()));
    }
    Ok(())
}

/// Exact local optimum on `set` and its weight.
pub(crate) fn local_opt(
    local: &LocalInstance,
    fixed: &FixedState,
    cap: usize,
    component: usize,
) -> Result<(Assignment, u64)> {
    let sol = brute_force_opt(local, fixed, cap).map_err(|source| Error::Component { component, source })?;
    let w = local.weight_of(&sol);
    Ok((sol, w))
}

/// Turns clusters of several preparation runs into components with their
/// own and region optima. Region optima are memoized by vertex set.
pub(crate) fn estimate_components(
    ctx: &mut SimContext,
    inst: &IlpInstance,
    runs: Vec<Vec<Vec<usize>>>,
    region_radius: usize,
    phase: &str,
) -> Result<ComponentEstimates> {
    ctx.begin_phase(phase);
    ctx.charge(region_radius);
    let cap = ctx.profile().brute_force_cap;
    let free = FixedState::all_free(inst.var_count());
    let mut memo: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut opt = |set: Vec<usize>, id: usize| -> Result<u64> {
        if let Some(&w) = memo.get(&set) {
            return Ok(w);
        }
        let w = local_opt(&local_restrict(inst, &set), &free, cap, id)?.1;
        memo.insert(set, w);
        Ok(w)
    };
    let mut components = Vec::new();
    for (run, clusters) in runs.into_iter().enumerate() {
        for mut vertices in clusters {
            vertices.sort_unstable();
            let id = components.len();
            let dist = ctx.graph().bfs_distances(&vertices, region_radius);
            let region: Vec<usize> = (0..dist.len()).filter(|&v| dist[v] != usize::MAX).collect();
            let own_weight = opt(vertices.clone(), id)?;
            let region_weight = opt(region, id)?;
            ensure!(
                own_weight <= region_weight,
                "component {id}: own optimum {own_weight} exceeds region optimum {region_weight}"
            );
            components.push(Component { run, vertices, own_weight, region_weight });
        }
    }
    Ok(ComponentEstimates { components, region_radius })
}

/// Assigns every removed vertex to the first carve (in the given order) that
/// removed it. Vertices in `deleted` go to no carve. Returns the members of
/// each carve.
pub(crate) fn resolve_claims(n: usize, removed: &[Vec<usize>], deleted: &[bool]) -> Vec<Vec<usize>> {
    let mut claim = vec![usize::MAX; n];
    for (k, set) in removed.iter().enumerate() {
        for &v in set {
            if claim[v] == usize::MAX && !deleted[v] {
                claim[v] = k;
            }
        }
    }
    let mut members = vec![Vec::new(); removed.len()];
    for v in 0..n {
        if claim[v] != usize::MAX {
            members[claim[v]].push(v);
        }
    }
    members
}
