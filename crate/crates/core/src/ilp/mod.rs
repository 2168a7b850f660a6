//! Packing and covering integer programs over 0/1 variables.
//!
//! Coefficients and bounds are exact rationals; nothing in here touches
//! floating point.

mod binarize;
pub mod json;
mod solver;

use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Hypergraph;

pub use binarize::{binarize, BoundedInstance, DecodeMap};
pub use solver::{brute_force_opt, DEFAULT_BRUTE_FORCE_CAP};

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlpError {
    #[error("variable {var} out of range ({n} variables)")]
    InvalidVariable { var: usize, n: usize },
    #[error("constraint {0}: variable listed twice")]
    RepeatedVariable(usize),
    #[error("constraint {0}: coefficient count does not match variable count")]
    Misaligned(usize),
    #[error("constraint {0}: negative coefficient or bound")]
    Negative(usize),
    #[error("weights has {got} entries, expected {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("total weight overflows 64 bits")]
    WeightOverflow,
    #[error("arithmetic overflow while scaling {0}")]
    Overflow(String),
    #[error("brute force over {free} free variables exceeds the cap of {cap}")]
    CapExceeded { free: usize, cap: usize },
    #[error("covering instance is infeasible")]
    Infeasible,
    #[error("variable {0} cannot leave its fixed state")]
    StatusConflict(usize),
    #[error("assignment has {got} values, instance has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Packing,
    Covering,
}

/// One row `sum coeffs[k] * x[vars[k]] (<= | >=) bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub vars: Vec<usize>,
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

impl Constraint {
    pub fn new(vars: Vec<usize>, coeffs: Vec<Rational>, bound: Rational) -> Self {
        Constraint { vars, coeffs, bound }
    }

    /// All coefficients one.
    pub fn unit(vars: Vec<usize>, bound: i64) -> Self {
        let coeffs = vec![Rational::from_integer(1); vars.len()];
        Constraint { vars, coeffs, bound: Rational::from_integer(bound) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    sense: Sense,
    weights: Vec<u64>,
    constraints: Vec<Constraint>,
}

impl IlpInstance {
    /// Validates and normalises: zero-coefficient entries leave the support,
    /// negative entries are rejected.
    pub fn new(sense: Sense, weights: Vec<u64>, constraints: Vec<Constraint>) -> Result<Self, IlpError> {
        let n = weights.len();
        weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w)).ok_or(IlpError::WeightOverflow)?;
        let mut clean = Vec::with_capacity(constraints.len());
        for (j, c) in constraints.into_iter().enumerate() {
            if c.vars.len() != c.coeffs.len() {
                return Err(IlpError::Misaligned(j));
            }
            if c.bound < Rational::zero() {
                return Err(IlpError::Negative(j));
            }
            let mut seen = BTreeSet::new();
            let mut vars = Vec::with_capacity(c.vars.len());
            let mut coeffs = Vec::with_capacity(c.vars.len());
            for (&v, &a) in c.vars.iter().zip(&c.coeffs) {
                if v >= n {
                    return Err(IlpError::InvalidVariable { var: v, n });
                }
                if !seen.insert(v) {
                    return Err(IlpError::RepeatedVariable(j));
                }
                if a < Rational::zero() {
                    return Err(IlpError::Negative(j));
                }
                if !a.is_zero() {
                    vars.push(v);
                    coeffs.push(a);
                }
            }
            clean.push(Constraint { vars, coeffs, bound: c.bound });
        }
        Ok(IlpInstance { sense, weights, constraints: clean })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn var_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// One hyperedge per constraint with nonempty support, vertices = variables.
    ///
    /// Empty-support constraints impose nothing on the variables and have no
    /// hyperedge; hyperedge ids therefore equal constraint ids only when every
    /// support is nonempty (see [`IlpInstance::hyperedge_constraints`]).
    pub fn associated_hypergraph(&self) -> Hypergraph {
        let edges = self.constraints.iter().filter(|c| !c.vars.is_empty()).map(|c| c.vars.clone()).collect();
        Hypergraph::new(self.var_count(), edges).expect("supports are validated")
    }

    /// Constraint id of each hyperedge of [`IlpInstance::associated_hypergraph`].
    pub fn hyperedge_constraints(&self) -> Vec<usize> {
        (0..self.constraints.len()).filter(|&j| !self.constraints[j].vars.is_empty()).collect()
    }
}

/// Free-function form of [`IlpInstance::associated_hypergraph`].
pub fn associated_hypergraph(inst: &IlpInstance) -> Hypergraph {
    inst.associated_hypergraph()
}

/// A 0/1 vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment { values: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Assignment { values: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Total weight over every variable.
    pub fn total(&self, w: &[u64]) -> u64 {
        self.ones_iter().map(|i| w[i]).sum()
    }
}

/// `W(a, S) = sum over v in S of w_v * a_v`.
pub fn weight(a: &Assignment, set: &[usize], w: &[u64]) -> u64 {
    set.iter().filter(|&&v| a.values[v]).map(|&v| w[v]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarStatus {
    Free,
    FixedOne,
    DeletedZero,
}

/// Per-variable status threaded through the pipelines. Fixed and deleted are
/// absorbing states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedState {
    status: Vec<VarStatus>,
}

impl FixedState {
    pub fn all_free(n: usize) -> Self {
        FixedState { status: vec![VarStatus::Free; n] }
    }

    pub fn status(&self, v: usize) -> VarStatus {
        self.status[v]
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    pub fn fix_one(&mut self, v: usize) -> Result<(), IlpError> {
        match self.status[v] {
            VarStatus::DeletedZero => Err(IlpError::StatusConflict(v)),
            _ => {
                self.status[v] = VarStatus::FixedOne;
                Ok(())
            }
        }
    }

    pub fn delete(&mut self, v: usize) -> Result<(), IlpError> {
        match self.status[v] {
            VarStatus::FixedOne => Err(IlpError::StatusConflict(v)),
            _ => {
                self.status[v] = VarStatus::DeletedZero;
                Ok(())
            }
        }
    }

    pub fn fixed_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.status.len()).filter(|&v| self.status[v] == VarStatus::FixedOne)
    }

    /// Assignment with exactly the fixed-one variables set.
    pub fn as_assignment(&self) -> Assignment {
        Assignment { values: self.status.iter().map(|&s| s == VarStatus::FixedOne).collect() }
    }
}

/// A restriction of a parent instance to a variable subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInstance {
    /// The restricted program over local ids `0..to_parent.len()`.
    pub instance: IlpInstance,
    /// Local variable id to parent variable id.
    pub to_parent: Vec<usize>,
    /// Local constraint id to parent constraint id.
    pub constraint_parent: Vec<usize>,
}

impl LocalInstance {
    /// Lifts a local assignment onto the parent's variable set (zeros elsewhere).
    pub fn lift(&self, local: &Assignment, parent_vars: usize) -> Assignment {
        let mut out = Assignment::zeros(parent_vars);
        for i in local.ones_iter() {
            out.values[self.to_parent[i]] = true;
        }
        out
    }

    /// Weight of a local assignment in parent weights.
    pub fn weight_of(&self, local: &Assignment) -> u64 {
        local.ones_iter().map(|i| self.instance.weights[i]).sum()
    }
}

/// Restriction of `inst` to variable set `set`.
///
/// Packing keeps every constraint meeting `set`, with outside variables
/// dropped (they are zero). Covering keeps only constraints whose whole
/// support lies in `set`.
pub fn local_restrict(inst: &IlpInstance, set: &[usize]) -> LocalInstance {
    local_restrict_filtered(inst, set, |_| true)
}

/// [`local_restrict`] considering only constraints accepted by `live`.
pub fn local_restrict_filtered(inst: &IlpInstance, set: &[usize], live: impl Fn(usize) -> bool) -> LocalInstance {
    let mut to_parent = set.to_vec();
    to_parent.sort_unstable();
    to_parent.dedup();
    let mut local = vec![usize::MAX; inst.var_count()];
    for (i, &v) in to_parent.iter().enumerate() {
        local[v] = i;
    }
    let mut constraints = Vec::new();
    let mut constraint_parent = Vec::new();
    for (j, c) in inst.constraints.iter().enumerate() {
        if !live(j) {
            continue;
        }
        let inside = c.vars.iter().filter(|&&v| local[v] != usize::MAX).count();
        let keep = match inst.sense {
            Sense::Packing => inside > 0,
            Sense::Covering => inside == c.vars.len(),
        };
        if !keep {
            continue;
        }
        let (vars, coeffs) = c
            .vars
            .iter()
            .zip(&c.coeffs)
            .filter(|(&v, _)| local[v] != usize::MAX)
            .map(|(&v, &a)| (local[v], a))
            .unzip();
        constraints.push(Constraint { vars, coeffs, bound: c.bound });
        constraint_parent.push(j);
    }
    let weights = to_parent.iter().map(|&v| inst.weights[v]).collect();
    LocalInstance {
        instance: IlpInstance { sense: inst.sense, weights, constraints },
        to_parent,
        constraint_parent,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: usize,
    pub achieved: Rational,
    pub bound: Rational,
}

/// Constraint rows that `a` violates; empty iff `a` is feasible.
pub fn feasible(inst: &IlpInstance, a: &Assignment) -> Result<Vec<Violation>, IlpError> {
    if a.len() != inst.var_count() {
        return Err(IlpError::LengthMismatch { expected: inst.var_count(), got: a.len() });
    }
    let mut out = Vec::new();
    for (j, c) in inst.constraints.iter().enumerate() {
        let achieved = c
            .vars
            .iter()
            .zip(&c.coeffs)
            .filter(|(&v, _)| a.values[v])
            .try_fold(Rational::zero(), |acc, (_, coeff)| acc.checked_add(coeff))
            .ok_or_else(|| IlpError::Overflow(format!("row {j}")))?;
        let ok = match inst.sense {
            Sense::Packing => achieved <= c.bound,
            Sense::Covering => achieved >= c.bound,
        };
        if !ok {
            out.push(Violation { constraint: j, achieved, bound: c.bound });
        }
    }
    Ok(out)
}

/// Integer form of a row: coefficients and bound multiplied by the lcm of
/// their denominators.
pub(crate) fn scale_row(c: &Constraint) -> Result<(Vec<i128>, i128), IlpError> {
    let overflow = || IlpError::Overflow("row scaling".into());
    let mut lcm: i128 = *c.bound.denom() as i128;
    for a in &c.coeffs {
        let d = *a.denom() as i128;
        lcm = lcm.checked_mul(d / gcd(lcm, d)).ok_or_else(overflow)?;
    }
    let scale = |r: &Rational| -> Result<i128, IlpError> {
        let r128 = Ratio::<i128>::new(*r.numer() as i128, *r.denom() as i128);
        let v = r128.checked_mul(&Ratio::from_integer(lcm)).ok_or_else(overflow)?;
        debug_assert!(v.is_integer());
        Ok(v.to_integer())
    };
    let coeffs = c.coeffs.iter().map(scale).collect::<Result<_, _>>()?;
    Ok((coeffs, scale(&c.bound)?))
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn mis(n: usize, edges: &[(usize, usize)]) -> IlpInstance {
        IlpInstance::new(Sense::Packing, vec![1; n], edges.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect())
            .unwrap()
    }

    pub(crate) fn vertex_cover(n: usize, edges: &[(usize, usize)]) -> IlpInstance {
        IlpInstance::new(Sense::Covering, vec![1; n], edges.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect())
            .unwrap()
    }

    #[test]
    fn hypergraph_of_triangle_cover() {
        let inst = vertex_cover(3, &[(0, 1), (1, 2), (0, 2)]);
        let h = inst.associated_hypergraph();
        assert_eq!(h.gaifman_graph(), crate::graph::generate(&crate::graph::FamilySpec::Clique(3), 0).unwrap());
        assert_eq!(h.edge_count(), 3);

        let all = IlpInstance::new(Sense::Packing, vec![1; 4], vec![Constraint::unit(vec![0, 1, 2, 3], 2)]).unwrap();
        assert_eq!(all.associated_hypergraph().hyperedges(), &[vec![0, 1, 2, 3]]);

        let free = IlpInstance::new(Sense::Packing, vec![1; 4], vec![]).unwrap();
        assert_eq!(free.associated_hypergraph().edge_count(), 0);
    }

    #[test]
    fn zero_coefficients_leave_support() {
        let c = Constraint::new(vec![0, 1], vec![Rational::from_integer(0), Rational::from_integer(2)], Rational::from_integer(3));
        let inst = IlpInstance::new(Sense::Packing, vec![1, 1], vec![c]).unwrap();
        assert_eq!(inst.constraints()[0].vars, vec![1]);
    }

    #[test]
    fn invalid_instances() {
        let neg = Constraint::new(vec![0], vec![Rational::from_integer(-1)], Rational::from_integer(1));
        assert_eq!(IlpInstance::new(Sense::Packing, vec![1], vec![neg]), Err(IlpError::Negative(0)));
        assert!(matches!(
            IlpInstance::new(Sense::Packing, vec![1], vec![Constraint::unit(vec![3], 1)]),
            Err(IlpError::InvalidVariable { .. })
        ));
        assert_eq!(
            IlpInstance::new(Sense::Packing, vec![1, 1], vec![Constraint::unit(vec![0, 0], 1)]),
            Err(IlpError::RepeatedVariable(0))
        );
        assert_eq!(IlpInstance::new(Sense::Packing, vec![u64::MAX, 1], vec![]), Err(IlpError::WeightOverflow));
    }

    #[test]
    fn restrict_packing_and_covering() {
        let p = mis(3, &[(0, 1), (1, 2)]);
        let local = local_restrict(&p, &[0, 2]);
        assert_eq!(local.to_parent, vec![0, 2]);
        assert_eq!(local.constraint_parent, vec![0, 1]);
        assert_eq!(local.instance.constraints()[0], Constraint::unit(vec![0], 1));
        assert_eq!(local.instance.constraints()[1], Constraint::unit(vec![1], 1));

        let c = vertex_cover(3, &[(0, 1), (1, 2)]);
        assert!(local_restrict(&c, &[0, 2]).instance.constraints().is_empty());

        for inst in [p, c] {
            let full = local_restrict(&inst, &[2, 0, 1]);
            assert_eq!(full.instance, inst);
            assert_eq!(full.to_parent, vec![0, 1, 2]);
        }
    }

    #[test]
    fn weights_and_feasibility() {
        let a = Assignment { values: vec![true, false, true] };
        assert_eq!(weight(&a, &[0, 1], &[3, 1, 4]), 3);
        assert_eq!(weight(&Assignment::zeros(3), &[0, 1, 2], &[3, 1, 4]), 0);
        assert_eq!(weight(&Assignment::ones(3), &[0, 1, 2], &[3, 1, 4]), 8);

        let p = mis(3, &[(0, 1), (1, 2)]);
        assert!(feasible(&p, &Assignment::zeros(3)).unwrap().is_empty());
        let c = vertex_cover(2, &[(0, 1)]);
        assert!(feasible(&c, &Assignment::ones(2)).unwrap().is_empty());
        let v = feasible(&c, &Assignment::zeros(2)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, 0);
        assert_eq!(v[0].achieved, Rational::zero());
        assert!(feasible(&c, &Assignment::zeros(3)).is_err());
    }

    #[test]
    fn fixed_state_is_absorbing() {
        let mut f = FixedState::all_free(3);
        f.fix_one(0).unwrap();
        f.fix_one(0).unwrap();
        f.delete(1).unwrap();
        assert_eq!(f.delete(0), Err(IlpError::StatusConflict(0)));
        assert_eq!(f.fix_one(1), Err(IlpError::StatusConflict(1)));
        assert_eq!(f.as_assignment().values, vec![true, false, false]);
    }

    #[test]
    fn scaling_is_exact() {
        let c = Constraint::new(vec![0, 1], vec![Rational::new(1, 2), Rational::new(2, 3)], Rational::new(5, 4));
        let (coeffs, bound) = scale_row(&c).unwrap();
        assert_eq!(coeffs, vec![6, 8]);
        assert_eq!(bound, 15);
    }
}
