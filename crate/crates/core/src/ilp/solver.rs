use super::{scale_row, Assignment, FixedState, IlpError, LocalInstance, Sense, VarStatus};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 28;

/// Exact optimum of a local instance by branch and bound.
///
/// Variables whose parent is `FixedOne` are forced to 1 and `DeletedZero` to
/// 0; the rest are enumerated. Packing maximises, covering minimises. The
/// returned assignment is over the local ids.
pub fn brute_force_opt(local: &LocalInstance, fixed: &FixedState, cap: usize) -> Result<Assignment, IlpError> {
    let inst = &local.instance;
    let n = inst.var_count();
    let status: Vec<VarStatus> = local.to_parent.iter().map(|&p| fixed.status(p)).collect();
    let free: Vec<usize> = (0..n).filter(|&i| status[i] == VarStatus::Free).collect();
    if free.len() > cap {
        return Err(IlpError::CapExceeded { free: free.len(), cap });
    }

    let mut rows = Vec::with_capacity(inst.constraints().len());
    for c in inst.constraints() {
        rows.push(scale_row(c)?);
    }
    let mut incident: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n];
    for (j, (coeffs, _)) in rows.iter().enumerate() {
        for (&v, &a) in inst.constraints()[j].vars.iter().zip(coeffs) {
            incident[v].push((j, a));
        }
    }
    let bounds: Vec<i128> = rows.iter().map(|r| r.1).collect();
    let mut load = vec![0i128; rows.len()];
    let mut values = vec![false; n];
    for i in 0..n {
        if status[i] == VarStatus::FixedOne {
            values[i] = true;
            for &(j, a) in &incident[i] {
                load[j] += a;
            }
        }
    }
    let weights = inst.weights();

    let mut search = Search { incident: &incident, weights, bounds: &bounds, load, values, best: None };
    match inst.sense() {
        Sense::Packing => {
            if search.load.iter().zip(&bounds).any(|(l, b)| l > b) {
                return Err(IlpError::Infeasible);
            }
            // zero-weight variables never improve a packing; leave them at 0
            let mut order: Vec<usize> = free.into_iter().filter(|&i| weights[i] > 0).collect();
            order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
            let mut suffix = vec![0u64; order.len() + 1];
            for k in (0..order.len()).rev() {
                suffix[k] = suffix[k + 1] + weights[order[k]];
            }
            let base = search.values.iter().zip(weights).filter(|(&b, _)| b).map(|(_, &w)| w).sum();
            search.pack(&order, &suffix, 0, base);
        }
        Sense::Covering => {
            let mut potential = vec![0i128; rows.len()];
            for &i in &free {
                for &(j, a) in &incident[i] {
                    potential[j] += a;
                }
            }
            let unsat = (0..rows.len()).filter(|&j| search.load[j] < bounds[j]).count();
            if (0..rows.len()).any(|j| search.load[j] + potential[j] < bounds[j]) {
                return Err(IlpError::Infeasible);
            }
            let mut order = free;
            order.sort_by(|&a, &b| incident[b].len().cmp(&incident[a].len()).then(a.cmp(&b)));
            let base = search.values.iter().zip(weights).filter(|(&b, _)| b).map(|(_, &w)| w).sum();
            search.cover(&order, 0, base, unsat, &mut potential);
        }
    }
    search.best.map(|(_, v)| Assignment { values: v }).ok_or(IlpError::Infeasible)
}

struct Search<'a> {
    incident: &'a [Vec<(usize, i128)>],
    weights: &'a [u64],
    bounds: &'a [i128],
    load: Vec<i128>,
    values: Vec<bool>,
    best: Option<(u64, Vec<bool>)>,
}

impl Search<'_> {
    fn pack(&mut self, order: &[usize], suffix: &[u64], k: usize, weight: u64) {
        if let Some((best, _)) = &self.best {
            if weight + suffix[k] <= *best {
                return;
            }
        }
        if k == order.len() {
            self.best = Some((weight, self.values.clone()));
            return;
        }
        let v = order[k];
        let fits = self.incident[v].iter().all(|&(j, a)| self.load[j] + a <= self.bounds[j]);
        if fits {
            for &(j, a) in self.incident[v].iter() {
                self.load[j] += a;
            }
            self.values[v] = true;
            self.pack(order, suffix, k + 1, weight + self.weights[v]);
            self.values[v] = false;
            for &(j, a) in self.incident[v].iter() {
                self.load[j] -= a;
            }
        }
        self.pack(order, suffix, k + 1, weight);
    }

    fn cover(&mut self, order: &[usize], k: usize, weight: u64, unsat: usize, potential: &mut [i128]) {
        if let Some((best, _)) = &self.best {
            if weight >= *best {
                return;
            }
        }
        if unsat == 0 {
            self.best = Some((weight, self.values.clone()));
            return;
        }
        if k == order.len() {
            return;
        }
        let v = order[k];
        for &(j, a) in self.incident[v].iter() {
            potential[j] -= a;
        }

        // x_v = 1
        let mut newly = 0;
        for &(j, a) in self.incident[v].iter() {
            if self.load[j] < self.bounds[j] && self.load[j] + a >= self.bounds[j] {
                newly += 1;
            }
            self.load[j] += a;
        }
        self.values[v] = true;
        self.cover(order, k + 1, weight + self.weights[v], unsat - newly, potential);
        self.values[v] = false;
        for &(j, a) in self.incident[v].iter() {
            self.load[j] -= a;
        }

        // x_v = 0, only if every row stays satisfiable
        if self.incident[v].iter().all(|&(j, _)| self.load[j] + potential[j] >= self.bounds[j]) {
            self.cover(order, k + 1, weight, unsat, potential);
        }
        for &(j, a) in self.incident[v].iter() {
            potential[j] += a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{feasible, local_restrict, Constraint, IlpInstance, Rational};

    fn edges_of(n: usize, cyc: bool) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if cyc {
            e.push((0, n - 1));
        }
        e
    }

    fn solve_all(inst: &IlpInstance) -> Result<Assignment, IlpError> {
        let all: Vec<usize> = (0..inst.var_count()).collect();
        brute_force_opt(&local_restrict(inst, &all), &FixedState::all_free(inst.var_count()), DEFAULT_BRUTE_FORCE_CAP)
    }

    /// Plain enumeration over all 2^n assignments.
    fn enumerate_opt(inst: &IlpInstance) -> Option<u64> {
        let n = inst.var_count();
        let mut best: Option<u64> = None;
        for mask in 0u32..1 << n {
            let a = Assignment { values: (0..n).map(|i| mask >> i & 1 == 1).collect() };
            if feasible(inst, &a).unwrap().is_empty() {
                let w = a.total(inst.weights());
                best = Some(match (best, inst.sense()) {
                    (None, _) => w,
                    (Some(b), Sense::Packing) => b.max(w),
                    (Some(b), Sense::Covering) => b.min(w),
                });
            }
        }
        best
    }

    #[test]
    fn clique_and_cycle_optima() {
        let k3 = [(0, 1), (1, 2), (0, 2)];
        let mis = IlpInstance::new(Sense::Packing, vec![1; 3], k3.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect()).unwrap();
        assert_eq!(solve_all(&mis).unwrap().total(mis.weights()), 1);
        let vc = IlpInstance::new(Sense::Covering, vec![1; 3], k3.iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect()).unwrap();
        assert_eq!(solve_all(&vc).unwrap().total(vc.weights()), 2);

        let c5 = IlpInstance::new(
            Sense::Packing,
            vec![1; 5],
            edges_of(5, true).iter().map(|&(u, v)| Constraint::unit(vec![u, v], 1)).collect(),
        )
        .unwrap();
        assert_eq!(enumerate_opt(&c5), Some(2));
        assert_eq!(solve_all(&c5).unwrap().total(c5.weights()), 2);
    }

    #[test]
    fn cap_and_infeasibility() {
        let inst = IlpInstance::new(Sense::Packing, vec![1; 30], vec![]).unwrap();
        let all: Vec<usize> = (0..30).collect();
        let err = brute_force_opt(&local_restrict(&inst, &all), &FixedState::all_free(30), 28).unwrap_err();
        assert_eq!(err, IlpError::CapExceeded { free: 30, cap: 28 });

        let bad = IlpInstance::new(Sense::Covering, vec![1, 1], vec![Constraint::unit(vec![0, 1], 3)]).unwrap();
        assert_eq!(solve_all(&bad), Err(IlpError::Infeasible));
    }

    #[test]
    fn fixed_variables_are_respected() {
        let vc = IlpInstance::new(Sense::Covering, vec![1, 1, 1], vec![Constraint::unit(vec![0, 1], 1), Constraint::unit(vec![1, 2], 1)]).unwrap();
        let all = [0, 1, 2];
        let mut fixed = FixedState::all_free(3);
        fixed.fix_one(0).unwrap();
        let a = brute_force_opt(&local_restrict(&vc, &all), &fixed, 28).unwrap();
        assert!(a.values[0]);
        assert_eq!(a.total(vc.weights()), 2);

        let mut fixed = FixedState::all_free(3);
        fixed.delete(1).unwrap();
        let mis = IlpInstance::new(Sense::Packing, vec![1, 5, 1], vec![Constraint::unit(vec![0, 1], 1), Constraint::unit(vec![1, 2], 1)]).unwrap();
        let a = brute_force_opt(&local_restrict(&mis, &all), &fixed, 28).unwrap();
        assert_eq!(a.values, vec![true, false, true]);
    }

    #[test]
    fn matches_enumeration_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..300 {
            let n = rng.gen_range(1..=10);
            let sense = if round % 2 == 0 { Sense::Packing } else { Sense::Covering };
            let m = rng.gen_range(0..=8);
            let mut cons = Vec::new();
            for _ in 0..m {
                let k = rng.gen_range(1..=n.min(4));
                let mut vars: Vec<usize> = (0..n).collect();
                for i in 0..k {
                    let j = rng.gen_range(i..n);
                    vars.swap(i, j);
                }
                vars.truncate(k);
                let coeffs = (0..k).map(|_| Rational::new(rng.gen_range(1..=6), rng.gen_range(1..=3))).collect();
                cons.push(Constraint::new(vars, coeffs, Rational::new(rng.gen_range(0..=8), rng.gen_range(1..=2))));
            }
            let weights = (0..n).map(|_| rng.gen_range(0..=9)).collect();
            let inst = IlpInstance::new(sense, weights, cons).unwrap();
            let expected = enumerate_opt(&inst);
            match solve_all(&inst) {
                Ok(a) => {
                    assert!(feasible(&inst, &a).unwrap().is_empty());
                    assert_eq!(Some(a.total(inst.weights())), expected, "round {round}");
                }
                Err(IlpError::Infeasible) => assert_eq!(expected, None, "round {round}"),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
