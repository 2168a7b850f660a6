//! Reduction of bounded-integer programs (`0 <= x_i <= s_i`) to 0/1 programs.

use num_traits::CheckedMul;

use super::{Constraint, IlpError, IlpInstance, Rational, Sense};

/// A packing or covering program over integer variables `0..=upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedInstance {
    pub sense: Sense,
    pub weights: Vec<u64>,
    pub upper: Vec<u64>,
    pub constraints: Vec<Constraint>,
}

/// Maps a 0/1 solution of the binarised program back to integer values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeMap {
    /// For each original variable, its bit variables and their place values.
    pub bits: Vec<Vec<(usize, u64)>>,
    pub upper: Vec<u64>,
    pub sense: Sense,
}

impl DecodeMap {
    /// Integer values; covering values above the range are clamped to it.
    pub fn decode(&self, values: &[bool]) -> Vec<u64> {
        self.bits
            .iter()
            .zip(&self.upper)
            .map(|(bits, &s)| {
                let raw: u64 = bits.iter().filter(|(b, _)| values[*b]).map(|(_, p)| p).sum();
                raw.min(s)
            })
            .collect()
    }

    /// Covering variables whose bit patterns can exceed the range. For these,
    /// decode clamps and an optimum of the binary program need not decode to
    /// an optimum (or even a feasible point) of the original.
    pub fn clamp_warnings(&self) -> Vec<usize> {
        if self.sense != Sense::Covering {
            return Vec::new();
        }
        (0..self.upper.len()).filter(|&i| !(self.upper[i] + 1).is_power_of_two()).collect()
    }
}

/// Splits every variable with range `0..=s` into `ceil(log2(s + 1))` bits with
/// place values `1, 2, 4, ...`. For packing, a variable whose range is not
/// `2^k - 1` also gets a row `sum 2^k x^(k) <= s`.
pub fn binarize(general: &BoundedInstance) -> Result<(IlpInstance, DecodeMap), IlpError> {
    let n = general.weights.len();
    if general.upper.len() != n {
        return Err(IlpError::WeightCount { expected: n, got: general.upper.len() });
    }
    let overflow = |what: &str| IlpError::Overflow(what.to_string());
    let mut weights = Vec::new();
    let mut bits = Vec::with_capacity(n);
    for i in 0..n {
        let s = general.upper[i];
        if s == 0 {
            return Err(IlpError::Json(format!("variable {i} has empty range")));
        }
        let count = 64 - s.leading_zeros();
        let mut list = Vec::with_capacity(count as usize);
        for k in 0..count {
            let place = 1u64 << k;
            let w = general.weights[i].checked_mul(place).ok_or_else(|| overflow("weight"))?;
            list.push((weights.len(), place));
            weights.push(w);
        }
        bits.push(list);
    }

    let mut constraints = Vec::with_capacity(general.constraints.len() + n);
    for c in &general.constraints {
        let mut vars = Vec::new();
        let mut coeffs = Vec::new();
        for (&v, &a) in c.vars.iter().zip(&c.coeffs) {
            let list = bits.get(v).ok_or(IlpError::InvalidVariable { var: v, n })?;
            for &(b, place) in list {
                let scaled = a.checked_mul(&Rational::from_integer(place as i64)).ok_or_else(|| overflow("coefficient"))?;
                vars.push(b);
                coeffs.push(scaled);
            }
        }
        constraints.push(Constraint { vars, coeffs, bound: c.bound });
    }
    if general.sense == Sense::Packing {
        for i in 0..n {
            let s = general.upper[i];
            if !(s + 1).is_power_of_two() {
                let (vars, coeffs) = bits[i].iter().map(|&(b, p)| (b, Rational::from_integer(p as i64))).unzip();
                constraints.push(Constraint { vars, coeffs, bound: Rational::from_integer(s as i64) });
            }
        }
    }
    let inst = IlpInstance::new(general.sense, weights, constraints)?;
    Ok((inst, DecodeMap { bits, upper: general.upper.clone(), sense: general.sense }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{brute_force_opt, feasible, local_restrict, Assignment, FixedState};
    use rand::{Rng, SeedableRng};

    fn solve(inst: &IlpInstance) -> Option<u64> {
        let all: Vec<usize> = (0..inst.var_count()).collect();
        brute_force_opt(&local_restrict(inst, &all), &FixedState::all_free(inst.var_count()), 28)
            .ok()
            .map(|a| a.total(inst.weights()))
    }

    /// Direct enumeration over the integer box.
    fn bounded_opt(g: &BoundedInstance) -> Option<u64> {
        let n = g.weights.len();
        let mut x = vec![0u64; n];
        let mut best: Option<u64> = None;
        loop {
            let ok = g.constraints.iter().all(|c| {
                let lhs: Rational = c.vars.iter().zip(&c.coeffs).map(|(&v, &a)| a * Rational::from_integer(x[v] as i64)).sum();
                match g.sense {
                    Sense::Packing => lhs <= c.bound,
                    Sense::Covering => lhs >= c.bound,
                }
            });
            if ok {
                let w: u64 = (0..n).map(|i| g.weights[i] * x[i]).sum();
                best = Some(match (best, g.sense) {
                    (None, _) => w,
                    (Some(b), Sense::Packing) => b.max(w),
                    (Some(b), Sense::Covering) => b.min(w),
                });
            }
            let mut i = 0;
            while i < n && x[i] == g.upper[i] {
                x[i] = 0;
                i += 1;
            }
            if i == n {
                return best;
            }
            x[i] += 1;
        }
    }

    #[test]
    fn single_variable_bits() {
        let g = BoundedInstance { sense: Sense::Packing, weights: vec![5], upper: vec![3], constraints: vec![] };
        let (inst, map) = binarize(&g).unwrap();
        assert_eq!(inst.weights(), &[5, 10]);
        assert!(inst.constraints().is_empty());
        assert_eq!(map.decode(&[true, true]), vec![3]);
    }

    #[test]
    fn unit_ranges_are_identity() {
        let c = Constraint::unit(vec![0, 1], 1);
        let g = BoundedInstance { sense: Sense::Covering, weights: vec![2, 3], upper: vec![1, 1], constraints: vec![c.clone()] };
        let (inst, map) = binarize(&g).unwrap();
        assert_eq!(inst, IlpInstance::new(Sense::Covering, vec![2, 3], vec![c]).unwrap());
        assert_eq!(map.decode(&[true, false]), vec![1, 0]);
        assert!(map.clamp_warnings().is_empty());
    }

    #[test]
    fn overflow_is_reported() {
        let g = BoundedInstance { sense: Sense::Packing, weights: vec![u64::MAX / 2], upper: vec![7], constraints: vec![] };
        assert!(matches!(binarize(&g), Err(IlpError::Overflow(_))));
    }

    #[test]
    fn covering_clamp_warning() {
        let g = BoundedInstance { sense: Sense::Covering, weights: vec![1, 1], upper: vec![2, 3], constraints: vec![] };
        let (_, map) = binarize(&g).unwrap();
        assert_eq!(map.clamp_warnings(), vec![0]);
        assert_eq!(map.decode(&[true, true, true, true]), vec![2, 3]);
    }

    #[test]
    fn decoded_optimum_matches_integer_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for round in 0..200 {
            let sense = if round % 2 == 0 { Sense::Packing } else { Sense::Covering };
            let upper: Vec<u64> = (0..3)
                .map(|_| match sense {
                    Sense::Packing => rng.gen_range(1..=3),
                    Sense::Covering => [1, 3][rng.gen_range(0..2)],
                })
                .collect();
            let weights: Vec<u64> = (0..3).map(|_| rng.gen_range(0..=5)).collect();
            let constraints = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let vars: Vec<usize> = (0..3).filter(|_| rng.gen_bool(0.6)).collect();
                    let coeffs = vars.iter().map(|_| Rational::new(rng.gen_range(1..=4), rng.gen_range(1..=2))).collect();
                    Constraint::new(vars, coeffs, Rational::from_integer(rng.gen_range(0..=7)))
                })
                .collect();
            let g = BoundedInstance { sense, weights, upper, constraints };
            let (inst, map) = binarize(&g).unwrap();
            let expected = bounded_opt(&g);
            assert_eq!(solve(&inst), expected, "round {round}");
            if expected.is_some() {
                let all: Vec<usize> = (0..inst.var_count()).collect();
                let a: Assignment = brute_force_opt(&local_restrict(&inst, &all), &FixedState::all_free(inst.var_count()), 28).unwrap();
                assert!(feasible(&inst, &a).unwrap().is_empty());
                let x = map.decode(&a.values);
                let w: u64 = (0..3).map(|i| g.weights[i] * x[i]).sum();
                assert_eq!(Some(w), expected, "round {round}");
            }
        }
    }
}
