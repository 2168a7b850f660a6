//! JSON encoding of ILP instances:
//! `{"sense":"packing"|"covering","n":int,"weights":[int...],"constraints":[{"vars":[int...],"coeffs":[num...],"bound":num}...]}`.
//!
//! Numbers are decoded from their literal text, so decimals stay exact.
//! Rationals without a terminating decimal expansion are encoded as strings
//! `"p/q"`, which the decoder also accepts.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use super::{Constraint, IlpError, IlpInstance, Rational, Sense};

#[derive(Serialize, Deserialize)]
struct RawInstance {
    sense: Sense,
    n: usize,
    weights: Vec<u64>,
    constraints: Vec<RawConstraint>,
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    vars: Vec<usize>,
    coeffs: Vec<Value>,
    bound: Value,
}

pub fn from_json(text: &str) -> Result<IlpInstance, IlpError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| IlpError::Json(e.to_string()))?;
    if raw.weights.len() != raw.n {
        return Err(IlpError::WeightCount { expected: raw.n, got: raw.weights.len() });
    }
    let constraints = raw
        .constraints
        .into_iter()
        .map(|c| {
            let coeffs = c.coeffs.iter().map(parse_rational).collect::<Result<_, _>>()?;
            Ok(Constraint { vars: c.vars, coeffs, bound: parse_rational(&c.bound)? })
        })
        .collect::<Result<Vec<_>, IlpError>>()?;
    IlpInstance::new(raw.sense, raw.weights, constraints)
}

pub fn to_json(inst: &IlpInstance) -> String {
    let raw = RawInstance {
        sense: inst.sense(),
        n: inst.var_count(),
        weights: inst.weights().to_vec(),
        constraints: inst
            .constraints()
            .iter()
            .map(|c| RawConstraint {
                vars: c.vars.clone(),
                coeffs: c.coeffs.iter().map(encode_rational).collect(),
                bound: encode_rational(&c.bound),
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("plain data serialises")
}

fn parse_rational(v: &Value) -> Result<Rational, IlpError> {
    match v {
        Value::Number(n) => parse_decimal(&n.to_string()),
        Value::String(s) => match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| IlpError::Json(format!("bad rational {s:?}")))?;
                let q: i64 = q.trim().parse().map_err(|_| IlpError::Json(format!("bad rational {s:?}")))?;
                if q == 0 {
                    return Err(IlpError::Json(format!("zero denominator in {s:?}")));
                }
                Ok(Rational::new(p, q))
            }
            None => parse_decimal(s),
        },
        other => Err(IlpError::Json(format!("expected number, got {other}"))),
    }
}

/// Exact value of a decimal literal such as `-12.5e-3`.
fn parse_decimal(s: &str) -> Result<Rational, IlpError> {
    let bad = || IlpError::Json(format!("bad number {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(10);
    let pow = (0..scale.unsigned_abs()).try_fold(Rational::one(), |acc, _| num_traits::CheckedMul::checked_mul(&acc, &ten));
    let pow = pow.ok_or_else(bad)?;
    let value = Rational::from_integer(numer);
    Ok(if scale >= 0 { value * pow } else { value / pow })
}

fn encode_rational(r: &Rational) -> Value {
    if r.is_integer() {
        return Value::Number(Number::from(r.to_integer()));
    }
    match terminating_decimal(r) {
        Some(text) => Value::Number(text.parse().expect("decimal literal")),
        None => Value::String(format!("{}/{}", r.numer(), r.denom())),
    }
}

/// Decimal text of `r` when its denominator has only factors 2 and 5.
fn terminating_decimal(r: &Rational) -> Option<String> {
    let mut d = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let places = twos.max(fives);
    let scaled = (*r * Rational::from_integer(10i64.checked_pow(places)?)).to_integer();
    let neg = scaled < 0;
    let digits = format!("{:0>width$}", scaled.unsigned_abs(), width = places as usize + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places as usize);
    debug_assert!(!Rational::zero().eq(r));
    Some(format!("{}{int_part}.{frac_part}", if neg { "-" } else { "" }))
}
