use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The constants behind the algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantProfile {
    pub name: String,
    /// Multiplier in `R = ceil(c_r * t * ln ñ / eps)`.
    pub c_r: f64,
    /// Constant inside `t = ceil(log2(t_offset / eps))`, also the `ln(t_offset / eps)` boost.
    pub t_offset: f64,
    /// Number of preparation runs is `ceil(prep_copies * ln ñ)`.
    pub prep_copies: f64,
    /// Final-phase rate is `eps / phase3_lambda_divisor`.
    pub phase3_lambda_divisor: f64,
    /// Additive constant in the covering `t`.
    pub covering_t_offset: f64,
    /// Largest number of free variables a local solve may enumerate.
    pub brute_force_cap: usize,
}

/// Partial profile read from JSON; missing fields come from `base`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileOverride {
    base: Option<String>,
    name: Option<String>,
    c_r: Option<f64>,
    t_offset: Option<f64>,
    prep_copies: Option<f64>,
    phase3_lambda_divisor: Option<f64>,
    covering_t_offset: Option<f64>,
    brute_force_cap: Option<usize>,
}

impl ConstantProfile {
    pub fn paper() -> Self {
        Self {
            name: "paper".into(),
            c_r: 200.0,
            t_offset: 20.0,
            prep_copies: 16.0,
            phase3_lambda_divisor: 10.0,
            covering_t_offset: 8.0,
            brute_force_cap: crate::ilp::DEFAULT_BRUTE_FORCE_CAP,
        }
    }

    /// Shrunk constants for experiments on small graphs.
    pub fn desk() -> Self {
        Self { name: "desk".into(), c_r: 2.0, prep_copies: 2.0, brute_force_cap: 24, ..Self::paper() }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            other => Err(Error::Profile(format!("unknown profile {other:?}"))),
        }
    }

    /// Reads `{"base": "desk", "c_r": 3, ...}`; unspecified fields come from the
    /// base profile (default `paper`).
    pub fn from_json(text: &str) -> Result<Self> {
        let o: ProfileOverride = serde_json::from_str(text).map_err(|e| Error::Profile(e.to_string()))?;
        let base = Self::by_name(o.base.as_deref().unwrap_or("paper"))?;
        let p = Self {
            name: o.name.unwrap_or_else(|| format!("{}+override", base.name)),
            c_r: o.c_r.unwrap_or(base.c_r),
            t_offset: o.t_offset.unwrap_or(base.t_offset),
            prep_copies: o.prep_copies.unwrap_or(base.prep_copies),
            phase3_lambda_divisor: o.phase3_lambda_divisor.unwrap_or(base.phase3_lambda_divisor),
            covering_t_offset: o.covering_t_offset.unwrap_or(base.covering_t_offset),
            brute_force_cap: o.brute_force_cap.unwrap_or(base.brute_force_cap),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c_r", self.c_r),
            ("t_offset", self.t_offset),
            ("prep_copies", self.prep_copies),
            ("phase3_lambda_divisor", self.phase3_lambda_divisor),
            ("covering_t_offset", self.covering_t_offset),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Profile(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if self.brute_force_cap == 0 || self.brute_force_cap > 62 {
            return Err(Error::Profile(format!("brute_force_cap must be in 1..=62, got {}", self.brute_force_cap)));
        }
        Ok(())
    }
}
