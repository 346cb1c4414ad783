//! Local t-test on weighted correlation coefficients.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

/// Kish effective sample size, `(Σw)² / Σw²`.
///
/// Weights are divided by their maximum first, so equal weights give an
/// exact count and a rescaled copy gives the same value.
pub fn effective_n(weights: &[f64]) -> f64 {
    let top = weights.iter().fold(0.0f64, |m, &w| m.max(w));
    if !(top > 0.0) {
        return 0.0;
    }
    let (s, s2) = weights.iter().fold((0.0, 0.0), |(s, s2), &w| {
        let u = w / top;
        (s + u, s2 + u * u)
    });
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Two-sided p-value for `H0: rho = 0` with `df = n_eff - 2 - controls`.
///
/// `None` when fewer than one degree of freedom remains.
pub fn p_value_from_effective_n(rho: f64, n_eff: f64, controls: usize) -> Option<f64> {
    let df = n_eff - 2.0 - controls as f64;
    if !(df >= 1.0) || !rho.is_finite() {
        return None;
    }
    let r2 = rho * rho;
    if r2 >= 1.0 {
        return Some(0.0);
    }
    // P(|T| > t) = I_{df / (df + t²)}(df/2, 1/2), with t² = df r² / (1 - r²),
    // so the argument simplifies to 1 - r².
    let x = 1.0 - r2;
    Some(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

pub fn local_p_value(rho: f64, weights: &[f64], controls: usize) -> Option<f64> {
    p_value_from_effective_n(rho, effective_n(weights), controls)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Alpha {
    #[serde(rename = "0.01")]
    P01,
    #[serde(rename = "0.05")]
    P05,
}

impl Alpha {
    pub fn value(self) -> f64 {
        match self {
            Alpha::P01 => 0.01,
            Alpha::P05 => 0.05,
        }
    }

    /// Inclusive: a p-value equal to alpha is significant.
    pub fn admits(self, p: Option<f64>) -> bool {
        matches!(p, Some(p) if p <= self.value())
    }
}

impl std::str::FromStr for Alpha {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "0.01" | ".01" => Ok(Alpha::P01),
            "0.05" | ".05" => Ok(Alpha::P05),
            other => Err(crate::Error::InvalidSpec(format!(
                "alpha must be 0.01 or 0.05, got {other:?}"
            ))),
        }
    }
}
