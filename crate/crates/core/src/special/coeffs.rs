//! Coefficients of the stable-density tail series
//! p_1(0, x) = sum_{k >= 1} a_k |x|^{-(d + k alpha)}.
//!
//! a_k = (-1)^k 2^{k alpha} pi^{-d/2} Gamma((d + k alpha)/2)
//!       / (Gamma(-k alpha / 2) k!),
//! with the reciprocal gamma as primitive so that gamma poles give exact
//! zeros. The normalization carries no extra (2 pi)^{-d} prefix: for d = 1,
//! alpha = 1 this reproduces the Cauchy tail a_1 = 1/pi, a_2 = 0, a_3 = -1/pi.

use std::f64::consts::PI;

use super::gamma::{log_gamma, sinpi};
use crate::error::Result;

/// Tail-series coefficients for a fixed (d, alpha).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub dim: usize,
    pub alpha: f64,
    /// a_1 .. a_K
    pub values: Vec<f64>,
}

impl CoefficientTable {
    pub fn a(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }
}

/// ln |1/Gamma(-y)| and its sign for y > 0, via the reflection formula
/// 1/Gamma(-y) = -sin(pi y) Gamma(1 + y) / pi. Returns None at the poles
/// (y a positive integer), where the reciprocal gamma is exactly zero.
fn reciprocal_gamma_neg_log(y: f64) -> Option<(f64, f64)> {
    let s = sinpi(y);
    if s == 0.0 {
        return None;
    }
    let ln = s.abs().ln() + log_gamma(1.0 + y).expect("1 + y > 1") - PI.ln();
    Some((ln, -s.signum()))
}

/// Build the table a_1 .. a_k_max. Requires k_max >= 3.
pub fn series_coefficients(dim: usize, alpha: f64, k_max: usize) -> Result<CoefficientTable> {
    assert!(dim >= 1, "dimension must be positive");
    assert!(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
    assert!(k_max >= 3, "need at least three series terms");
    let d = dim as f64;
    let mut values = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kf = k as f64;
        let y = kf * alpha / 2.0;
        let a_k = match reciprocal_gamma_neg_log(y) {
            None => 0.0, // gamma pole: coefficient vanishes exactly
            Some((ln_rg, sign_rg)) => {
                let ln_mag = kf * alpha * 2f64.ln() - 0.5 * d * PI.ln()
                    + log_gamma((d + kf * alpha) / 2.0)?
                    + ln_rg
                    - log_gamma(kf + 1.0)?;
                let sign = if k % 2 == 0 { sign_rg } else { -sign_rg };
                sign * ln_mag.exp()
            }
        };
        values.push(a_k);
    }
    Ok(CoefficientTable { dim, alpha, values })
}
