//! Built-in parametric function families. Models are defined by picking
//! families in a JSON config instead of supplying arbitrary code, which keeps
//! configs serializable and runs reproducible.

use serde::{Deserialize, Serialize};

/// Scalar fields R^d -> R used for alpha(.) and xi(.).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ScalarField {
    /// value
    Constant { value: f64 },
    /// base + amplitude * sin(frequency * x_1)
    Sinusoidal { base: f64, amplitude: f64, frequency: f64 },
    /// base + amplitude * exp(-|x|^2)
    GaussianBump { base: f64, amplitude: f64 },
    /// base + amplitude / (1 + |ln |x_1||): continuous at 0 with value
    /// `base`, modulus of continuity ~ amplitude / |ln z|.
    LogBlend { base: f64, amplitude: f64 },
}

impl ScalarField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Sinusoidal { base, amplitude, frequency } => {
                base + amplitude * (frequency * x[0]).sin()
            }
            ScalarField::GaussianBump { base, amplitude } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                base + amplitude * (-r2).exp()
            }
            ScalarField::LogBlend { base, amplitude } => {
                let a = x[0].abs();
                if a == 0.0 {
                    *base
                } else {
                    base + amplitude / (1.0 + a.ln().abs())
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant { .. })
    }
}

/// Exact small-|h| structure of n(x, h) - xi(x), used to pick quadrature
/// weights in the compensated generator integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmallScaleStructure {
    /// n(x, h) - xi(x) = c(x) |h|^exponent for |h| <= 1 (exponent 0 allowed).
    PowerLaw { exponent: f64 },
    /// No usable structure (e.g. oscillating weights).
    Generic,
}

/// Kernel weights n(x, h); all built-in families are isotropic in h and are
/// evaluated at |h|. Families may reference the model's xi.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum KernelField {
    /// value (independent of x and h)
    Constant { value: f64 },
    /// xi(x) + coeff * (1 ∧ |h|^exponent)
    XiPlusHolder { coeff: f64, exponent: f64 },
    /// base + amplitude * sin(1 / |h|): no limit as h -> 0
    Oscillating { base: f64, amplitude: f64 },
}

impl KernelField {
    pub fn eval(&self, xi: &ScalarField, x: &[f64], h_norm: f64) -> f64 {
        match self {
            KernelField::Constant { value } => *value,
            KernelField::XiPlusHolder { coeff, exponent } => {
                xi.eval(x) + coeff * h_norm.powf(*exponent).min(1.0)
            }
            KernelField::Oscillating { base, amplitude } => {
                if h_norm == 0.0 {
                    *base
                } else {
                    base + amplitude * (1.0 / h_norm).sin()
                }
            }
        }
    }

    /// Structure of n(x, .) - xi(x) near h = 0.
    pub fn small_scale_structure(&self) -> SmallScaleStructure {
        match self {
            KernelField::Constant { .. } => SmallScaleStructure::PowerLaw { exponent: 0.0 },
            KernelField::XiPlusHolder { exponent, .. } => {
                SmallScaleStructure::PowerLaw { exponent: *exponent }
            }
            KernelField::Oscillating { .. } => SmallScaleStructure::Generic,
        }
    }
}
