//! Variable-order model data: the triple (alpha(.), n(., .), xi(.)) with its
//! bounds and moduli, plus numerical validation of the standing assumptions
//! on sampled grids. Validation reports diagnostics with stated thresholds,
//! never proofs: finite sampling cannot certify asymptotics.

mod families;
mod modulus;
mod validate;

pub use families::{KernelField, ScalarField, SmallScaleStructure};
pub use modulus::{
    check_dini_and_gamma, check_log_modulus, estimate_modulus, lemma_small_r_checks,
    IntegralReport, LogModulusReport, ModulusEstimate, ModulusKind, SmallRReport,
};
pub use validate::{validate_assumptions, AssumptionCheck, AssumptionReport, SamplingPlan};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared bounds accompanying a model (Assumptions 2.1a, 2.2b, 2.3).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBounds {
    pub c_lower: f64,
    pub c_upper: f64,
    pub zeta: f64,
    pub alpha_low: f64,
    pub alpha_high: f64,
}

/// The variable-order model: order function alpha, kernel weight n, limit
/// weight xi, declared bounds, and the two exponents entering the estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableOrderModel {
    pub dim: usize,
    pub alpha: ScalarField,
    pub n: KernelField,
    pub xi: ScalarField,
    pub bounds: ModelBounds,
    pub holder_eps: f64,
    pub gamma_exp: f64,
}

impl VariableOrderModel {
    /// alpha(x), asserted to stay within the declared band.
    pub fn alpha_at(&self, x: &[f64]) -> f64 {
        let a = self.alpha.eval(x);
        assert!(
            a >= self.bounds.alpha_low - 1e-12 && a <= self.bounds.alpha_high + 1e-12,
            "alpha({x:?}) = {a} escapes [{}, {}]",
            self.bounds.alpha_low,
            self.bounds.alpha_high
        );
        a
    }

    pub fn xi_at(&self, x: &[f64]) -> f64 {
        self.xi.eval(x)
    }

    /// Kernel weight n(x, h); h enters through its norm for the built-in
    /// families (all are isotropic in h).
    pub fn n_at(&self, x: &[f64], h_norm: f64) -> f64 {
        self.n.eval(&self.xi, x, h_norm)
    }

    pub fn validate_shape(&self) -> Result<()> {
        if self.dim == 0 || self.dim > 3 {
            return Err(Error::InvalidModel(format!("dim {} not in 1..=3", self.dim)));
        }
        let b = &self.bounds;
        if !(b.alpha_low > 0.0 && b.alpha_low <= b.alpha_high && b.alpha_high < 2.0) {
            return Err(Error::InvalidModel(format!(
                "alpha band [{}, {}] must sit inside (0, 2)",
                b.alpha_low, b.alpha_high
            )));
        }
        if !(b.c_lower > 0.0 && b.c_lower <= b.c_upper) {
            return Err(Error::InvalidModel("need 0 < c_lower <= c_upper".into()));
        }
        if !(b.zeta > 0.0) {
            return Err(Error::InvalidModel("zeta must be positive".into()));
        }
        if !(self.holder_eps > 0.0 && self.gamma_exp > 0.0) {
            return Err(Error::InvalidModel("holder_eps and gamma_exp must be positive".into()));
        }
        Ok(())
    }

    // ---- presets ----

    /// Constant-coefficient model: alpha(x) = alpha, n = xi = weight.
    pub fn constant(dim: usize, alpha: f64, weight: f64) -> Self {
        Self {
            dim,
            alpha: ScalarField::Constant { value: alpha },
            n: KernelField::Constant { value: weight },
            xi: ScalarField::Constant { value: weight },
            bounds: ModelBounds {
                c_lower: weight,
                c_upper: weight,
                zeta: weight,
                alpha_low: alpha,
                alpha_high: alpha,
            },
            holder_eps: 0.5,
            gamma_exp: 0.5,
        }
    }

    /// The running verification model:
    /// alpha(x) = 1.5 + 0.2 sin(x_1), n(x, h) = xi(x) + 0.5 (1 ∧ |h|^{1/2}),
    /// xi(x) = 1 + 0.1 exp(-|x|^2).
    pub fn reference(dim: usize) -> Self {
        Self {
            dim,
            alpha: ScalarField::Sinusoidal { base: 1.5, amplitude: 0.2, frequency: 1.0 },
            n: KernelField::XiPlusHolder { coeff: 0.5, exponent: 0.5 },
            xi: ScalarField::GaussianBump { base: 1.0, amplitude: 0.1 },
            bounds: ModelBounds {
                c_lower: 1.0,
                c_upper: 1.6,
                zeta: 1.1,
                alpha_low: 1.3,
                alpha_high: 1.7,
            },
            holder_eps: 0.5,
            gamma_exp: 0.5,
        }
    }

    /// Pathological preset: n oscillates without limit as h -> 0
    /// (targets Assumption 2.2a).
    pub fn oscillating_n(dim: usize) -> Self {
        Self {
            dim,
            alpha: ScalarField::Constant { value: 1.5 },
            n: KernelField::Oscillating { base: 2.0, amplitude: 1.0 },
            xi: ScalarField::Constant { value: 2.0 },
            bounds: ModelBounds {
                c_lower: 1.0,
                c_upper: 3.0,
                zeta: 2.0,
                alpha_low: 1.5,
                alpha_high: 1.5,
            },
            holder_eps: 0.5,
            gamma_exp: 0.5,
        }
    }

    /// Pathological preset: alpha with modulus ~ 1/|ln z| near the origin
    /// (targets Assumption 2.2c).
    pub fn log_alpha(dim: usize) -> Self {
        Self {
            dim,
            alpha: ScalarField::LogBlend { base: 1.5, amplitude: 0.1 },
            n: KernelField::XiPlusHolder { coeff: 0.5, exponent: 0.5 },
            xi: ScalarField::GaussianBump { base: 1.0, amplitude: 0.1 },
            bounds: ModelBounds {
                c_lower: 1.0,
                c_upper: 1.6,
                zeta: 1.1,
                alpha_low: 1.5,
                alpha_high: 1.6,
            },
            holder_eps: 0.5,
            gamma_exp: 0.5,
        }
    }

    /// Pathological preset: xi with modulus ~ 1/|ln z| (targets Dini
    /// continuity of xi).
    pub fn non_dini_xi(dim: usize) -> Self {
        Self {
            dim,
            alpha: ScalarField::Sinusoidal { base: 1.5, amplitude: 0.2, frequency: 1.0 },
            n: KernelField::XiPlusHolder { coeff: 0.5, exponent: 0.5 },
            xi: ScalarField::LogBlend { base: 1.0, amplitude: 0.1 },
            bounds: ModelBounds {
                c_lower: 1.0,
                c_upper: 1.6,
                zeta: 1.1,
                alpha_low: 1.3,
                alpha_high: 1.7,
            },
            holder_eps: 0.5,
            gamma_exp: 0.5,
        }
    }
}
