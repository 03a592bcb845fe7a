//! Self-contained special functions: gamma variants, Bessel J of real order,
//! and the coefficients of the stable-density tail series.

mod bessel;
mod coeffs;
mod gamma;

pub use bessel::{bessel_j, bessel_j0_first_zero, bessel_zero_approx, radial_bessel};
pub use coeffs::{series_coefficients, CoefficientTable};
pub use gamma::{gamma, log_gamma, log_gamma_sign, reciprocal_gamma, sinpi};
