//! Numerical toolkit for variable-order stable-like jump processes.
//!
//! The library evaluates isotropic α-stable transition densities in up to
//! three dimensions (tail series plus radial Fourier inversion), the
//! associated resolvent kernels and their mollifications, variable-order
//! jump generators with compensated singular quadrature, perturbation and
//! contraction diagnostics, and Monte Carlo simulation of the jump process
//! with martingale-problem verification.
//!
//! Modules map onto the main objects:
//!
//! - [`special`]: gamma/Bessel primitives and the tail-series coefficients
//! - [`density`]: the fixed-(d, α) density evaluator with derivatives
//! - [`model`]: variable-order model data (α, n, ξ) and assumption checks
//! - [`generator`]: the jump operators and characteristic exponents
//! - [`resolvent`]: resolvent kernels, mollifiers, mollified resolvents
//! - [`perturbation`]: operator-difference bounds and the λ-contraction scan
//! - [`montecarlo`]: path simulation and statistical verification

pub mod cheb;

pub mod density;
pub mod model;
pub mod error;
pub mod generator;




pub mod perturbation;
pub mod quad;
pub mod resolvent;

pub mod special;

pub use error::{Error, Result};
