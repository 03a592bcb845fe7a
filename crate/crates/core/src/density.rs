//! Isotropic alpha-stable transition densities in d <= 3 dimensions.
//!
//! The evaluator fixes (d, alpha) and serves p_t(0, x) through the exact
//! scaling p_t(0, x) = t^{-d/alpha} p_1(0, t^{-1/alpha} x). At t = 1 the
//! radial profile is computed two ways: radial Fourier inversion
//!
//!   p_1(0, x) = (2 pi)^{-d/2} ∫_0^∞ e^{-r^alpha} r^{d-1} F_nu(r |x|) dr,
//!   F_nu(z) = z^{-nu} J_nu(z),  nu = d/2 - 1,
//!
//! used below the crossover radius M, and the truncated tail series
//! sum_k a_k |x|^{-(d + k alpha)} used at and beyond M. M is chosen at
//! construction as the smallest radius where the series truncation bound is
//! below tolerance and both routes agree.

use std::f64::consts::PI;

use crate::cheb::{log_breakpoints, ChebSpline};
use crate::error::{Error, Result};
use crate::quad::{aitken_accelerate, gl, integrate_adaptive, sphere_surface, KahanSum};
use crate::special::{bessel_zero_approx, gamma, radial_bessel, series_coefficients, CoefficientTable};

/// Closed-form density at the origin:
/// t^{-d/alpha} (2 pi)^{-d} omega_{d-1} Gamma(d/alpha) / alpha.
pub fn density_at_origin(t: f64, dim: usize, alpha: f64) -> f64 {
    let d = dim as f64;
    t.powf(-d / alpha) * (2.0 * PI).powf(-d) * sphere_surface(dim) * gamma(d / alpha) / alpha
}

/// Quadrature configuration for the oscillatory inversion integral.
#[derive(Debug, Clone)]
pub struct InversionConfig {
    /// Gauss-Legendre order per oscillation segment.
    pub segment_order: usize,
    /// Cap on oscillation segments before acceleration must have converged.
    pub max_segments: usize,
    /// Weight cutoff: integration stops where e^{-r^alpha} < tail_eps.
    pub tail_eps: f64,
    /// Target relative tolerance of one inversion evaluation.
    pub tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { segment_order: 12, max_segments: 400, tail_eps: 1e-18, tol: 1e-10 }
    }
}

/// Fixed-(d, alpha) density engine.
#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    dim: usize,
    alpha: f64,
    coeffs: CoefficientTable, // holds K + 1 entries; last one feeds the bound
    crossover: f64,
    series_tol: f64,
    inversion: InversionConfig,
}

impl DensityEvaluator {
    /// Defaults: K = 40 series terms, series tolerance 1e-7, crossover
    /// searched in [2, 20].
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        Self::with_options(dim, alpha, 40, 1e-7, InversionConfig::default())
    }

    pub fn with_options(
        dim: usize,
        alpha: f64,
        k_max: usize,
        series_tol: f64,
        inversion: InversionConfig,
    ) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::domain(format!("dimension {dim} unsupported (need 1..=3)")));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain(format!("alpha {alpha} outside (0, 2)")));
        }
        let coeffs = series_coefficients(dim, alpha, k_max + 1)?;
        let mut ev = Self { dim, alpha, coeffs, crossover: f64::NAN, series_tol, inversion };
        ev.crossover = ev.search_crossover()?;
        Ok(ev)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn crossover_radius(&self) -> f64 {
        self.crossover
    }

    pub fn coefficients(&self) -> &CoefficientTable {
        &self.coeffs
    }

    fn series_order(&self) -> usize {
        self.coeffs.max_order() - 1
    }

    /// Smallest M in [2, 20] where the truncation bound is below tolerance
    /// and series and inversion agree; construction fails otherwise.
    fn search_crossover(&self) -> Result<f64> {
        let mut m = 2.0;
        while m <= 20.0 + 1e-9 {
            let (val, bound) = self.series_radial_with_bound(m);
            if val > 0.0 && bound <= self.series_tol * val {
                let inv = self.inversion_radial(m)?;
                let agree = (val - inv).abs() <= 5.0 * self.series_tol * inv.abs();
                if agree && inv > 0.0 {
                    return Ok(m);
                }
            }
            m += 0.25;
        }
        Err(Error::domain(format!(
            "no crossover radius in [2, 20] for d={}, alpha={}",
            self.dim, self.alpha
        )))
    }

    // ---- series route ----

    fn series_radial_with_bound(&self, rho: f64) -> (f64, f64) {
        let q = rho.powf(-self.alpha);
        let k = self.series_order();
        // Horner in q over a_1..a_K
        let mut acc = 0.0f64;
        for j in (1..=k).rev() {
            acc = acc * q + self.coeffs.a(j);
        }
        let value = rho.powf(-(self.dim as f64)) * acc * q;
        let bound = self.coeffs.a(k + 1).abs()
            * rho.powf(-(self.dim as f64 + (k as f64 + 1.0) * self.alpha));
        (value, bound)
    }

    /// Tail series at t = 1. Refuses |x| < M (cancellation regime).
    pub fn density_series(&self, x: &[f64]) -> Result<f64> {
        let rho = norm(x, self.dim)?;
        self.series_radial(rho)
    }

    pub fn series_radial(&self, rho: f64) -> Result<f64> {
        if rho < self.crossover {
            return Err(Error::domain(format!(
                "series requested at |x| = {rho} below crossover M = {}",
                self.crossover
            )));
        }
        Ok(self.series_radial_with_bound(rho).0)
    }

    /// Truncation-error bound |a_{K+1}| |x|^{-(d + (K+1) alpha)}.
    pub fn series_truncation_bound(&self, rho: f64) -> f64 {
        self.series_radial_with_bound(rho).1
    }

    fn series_deriv1(&self, rho: f64) -> f64 {
        let d = self.dim as f64;
        let mut acc = KahanSum::new();
        for k in 1..=self.series_order() {
            let p = d + k as f64 * self.alpha;
            acc.add(-self.coeffs.a(k) * p * rho.powf(-p - 1.0));
        }
        acc.value()
    }

    fn series_deriv2(&self, rho: f64) -> f64 {
        let d = self.dim as f64;
        let mut acc = KahanSum::new();
        for k in 1..=self.series_order() {
            let p = d + k as f64 * self.alpha;
            acc.add(self.coeffs.a(k) * p * (p + 1.0) * rho.powf(-p - 2.0));
        }
        acc.value()
    }

    // ---- inversion route ----

    /// Radius where the weight e^{-r^alpha} drops below tail_eps.
    fn weight_cutoff(&self) -> f64 {
        (-self.inversion.tail_eps.ln()).powf(1.0 / self.alpha)
    }

    /// ∫_0^∞ e^{-r^alpha} r^p F_mu(r rho) dr by oscillation segments with
    /// Aitken acceleration of the alternating partial sums.
    fn osc_integral(&self, p: f64, mu: f64, rho: f64) -> Result<f64> {
        let r_max = self.weight_cutoff();
        if rho * r_max > 1e5 {
            return Err(Error::domain(format!(
                "inversion envelope exceeded: |x| = {rho} needs Bessel arguments beyond 1e5"
            )));
        }
        let alpha = self.alpha;
        let order = self.inversion.segment_order;
        let rule_lo = gl(order);
        let rule_hi = gl(2 * order);
        let mut err_est = 0.0f64;
        let mut integrand = |r: f64| -> f64 {
            (-r.powf(alpha)).exp() * r.powf(p) * radial_bessel(mu, r * rho).expect("envelope checked")
        };
        // segment boundaries: zeros of the oscillatory factor
        let zero = |k: usize| -> f64 {
            if mu == -0.5 {
                (k as f64 - 0.5) * PI / rho
            } else {
                bessel_zero_approx(mu, k) / rho
            }
        };
        let mut panel = |a: f64, b: f64, err: &mut f64, f: &mut dyn FnMut(f64) -> f64| -> f64 {
            let lo = rule_lo.integrate(a, b, &mut *f);
            let hi = rule_hi.integrate(a, b, &mut *f);
            *err += (hi - lo).abs();
            hi
        };
        // Piece up to the first zero (or everything when not oscillatory).
        // e^{-r^alpha} has unbounded derivatives at r = 0 for fractional
        // alpha, so the origin panel is graded; dyadic panels continue beyond.
        let first_zero = if rho > 0.0 { zero(1) } else { f64::INFINITY };
        let head_end = first_zero.min(r_max);
        let mut head = KahanSum::new();
        {
            let graded_end = head_end.min(1.0);
            head.add(crate::quad::integrate_graded(
                &mut integrand,
                0.0,
                graded_end,
                0.0,
                16,
                0.02 * self.inversion.tol,
            ));
            let mut a = graded_end;
            while a < head_end {
                let b = (2.0 * a).min(head_end);
                head.add(panel(a, b, &mut err_est, &mut integrand));
                a = b;
            }
        }
        if first_zero >= r_max {
            let value = head.value();
            if err_est > self.inversion.tol * value.abs().max(1e-300) {
                return Err(Error::Convergence {
                    op: "density_inversion",
                    last: value,
                    previous: value - err_est,
                });
            }
            return Ok(value);
        }
        // Oscillatory phase: segment sums alternate; accelerate the partials.
        let mut partials = Vec::with_capacity(64);
        let mut sum = head;
        let mut k = 1usize;
        let mut best: Option<(f64, f64)> = None;
        while k <= self.inversion.max_segments {
            let a = zero(k);
            let b = zero(k + 1).min(r_max);
            if a >= r_max {
                best = Some((sum.value(), 0.0));
                break;
            }
            sum.add(panel(a, b, &mut err_est, &mut integrand));
            partials.push(sum.value());
            k += 1;
            if b >= r_max {
                best = Some((sum.value(), 0.0));
                break;
            }
            if partials.len() >= 8 {
                let (val, aerr) = aitken_accelerate(&partials);
                let scale = val.abs().max(1e-3 * partials[0].abs()).max(1e-300);
                best = Some((val, aerr));
                if aerr <= 0.25 * self.inversion.tol * scale {
                    break;
                }
            }
        }
        let (value, aerr) = best.unwrap_or((sum.value(), f64::INFINITY));
        let scale = value.abs().max(1e-300);
        if aerr > self.inversion.tol * scale || err_est > self.inversion.tol * scale {
            let prev = partials.len().checked_sub(2).map(|i| partials[i]).unwrap_or(value);
            return Err(Error::Convergence { op: "density_inversion", last: value, previous: prev });
        }
        Ok(value)
    }

    /// Radial profile g(rho) = p_1(0, x) with |x| = rho, by inversion.
    pub fn inversion_radial(&self, rho: f64) -> Result<f64> {
        let d = self.dim as f64;
        let nu = d / 2.0 - 1.0;
        let i = self.osc_integral(d - 1.0, nu, rho)?;
        Ok((2.0 * PI).powf(-d / 2.0) * i)
    }

    /// d/drho of the inversion profile.
    pub fn inversion_deriv1(&self, rho: f64) -> Result<f64> {
        let d = self.dim as f64;
        let nu = d / 2.0 - 1.0;
        let i = self.osc_integral(d + 1.0, nu + 1.0, rho)?;
        Ok(-rho * (2.0 * PI).powf(-d / 2.0) * i)
    }

    /// d^2/drho^2 of the inversion profile.
    pub fn inversion_deriv2(&self, rho: f64) -> Result<f64> {
        let d = self.dim as f64;
        let nu = d / 2.0 - 1.0;
        let i1 = self.osc_integral(d + 1.0, nu + 1.0, rho)?;
        let i2 = self.osc_integral(d + 3.0, nu + 2.0, rho)?;
        Ok((2.0 * PI).powf(-d / 2.0) * (rho * rho * i2 - i1))
    }

    /// Fourier-inversion evaluation at t = 1 (any |x| within the envelope).
    pub fn density_inversion(&self, x: &[f64]) -> Result<f64> {
        let rho = norm(x, self.dim)?;
        self.inversion_radial(rho)
    }

    // ---- dispatch, scaling, derivatives ----

    /// Radial profile and its first two radial derivatives at t = 1,
    /// inversion below M and the series at or beyond it.
    pub fn radial_profile(&self, rho: f64) -> Result<(f64, f64, f64)> {
        if rho >= self.crossover {
            Ok((
                self.series_radial_with_bound(rho).0,
                self.series_deriv1(rho),
                self.series_deriv2(rho),
            ))
        } else {
            Ok((
                self.inversion_radial(rho)?,
                self.inversion_deriv1(rho)?,
                self.inversion_deriv2(rho)?,
            ))
        }
    }

    pub fn density_radial(&self, t: f64, rho: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("time {t} must be positive and finite")));
        }
        let scale = t.powf(-1.0 / self.alpha);
        let r1 = scale * rho;
        let v = if r1 >= self.crossover {
            self.series_radial_with_bound(r1).0
        } else {
            self.inversion_radial(r1)?
        };
        let out = t.powf(-(self.dim as f64) / self.alpha) * v;
        if out <= 0.0 || !out.is_finite() {
            return Err(Error::Convergence { op: "density positivity", last: out, previous: v });
        }
        Ok(out)
    }

    /// p_t(0, x) via the exact scaling law.
    pub fn density(&self, t: f64, x: &[f64]) -> Result<f64> {
        let rho = norm(x, self.dim)?;
        self.density_radial(t, rho)
    }

    /// Gradient of x -> p_t(0, x).
    pub fn density_gradient(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let rho = norm(x, self.dim)?;
        if rho == 0.0 {
            return Ok(vec![0.0; self.dim]); // radial symmetry
        }
        let scale = t.powf(-1.0 / self.alpha);
        let r1 = scale * rho;
        let g1 = if r1 >= self.crossover {
            self.series_deriv1(r1)
        } else {
            self.inversion_deriv1(r1)?
        };
        let pref = t.powf(-(self.dim as f64 + 1.0) / self.alpha);
        Ok(x.iter().map(|xi| pref * g1 * xi / rho).collect())
    }

    /// Hessian of x -> p_t(0, x), row-major d x d.
    pub fn density_hessian(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim;
        let rho = norm(x, self.dim)?;
        let scale = t.powf(-1.0 / self.alpha);
        let pref = t.powf(-(d as f64 + 2.0) / self.alpha);
        let r1 = scale * rho;
        if rho == 0.0 {
            let g2 = self.inversion_deriv2(0.0)?;
            let mut h = vec![0.0; d * d];
            for i in 0..d {
                h[i * d + i] = pref * g2;
            }
            return Ok(h);
        }
        let (g1, g2) = if r1 >= self.crossover {
            (self.series_deriv1(r1), self.series_deriv2(r1))
        } else {
            (self.inversion_deriv1(r1)?, self.inversion_deriv2(r1)?)
        };
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let rad = (g2 - g1 / r1) * (x[i] * x[j]) / (rho * rho);
                let iso = if i == j { g1 / r1 } else { 0.0 };
                h[i * d + j] = pref * (rad + iso);
            }
        }
        Ok(h)
    }

    // ---- integral diagnostics ----

    /// ∫_{R^d} p_1(0, x) dx: radial quadrature inside M plus the exact
    /// termwise tail integral of the series.
    pub fn total_mass(&self) -> Result<f64> {
        let m = self.crossover;
        let inner = integrate_adaptive(
            |rho| {
                self.inversion_radial(rho).unwrap_or(f64::NAN) * rho.powf(self.dim as f64 - 1.0)
            },
            0.0,
            m,
            1e-10,
            "density mass",
        )?;
        let mut tail = KahanSum::new();
        for k in 1..=self.series_order() {
            let ka = k as f64 * self.alpha;
            tail.add(self.coeffs.a(k) * m.powf(-ka) / ka);
        }
        Ok(sphere_surface(self.dim) * (inner + tail.value()))
    }

    /// P(|X_1| > rho) for rho >= M (exact termwise tail integral).
    pub fn tail_mass(&self, rho: f64) -> Result<f64> {
        if rho < self.crossover {
            return Err(Error::domain("tail_mass needs rho >= crossover"));
        }
        let mut tail = KahanSum::new();
        for k in 1..=self.series_order() {
            let ka = k as f64 * self.alpha;
            tail.add(self.coeffs.a(k) * rho.powf(-ka) / ka);
        }
        Ok(sphere_surface(self.dim) * tail.value())
    }

    /// Interpolated radial profile (value and two derivatives) for use in
    /// nested quadratures. The splines span [0, M]; the series takes over
    /// beyond. `r_hi` documents the radius callers intend to reach.
    pub fn build_profile(&self, r_hi: f64) -> Result<StableProfile> {
        let bps = self.profile_breakpoints();
        let spline = ChebSpline::build(
            |rho| self.inversion_radial(rho).expect("inversion on [0, M]"),
            &bps,
            24,
            1e-12,
        );
        let spline_d1 = ChebSpline::build(
            |rho| self.inversion_deriv1(rho).expect("inversion d1 on [0, M]"),
            &bps,
            24,
            1e-12,
        );
        let spline_d2 = ChebSpline::build(
            |rho| self.inversion_deriv2(rho).expect("inversion d2 on [0, M]"),
            &bps,
            24,
            1e-12,
        );
        Ok(StableProfile {
            evaluator: self.clone(),
            spline,
            spline_d1: Some(spline_d1),
            spline_d2: Some(spline_d2),
            r_hi,
        })
    }

    /// Value-only profile: a third of the construction cost of
    /// [`Self::build_profile`]; derivative lookups panic.
    pub fn build_value_profile(&self, r_hi: f64) -> Result<StableProfile> {
        let bps = self.profile_breakpoints();
        let spline = ChebSpline::build(
            |rho| self.inversion_radial(rho).expect("inversion on [0, M]"),
            &bps,
            24,
            1e-12,
        );
        Ok(StableProfile {
            evaluator: self.clone(),
            spline,
            spline_d1: None,
            spline_d2: None,
            r_hi,
        })
    }

    fn profile_breakpoints(&self) -> Vec<f64> {
        let m = self.crossover;
        let mut bps = vec![0.0, 0.25, 0.5, 1.0];
        bps.extend(log_breakpoints(1.0, m.max(1.5), 4, false).into_iter().skip(1));
        bps.retain(|&b| b < m);
        bps.push(m);
        bps
    }
}

/// Radial profile of p_1 backed by splines below the crossover and the tail
/// series beyond it; cheap enough for inner loops.
#[derive(Debug, Clone)]
pub struct StableProfile {
    evaluator: DensityEvaluator,
    spline: ChebSpline,
    spline_d1: Option<ChebSpline>,
    spline_d2: Option<ChebSpline>,
    r_hi: f64,
}

impl StableProfile {
    pub fn dim(&self) -> usize {
        self.evaluator.dim
    }

    pub fn alpha(&self) -> f64 {
        self.evaluator.alpha
    }

    pub fn crossover(&self) -> f64 {
        self.evaluator.crossover
    }

    pub fn max_radius(&self) -> f64 {
        self.r_hi
    }

    pub fn value(&self, rho: f64) -> f64 {
        if rho < self.evaluator.crossover {
            self.spline.eval(rho)
        } else {
            self.evaluator.series_radial_with_bound(rho).0
        }
    }

    pub fn deriv1(&self, rho: f64) -> f64 {
        if rho < self.evaluator.crossover {
            self.spline_d1.as_ref().expect("profile built without derivatives").eval(rho)
        } else {
            self.evaluator.series_deriv1(rho)
        }
    }

    pub fn deriv2(&self, rho: f64) -> f64 {
        if rho < self.evaluator.crossover {
            self.spline_d2.as_ref().expect("profile built without derivatives").eval(rho)
        } else {
            self.evaluator.series_deriv2(rho)
        }
    }
}

pub(crate) fn norm(x: &[f64], dim: usize) -> Result<f64> {
    if x.len() != dim {
        return Err(Error::domain(format!(
            "point dimension {} does not match evaluator dimension {dim}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "evaluation point", point: x.to_vec() });
    }
    Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn cauchy_radial(dim: usize, rho: f64) -> f64 {
        let d = dim as f64;
        gamma((d + 1.0) / 2.0) * PI.powf(-(d + 1.0) / 2.0) * (1.0 + rho * rho).powf(-(d + 1.0) / 2.0)
    }

    #[test]
    fn cauchy_oracle_one_dimensional() {
        let ev = DensityEvaluator::new(1, 1.0).unwrap();
        assert_relative_eq!(ev.density(1.0, &[0.0]).unwrap(), 1.0 / PI, max_relative = 1e-9);
        assert_relative_eq!(
            ev.density(1.0, &[2.0]).unwrap(),
            1.0 / (5.0 * PI),
            max_relative = 1e-9
        );
        // scaling identity applied to the peak
        assert_relative_eq!(
            ev.density(2.0, &[0.0]).unwrap(),
            1.0 / (2.0 * PI),
            max_relative = 1e-9
        );
        // series regime matches the geometric expansion exactly
        assert_relative_eq!(
            ev.density_series(&[10.0]).unwrap(),
            1.0 / (101.0 * PI),
            max_relative = 1e-9
        );
    }

    #[test]
    fn cauchy_oracle_three_dimensional() {
        let ev = DensityEvaluator::new(3, 1.0).unwrap();
        let p = ev.density(1.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(p, 1.0 / (4.0 * PI * PI), max_relative = 1e-9);
        for &rho in &[0.0, 0.3, 1.7, 6.0, 30.0] {
            assert_relative_eq!(
                ev.density_radial(1.0, rho).unwrap(),
                cauchy_radial(3, rho),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn origin_closed_form_matches_inversion() {
        for &(d, alpha) in &[(1usize, 1.0f64), (2, 1.0), (1, 1.5), (2, 0.7), (3, 1.3)] {
            let ev = DensityEvaluator::new(d, alpha).unwrap();
            let quad = ev.inversion_radial(0.0).unwrap();
            let closed = density_at_origin(1.0, d, alpha);
            assert_relative_eq!(quad, closed, max_relative = 1e-10);
        }
        // 2D Cauchy peak cross-check: Gamma(3/2) / pi^{3/2} = 1/(2 pi)
        assert_relative_eq!(
            density_at_origin(1.0, 2, 1.0),
            1.0 / (2.0 * PI),
            max_relative = 1e-13
        );
    }

    #[test]
    fn alpha_domain_is_open() {
        assert!(DensityEvaluator::new(1, 2.0).is_err());
        assert!(DensityEvaluator::new(1, 0.0).is_err());
        assert!(DensityEvaluator::new(4, 1.0).is_err());
    }

    #[test]
    fn two_dimensional_lattice_oracle() {
        // brute-force 2D Fourier sum at small |x|
        let ev = DensityEvaluator::new(2, 1.5).unwrap();
        let p = ev.density(1.0, &[1.0, 0.0]).unwrap();
        let h = 0.015625;
        let umax = 30.0;
        let n = (umax / h) as i64;
        let mut acc = KahanSum::new();
        for i in -n..=n {
            for j in -n..=n {
                let u1 = i as f64 * h;
                let u2 = j as f64 * h;
                let r = (u1 * u1 + u2 * u2).sqrt();
                acc.add((-(r.powf(1.5))).exp() * (u1).cos());
            }
        }
        let brute = acc.value() * h * h / (4.0 * PI * PI);
        assert_abs_diff_eq!(p, brute, epsilon = 1e-8);
    }

    #[test]
    fn series_inversion_agreement_spot() {
        let ev = DensityEvaluator::new(1, 1.5).unwrap();
        let rho = (5.0f64).max(ev.crossover_radius() + 0.25);
        let s = ev.series_radial(rho).unwrap();
        let i = ev.inversion_radial(rho).unwrap();
        assert_relative_eq!(s, i, max_relative = 1e-6);
    }

    #[test]
    fn crossover_in_declared_range() {
        for &(d, alpha) in &[(1usize, 0.5f64), (1, 1.5), (1, 1.9), (2, 0.5), (2, 1.5), (2, 1.9)] {
            let ev = DensityEvaluator::new(d, alpha).unwrap();
            let m = ev.crossover_radius();
            assert!(m >= 2.0 && m < 20.0, "M = {m} for d={d}, alpha={alpha}");
        }
    }

    #[test]
    fn tail_constant_reached_at_large_radius() {
        let ev = DensityEvaluator::new(1, 1.5).unwrap();
        let a1 = ev.coefficients().a(1);
        let rho = 100.0;
        let p = ev.density_radial(1.0, rho).unwrap();
        let ratio = p * rho.powf(1.0 + 1.5) / a1;
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn radial_symmetry_under_rotation() {
        let ev = DensityEvaluator::new(2, 1.3).unwrap();
        let p1 = ev.density(1.0, &[0.6, 0.8]).unwrap();
        let p2 = ev.density(1.0, &[1.0, 0.0]).unwrap();
        let p3 = ev.density(1.0, &[-0.8, 0.6]).unwrap();
        assert_relative_eq!(p1, p2, max_relative = 1e-12);
        assert_relative_eq!(p1, p3, max_relative = 1e-12);
    }

    #[test]
    fn exact_scaling_identity() {
        let ev = DensityEvaluator::new(2, 0.9).unwrap();
        for &t in &[0.3, 1.7, 9.0] {
            for &rho in &[0.0, 0.4, 2.0, 11.0] {
                let lhs = ev.density_radial(t, rho).unwrap();
                let scale = t.powf(-1.0 / 0.9);
                let rhs = t.powf(-2.0 / 0.9) * ev.density_radial(1.0, scale * rho).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_cauchy_derivative() {
        let ev = DensityEvaluator::new(1, 1.0).unwrap();
        // d/dx of 1/(pi (1+x^2)) at x = 1 is -1/(2 pi)
        let g = ev.density_gradient(1.0, &[1.0]).unwrap();
        assert_relative_eq!(g[0], -1.0 / (2.0 * PI), max_relative = 1e-8);
        // zero at the origin by symmetry
        let g0 = ev.density_gradient(1.0, &[0.0]).unwrap();
        assert_eq!(g0[0], 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &(d, alpha) in &[(1usize, 1.5f64), (2, 0.8)] {
            let ev = DensityEvaluator::new(d, alpha).unwrap();
            let x0 = 0.9;
            let h = 1e-4;
            let mut xp = vec![0.0; d];
            xp[0] = x0;
            let grad = ev.density_gradient(1.0, &xp).unwrap();
            let hess = ev.density_hessian(1.0, &xp).unwrap();
            let at = |x1: f64, x2: f64| {
                let mut v = vec![0.0; d];
                v[0] = x1;
                if d > 1 {
                    v[1] = x2;
                }
                ev.density(1.0, &v).unwrap()
            };
            let fd_grad = (at(x0 + h, 0.0) - at(x0 - h, 0.0)) / (2.0 * h);
            assert_relative_eq!(grad[0], fd_grad, max_relative = 1e-5);
            let fd_h00 = (at(x0 + h, 0.0) - 2.0 * at(x0, 0.0) + at(x0 - h, 0.0)) / (h * h);
            assert_relative_eq!(hess[0], fd_h00, max_relative = 1e-4);
            if d > 1 {
                let fd_h11 = (at(x0, h) - 2.0 * at(x0, 0.0) + at(x0, -h)) / (h * h);
                assert_relative_eq!(hess[d + 1], fd_h11, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn normalization_spot() {
        for &(d, alpha) in &[(1usize, 1.0f64), (2, 1.5)] {
            let ev = DensityEvaluator::new(d, alpha).unwrap();
            assert_abs_diff_eq!(ev.total_mass().unwrap(), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn profile_matches_direct_evaluation() {
        let ev = DensityEvaluator::new(2, 1.5).unwrap();
        let prof = ev.build_profile(1000.0).unwrap();
        for &rho in &[0.0, 0.1, 0.9, 2.0, 40.0] {
            let (v, d1, d2) = ev.radial_profile(rho).unwrap();
            assert_relative_eq!(prof.value(rho), v, max_relative = 1e-8, epsilon = 1e-12);
            assert_relative_eq!(prof.deriv1(rho), d1, max_relative = 1e-7, epsilon = 1e-10);
            assert_relative_eq!(prof.deriv2(rho), d2, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let ev = DensityEvaluator::new(1, 1.0).unwrap();
        assert!(ev.density(1.0, &[f64::NAN]).is_err());
        assert!(ev.density(1.0, &[f64::INFINITY]).is_err());
    }
}
