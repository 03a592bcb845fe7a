//! Moduli of continuity estimated by seeded random pair probing, and the
//! asymptotic diagnostics built on them (log-modulus decay, Dini and
//! gamma-weighted integrals, and the small-r constants of the key lemma).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use super::ScalarField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Beta,
    Psi,
}

/// Estimated modulus of continuity on an ascending radius grid, with the
/// monotone envelope applied (a modulus is nondecreasing by definition).
#[derive(Debug, Clone, Serialize)]
pub struct ModulusEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: ModulusKind,
}

impl ModulusEstimate {
    pub fn smallest_radius(&self) -> f64 {
        self.radii[0]
    }
}

/// Dyadic radius grid 2^{-k_max} .. 2^{-1}, ascending.
pub fn dyadic_radii(k_max: u32) -> Vec<f64> {
    (1..=k_max).rev().map(|k| 2f64.powi(-(k as i32))).collect()
}

/// Estimate sup_{|x-y| <= z} |f(x) - f(y)| for each z by random pair probes.
///
/// Probe placement mixes uniform positions in the box with log-uniform
/// magnitudes toward the origin, so families whose fine-scale variation
/// concentrates there (the log-modulus presets) are seen at small z. Half the
/// pairs use distance exactly z, half a uniform fraction of z. Deterministic
/// for a fixed seed.
pub fn estimate_modulus(
    field: &ScalarField,
    kind: ModulusKind,
    dim: usize,
    radii: &[f64],
    probe_count: usize,
    box_half_width: f64,
    seed: u64,
) -> Result<ModulusEstimate> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 {
        return Err(Error::domain("modulus radii must be positive ascending"));
    }
    if probe_count < 2 {
        return Err(Error::domain("probe_count must be at least 2"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(radii.len());
    for (zi, &z) in radii.iter().enumerate() {
        let mut worst = 0.0f64;
        for p in 0..probe_count {
            let mut x = vec![0.0; dim];
            if p % 2 == 0 {
                for xi in x.iter_mut() {
                    *xi = rng.gen_range(-box_half_width..box_half_width);
                }
            } else {
                // log-uniform magnitude on the first axis, across all scales
                // (so the second point of a pair can sit arbitrarily close to
                // the origin relative to z)
                let exp10 = rng.gen_range(-280.0..box_half_width.log10().max(0.0));
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                x[0] = sign * 10f64.powf(exp10);
                for xi in x.iter_mut().skip(1) {
                    *xi = rng.gen_range(-box_half_width..box_half_width);
                }
            }
            let dist = if p % 4 < 2 { z } else { z * rng.gen_range(0.0..1.0) };
            let mut dir = vec![0.0; dim];
            loop {
                let mut norm2: f64 = 0.0;
                for di in dir.iter_mut() {
                    *di = rng.gen_range(-1.0..1.0);
                    norm2 += *di * *di;
                }
                if norm2 > 1e-4 && norm2 <= 1.0 {
                    let norm = norm2.sqrt();
                    dir.iter_mut().for_each(|d| *d /= norm);
                    break;
                }
            }
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + dist * d).collect();
            let fx = field.eval(&x);
            let fy = field.eval(&y);
            if !fx.is_finite() {
                return Err(Error::NonFinite { context: "modulus probe", point: x });
            }
            if !fy.is_finite() {
                return Err(Error::NonFinite { context: "modulus probe", point: y });
            }
            worst = worst.max((fx - fy).abs());
        }
        let _ = zi;
        values.push(worst);
    }
    // monotone envelope: cumulative max in z
    for i in 1..values.len() {
        values[i] = values[i].max(values[i - 1]);
    }
    Ok(ModulusEstimate { radii: radii.to_vec(), values, kind })
}

/// Decay diagnostic for Assumption beta(z) = o(1/|ln z|).
#[derive(Debug, Clone, Serialize)]
pub struct LogModulusReport {
    /// (z, beta(z) |ln z|) along the grid
    pub curve: Vec<(f64, f64)>,
    pub final_value: f64,
    pub pass: bool,
}

/// Computes beta(z) |ln z| on the grid and checks it decreases toward a value
/// below 0.05 at the smallest radius. The threshold is a reported diagnostic,
/// not a proof.
pub fn check_log_modulus(beta: &ModulusEstimate) -> Result<LogModulusReport> {
    if beta.smallest_radius() > 2f64.powi(-20) {
        return Err(Error::domain("log-modulus check needs radii down to 2^-20"));
    }
    for w in beta.radii.windows(2) {
        if w[1] / w[0] > 4.0 {
            return Err(Error::domain(
                "modulus grid too coarse: neighbor radius ratio exceeds 4",
            ));
        }
    }
    let curve: Vec<(f64, f64)> = beta
        .radii
        .iter()
        .zip(&beta.values)
        .map(|(&z, &v)| (z, v * z.ln().abs()))
        .collect();
    let vals: Vec<f64> = curve.iter().map(|c| c.1).collect();
    let n = vals.len();
    let head = &vals[n - n / 3..]; // largest radii (grid ascending in z)
    let tail = &vals[..n / 3]; // smallest radii
    let head_mean = head.iter().sum::<f64>() / head.len() as f64;
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let final_value = vals[0];
    let decreasing = tail_mean <= 0.8 * head_mean || head_mean < 0.05;
    let pass = final_value < 0.05 && decreasing;
    Ok(LogModulusReport { curve, final_value, pass })
}

/// Report for the Dini integral of psi and the gamma-weighted integral of
/// beta.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    pub dini_value: f64,
    pub dini_diverges: bool,
    pub gamma_value: f64,
    pub gamma_diverges: bool,
    pub gamma_exp: f64,
}

/// ∫_a^b c z^{q - 1 - s} dz in closed form (the interval-wise power model
/// m(z) = c z^q integrated against the weight z^{-1-s}).
fn power_piece(c: f64, q: f64, s: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if (q - s).abs() < 1e-12 {
        c * (b / a).ln()
    } else {
        c * (b.powf(q - s) - a.powf(q - s)) / (q - s)
    }
}

/// Estimate I = ∫_0^1 m(z) z^{-1-s} dz from the modulus grid. Within each
/// grid interval the modulus is interpolated as a power law (log-log linear),
/// which integrates in closed form; the piece above the largest radius
/// extends the last interval's fit, and the tail below the smallest radius
/// extrapolates the first interval's fit. Returns (value, diverges):
/// divergence is flagged when the partial sums keep growing by more than 1%
/// per decade at the finest scales, or the fitted local exponent cannot beat
/// the weight.
fn weighted_integral(m: &ModulusEstimate, s: f64) -> (f64, bool) {
    let zs = &m.radii;
    let vs = &m.values;
    if vs.iter().all(|v| *v < 1e-14) {
        return (0.0, false);
    }
    let piece = |i: usize, a: f64, b: f64| -> f64 {
        let (z0, z1) = (zs[i], zs[i + 1]);
        let (v0, v1) = (vs[i], vs[i + 1]);
        if v0 <= 0.0 || v1 <= 0.0 {
            // degenerate interval: fall back to trapezoid of the integrand
            let f0 = v0 * a.powf(-1.0 - s);
            let f1 = v1 * b.powf(-1.0 - s);
            return 0.5 * (f0 + f1) * (b - a);
        }
        let q = (v1 / v0).ln() / (z1 / z0).ln();
        let c = v0 / z0.powf(q);
        power_piece(c, q, s, a, b)
    };
    // integrate from the top downward, tracking partial sums per decade
    let mut total = 0.0f64;
    let n = zs.len();
    // closure [z_max, 1] with the last interval's fit
    if zs[n - 1] < 1.0 {
        total += piece(n - 2, zs[n - 1], 1.0);
    }
    let mut decade_partials: Vec<f64> = Vec::new();
    let mut last_decade = zs[n - 1].log10().floor();
    for i in (0..n - 1).rev() {
        total += piece(i, zs[i], zs[i + 1]);
        let dec = zs[i].log10().floor();
        if dec < last_decade {
            decade_partials.push(total);
            last_decade = dec;
        }
    }
    // growth of the partial sums over the finest decades
    let mut diverges = false;
    if decade_partials.len() >= 3 {
        let k = decade_partials.len();
        for w in decade_partials[k - 2..].windows(2) {
            if w[1] > w[0] * 1.01 {
                diverges = true;
            }
        }
    }
    // tail below z_min from the first interval's power fit
    let mut i0 = 0;
    while i0 + 1 < n && vs[i0] <= 0.0 {
        i0 += 1;
    }
    if vs[i0] > 0.0 && i0 + 1 < n && vs[i0 + 1] > vs[i0] {
        let q = (vs[i0 + 1] / vs[i0]).ln() / (zs[i0 + 1] / zs[i0]).ln();
        if q > s {
            let c = vs[i0] / zs[i0].powf(q);
            total += c * zs[i0].powf(q - s) / (q - s);
        } else {
            diverges = true;
        }
    } else if vs[i0] > 0.0 && i0 == 0 {
        // flat down to the smallest radius: the weight decides
        if s >= 0.0 {
            diverges = true;
        }
    }
    (total, diverges)
}

/// Dini integral of psi and gamma-weighted integral of beta, with divergence
/// flags. `gamma_exp` must be positive.
pub fn check_dini_and_gamma(
    psi: &ModulusEstimate,
    beta: &ModulusEstimate,
    gamma_exp: f64,
) -> Result<IntegralReport> {
    if gamma_exp <= 0.0 {
        return Err(Error::domain("gamma exponent must be positive"));
    }
    if psi.smallest_radius() > 1e-6 || beta.smallest_radius() > 1e-6 {
        return Err(Error::domain("integral checks need moduli sampled below 1e-6"));
    }
    let (dini_value, dini_diverges) = weighted_integral(psi, 0.0);
    let (gamma_value, gamma_diverges) = weighted_integral(beta, gamma_exp);
    Ok(IntegralReport { dini_value, dini_diverges, gamma_value, gamma_diverges, gamma_exp })
}

/// Empirical constants of the small-r lemma: r^{-beta(r)} over the grid.
#[derive(Debug, Clone, Serialize)]
pub struct SmallRReport {
    /// sup over the full grid (r <= 1)
    pub kappa4_sup: f64,
    /// value at the smallest sampled radius (the r -> 0 behavior)
    pub kappa4_limit: f64,
    /// same quantity restricted to radii with beta(r) > 0 (part (ii))
    pub kappa4_ratio_sup: f64,
    pub curve: Vec<(f64, f64)>,
}

/// r^{-beta(r)} along the modulus grid. Finite whenever beta passes the
/// log-modulus check; `eps` only shifts both sides of the lemma and is
/// validated, not used numerically.
pub fn lemma_small_r_checks(beta: &ModulusEstimate, eps: f64) -> Result<SmallRReport> {
    if eps <= 0.0 {
        return Err(Error::domain("eps must be positive"));
    }
    let mut curve = Vec::new();
    let mut sup = 0.0f64;
    let mut ratio_sup = 0.0f64;
    for (&r, &b) in beta.radii.iter().zip(&beta.values) {
        if r > 1.0 {
            continue;
        }
        let v = r.powf(-b);
        curve.push((r, v));
        sup = sup.max(v);
        if b > 0.0 {
            ratio_sup = ratio_sup.max(v);
        }
    }
    let kappa4_limit = curve.first().map(|c| c.1).unwrap_or(1.0);
    if !sup.is_finite() {
        return Err(Error::domain("kappa_4 not finite on the grid"));
    }
    Ok(SmallRReport {
        kappa4_sup: sup,
        kappa4_limit,
        kappa4_ratio_sup: if ratio_sup > 0.0 { ratio_sup } else { 1.0 },
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn synthetic_modulus(kind: ModulusKind, f: impl Fn(f64) -> f64) -> ModulusEstimate {
        let radii = dyadic_radii(24);
        let values = radii.iter().map(|&z| f(z)).collect();
        ModulusEstimate { radii, values, kind }
    }

    #[test]
    fn constant_field_has_zero_modulus() {
        let f = ScalarField::Constant { value: 1.5 };
        let m = estimate_modulus(&f, ModulusKind::Beta, 1, &dyadic_radii(20), 64, 2.0, 7).unwrap();
        assert!(m.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lipschitz_field_obeys_derivative_bound() {
        let f = ScalarField::Sinusoidal { base: 1.5, amplitude: 0.2, frequency: 1.0 };
        let m = estimate_modulus(&f, ModulusKind::Beta, 1, &dyadic_radii(20), 256, 2.0, 7).unwrap();
        for (&z, &v) in m.radii.iter().zip(&m.values) {
            assert!(v <= 0.2 * z + 1e-12, "beta({z}) = {v} above Lipschitz bound");
        }
    }

    #[test]
    fn modulus_envelope_is_monotone_and_deterministic() {
        let f = ScalarField::GaussianBump { base: 1.0, amplitude: 0.1 };
        let m1 = estimate_modulus(&f, ModulusKind::Psi, 2, &dyadic_radii(20), 128, 2.0, 42).unwrap();
        let m2 = estimate_modulus(&f, ModulusKind::Psi, 2, &dyadic_radii(20), 128, 2.0, 42).unwrap();
        assert_eq!(m1.values, m2.values);
        assert!(m1.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn log_modulus_pass_and_fail_shapes() {
        // beta(z) = z: z ln z -> 0, pass
        let lin = synthetic_modulus(ModulusKind::Beta, |z| z);
        assert!(check_log_modulus(&lin).unwrap().pass);
        // beta(z) = 1/|ln z|: curve constant 1, fail
        let borderline = synthetic_modulus(ModulusKind::Beta, |z| 1.0 / z.ln().abs());
        let rep = check_log_modulus(&borderline).unwrap();
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.final_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_modulus_detects_log_blend_field() {
        let f = ScalarField::LogBlend { base: 1.5, amplitude: 0.1 };
        let m = estimate_modulus(&f, ModulusKind::Beta, 1, &dyadic_radii(24), 512, 2.0, 11).unwrap();
        let rep = check_log_modulus(&m).unwrap();
        assert!(!rep.pass, "log-blend modulus should fail: final {}", rep.final_value);
    }

    #[test]
    fn coarse_grid_refused() {
        let m = ModulusEstimate {
            radii: vec![1e-7, 1e-2, 1.0],
            values: vec![0.0, 0.1, 0.2],
            kind: ModulusKind::Beta,
        };
        assert!(check_log_modulus(&m).is_err());
    }

    #[test]
    fn dini_and_gamma_reference_values() {
        // psi(z) = z: ∫_0^1 psi/z = 1; beta(z) = z, gamma = 1/2: ∫ z^{-1/2} = 2
        let psi = synthetic_modulus(ModulusKind::Psi, |z| z);
        let beta = synthetic_modulus(ModulusKind::Beta, |z| z);
        let rep = check_dini_and_gamma(&psi, &beta, 0.5).unwrap();
        assert!(!rep.dini_diverges && !rep.gamma_diverges);
        assert_relative_eq!(rep.dini_value, 1.0, max_relative = 1e-3);
        assert_relative_eq!(rep.gamma_value, 2.0, max_relative = 1e-3);
    }

    #[test]
    fn gamma_integral_divergence_flagged() {
        // beta(z) = z^{0.3}, gamma = 0.5: ∫ z^{-1.2} diverges
        let psi = synthetic_modulus(ModulusKind::Psi, |z| z);
        let beta = synthetic_modulus(ModulusKind::Beta, |z| z.powf(0.3));
        let rep = check_dini_and_gamma(&psi, &beta, 0.5).unwrap();
        assert!(rep.gamma_diverges);
        assert!(!rep.dini_diverges);
    }

    #[test]
    fn non_dini_modulus_flagged() {
        let psi = synthetic_modulus(ModulusKind::Psi, |z| 0.1 / z.ln().abs());
        let beta = synthetic_modulus(ModulusKind::Beta, |z| z);
        let rep = check_dini_and_gamma(&psi, &beta, 0.5).unwrap();
        assert!(rep.dini_diverges, "1/(z |ln z|) integral should be flagged");
    }

    #[test]
    fn gamma_exp_must_be_positive() {
        let psi = synthetic_modulus(ModulusKind::Psi, |z| z);
        let beta = synthetic_modulus(ModulusKind::Beta, |z| z);
        assert!(check_dini_and_gamma(&psi, &beta, 0.0).is_err());
        assert!(check_dini_and_gamma(&psi, &beta, -0.5).is_err());
    }

    #[test]
    fn small_r_constants() {
        // beta = 0: kappa_4 = 1 exactly
        let zero = synthetic_modulus(ModulusKind::Beta, |_| 0.0);
        let rep = lemma_small_r_checks(&zero, 0.25).unwrap();
        assert_eq!(rep.kappa4_sup, 1.0);
        assert_eq!(rep.kappa4_limit, 1.0);
        // beta = 0.2 z: r^{-0.2 r} -> 1 at small radii
        let lin = synthetic_modulus(ModulusKind::Beta, |z| 0.2 * z);
        let rep = lemma_small_r_checks(&lin, 0.25).unwrap();
        assert_abs_diff_eq!(rep.kappa4_limit, 1.0, epsilon = 1e-6);
        // beta = 1/|ln z|: r^{-beta(r)} = e for every r < 1
        let borderline = synthetic_modulus(ModulusKind::Beta, |z| 1.0 / z.ln().abs());
        let rep = lemma_small_r_checks(&borderline, 0.25).unwrap();
        assert_relative_eq!(rep.kappa4_sup, std::f64::consts::E, max_relative = 1e-12);
        assert_relative_eq!(rep.kappa4_limit, std::f64::consts::E, max_relative = 1e-12);
    }
}
