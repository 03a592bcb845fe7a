//! C^2 test functions the operators act on: bounded, with bounded first and
//! second derivatives, supplying exact gradients and Hessians.

use serde::{Deserialize, Serialize};

/// What the quadrature may assume about f far from the origin; picks the
/// truncation strategy for the large-jump zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarField {
    /// f is constant everywhere: every increment vanishes.
    Constant,
    /// supp f is inside the centered ball of this radius.
    CompactSupport { radius: f64 },
    /// |f(z)| <= amplitude (1 + |z|)^{-exponent}.
    PowerDecay { amplitude: f64, exponent: f64 },
    /// f oscillates with this spatial wavelength (e.g. cos(u.x)).
    Oscillatory { wavelength: f64 },
}

/// A C^2 scalar field with exact derivatives.
pub trait C2Field: Sync {
    fn value(&self, x: &[f64]) -> f64;
    /// Gradient, written into `out` (length d).
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// Hessian, row-major d x d, written into `out`.
    fn hessian(&self, x: &[f64], out: &mut [f64]);
    fn far_field(&self) -> FarField;
    fn sup_norm(&self) -> f64;
}

/// Built-in martingale-problem test class.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum TestFunction {
    /// value (constant function)
    Constant { value: f64 },
    /// cos(u . x)
    Cosine { freq: Vec<f64> },
    /// amplitude * exp(-|x - center|^2 / (2 width^2))
    GaussianBump { center: Vec<f64>, width: f64, amplitude: f64 },
    /// C^2 plateau bump: 1 on |z| <= r_plateau, quintic smoothstep down to 0
    /// at r_support, z = x - center.
    PolyBump { center: Vec<f64>, r_plateau: f64, r_support: f64, amplitude: f64 },
    /// (u . x) * plateau-bump(x): linear inside the plateau.
    LinearBump { slope: Vec<f64>, r_plateau: f64, r_support: f64 },
}

/// Quintic smoothstep q with q(0)=1, q(1)=0 and two vanishing derivatives at
/// both ends; returns (q, q', q'') in the transition variable.
fn smoothstep_down(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (1.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (0.0, 0.0, 0.0)
    } else {
        let p = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let dp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        let d2p = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (1.0 - p, -dp, -d2p)
    }
}

/// Radial plateau profile and derivatives in rho = |z|.
fn plateau(rho: f64, r0: f64, r1: f64) -> (f64, f64, f64) {
    let w = r1 - r0;
    let (q, dq, d2q) = smoothstep_down((rho - r0) / w);
    (q, dq / w, d2q / (w * w))
}

impl TestFunction {
    fn dim_of(&self, x: &[f64]) -> usize {
        x.len()
    }
}

impl C2Field for TestFunction {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { value } => *value,
            TestFunction::Cosine { freq } => {
                let dot: f64 = freq.iter().zip(x).map(|(u, v)| u * v).sum();
                dot.cos()
            }
            TestFunction::GaussianBump { center, width, amplitude } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            TestFunction::PolyBump { center, r_plateau, r_support, amplitude } => {
                let rho = dist(x, center);
                amplitude * plateau(rho, *r_plateau, *r_support).0
            }
            TestFunction::LinearBump { slope, r_plateau, r_support } => {
                let dot: f64 = slope.iter().zip(x).map(|(u, v)| u * v).sum();
                let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                dot * plateau(rho, *r_plateau, *r_support).0
            }
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim_of(x);
        match self {
            TestFunction::Constant { .. } => out[..d].fill(0.0),
            TestFunction::Cosine { freq } => {
                let dot: f64 = freq.iter().zip(x).map(|(u, v)| u * v).sum();
                let s = -dot.sin();
                for i in 0..d {
                    out[i] = s * freq[i];
                }
            }
            TestFunction::GaussianBump { center, width, amplitude } => {
                let v = self.value(x);
                let w2 = width * width;
                for i in 0..d {
                    out[i] = -v * (x[i] - center[i]) / w2;
                }
                let _ = amplitude;
            }
            TestFunction::PolyBump { center, r_plateau, r_support, amplitude } => {
                let rho = dist(x, center);
                if rho == 0.0 {
                    out[..d].fill(0.0);
                    return;
                }
                let (_, dq, _) = plateau(rho, *r_plateau, *r_support);
                for i in 0..d {
                    out[i] = amplitude * dq * (x[i] - center[i]) / rho;
                }
            }
            TestFunction::LinearBump { slope, r_plateau, r_support } => {
                let dot: f64 = slope.iter().zip(x).map(|(u, v)| u * v).sum();
                let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let (q, dq, _) = plateau(rho, *r_plateau, *r_support);
                for i in 0..d {
                    let radial = if rho == 0.0 { 0.0 } else { dot * dq * x[i] / rho };
                    out[i] = slope[i] * q + radial;
                }
            }
        }
    }

    fn hessian(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim_of(x);
        match self {
            TestFunction::Constant { .. } => out[..d * d].fill(0.0),
            TestFunction::Cosine { freq } => {
                let dot: f64 = freq.iter().zip(x).map(|(u, v)| u * v).sum();
                let c = -dot.cos();
                for i in 0..d {
                    for j in 0..d {
                        out[i * d + j] = c * freq[i] * freq[j];
                    }
                }
            }
            TestFunction::GaussianBump { center, width, .. } => {
                let v = self.value(x);
                let w2 = width * width;
                for i in 0..d {
                    for j in 0..d {
                        let zi = x[i] - center[i];
                        let zj = x[j] - center[j];
                        let iso = if i == j { -v / w2 } else { 0.0 };
                        out[i * d + j] = v * zi * zj / (w2 * w2) + iso;
                    }
                }
            }
            TestFunction::PolyBump { center, r_plateau, r_support, amplitude } => {
                let rho = dist(x, center);
                let (_, dq, d2q) = plateau(rho, *r_plateau, *r_support);
                radial_hessian(x, center, rho, *amplitude, dq, d2q, out, d);
            }
            TestFunction::LinearBump { slope, r_plateau, r_support } => {
                let dot: f64 = slope.iter().zip(x).map(|(u, v)| u * v).sum();
                let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let origin = vec![0.0; d];
                let (_, dq, d2q) = plateau(rho, *r_plateau, *r_support);
                // dot * Hess q + slope (grad q)^T + (grad q) slope^T
                radial_hessian(x, &origin, rho, dot, dq, d2q, out, d);
                if rho > 0.0 {
                    for i in 0..d {
                        for j in 0..d {
                            out[i * d + j] +=
                                dq * (slope[i] * x[j] + x[i] * slope[j]) / rho;
                        }
                    }
                }
            }
        }
    }

    fn far_field(&self) -> FarField {
        match self {
            TestFunction::Constant { .. } => FarField::Constant,
            TestFunction::Cosine { freq } => {
                let norm: f64 = freq.iter().map(|u| u * u).sum::<f64>().sqrt();
                FarField::Oscillatory { wavelength: 2.0 * std::f64::consts::PI / norm }
            }
            TestFunction::GaussianBump { center, width, .. } => {
                // e^{-r^2/2w^2} underflows past ~38 widths: numerically compact
                let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                FarField::CompactSupport { radius: c + 40.0 * width }
            }
            TestFunction::PolyBump { center, r_support, .. } => {
                let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                FarField::CompactSupport { radius: c + r_support }
            }
            TestFunction::LinearBump { r_support, .. } => {
                FarField::CompactSupport { radius: *r_support }
            }
        }
    }

    fn sup_norm(&self) -> f64 {
        match self {
            TestFunction::Constant { value } => value.abs(),
            TestFunction::Cosine { .. } => 1.0,
            TestFunction::GaussianBump { amplitude, .. } => amplitude.abs(),
            TestFunction::PolyBump { amplitude, .. } => amplitude.abs(),
            TestFunction::LinearBump { slope, r_support, .. } => {
                let norm: f64 = slope.iter().map(|u| u * u).sum::<f64>().sqrt();
                norm * r_support
            }
        }
    }
}

/// Hessian of amp * q(|x - c|) given radial derivatives dq, d2q at rho.
#[allow(clippy::too_many_arguments)]
fn radial_hessian(
    x: &[f64],
    center: &[f64],
    rho: f64,
    amp: f64,
    dq: f64,
    d2q: f64,
    out: &mut [f64],
    d: usize,
) {
    if rho == 0.0 {
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = if i == j { amp * d2q } else { 0.0 };
            }
        }
        return;
    }
    for i in 0..d {
        for j in 0..d {
            let zi = x[i] - center[i];
            let zj = x[j] - center[j];
            let rad = (d2q - dq / rho) * zi * zj / (rho * rho);
            let iso = if i == j { dq / rho } else { 0.0 };
            out[i * d + j] = amp * (rad + iso);
        }
    }
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Linear combination of fields (shares the most conservative far-field).
pub struct Combo<'a> {
    pub parts: Vec<(f64, &'a dyn C2Field)>,
}

impl C2Field for Combo<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.parts.iter().map(|(c, f)| c * f.value(x)).sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        out[..d].fill(0.0);
        let mut tmp = vec![0.0; d];
        for (c, f) in &self.parts {
            f.gradient(x, &mut tmp);
            for i in 0..d {
                out[i] += c * tmp[i];
            }
        }
    }

    fn hessian(&self, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        out[..d * d].fill(0.0);
        let mut tmp = vec![0.0; d * d];
        for (c, f) in &self.parts {
            f.hessian(x, &mut tmp);
            for i in 0..d * d {
                out[i] += c * tmp[i];
            }
        }
    }

    fn far_field(&self) -> FarField {
        let mut radius = 0.0f64;
        let mut wavelength = f64::INFINITY;
        let mut decay: Option<(f64, f64)> = None;
        for (c, f) in &self.parts {
            match f.far_field() {
                FarField::Constant => {}
                FarField::CompactSupport { radius: r } => radius = radius.max(r),
                FarField::Oscillatory { wavelength: w } => wavelength = wavelength.min(w),
                FarField::PowerDecay { amplitude, exponent } => {
                    let (a0, e0) = decay.unwrap_or((0.0, f64::INFINITY));
                    decay = Some((a0 + c.abs() * amplitude, e0.min(exponent)));
                }
            }
        }
        if wavelength.is_finite() {
            FarField::Oscillatory { wavelength }
        } else if let Some((amplitude, exponent)) = decay {
            FarField::PowerDecay { amplitude, exponent }
        } else {
            FarField::CompactSupport { radius }
        }
    }

    fn sup_norm(&self) -> f64 {
        self.parts.iter().map(|(c, f)| c.abs() * f.sup_norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_check(f: &dyn C2Field, x: &[f64]) {
        let d = x.len();
        let h = 1e-5;
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; d * d];
        f.gradient(x, &mut grad);
        f.hessian(x, &mut hess);
        for i in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
            assert_relative_eq!(grad[i], fd, epsilon = 1e-7, max_relative = 1e-5);
            for j in 0..d {
                let mut xpp = x.to_vec();
                let mut xpm = x.to_vec();
                let mut xmp = x.to_vec();
                let mut xmm = x.to_vec();
                xpp[i] += h;
                xpp[j] += h;
                xpm[i] += h;
                xpm[j] -= h;
                xmp[i] -= h;
                xmp[j] += h;
                xmm[i] -= h;
                xmm[j] -= h;
                let fd2 = (f.value(&xpp) - f.value(&xpm) - f.value(&xmp) + f.value(&xmm))
                    / (4.0 * h * h);
                assert_relative_eq!(hess[i * d + j], fd2, epsilon = 1e-5, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fns: Vec<TestFunction> = vec![
            TestFunction::Cosine { freq: vec![2.0, -1.0] },
            TestFunction::GaussianBump { center: vec![0.3, 0.0], width: 0.7, amplitude: 2.0 },
            TestFunction::PolyBump {
                center: vec![0.1, -0.2],
                r_plateau: 0.4,
                r_support: 1.2,
                amplitude: 1.0,
            },
            TestFunction::LinearBump { slope: vec![1.0, 0.5], r_plateau: 0.5, r_support: 1.5 },
        ];
        for f in &fns {
            for x in [[0.2, 0.1], [0.6, -0.3], [0.9, 0.4]] {
                fd_check(f, &x);
            }
        }
    }

    #[test]
    fn plateau_is_flat_inside() {
        let f = TestFunction::PolyBump {
            center: vec![0.0],
            r_plateau: 0.5,
            r_support: 1.0,
            amplitude: 3.0,
        };
        assert_eq!(f.value(&[0.2]), 3.0);
        assert_eq!(f.value(&[-0.49]), 3.0);
        assert_eq!(f.value(&[1.01]), 0.0);
        let mut h = [0.0];
        f.hessian(&[0.3], &mut h);
        assert_eq!(h[0], 0.0);
    }

    #[test]
    fn smoothstep_is_c2_at_the_seams() {
        let eps = 1e-7;
        for t0 in [0.0, 1.0] {
            let (q0, d0, _) = smoothstep_down(t0 - eps);
            let (q1, d1, _) = smoothstep_down(t0 + eps);
            assert!((q0 - q1).abs() < 1e-6);
            assert!((d0 - d1).abs() < 1e-5);
        }
    }

    #[test]
    fn linear_bump_is_linear_on_plateau() {
        let f = TestFunction::LinearBump { slope: vec![2.0], r_plateau: 1.0, r_support: 2.0 };
        assert_relative_eq!(f.value(&[0.4]), 0.8, max_relative = 1e-15);
        let mut h = [0.0];
        f.hessian(&[0.4], &mut h);
        assert_eq!(h[0], 0.0);
    }
}
