//! Piecewise Chebyshev interpolation for smooth radial profiles.
//!
//! Density, resolvent, and mollified-resolvent evaluations get sampled once
//! on adaptive panels and then served from these interpolants inside nested
//! quadratures. Panels split until the trailing Chebyshev coefficients fall
//! below the requested tolerance, so the interpolation error is controlled
//! rather than assumed.

use crate::quad::KahanSum;

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Panel {
    fn fit<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, f: &mut F) -> Self {
        // Chebyshev points of the second kind, values -> coefficients by the
        // direct cosine transform (n is small; O(n^2) is fine).
        let m = n - 1;
        let mut vals = Vec::with_capacity(n);
        for j in 0..n {
            let x = (std::f64::consts::PI * j as f64 / m as f64).cos();
            let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
            vals.push(f(t));
        }
        let mut coeffs = vec![0.0; n];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut acc = KahanSum::new();
            for (j, vj) in vals.iter().enumerate() {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                acc.add(w * vj * (std::f64::consts::PI * (k * j) as f64 / m as f64).cos());
            }
            *ck = 2.0 * acc.value() / m as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[m] *= 0.5;
        let d1 = differentiate(&coeffs, a, b);
        let d2 = differentiate(&d1, a, b);
        Self { a, b, coeffs, d1, d2 }
    }

    fn tail_norm(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n - 2].abs().max(self.coeffs[n - 1].abs())
    }

    fn eval(&self, coeffs: &[f64], t: f64) -> f64 {
        let x = (2.0 * t - (self.a + self.b)) / (self.b - self.a);
        clenshaw(coeffs, x.clamp(-1.0, 1.0))
    }
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let t = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = t;
    }
    x * b1 - b2 + c[0]
}

/// Chebyshev coefficients of the derivative on [a, b].
fn differentiate(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    let n = c.len();
    let mut d = vec![0.0; n];
    if n >= 2 {
        d[n - 2] = 2.0 * (n - 1) as f64 * c[n - 1];
        for k in (0..n.saturating_sub(2)).rev() {
            d[k] = d.get(k + 2).copied().unwrap_or(0.0) + 2.0 * (k + 1) as f64 * c[k + 1];
        }
        d[0] *= 0.5;
    }
    let scale = 2.0 / (b - a);
    d.iter_mut().for_each(|v| *v *= scale);
    d
}

/// Adaptive piecewise Chebyshev interpolant of a scalar function on [a, b].
#[derive(Debug, Clone)]
pub struct ChebSpline {
    panels: Vec<Panel>,
    breaks: Vec<f64>,
}

impl ChebSpline {
    /// Build from initial breakpoints, splitting panels until the trailing
    /// coefficients are below `tol` relative to the global scale.
    pub fn build<F: FnMut(f64) -> f64>(mut f: F, breakpoints: &[f64], order: usize, tol: f64) -> Self {
        assert!(breakpoints.len() >= 2 && order >= 8);
        let mut stack: Vec<(f64, f64, u32)> = breakpoints
            .windows(2)
            .map(|w| (w[0], w[1], 0u32))
            .collect();
        stack.reverse();
        let mut panels: Vec<Panel> = Vec::new();
        let mut scale: f64 = 0.0;
        while let Some((a, b, depth)) = stack.pop() {
            let p = Panel::fit(a, b, order, &mut f);
            let local = p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            scale = scale.max(local);
            if p.tail_norm() <= tol * scale.max(1e-300) || depth >= 24 {
                panels.push(p);
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
            }
        }
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        let mut breaks: Vec<f64> = panels.iter().map(|p| p.a).collect();
        breaks.push(panels.last().unwrap().b);
        Self { panels, breaks }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    fn locate(&self, t: f64) -> &Panel {
        let idx = match self.breaks.binary_search_by(|b| b.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.panels.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.panels.len() - 1),
        };
        &self.panels[idx]
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = self.locate(t);
        p.eval(&p.coeffs, t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let p = self.locate(t);
        p.eval(&p.d1, t)
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let p = self.locate(t);
        p.eval(&p.d2, t)
    }
}

/// Log-spaced breakpoints from `a` to `b` (both positive), `per_decade`
/// panels per decade, with 0 prepended when `include_zero` is set.
pub fn log_breakpoints(a: f64, b: f64, per_decade: usize, include_zero: bool) -> Vec<f64> {
    assert!(a > 0.0 && b > a);
    let decades = (b / a).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let mut out = Vec::with_capacity(n + 2);
    if include_zero {
        out.push(0.0);
    }
    for k in 0..=n {
        out.push(a * 10f64.powf(decades * k as f64 / n as f64));
    }
    out
}
