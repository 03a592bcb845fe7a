//! Quadrature building blocks shared across the crate: Gauss-Legendre and
//! Gauss-Jacobi rules, adaptive panel integration, graded panels for endpoint
//! singularities, product rules on the unit sphere, and series acceleration.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence; standard construction.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(x) and its derivative.
                let mut p0 = 1.0;
                let mut p1 = 0.0;
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
                }
                pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
                let dx = p0 / pp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate f over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = KahanSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// Cached Gauss-Legendre rules for the handful of orders used everywhere.
pub fn gl(n: usize) -> &'static GaussLegendre {
    static TABLE: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (1..=64).map(GaussLegendre::new).collect());
    assert!(n >= 1 && n <= 64, "GL order out of cached range");
    &table[n - 1]
}

/// Gauss-Jacobi rule on [0, 1] for the weight t^beta, beta > -1.
///
/// Nodes are eigenvalues of the Jacobi matrix (Golub-Welsch); weights come
/// from the squared first components of the eigenvectors times the moment
/// integral 1/(1+beta).
pub fn gauss_jacobi_01(n: usize, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && beta > -1.0);
    // Recurrence coefficients for Jacobi polynomials with (a, b) = (0, beta)
    // on [-1, 1], weight (1+x)^beta.
    let a = 0.0f64;
    let b = beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n]; // off[k] couples k-1 and k
    for k in 0..n {
        let kf = k as f64;
        let denom = (2.0 * kf + a + b) * (2.0 * kf + a + b + 2.0);
        diag[k] = if denom == 0.0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / denom
        };
        if k > 0 {
            let num = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b);
            let den = (2.0 * kf + a + b - 1.0) * (2.0 * kf + a + b).powi(2) * (2.0 * kf + a + b + 1.0);
            off[k] = (num / den).sqrt();
        }
    }
    let (eigs, firsts) = tridiag_eigen(&mut diag, &mut off);
    // Total weight of (1+x)^beta on [-1,1] is 2^(beta+1)/(beta+1).
    let mu0 = 2f64.powf(beta + 1.0) / (beta + 1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Map x in [-1,1] to t = (1+x)/2 in [0,1]; weight picks up 2^-(beta+1)
        // from t^beta dt = ((1+x)/2)^beta dx/2.
        nodes.push(0.5 * (1.0 + eigs[i]));
        weights.push(mu0 * firsts[i] * firsts[i] / 2f64.powf(beta + 1.0));
    }
    (nodes, weights)
}

/// Symmetric tridiagonal eigenvalues plus first components of eigenvectors
/// (implicit QL with Wilkinson shifts). `off[0]` is ignored.
fn tridiag_eigen(diag: &mut [f64], off: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return (diag.to_vec(), z);
    }
    // Shift off-diagonals down so e[i] couples i and i+1.
    let mut e: Vec<f64> = (1..n).map(|i| off[i]).collect();
    e.push(0.0);
    let d = diag;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 80, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Sort ascending by eigenvalue, carrying first components.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let eigs: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let firsts: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    (eigs, firsts)
}

/// Adaptive integration on [a, b]: bisect panels until the GL(n) vs GL(2n)
/// discrepancy on each panel is below the panel's share of `tol` (absolute).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    op: &'static str,
) -> Result<f64> {
    let lo = gl(8);
    let hi = gl(16);
    // Start from a uniform split so narrow features cannot hide inside a
    // single panel that both rules resolve equally badly.
    let init = 16;
    let mut stack: Vec<(f64, f64, u32)> = (0..init)
        .map(|k| {
            let x0 = a + (b - a) * k as f64 / init as f64;
            let x1 = a + (b - a) * (k + 1) as f64 / init as f64;
            (x0, x1, 0u32)
        })
        .collect();
    let mut acc = KahanSum::new();
    let mut err = 0.0;
    while let Some((x0, x1, depth)) = stack.pop() {
        let coarse = lo.integrate(x0, x1, &mut f);
        let fine = hi.integrate(x0, x1, &mut f);
        let d = (fine - coarse).abs();
        if d <= tol * ((x1 - x0) / (b - a)).max(1e-3) || depth >= 40 {
            if depth >= 40 && d > tol {
                return Err(Error::Convergence { op, last: fine, previous: coarse });
            }
            acc.add(fine);
            err += d;
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        stack.push((x0, mid, depth + 1));
        stack.push((mid, x1, depth + 1));
    }
    let _ = err;
    Ok(acc.value())
}

/// Integrate over [a, b] with panels graded geometrically toward `point`
/// (an endpoint or interior algebraic singularity with integrable mass).
/// Panels halve toward the singular point until their contributions drop
/// below `rel_tol` of the accumulated value; the remaining sliver is closed
/// by geometric extrapolation of the observed decay.
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    point: f64,
    order: usize,
    rel_tol: f64,
) -> f64 {
    let rule = gl(order);
    let mut acc = KahanSum::new();
    let side = |f: &mut F, from: f64, to: f64| {
        // Panels from `to` shrinking geometrically toward `from` (singular end).
        let len = (to - from).abs();
        if len == 0.0 {
            return 0.0;
        }
        let sign = (to - from).signum();
        let mut inner = KahanSum::new();
        let mut hi = len;
        let mut prev: Option<f64> = None;
        let mut last = 0.0;
        for _ in 0..2000 {
            let lo = hi * 0.5;
            let (p0, p1) = if sign > 0.0 {
                (from + lo, from + hi)
            } else {
                (from - hi, from - lo)
            };
            let contrib = rule.integrate(p0, p1, &mut *f);
            inner.add(contrib);
            let small = contrib.abs() <= rel_tol * inner.value().abs().max(1e-300);
            if small && prev.map_or(false, |p: f64| {
                p.abs() <= rel_tol * inner.value().abs().max(1e-300)
            }) {
                // close the sliver with the observed geometric decay
                if let Some(p) = prev {
                    if p != 0.0 {
                        let r = (contrib / p).abs();
                        if r < 0.95 {
                            inner.add(contrib * r / (1.0 - r));
                        }
                    }
                }
                last = lo;
                break;
            }
            prev = Some(contrib);
            hi = lo;
            last = lo;
            if lo < 1e-280 {
                break;
            }
        }
        let _ = last;
        inner.value()
    };
    if point <= a {
        acc.add(side(f, a, b));
    } else if point >= b {
        acc.add(side(f, b, a));
    } else {
        acc.add(side(f, point, a));
        acc.add(side(f, point, b));
    }
    acc.value()
}

/// Accelerate a sequence of partial sums of an (eventually) alternating
/// series by iterated Aitken extrapolation. Works on a window of the most
/// recent partials (long histories only amplify roundoff through the
/// repeated differences). Returns the estimate and the change in the final
/// extrapolation level as the error indicator.
pub fn aitken_accelerate(partials: &[f64]) -> (f64, f64) {
    let n = partials.len();
    let start = n.saturating_sub(30);
    let mut cur: Vec<f64> = partials[start..].to_vec();
    let mut best = *cur.last().unwrap();
    let mut err = f64::INFINITY;
    for _ in 0..12 {
        if cur.len() < 3 {
            break;
        }
        let mut nxt = Vec::with_capacity(cur.len() - 2);
        for w in cur.windows(3) {
            let denom = w[2] - 2.0 * w[1] + w[0];
            let scale = w.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1e-300);
            if denom.abs() < 1e-14 * scale {
                nxt.push(w[2]);
            } else {
                nxt.push(w[2] - (w[2] - w[1]).powi(2) / denom);
            }
        }
        let cand = *nxt.last().unwrap();
        err = (cand - best).abs();
        best = cand;
        cur = nxt;
        if err == 0.0 {
            break;
        }
    }
    (best, err)
}

/// A quadrature rule on the unit sphere S^{d-1}, d in {1, 2, 3}.
///
/// Points come in antipodal pairs so that odd integrands sum to zero exactly.
/// Weights sum to the sphere surface measure (2, 2π, 4π).
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// `order` controls resolution: number of azimuthal angles for d = 2,
    /// polar GL order for d = 3. Ignored for d = 1.
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self {
                dim,
                points: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
                weights: vec![1.0, 1.0],
            }),
            2 => {
                let n = order.max(4) & !1; // even count keeps antipodal pairing
                let mut points = Vec::with_capacity(n);
                let w = 2.0 * PI / n as f64;
                for k in 0..n {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    points.push([phi.cos(), phi.sin(), 0.0]);
                }
                Ok(Self { dim, points, weights: vec![w; n] })
            }
            3 => {
                let npol = order.max(4);
                let naz = (2 * npol) & !1;
                let rule = gl(npol);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (c, wc) in rule.nodes.iter().zip(&rule.weights) {
                    let s = (1.0 - c * c).sqrt();
                    for k in 0..naz {
                        let phi = 2.0 * PI * (k as f64 + 0.5) / naz as f64;
                        points.push([s * phi.cos(), s * phi.sin(), *c]);
                        weights.push(wc * 2.0 * PI / naz as f64);
                    }
                }
                Ok(Self { dim: 3, points, weights })
            }
            d => Err(Error::domain(format!("sphere rule supports d <= 3, got {d}"))),
        }
    }

    pub fn surface(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Surface measure of S^{d-1}.
pub fn sphere_surface(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // 2 π^{d/2} / Γ(d/2); only hit through internal checks.
            2.0 * PI.powf(dim as f64 / 2.0) / crate::special::gamma(dim as f64 / 2.0)
        }
    }
}
