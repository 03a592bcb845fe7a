//! Perturbation estimates and the lambda-contraction scan: the three J-terms
//! bounding |∫ (L - M_y) r^{lambda,eps}_y (x - y) g(y) dy|, operator-difference
//! bound witnesses, and the search for the contraction threshold where the
//! J-sum drops below half the sup norm of g.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::{DensityEvaluator, StableProfile};
use crate::error::{Error, Result};
use crate::generator::{
    operator_difference, C2Field, DifferenceKind, QuadratureConfig, TestFunction,
};
use crate::model::VariableOrderModel;
use crate::quad::{gl, KahanSum};
use crate::resolvent::{BoundWitness, MollifiedResolvent};

/// Scan of the three J-terms along a geometric lambda grid.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionScan {
    pub lambdas: Vec<f64>,
    pub j1: Vec<f64>,
    pub j2: Vec<f64>,
    pub j3: Vec<f64>,
    pub g_norm: f64,
    /// Smallest grid lambda with J1 + J2 + J3 <= g_norm / 2, if any.
    pub lambda_tilde: Option<f64>,
    /// Least-squares slope of ln J1 against ln lambda.
    pub j1_slope: f64,
    /// Each J nonincreasing along the grid within 5% slack.
    pub monotone: bool,
}

/// Quadrature node in the y-integral: position, weight times |g(y)|, and the
/// distance to the witness point.
struct YNode {
    y: Vec<f64>,
    weight_g: f64,
    rho: f64,
}

/// Precomputed state for evaluating J-terms at many lambda values: the
/// y-quadrature nodes (graded toward y = x, where the operator differences
/// blow up integrably) and one density profile per node for the base order
/// alpha(y).
pub struct JTermEvaluator {
    model: VariableOrderModel,
    eps: f64,
    x: Vec<f64>,
    g_norm: f64,
    quad: QuadratureConfig,
    inner_tol: f64,
    nodes: Vec<YNode>,
    profiles: Vec<StableProfile>,
}

impl JTermEvaluator {
    pub fn new(
        model: &VariableOrderModel,
        eps: f64,
        g: &TestFunction,
        x: &[f64],
    ) -> Result<Self> {
        model.validate_shape()?;
        if model.dim != 1 {
            return Err(Error::domain(
                "contraction scans run in one dimension (the quadrature in y \
                 nests three spline constructions per node)",
            ));
        }
        // support radius of g around the witness
        let support = match g.far_field() {
            crate::generator::FarField::CompactSupport { radius } => radius,
            _ => return Err(Error::domain("contraction scans need compactly supported g")),
        };
        let rho_x: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r_outer = rho_x + support;
        // radial nodes: geometric panels (ratio 8) toward rho = 0 with GL3,
        // enough for the ~1% accuracy the scan diagnostics need
        let rule = gl(3);
        let mut nodes = Vec::new();
        let mut hi = r_outer;
        while hi > 1e-10 * r_outer {
            let lo = hi / 8.0;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let rho = mid + half * t;
                for side in [-1.0, 1.0] {
                    let y = vec![x[0] + side * rho];
                    let gy = g.value(&y).abs();
                    if gy > 0.0 {
                        nodes.push(YNode { y, weight_g: w * half * gy, rho });
                    }
                }
            }
            hi = lo;
        }
        // one evaluator + value profile per node (alpha(y) varies with y)
        let profiles: Result<Vec<StableProfile>> = nodes
            .par_iter()
            .map(|node| {
                let ev = DensityEvaluator::new(model.dim, model.alpha_at(&node.y))?;
                ev.build_value_profile(2e3)
            })
            .collect();
        let quad = QuadratureConfig { tol: 1e-7, radial_order: 12, ..QuadratureConfig::default() };
        Ok(Self {
            model: model.clone(),
            eps,
            x: x.to_vec(),
            g_norm: g.sup_norm(),
            quad,
            inner_tol: 1e-6,
            nodes,
            profiles: profiles?,
        })
    }

    pub fn g_norm(&self) -> f64 {
        self.g_norm
    }

    /// The split radius lambda^{-1/4} of the proof's regime change.
    pub fn split_radius(lambda: f64) -> f64 {
        lambda.powf(-0.25)
    }

    /// J-terms at one lambda: (J1, J2, J3) with
    /// J_i = ∫ |D_i(x, y) applied at x - y| |g(y)| dy.
    pub fn j_terms(&self, lambda: f64) -> Result<(f64, f64, f64)> {
        let terms: Result<Vec<(f64, f64, f64)>> = self
            .nodes
            .par_iter()
            .zip(self.profiles.par_iter())
            .map(|(node, profile)| {
                let xi_y = self.model.xi_at(&node.y);
                let mr = MollifiedResolvent::with_profile(
                    profile.clone(),
                    lambda,
                    self.eps,
                    xi_y,
                    self.inner_tol,
                )?;
                let u: Vec<f64> =
                    self.x.iter().zip(&node.y).map(|(a, b)| a - b).collect();
                let d1 = operator_difference(
                    DifferenceKind::LMinusMx,
                    &self.model,
                    &self.quad,
                    &mr,
                    &self.x,
                    &node.y,
                    &u,
                )?;
                let d2 = operator_difference(
                    DifferenceKind::MxMinusMxy,
                    &self.model,
                    &self.quad,
                    &mr,
                    &self.x,
                    &node.y,
                    &u,
                )?;
                let d3 = operator_difference(
                    DifferenceKind::MxyMinusMy,
                    &self.model,
                    &self.quad,
                    &mr,
                    &self.x,
                    &node.y,
                    &u,
                )?;
                Ok((
                    node.weight_g * d1.abs(),
                    node.weight_g * d2.abs(),
                    node.weight_g * d3.abs(),
                ))
            })
            .collect();
        let mut j1 = KahanSum::new();
        let mut j2 = KahanSum::new();
        let mut j3 = KahanSum::new();
        for (a, b, c) in terms? {
            j1.add(a);
            j2.add(b);
            j3.add(c);
        }
        Ok((j1.value(), j2.value(), j3.value()))
    }
}

/// One-shot J-terms (builds the evaluator internally).
pub fn j_terms(
    model: &VariableOrderModel,
    lambda: f64,
    eps: f64,
    g: &TestFunction,
    x: &[f64],
) -> Result<(f64, f64, f64)> {
    if !(lambda >= 1.0) {
        return Err(Error::domain("lambda must be at least 1"));
    }
    JTermEvaluator::new(model, eps, g, x)?.j_terms(lambda)
}

/// Scan the J-terms over a geometric lambda grid (>= 8 points spanning >= 4
/// decades) and locate the empirical contraction threshold.
pub fn contraction_scan(
    model: &VariableOrderModel,
    eps: f64,
    g: &TestFunction,
    x: &[f64],
    lambda_grid: &[f64],
) -> Result<ContractionScan> {
    if lambda_grid.len() < 8 {
        return Err(Error::domain("lambda grid needs at least 8 points"));
    }
    let span = lambda_grid.last().unwrap() / lambda_grid.first().unwrap();
    if span < 1e4 {
        return Err(Error::domain("lambda grid must span at least 4 decades"));
    }
    if lambda_grid.windows(2).any(|w| w[0] >= w[1]) || lambda_grid[0] < 1.0 {
        return Err(Error::domain("lambda grid must be ascending and start at >= 1"));
    }
    let ev = JTermEvaluator::new(model, eps, g, x)?;
    let mut scan = ContractionScan {
        lambdas: lambda_grid.to_vec(),
        j1: Vec::new(),
        j2: Vec::new(),
        j3: Vec::new(),
        g_norm: ev.g_norm(),
        lambda_tilde: None,
        j1_slope: 0.0,
        monotone: true,
    };
    for &lambda in lambda_grid {
        let (a, b, c) = ev.j_terms(lambda)?;
        scan.j1.push(a);
        scan.j2.push(b);
        scan.j3.push(c);
        if scan.lambda_tilde.is_none() && a + b + c <= 0.5 * scan.g_norm {
            scan.lambda_tilde = Some(lambda);
        }
    }
    for series in [&scan.j1, &scan.j2, &scan.j3] {
        for w in series.windows(2) {
            if w[1] > 1.05 * w[0] + 1e-12 {
                scan.monotone = false;
            }
        }
    }
    // least-squares slope of ln J1 on ln lambda (skipping exact zeros)
    let pts: Vec<(f64, f64)> = lambda_grid
        .iter()
        .zip(&scan.j1)
        .filter(|(_, j)| **j > 0.0)
        .map(|(l, j)| (l.ln(), j.ln()))
        .collect();
    if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        scan.j1_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    Ok(scan)
}

/// RHS shape of the displayed operator-difference bounds (both branches
/// carry their lambda factors so the fitted constant is lambda-uniform).
pub fn difference_bound_shape(
    kind: DifferenceKind,
    model: &VariableOrderModel,
    lambda: f64,
    x: &[f64],
    y: &[f64],
    u_norm: f64,
) -> f64 {
    let d = model.dim as f64;
    let ax = model.alpha_at(x);
    let ay = model.alpha_at(y);
    let eta = model.holder_eps / 2.0;
    let a_low = model.bounds.alpha_low;
    match kind {
        DifferenceKind::LMinusMx => {
            if u_norm <= 1.0 {
                u_norm.powf(-(d + ax - ay - eta))
            } else {
                u_norm.powf(-(d + ax + ay)) / lambda
            }
        }
        DifferenceKind::MxMinusMxy => {
            let dxi = (model.xi_at(x) - model.xi_at(y)).abs();
            if u_norm <= 1.0 {
                dxi * u_norm.powf(-d)
            } else {
                u_norm.powf(-(d + 2.0 * a_low)) / lambda
            }
        }
        DifferenceKind::MxyMinusMy => {
            let da = (ax - ay).abs();
            let log_factor = (u_norm / 2.0).ln().abs();
            if u_norm <= 1.0 {
                da * u_norm.powf(-(d + da)) * log_factor
            } else {
                u_norm.powf(-(d + 2.0 * ax.min(ay))) * log_factor / lambda
            }
        }
    }
}

/// Witness sweep of one operator-difference bound over a |u| grid. Points at
/// |u| = 2 are skipped for the log-factor bound, where the displayed shape
/// vanishes.
pub fn bound_witness(
    model: &VariableOrderModel,
    kind: DifferenceKind,
    lambda: f64,
    eps: f64,
    x: &[f64],
    y: &[f64],
    u_grid: &[f64],
) -> Result<BoundWitness> {
    if u_grid.iter().any(|&u| u <= 0.0) {
        return Err(Error::domain("u grid must avoid the origin"));
    }
    let ev = DensityEvaluator::new(model.dim, model.alpha_at(y))?;
    let profile = ev.build_value_profile(2e3)?;
    let mr = MollifiedResolvent::with_profile(profile, lambda, eps, model.xi_at(y), 1e-7)?;
    let quad = QuadratureConfig { tol: 1e-8, ..QuadratureConfig::default() };
    let skip = |u: f64| {
        kind == DifferenceKind::MxyMinusMy && (u - 2.0).abs() < 1e-9
    };
    let scan = |grid: &[f64]| -> Result<Vec<(f64, f64, f64)>> {
        grid.par_iter()
            .filter(|&&u| !skip(u))
            .map(|&u_norm| {
                let mut u = vec![0.0; model.dim];
                u[0] = u_norm;
                let lhs =
                    operator_difference(kind, model, &quad, &mr, x, y, &u)?.abs();
                let rhs = difference_bound_shape(kind, model, lambda, x, y, u_norm);
                Ok((u_norm, lhs, rhs))
            })
            .collect()
    };
    let refined: Vec<f64> = {
        let mut out = Vec::with_capacity(2 * u_grid.len());
        for w in u_grid.windows(2) {
            out.push(w[0]);
            out.push((w[0] * w[1]).sqrt());
        }
        out.push(*u_grid.last().unwrap());
        out
    };
    let id = format!("{kind:?} lambda={lambda}");
    Ok(BoundWitness::from_scan(id, scan(u_grid)?, scan(&refined)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_bump(dim: usize) -> TestFunction {
        TestFunction::PolyBump {
            center: vec![0.0; dim],
            r_plateau: 0.3,
            r_support: 1.0,
            amplitude: 1.0,
        }
    }

    #[test]
    fn constant_model_j_terms_vanish() {
        let model = VariableOrderModel::constant(1, 1.5, 1.0);
        let g = unit_bump(1);
        let (j1, j2, j3) = j_terms(&model, 10.0, 0.2, &g, &[0.0]).unwrap();
        assert_abs_diff_eq!(j1, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(j2, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(j3, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn constant_model_witnesses_vanish() {
        let model = VariableOrderModel::constant(1, 1.2, 0.7);
        let grid: Vec<f64> = (0..12).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 11.0)).collect();
        for kind in [
            DifferenceKind::LMinusMx,
            DifferenceKind::MxMinusMxy,
            DifferenceKind::MxyMinusMy,
        ] {
            let w = bound_witness(&model, kind, 2.0, 0.2, &[0.3], &[-0.2], &grid).unwrap();
            assert_eq!(w.fitted_constant, 0.0, "{kind:?}");
            for p in &w.points {
                assert!(p.lhs.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn reference_model_j_terms_decay_with_lambda() {
        let model = VariableOrderModel::reference(1);
        let g = unit_bump(1);
        let ev = JTermEvaluator::new(&model, 0.2, &g, &[0.0]).unwrap();
        let (a1, b1, c1) = ev.j_terms(10.0).unwrap();
        let (a2, b2, c2) = ev.j_terms(1000.0).unwrap();
        assert!(a2 <= a1 * 1.05, "J1: {a1} -> {a2}");
        assert!(b2 <= b1 * 1.05, "J2: {b1} -> {b2}");
        assert!(c2 <= c1 * 1.05, "J3: {c1} -> {c2}");
        assert!(a1.is_finite() && b1.is_finite() && c1.is_finite());
    }

    #[test]
    fn scan_input_validation() {
        let model = VariableOrderModel::reference(1);
        let g = unit_bump(1);
        // too few points
        assert!(contraction_scan(&model, 0.2, &g, &[0.0], &[1.0, 10.0]).is_err());
        // too narrow
        let narrow: Vec<f64> = (0..9).map(|i| 1.0 + i as f64).collect();
        assert!(contraction_scan(&model, 0.2, &g, &[0.0], &narrow).is_err());
    }

    #[test]
    fn log_factor_point_skipped() {
        let model = VariableOrderModel::reference(1);
        let grid = vec![0.5, 2.0, 8.0];
        let w = bound_witness(
            &model,
            DifferenceKind::MxyMinusMy,
            2.0,
            0.2,
            &[0.3],
            &[0.0],
            &grid,
        )
        .unwrap();
        assert!(w.points.iter().all(|p| (p.point - 2.0).abs() > 1e-9));
    }
}
