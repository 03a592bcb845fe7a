//! Numerical validation of the standing assumptions on sampled grids.

use serde::Serialize;

use super::modulus::{
    check_dini_and_gamma, check_log_modulus, dyadic_radii, estimate_modulus, ModulusKind,
};
use super::VariableOrderModel;
use crate::error::{Error, Result};

/// Sampling plan: x over a box grid, h over log-spaced radii and a few
/// directions, moduli probed with the plan's seed.
#[derive(Debug, Clone, Serialize)]
pub struct SamplingPlan {
    pub box_half_width: f64,
    pub x_points: usize,
    pub h_decades: usize,
    pub h_per_decade: usize,
    pub modulus_probes: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            box_half_width: 2.0,
            x_points: 1000,
            h_decades: 6,
            h_per_decade: 12,
            modulus_probes: 512,
            seed: 20240901,
        }
    }
}

impl SamplingPlan {
    /// Deterministic x grid with roughly `x_points` points in the box,
    /// including points accumulating at the origin on the first axis.
    fn x_grid(&self, dim: usize) -> Vec<Vec<f64>> {
        let per_axis = match dim {
            1 => self.x_points,
            2 => (self.x_points as f64).sqrt().ceil() as usize,
            _ => (self.x_points as f64).cbrt().ceil() as usize,
        }
        .max(3);
        let b = self.box_half_width;
        let mut out = Vec::new();
        let axis: Vec<f64> =
            (0..per_axis).map(|i| -b + 2.0 * b * i as f64 / (per_axis - 1) as f64).collect();
        match dim {
            1 => {
                for &x in &axis {
                    out.push(vec![x]);
                }
            }
            2 => {
                for &x in &axis {
                    for &y in &axis {
                        out.push(vec![x, y]);
                    }
                }
            }
            _ => {
                for &x in &axis {
                    for &y in &axis {
                        for &z in &axis {
                            out.push(vec![x, y, z]);
                        }
                    }
                }
            }
        }
        // fine-scale points near the origin (first axis)
        for k in 1..=12 {
            let mut p = vec![0.0; dim];
            p[0] = 10f64.powi(-k);
            out.push(p.clone());
            p[0] = -p[0];
            out.push(p);
        }
        out
    }

    fn h_radii(&self) -> Vec<f64> {
        let total = self.h_decades * self.h_per_decade;
        (0..=total)
            .map(|i| 10f64.powf(-(self.h_decades as f64) + i as f64 / self.h_per_decade as f64))
            .collect()
    }
}

/// One assumption check: pass flag, worst witness, fitted constant.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub id: String,
    pub pass: bool,
    pub witness: Option<Vec<f64>>,
    pub constant: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub dim: usize,
    pub checks: Vec<AssumptionCheck>,
    pub all_pass: bool,
}

impl AssumptionReport {
    pub fn check(&self, id: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Validate the standing assumptions numerically on the sampling plan.
/// Deterministic for a fixed plan seed. Non-finite function values reject the
/// model with the offending point.
pub fn validate_assumptions(
    model: &VariableOrderModel,
    plan: &SamplingPlan,
) -> Result<AssumptionReport> {
    model.validate_shape()?;
    let xs = plan.x_grid(model.dim);
    let hs = plan.h_radii();
    if xs.is_empty() || hs.is_empty() {
        return Err(Error::domain("sampling plan produced an empty grid"));
    }
    let mut checks = Vec::new();

    // ---- 2.1(a): c_lower <= n(x, h) <= c_upper ----
    {
        let mut min_n = f64::INFINITY;
        let mut max_n = f64::NEG_INFINITY;
        let mut witness = None;
        for x in &xs {
            for &h in &hs {
                let v = model.n_at(x, h);
                if !v.is_finite() {
                    return Err(Error::NonFinite { context: "n(x, h)", point: x.clone() });
                }
                if v < min_n {
                    min_n = v;
                    witness = Some(push_h(x, h));
                }
                if v > max_n {
                    max_n = v;
                }
            }
        }
        let pass = min_n >= model.bounds.c_lower - 1e-12 && max_n <= model.bounds.c_upper + 1e-12;
        checks.push(AssumptionCheck {
            id: "2.1a".into(),
            pass,
            witness,
            constant: Some(max_n),
            detail: format!("observed n range [{min_n:.6}, {max_n:.6}]"),
        });
    }

    // ---- 2.2(a): |n(x,h) - xi(x)| <= c (1 ∧ |h|^eps) ----
    {
        let eps = model.holder_eps;
        // sup of the ratio per h-decade; the decay claim fails when the
        // finest decade blows up relative to the rest
        let mut decade_sup: Vec<f64> = vec![0.0; plan.h_decades];
        let mut sup_all = 0.0f64;
        let mut witness = None;
        for x in &xs {
            let xi = model.xi_at(x);
            if !xi.is_finite() {
                return Err(Error::NonFinite { context: "xi(x)", point: x.clone() });
            }
            for &h in &hs {
                let envelope = h.powf(eps).min(1.0);
                let ratio = (model.n_at(x, h) - xi).abs() / envelope;
                // bucket j holds h in [10^{-(j+1)}, 10^{-j})
                let dec = ((-h.log10() - 1e-12).floor().max(0.0) as usize)
                    .min(plan.h_decades - 1);
                decade_sup[dec] = decade_sup[dec].max(ratio);
                if ratio > sup_all {
                    sup_all = ratio;
                    witness = Some(push_h(x, h));
                }
            }
        }
        let finest = decade_sup[plan.h_decades - 1];
        let rest = decade_sup[..plan.h_decades - 1].iter().cloned().fold(0.0f64, f64::max);
        let pass = finest <= 2.0 * rest + 1e-12;
        checks.push(AssumptionCheck {
            id: "2.2a".into(),
            pass,
            witness,
            constant: Some(sup_all),
            detail: format!(
                "sup |n - xi| / (1 ∧ |h|^{eps}): finest decade {finest:.4}, elsewhere {rest:.4}"
            ),
        });
    }

    // ---- 2.2(b): 0 < alpha_low <= alpha(x) <= alpha_high < 2 ----
    {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut witness = None;
        for x in &xs {
            let a = model.alpha.eval(x);
            if !a.is_finite() {
                return Err(Error::NonFinite { context: "alpha(x)", point: x.clone() });
            }
            if a < lo {
                lo = a;
                witness = Some(x.clone());
            }
            if a > hi {
                hi = a;
            }
        }
        let b = &model.bounds;
        let pass = lo > 0.0
            && hi < 2.0
            && lo >= b.alpha_low - 1e-9
            && hi <= b.alpha_high + 1e-9;
        checks.push(AssumptionCheck {
            id: "2.2b".into(),
            pass,
            witness,
            constant: Some(hi),
            detail: format!("observed alpha range [{lo:.6}, {hi:.6}]"),
        });
    }

    // ---- moduli for 2.2(c), 2.2(d), Dini ----
    let radii = dyadic_radii(24);
    let beta = estimate_modulus(
        &model.alpha,
        ModulusKind::Beta,
        model.dim,
        &radii,
        plan.modulus_probes,
        plan.box_half_width,
        plan.seed,
    )?;
    let psi = estimate_modulus(
        &model.xi,
        ModulusKind::Psi,
        model.dim,
        &radii,
        plan.modulus_probes,
        plan.box_half_width,
        plan.seed.wrapping_add(1),
    )?;

    {
        let rep = check_log_modulus(&beta)?;
        checks.push(AssumptionCheck {
            id: "2.2c".into(),
            pass: rep.pass,
            witness: None,
            constant: Some(rep.final_value),
            detail: format!("beta(z)|ln z| at finest radius: {:.4}", rep.final_value),
        });
    }
    {
        let rep = check_dini_and_gamma(&psi, &beta, model.gamma_exp)?;
        checks.push(AssumptionCheck {
            id: "2.2d".into(),
            pass: !rep.gamma_diverges,
            witness: None,
            constant: Some(rep.gamma_value),
            detail: format!(
                "∫ beta(z)/z^(1+gamma) ≈ {:.4} (gamma = {})",
                rep.gamma_value, rep.gamma_exp
            ),
        });
        checks.push(AssumptionCheck {
            id: "dini".into(),
            pass: !rep.dini_diverges,
            witness: None,
            constant: Some(rep.dini_value),
            detail: format!("∫ psi(z)/z ≈ {:.4}", rep.dini_value),
        });
    }

    // ---- 2.3: 0 < xi(x) <= zeta ----
    {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut witness = None;
        for x in &xs {
            let v = model.xi_at(x);
            if v > hi {
                hi = v;
                witness = Some(x.clone());
            }
            lo = lo.min(v);
        }
        let pass = lo > 0.0 && hi <= model.bounds.zeta + 1e-12;
        checks.push(AssumptionCheck {
            id: "2.3".into(),
            pass,
            witness,
            constant: Some(hi),
            detail: format!("observed xi range [{lo:.6}, {hi:.6}], zeta = {}", model.bounds.zeta),
        });
    }

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(AssumptionReport { dim: model.dim, checks, all_pass })
}

fn push_h(x: &[f64], h: f64) -> Vec<f64> {
    let mut w = x.to_vec();
    w.push(h);
    w
}
