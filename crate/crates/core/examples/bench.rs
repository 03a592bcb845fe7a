use std::time::Instant;

use stablelike::density::DensityEvaluator;
use stablelike::generator::{
    operator_difference, DifferenceKind, QuadratureConfig, TestFunction,
};
use stablelike::model::VariableOrderModel;
use stablelike::resolvent::{MollifiedResolvent, ResolventKernel};

fn main() {
    let t0 = Instant::now();
    let ev = DensityEvaluator::new(1, 1.5).unwrap();
    println!("evaluator: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let profile = ev.build_value_profile(2e3).unwrap();
    println!("value profile: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let rk = ResolventKernel::from_profile(3.0, profile.clone(), 1e-6).unwrap();
    let _v = rk.eval_radial(0.5).unwrap();
    println!("one rk eval: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let spl = rk.build_spline(2e-5, 60.0).unwrap();
    println!("rk spline: {:?} (spot {:.3e})", t0.elapsed(), spl.eval(0.5));

    let t0 = Instant::now();
    let mr = MollifiedResolvent::with_profile(profile.clone(), 10.0, 0.2, 1.0, 1e-6).unwrap();
    println!("mollified resolvent: {:?}", t0.elapsed());

    let model = VariableOrderModel::constant(1, 1.5, 1.0);
    let quad = QuadratureConfig { tol: 1e-7, radial_order: 12, ..QuadratureConfig::default() };
    let t0 = Instant::now();
    let d = operator_difference(
        DifferenceKind::LMinusMx,
        &model,
        &quad,
        &mr,
        &[0.0],
        &[0.3],
        &[-0.3],
    )
    .unwrap();
    println!("op difference: {:?} -> {d:.3e}", t0.elapsed());

    let g = TestFunction::PolyBump {
        center: vec![0.0],
        r_plateau: 0.3,
        r_support: 1.0,
        amplitude: 1.0,
    };
    let t0 = Instant::now();
    let evj = stablelike::perturbation::JTermEvaluator::new(&model, 0.2, &g, &[0.0]).unwrap();
    println!("j-term evaluator: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let (a, b, c) = evj.j_terms(10.0).unwrap();
    println!("j_terms: {:?} -> ({a:.2e}, {b:.2e}, {c:.2e})", t0.elapsed());
}
