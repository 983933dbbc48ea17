use ptqao::metric::ProblemParams;
use ptqao::spectral::{self, BasisSpec};
use std::time::Instant;

fn main() {
    let p = ProblemParams::from_integers(1, 1, 1).unwrap();
    let basis = BasisSpec::for_params(&p, 80, 24).unwrap();

    let t0 = Instant::now();
    let report = spectral::spectrum_comparison(&p, &[0.005, 0.01, 0.02, 0.04], 8, &basis).unwrap();
    println!("spectrum ({:?}):\n{}", t0.elapsed(), report.to_csv());

    let t0 = Instant::now();
    let shift = spectral::truncation_shift(&p, 0.04, 8, &basis, 120).unwrap();
    println!("truncation shift 80->120: {shift:.3e}  ({:?})", t0.elapsed());

    let t0 = Instant::now();
    let mut pts = Vec::new();
    for &eps in &[0.01, 0.02, 0.04] {
        let r = spectral::metric_residual_matrix(&p, eps, &basis).unwrap();
        println!("metric residual eps={eps}: {r:.6e}");
        pts.push((eps, r));
    }
    println!("metric slope: {:?}  ({:?})", spectral::fit_log_slope(&pts), t0.elapsed());
}
