//! Small-data Picard solve of the model equation, then the stability probes:
//! data halving, phase rotation, continuous dependence and time quadrature.
//!
//! cargo run --release --example solver

use std::time::Instant;

use fslab::solver::{
    continuous_dependence_probe, gaussian_data, picard_solve, quadrature_check, SolveConfig,
};
use fslab::Complex64;

fn main() -> fslab::Result<()> {
    let config = SolveConfig::small_data(2, 32, 0.75);
    let spec = config.nonlinearity();
    let u0 = config.initial_data()?;

    let start = Instant::now();
    let result = picard_solve(&u0, &spec, &config)?;
    let r = &result.report;
    println!(
        "n = {}, m = {}, s = {}, {} frames, dt = {:.4}: {:?} after {} iterations ({:.1} s)",
        r.dim,
        r.points,
        r.s,
        r.frames,
        r.dt,
        r.status,
        r.iterations.len(),
        start.elapsed().as_secs_f64()
    );
    for it in &r.iterations {
        println!(
            "  step {:2}: |du| = {:.3e}  F = {:.3e}  ratio = {}",
            it.iteration,
            it.linf_l2,
            it.f_sigma.unwrap_or(f64::NAN),
            it.ratio.map_or("-".into(), |q| format!("{q:.3e}"))
        );
    }
    println!("  residual {:.2e}, a-priori ratio {:.6}", r.residual, r.apriori_ratio);

    let sigma = config.critical_sigma();
    let grid = config.grid()?;
    for eps in [2e-2, 1e-2, 5e-3] {
        let data = gaussian_data(grid, config.data.width, config.data.seed, eps, sigma);
        let run = picard_solve(&data, &spec, &config)?;
        println!("  eps = {eps:.0e}: a-priori ratio {:.6}", run.report.apriori_ratio);
    }

    let theta = Complex64::from_polar(1.0, 0.7);
    let rotated = picard_solve(&u0.scale(theta), &spec, &config)?;
    let gap = rotated.solution.sub(&result.solution.scale(theta))?.linf_l2_norm() / u0.l2_norm();
    println!("phase rotation: relative gap {gap:.2e}");

    let g = gaussian_data(grid, 0.5, 7, 1.0, sigma);
    for delta in [1e-4, 1e-5] {
        let v0 = u0.add(&g.scale(Complex64::new(delta * config.data.epsilon, 0.0)))?;
        let p = continuous_dependence_probe(&u0, &v0, &spec, &config)?;
        println!("dependence delta = {delta:.0e}: L2 ratio {:.6}, H ratio {:.6}", p.l2_ratio, p.sobolev_ratio);
    }

    let q = quadrature_check(&u0, &spec, &config)?;
    println!(
        "quadrature: halving {:.2e}, simpson {:.2e}, estimate {:.2e}, order {:.2}, passes {}",
        q.halving_change, q.simpson_change, q.estimate, q.observed_order, q.passes()
    );
    Ok(())
}
