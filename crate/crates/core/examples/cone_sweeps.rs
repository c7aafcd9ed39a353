//! Ratio sweeps for the cone multiplier `N_e`, the weight `K` and the
//! factorization error of the Schrödinger symbol along a cone direction.
//!
//! Run with `cargo run --release --example cone_sweeps`.

use fslab::cone::{
    factorization_sweep, s1_factorization_check, sample_admissible, verify_n_properties,
    ConeParams, MainCutoffs,
};

fn main() -> fslab::Result<()> {
    println!("N_e properties, 10^4 admissible draws, n = 3");
    for s in [0.6, 0.75, 0.9] {
        for k in [4, 5, 8, 9] {
            let report = verify_n_properties(&ConeParams::new(k, s, 3), 10_000, 7)?;
            let ranges: Vec<String> = report
                .items
                .iter()
                .map(|i| format!("{} [{:.4}, {:.4}]", i.name, i.min, i.max))
                .collect();
            println!("  s={s} k={k}  C*={:.6}  {}", report.c_star, ranges.join("  "));
        }
    }

    let params = ConeParams::new(6, 1.0, 3);
    let worst = sample_admissible(&params, 1000, 3)?
        .iter()
        .map(|p| {
            let scale = 1.0 + p.tau.abs() + p.xi_norm().powi(2);
            s1_factorization_check(&p.xi, p.tau, &p.e).map(|r| r / scale)
        })
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
    println!("s = 1 factorization, worst scaled residual over 10^3 points: {worst:.2e}");

    println!("factorization error |E| / (2^-2sk + (1+|a|)^-2), 10^4 draws, n = 2");
    for cutoffs in [MainCutoffs::Source, MainCutoffs::Characteristic] {
        for k in [4, 6, 8] {
            let mut params = ConeParams::new(k, 0.75, 2);
            params.main_cutoffs = cutoffs;
            let report = factorization_sweep(&params, 10_000, 11)?;
            println!("  {cutoffs:?} k={k}  C*={:.4}  ({})", report.c_star, report.notes.join("; "));
        }
    }
    Ok(())
}
