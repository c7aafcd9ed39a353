//! Bessel reduction, dispersive decay fits, the sup-profile and the shell
//! measure sweep.
//!
//! ```text
//! cargo run --release --example oscillatory
//! ```

use std::time::Instant;

use fslab::oscillatory::{
    fit_dispersive_decay, prefactor_ratio, sigma_sweep, sphere_phase_bessel,
    sphere_phase_integral, Cutoff, LogRange, PhaseIntegralSpec,
};

fn main() -> fslab::Result<()> {
    let clock = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for i in 0..=500 {
            let rho = 0.1 * i as f64;
            let q = sphere_phase_integral(rho, n)?;
            worst = worst.max((q.re - sphere_phase_bessel(rho, n)?).abs().max(q.im.abs()));
        }
    }
    println!("sphere integral vs Bessel form, rho in [0, 50], n = 2..4: max error {worst:.2e}");

    for (n, s) in [(2, 0.75), (3, 0.75), (2, 0.9)] {
        let spec = PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k: 0 });
        let fit = fit_dispersive_decay(&spec, LogRange::new(10.0, 1000.0, 9))?;
        println!(
            "n = {n}, s = {s}: sup_x |I| ~ t^{:.3} (target {:.1}, rms residual {:.1e})",
            fit.slope, fit.target, fit.residual
        );
    }
    let t = 200.0;
    for k in 1..=2 {
        let (n, s) = (2, 0.75);
        let ratio = prefactor_ratio(
            &PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k }),
            &PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k: 0 }),
            t,
        )?;
        let predicted = 2f64.powf(k as f64 * n as f64 * (1.0 - s));
        println!("k = {k}: prefactor ratio {ratio:.3}, predicted {predicted:.3}");
    }

    for s in [0.6, 0.75, 0.9] {
        let (report, _) = sigma_sweep(s, 8, 4, 5)?;
        println!("shell measure, s = {s}: C* = {:.3} over {} draws", report.c_star, report.samples);
    }
    println!("elapsed {:.1} s", clock.elapsed().as_secs_f64());
    Ok(())
}
