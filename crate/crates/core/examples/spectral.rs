//! FFT conventions on the periodic box: DFT roundtrip and Parseval, the
//! fractional multiplier `D^β`, the free propagator, and FSLB storage.
//!
//! cargo run --release --example spectral

use std::f64::consts::PI;

use fslab::spectral::{
    apply_fractional, dft_forward, dft_inverse, fslb, homogeneous_sobolev_norm, linear_propagate, Field, Grid,
    Trajectory, ZeroModePolicy,
};
use fslab::Complex64;

fn main() -> fslab::Result<()> {
    let grid = Grid::new(2, 32, 2.0 * PI)?;
    let f = Field::from_fn(grid, |x| {
        Complex64::new((-(x[0] - PI).powi(2) - (x[1] - PI).powi(2)).exp(), 0.0)
            * Complex64::from_polar(1.0, 3.0 * x[0])
    });
    let spectrum = dft_forward(&f);
    println!("grid {}x{}, dx = {:.4}, max |xi| = {:.2}", grid.points(), grid.points(), grid.dx(), grid.max_frequency());
    println!("  roundtrip error  {:.2e}", dft_inverse(&spectrum).sub(&f)?.l2_norm() / f.l2_norm());
    println!("  Parseval         {:.15} vs {:.15}", f.l2_norm(), spectrum.spectral_l2_norm());

    let wave = Field::from_fn(grid, |x| Complex64::from_polar(1.0, 3.0 * x[0] + 4.0 * x[1]));
    for beta in [-0.5, 0.5, 1.5] {
        let d = apply_fractional(&wave, beta, ZeroModePolicy::ZeroOut)?;
        println!("  D^{beta:+}: plane wave |xi| = 5 scaled by {:.6} (5^beta = {:.6})", d.l2_norm() / wave.l2_norm(), 5f64.powf(beta));
    }

    let s = 0.75;
    let sigma = (2.0 - 2.0 * s) / 2.0;
    for t in [0.5, 4.0, 32.0] {
        let u = linear_propagate(&f, t, s);
        println!(
            "  e^(it D^2s) at t = {t:>4}: mass drift {:.1e}, Hdot^{sigma} drift {:.1e}",
            u.l2_norm() / f.l2_norm() - 1.0,
            homogeneous_sobolev_norm(&u, sigma) / homogeneous_sobolev_norm(&f, sigma) - 1.0
        );
    }

    let frames: Vec<Field> = (0..8).map(|i| linear_propagate(&f, 0.25 * i as f64, s)).collect();
    let u = Trajectory::new(grid, 0.0, 0.25, frames)?;
    let path = std::env::temp_dir().join(format!("fslab-example-{}.fslb", std::process::id()));
    fslb::write_trajectory(&path, &u)?;
    let back = fslb::read_trajectory(&path)?;
    println!(
        "FSLB: {} bytes, {} frames, roundtrip exact: {}",
        std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0),
        back.frame_count(),
        back == u
    );
    let _ = std::fs::remove_file(&path);
    let _ = std::fs::remove_file(fslb::sidecar_path(&path));
    Ok(())
}
