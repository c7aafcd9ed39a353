//! Littlewood–Paley pieces of a random field, box and cone partitions, and
//! the modulation split of a space-time trajectory.
//!
//! cargo run --release --example projections

use std::f64::consts::PI;

use fslab::lp::{
    box_cells, build_cone_atlas, default_cone_margin, dyadic_range, max_modulation_shell, modulation_split, ProjectionSpec,
    Projector,
};
use fslab::spectral::{linear_propagate, Field, Grid, Trajectory, Window};
use fslab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fslab::Result<()> {
    let grid = Grid::new(2, 64, 2.0 * PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let f = Field::new(grid, values)?;
    let p = Projector::default();

    let (lo, hi) = dyadic_range(&grid, &p.bumps);
    let mut sum = Field::zeros(grid);
    println!("dyadic shells {lo}..={hi}");
    for k in lo..=hi {
        let piece = p.project_field(&f, &ProjectionSpec::Dyadic { k })?;
        println!("  k = {k}: |P_k f| / |f| = {:.4}", piece.l2_norm() / f.l2_norm());
        sum = sum.add(&piece)?;
    }
    let mean = f.values().iter().sum::<Complex64>() / grid.len() as f64;
    let centred = f.sub(&Field::from_fn(grid, |_| mean))?;
    println!("  sum vs mean-free part: {:.2e}", sum.sub(&centred)?.l2_norm() / centred.l2_norm());

    for k in [1, 2, 3] {
        let cells = box_cells(&grid, k);
        let mut acc = Field::zeros(grid);
        for cell in &cells {
            acc = acc.add(&p.project_field(&f, &ProjectionSpec::Box { k, cell: cell.clone() })?)?;
        }
        println!("boxes of side 2^{k}: {} cells, reconstruction {:.2e}", cells.len(), acc.sub(&f)?.l2_norm() / f.l2_norm());
    }

    for n in [2, 3] {
        let atlas = build_cone_atlas(n, default_cone_margin(n))?;
        println!("cone atlas n = {n}: {} directions, margin {:.3}", atlas.len(), atlas.margin);
    }

    let s = 0.75;
    let small = Grid::new(2, 16, 2.0 * PI)?;
    let u0 = Field::from_fn(small, |x| Complex64::from_polar(1.0, 2.0 * x[0]) + Complex64::from_polar(0.5, -3.0 * x[1]));
    let dt = 1.0 / 16.0;
    let frames: Vec<Field> = (0..128)
        .map(|i| {
            let t = -4.0 + dt * i as f64;
            linear_propagate(&u0, t, s).scale(Complex64::from_polar(1.0, 6.0 * t))
        })
        .collect();
    let u = Trajectory::new(small, -4.0, dt, frames)?;
    let j_max = max_modulation_shell(dt);
    let split = modulation_split(&u, s, j_max, Window::default(), &p.bumps)?;
    println!("modulation split of a wave shifted by 6 in tau (j_max = {j_max}):");
    for (j, share) in split.energy_fractions() {
        if share > 1e-4 {
            println!("  Q_{j}: {:.4}", share);
        }
    }
    println!("  remainder {:.2e}", split.remainder_fraction);
    Ok(())
}
