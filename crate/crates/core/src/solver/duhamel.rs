use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_order, forward_in_place, inverse_in_place, Trajectory};

/// Rule for the time integral on the frame lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeRule {
    #[default]
    Trapezoid,
    Simpson,
}

/// Index of the frame at `t = 0`.
pub fn origin_frame(u: &Trajectory) -> Result<usize> {
    let i = (-u.t0() / u.dt()).round();
    if i < 0.0 || i >= u.frame_count() as f64 || (u.t0() + i * u.dt()).abs() > 1e-9 * u.dt() {
        return Err(Error::InvalidArgument(format!(
            "no frame at t = 0 (t0 = {}, dt = {})",
            u.t0(),
            u.dt()
        )));
    }
    Ok(i as usize)
}

/// `−i∫₀ᵗ e^{i(t−t′)D^{2s}} F(t′) dt′` at every frame, integrated in the
/// interaction picture from the `t = 0` frame outward in both directions.
pub fn duhamel_integral(f: &Trajectory, s: f64, rule: TimeRule) -> Result<Trajectory> {
    check_order(s)?;
    let grid = *f.grid();
    let npts = grid.len();
    let frames = f.frame_count();
    let origin = origin_frame(f)?;
    let omega: Vec<f64> = grid.frequency_norms().iter().map(|r| r.powf(2.0 * s)).collect();
    let mut g = f.values().to_vec();
    g.par_chunks_mut(npts).enumerate().for_each(|(i, row)| {
        forward_in_place(row, &grid);
        let t = f.time(i);
        row.iter_mut().zip(&omega).for_each(|(v, w)| *v *= Complex64::from_polar(1.0, -t * w));
    });
    let mut acc = vec![Complex64::new(0.0, 0.0); frames * npts];
    let forward: Vec<usize> = (origin..frames).collect();
    let backward: Vec<usize> = (0..=origin).rev().collect();
    for (path, h) in [(forward, f.dt()), (backward, -f.dt())] {
        cumulative(&g, &mut acc, &path, h, npts, rule);
    }
    acc.par_chunks_mut(npts).enumerate().for_each(|(i, row)| {
        let t = f.time(i);
        row.iter_mut()
            .zip(&omega)
            .for_each(|(v, w)| *v *= Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, t * w));
        inverse_in_place(row, &grid);
    });
    Ok(f.with_values(acc))
}

fn cumulative(g: &[Complex64], acc: &mut [Complex64], path: &[usize], h: f64, npts: usize, rule: TimeRule) {
    let row = |i: usize| &g[path[i] * npts..(path[i] + 1) * npts];
    for m in 1..path.len() {
        let (prev, weights): (usize, Vec<(usize, f64)>) = match rule {
            TimeRule::Trapezoid => (m - 1, vec![(m - 1, h / 2.0), (m, h / 2.0)]),
            TimeRule::Simpson if m % 2 == 0 => {
                (m - 2, vec![(m - 2, h / 3.0), (m - 1, 4.0 * h / 3.0), (m, h / 3.0)])
            }
            TimeRule::Simpson if m == 1 && path.len() >= 3 => {
                (0, vec![(0, 5.0 * h / 12.0), (1, 8.0 * h / 12.0), (2, -h / 12.0)])
            }
            TimeRule::Simpson if m == 1 => (0, vec![(0, h / 2.0), (1, h / 2.0)]),
            TimeRule::Simpson => (
                m - 1,
                vec![(m - 2, -h / 12.0), (m - 1, 8.0 * h / 12.0), (m, 5.0 * h / 12.0)],
            ),
        };
        let base = path[prev] * npts;
        let target = path[m] * npts;
        let mut next: Vec<Complex64> = acc[base..base + npts].to_vec();
        for (idx, w) in weights {
            next.iter_mut().zip(row(idx)).for_each(|(a, v)| *a += v * w);
        }
        acc[target..target + npts].copy_from_slice(&next);
    }
}
