use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{forward_in_place, inverse_in_place};
use rayon::prelude::*;

use super::field::{Field, Trajectory};
use crate::error::{Error, Result};

/// What to do with the `ξ = 0` mode under a negative-order multiplier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModePolicy {
    /// Project onto mean-zero fields before inverting.
    #[default]
    ZeroOut,
    Reject,
}

/// Symbol `|ξ|^β` of `D^β = |∇|^β`.
pub fn fractional_symbol(xi: &[f64], beta: f64) -> Result<f64> {
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    symbol_from_norm(norm, beta)
}

pub(crate) fn symbol_from_norm(norm: f64, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(1.0);
    }
    if norm == 0.0 {
        if beta < 0.0 {
            return Err(Error::ZeroModeNegativeOrder { order: beta });
        }
        return Ok(0.0);
    }
    Ok(norm.powf(beta))
}

/// Applies an arbitrary Fourier multiplier `m(ξ)`.
pub fn apply_multiplier(f: &Field, m: impl Fn(&[f64]) -> Complex64) -> Field {
    let grid = *f.grid();
    let mut v = f.values().to_vec();
    forward_in_place(&mut v, &grid);
    let freqs = grid.frequencies();
    for (val, xi) in v.iter_mut().zip(freqs.chunks_exact(grid.dim())) {
        *val *= m(xi);
    }
    inverse_in_place(&mut v, &grid);
    Field::from_raw(grid, v)
}

/// `D^β f` as the Fourier multiplier `|ξ|^β`.
pub fn apply_fractional(f: &Field, beta: f64, policy: ZeroModePolicy) -> Result<Field> {
    let grid = *f.grid();
    let mut v = f.values().to_vec();
    forward_in_place(&mut v, &grid);
    if beta < 0.0 && policy == ZeroModePolicy::Reject && v[0].norm() > 0.0 {
        return Err(Error::ZeroModeNegativeOrder { order: beta });
    }
    for (val, norm) in v.iter_mut().zip(grid.frequency_norms()) {
        *val *= match symbol_from_norm(norm, beta) {
            Ok(m) => m,
            Err(_) => 0.0,
        };
    }
    inverse_in_place(&mut v, &grid);
    Ok(Field::from_raw(grid, v))
}

/// Free propagator `e^{it(−Δ)^s}`: multiplies every mode by `e^{it|ξ|^{2s}}`.
pub fn linear_propagate(f: &Field, t: f64, s: f64) -> Field {
    let grid = *f.grid();
    let mut v = f.values().to_vec();
    forward_in_place(&mut v, &grid);
    for (val, norm) in v.iter_mut().zip(grid.frequency_norms()) {
        *val *= Complex64::from_polar(1.0, t * norm.powf(2.0 * s));
    }
    inverse_in_place(&mut v, &grid);
    Field::from_raw(grid, v)
}

/// Applies the spatial multiplier `m(ξ)` to every frame of `u`.
pub fn apply_multiplier_frames(u: &Trajectory, m: impl Fn(&[f64]) -> Complex64) -> Trajectory {
    let grid = *u.grid();
    let symbol: Vec<Complex64> = grid.frequencies().chunks_exact(grid.dim()).map(m).collect();
    let mut v = u.values().to_vec();
    v.par_chunks_mut(grid.len()).for_each(|row| {
        forward_in_place(row, &grid);
        row.iter_mut().zip(&symbol).for_each(|(a, b)| *a *= b);
        inverse_in_place(row, &grid);
    });
    u.with_values(v)
}

/// Lattice `Ḣ^σ` seminorm with the zero mode excluded:
/// `(L^{−n} Σ_{ξ≠0} |ξ|^{2σ} |f̂(ξ)|²)^{1/2}`.
pub fn homogeneous_sobolev_norm(f: &Field, sigma: f64) -> f64 {
    let grid = *f.grid();
    let mut v = f.values().to_vec();
    forward_in_place(&mut v, &grid);
    let sum: f64 = v
        .iter()
        .zip(grid.frequency_norms())
        .filter(|(_, n)| *n > 0.0)
        .map(|(c, n)| n.powf(2.0 * sigma) * c.norm_sqr())
        .sum();
    (sum / grid.volume()).sqrt()
}
