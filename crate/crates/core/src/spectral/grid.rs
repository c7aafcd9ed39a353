use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic lattice `[0, L)ⁿ` with `m` points per axis, row-major with axis 0
/// slowest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, box_length: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 4, got {points}"
            )));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Grid {
            dim,
            points,
            box_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.points as f64
    }

    /// Spacing of the dual lattice, `2π/L`.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Total number of lattice points, `mⁿ`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `dxⁿ`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// `Lⁿ`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Signed lattice index of FFT slot `j` along one axis: `j` below `m/2`,
    /// `j − m` from `m/2` on.
    pub fn signed_index(&self, j: usize) -> i64 {
        let m = self.points as i64;
        let j = j as i64;
        if j < m / 2 {
            j
        } else {
            j - m
        }
    }

    /// FFT slot holding signed lattice index `i`.
    pub fn slot(&self, i: i64) -> usize {
        i.rem_euclid(self.points as i64) as usize
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.freq_spacing() * self.signed_index(j) as f64
    }

    /// Per-axis slots of a flat index.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dim);
        for a in (0..self.dim).rev() {
            out[a] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.points + j)
    }

    /// Frequency vector at a flat index (natural FFT order).
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim];
        self.unflatten(flat, &mut idx);
        idx.iter().map(|&j| self.wavenumber(j)).collect()
    }

    /// Position vector at a flat index.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim];
        self.unflatten(flat, &mut idx);
        idx.iter().map(|&j| j as f64 * self.dx()).collect()
    }

    /// All frequency vectors, flattened as `len() × dim`.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * self.dim);
        let mut idx = vec![0; self.dim];
        for flat in 0..self.len() {
            self.unflatten(flat, &mut idx);
            out.extend(idx.iter().map(|&j| self.wavenumber(j)));
        }
        out
    }

    /// `|ξ|` at every lattice point.
    pub fn frequency_norms(&self) -> Vec<f64> {
        self.frequencies()
            .chunks_exact(self.dim)
            .map(|xi| xi.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// Largest `|ξ|` on the lattice (corner of the Nyquist cube).
    pub fn max_frequency(&self) -> f64 {
        self.freq_spacing() * (self.points / 2) as f64 * (self.dim as f64).sqrt()
    }
}
