use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Complex lattice function at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("field has non-finite entries".into()));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Field { grid, values }
    }

    /// Builds a field whose values already lie in frequency space.
    pub fn from_frequency_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.frequency(i))).collect();
        Field { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `(Σ|f|² dxⁿ)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Grid L² norm for a field holding frequency-space values: `(L^{−n} Σ|F|²)^{1/2}`.
    pub fn spectral_l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.grid.volume()).sqrt()
    }

    pub fn conj(&self) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        check_grid(&self.grid, &other.grid)?;
        Ok(Field::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest entrywise magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!(
            "grids differ: {a:?} vs {b:?}"
        )));
    }
    Ok(())
}

/// Uniformly sampled sequence of fields `t_i = t0 + i·dt`, stored frame-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    t0: f64,
    dt: f64,
    frames: usize,
    values: Vec<Complex64>,
}

impl Trajectory {
    pub fn new(grid: Grid, t0: f64, dt: f64, frames: Vec<Field>) -> Result<Self> {
        let count = frames.len();
        validate_time(dt, count)?;
        let mut values = Vec::with_capacity(count * grid.len());
        for f in &frames {
            check_grid(&grid, f.grid())?;
            values.extend_from_slice(f.values());
        }
        Ok(Trajectory {
            grid,
            t0,
            dt,
            frames: count,
            values,
        })
    }

    pub fn from_values(
        grid: Grid,
        t0: f64,
        dt: f64,
        frames: usize,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        validate_time(dt, frames)?;
        if values.len() != frames * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "trajectory has {} values, expected {} frames x {} points",
                values.len(),
                frames,
                grid.len()
            )));
        }
        Ok(Trajectory {
            grid,
            t0,
            dt,
            frames,
            values,
        })
    }

    pub fn zeros(grid: Grid, t0: f64, dt: f64, frames: usize) -> Result<Self> {
        Self::from_values(
            grid,
            t0,
            dt,
            frames,
            vec![Complex64::new(0.0, 0.0); frames * grid.len()],
        )
    }

    /// Samples `f(x, t)` on the lattice.
    pub fn from_fn(
        grid: Grid,
        t0: f64,
        dt: f64,
        frames: usize,
        f: impl Fn(&[f64], f64) -> Complex64,
    ) -> Result<Self> {
        validate_time(dt, frames)?;
        let positions: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.position(i)).collect();
        let mut values = Vec::with_capacity(frames * grid.len());
        for i in 0..frames {
            let t = t0 + i as f64 * dt;
            values.extend(positions.iter().map(|x| f(x, t)));
        }
        Ok(Trajectory {
            grid,
            t0,
            dt,
            frames,
            values,
        })
    }

    pub(crate) fn from_raw(grid: Grid, t0: f64, dt: f64, frames: usize, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), frames * grid.len());
        Trajectory {
            grid,
            t0,
            dt,
            frames,
            values,
        }
    }

    /// Same time lattice and grid, new values.
    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self::from_raw(self.grid, self.t0, self.dt, self.frames, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Length of the analysis window, `T·dt`.
    pub fn duration(&self) -> f64 {
        self.frames as f64 * self.dt
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn frame(&self, i: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn frame_mut(&mut self, i: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.values[i * n..(i + 1) * n]
    }

    pub fn frame_field(&self, i: usize) -> Field {
        Field::from_raw(self.grid, self.frame(i).to_vec())
    }

    pub fn frames(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks_exact(self.grid.len())
    }

    /// Space-time L², `(Σ|u|² dxⁿ dt)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume() * self.dt)
            .sqrt()
    }

    /// `sup_t ‖u(t)‖_{L²_x}`.
    pub fn linf_l2_norm(&self) -> f64 {
        let vol = self.grid.cell_volume();
        self.frames()
            .map(|f| (f.iter().map(|v| v.norm_sqr()).sum::<f64>() * vol).sqrt())
            .fold(0.0, f64::max)
    }

    /// `sup_t ‖u(t)‖_{L²_x}` restricted to frames with `|t| < t_max`.
    pub fn linf_l2_norm_within(&self, t_max: f64) -> f64 {
        let vol = self.grid.cell_volume();
        self.frames()
            .enumerate()
            .filter(|(i, _)| self.time(*i).abs() < t_max)
            .map(|(_, f)| (f.iter().map(|v| v.norm_sqr()).sum::<f64>() * vol).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Trajectory {
        self.with_values(self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn scale(&self, c: Complex64) -> Trajectory {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &Trajectory) -> Result<Trajectory> {
        self.check_compatible(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.check_compatible(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        check_grid(&self.grid, &other.grid)?;
        if self.frames != other.frames || self.dt != other.dt || self.t0 != other.t0 {
            return Err(Error::ShapeMismatch(format!(
                "time lattices differ: ({}, {}, {}) vs ({}, {}, {})",
                self.t0, self.dt, self.frames, other.t0, other.dt, other.frames
            )));
        }
        Ok(())
    }
}

fn validate_time(dt: f64, frames: usize) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if frames == 0 || !frames.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "frame count must be a power of two, got {frames}"
        )));
    }
    Ok(())
}
