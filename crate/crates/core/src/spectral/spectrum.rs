use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{fft_nd, fft_time};
use super::field::Trajectory;
use super::grid::Grid;
use crate::smooth::Transition;

/// Temporal window applied before the space-time transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Window {
    None,
    /// Smooth ramps covering `fraction` of the window, half at each end.
    SmoothTaper { fraction: f64 },
}

impl Default for Window {
    fn default() -> Self {
        Window::SmoothTaper { fraction: 0.1 }
    }
}

impl Window {
    /// Weights for each of `frames` samples.
    pub fn weights(&self, frames: usize) -> Vec<f64> {
        match *self {
            Window::None => vec![1.0; frames],
            Window::SmoothTaper { fraction } => {
                let ramp = (fraction.clamp(0.0, 1.0) * frames as f64 / 2.0).max(f64::MIN_POSITIVE);
                (0..frames)
                    .map(|i| {
                        let left = (i as f64 + 0.5) / ramp;
                        let right = (frames as f64 - i as f64 - 0.5) / ramp;
                        Transition::Exponential.step(left) * Transition::Exponential.step(right)
                    })
                    .collect()
            }
        }
    }
}

/// Discrete transform of a windowed trajectory in all `n + 1` variables.
///
/// Layout is `τ`-major: `values[j·mⁿ + p]` holds frequency `ξ_p` at `τ_j`, both
/// in natural FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeSpectrum {
    grid: Grid,
    t0: f64,
    dt: f64,
    frames: usize,
    window: Window,
    values: Vec<Complex64>,
}

impl SpacetimeSpectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn tau_spacing(&self) -> f64 {
        2.0 * PI / (self.frames as f64 * self.dt)
    }

    /// `τ` at temporal slot `j`.
    pub fn tau(&self, j: usize) -> f64 {
        let t = self.frames as i64;
        let j = j as i64;
        let signed = if j < t / 2 { j } else { j - t };
        self.tau_spacing() * signed as f64
    }

    /// Largest representable `|τ|`, the temporal Nyquist frequency `π/dt`.
    pub fn tau_nyquist(&self) -> f64 {
        PI / self.dt
    }

    /// Space-time L² of the windowed trajectory, via Parseval.
    pub fn l2_norm(&self) -> f64 {
        let c = 1.0 / (self.grid.volume() * self.frames as f64 * self.dt);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * c).sqrt()
    }

    /// Parseval constant `(Lⁿ·T·dt)^{−1}`.
    pub fn parseval_constant(&self) -> f64 {
        1.0 / (self.grid.volume() * self.frames as f64 * self.dt)
    }

    /// Copy with every coefficient multiplied by `m(ξ, |ξ|, τ)`.
    pub fn map_symbol(&self, m: impl Fn(&[f64], f64, f64) -> Complex64) -> SpacetimeSpectrum {
        let mut out = self.clone();
        out.apply_symbol(m);
        out
    }

    pub fn apply_symbol(&mut self, m: impl Fn(&[f64], f64, f64) -> Complex64) {
        let npts = self.grid.len();
        let dim = self.grid.dim();
        let freqs = self.grid.frequencies();
        let norms = self.grid.frequency_norms();
        for j in 0..self.frames {
            let tau = self.tau(j);
            let row = &mut self.values[j * npts..(j + 1) * npts];
            for (p, v) in row.iter_mut().enumerate() {
                *v *= m(&freqs[p * dim..(p + 1) * dim], norms[p], tau);
            }
        }
    }

    /// Same layout, new values.
    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> SpacetimeSpectrum {
        debug_assert_eq!(values.len(), self.values.len());
        SpacetimeSpectrum {
            values,
            ..self.clone()
        }
    }

    pub fn add(&self, other: &SpacetimeSpectrum) -> SpacetimeSpectrum {
        self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &SpacetimeSpectrum) -> SpacetimeSpectrum {
        self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// Space-time DFT with kernel `e^{−iξ·x + iτ(t − t0)}·dxⁿ·dt`.
pub fn spacetime_dft(u: &Trajectory, window: Window) -> SpacetimeSpectrum {
    let grid = *u.grid();
    let npts = grid.len();
    let frames = u.frame_count();
    let weights = window.weights(frames);
    let mut values = u.values().to_vec();
    for (i, w) in weights.iter().enumerate() {
        let row = &mut values[i * npts..(i + 1) * npts];
        row.iter_mut().for_each(|v| *v *= *w);
        fft_nd(row, grid.points(), grid.dim(), true);
    }
    fft_time(&mut values, frames, npts, false);
    let scale = grid.cell_volume() * u.dt();
    values.iter_mut().for_each(|v| *v *= scale);
    SpacetimeSpectrum {
        grid,
        t0: u.t0(),
        dt: u.dt(),
        frames,
        window,
        values,
    }
}

/// Inverse of [`spacetime_dft`]; returns the windowed trajectory.
pub fn spacetime_inverse(spec: &SpacetimeSpectrum) -> Trajectory {
    let grid = spec.grid;
    let npts = grid.len();
    let mut values = spec.values.clone();
    fft_time(&mut values, spec.frames, npts, true);
    for row in values.chunks_exact_mut(npts) {
        fft_nd(row, grid.points(), grid.dim(), false);
    }
    let scale = 1.0 / (grid.volume() * spec.frames as f64 * spec.dt);
    values.iter_mut().for_each(|v| *v *= scale);
    Trajectory::from_raw(grid, spec.t0, spec.dt, spec.frames, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_lattice_wave(grid: Grid, xi0: [f64; 2], tau0: f64, dt: f64, frames: usize) -> Trajectory {
        Trajectory::from_fn(grid, 0.0, dt, frames, |x, t| {
            Complex64::from_polar(1.0, xi0[0] * x[0] + xi0[1] * x[1] - tau0 * t)
        })
        .unwrap()
    }

    #[test]
    fn plane_wave_is_a_single_coefficient() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let frames = 16;
        let dt = 0.25;
        let tau_step = 2.0 * PI / (frames as f64 * dt);
        let u = on_lattice_wave(g, [1.0, -2.0], 3.0 * tau_step, dt, frames);
        let spec = spacetime_dft(&u, Window::None);
        let p = g.flatten(&[g.slot(1), g.slot(-2)]);
        let j = 3;
        let mut big = 0;
        for (idx, v) in spec.values().iter().enumerate() {
            if v.norm() > 1e-9 {
                big += 1;
                assert_eq!(idx, j * g.len() + p);
                assert!((v.norm() - g.volume() * frames as f64 * dt).abs() < 1e-9);
            }
        }
        assert_eq!(big, 1);
        assert!((spec.tau(j) - 3.0 * tau_step).abs() < 1e-12);
    }

    #[test]
    fn static_trajectory_lives_on_tau_zero() {
        let g = Grid::new(1, 16, 5.0).unwrap();
        let u = Trajectory::from_fn(g, -1.0, 0.1, 32, |x, _| Complex64::new(x[0].sin(), x[0].cos()))
            .unwrap();
        let spec = spacetime_dft(&u, Window::None);
        for j in 1..32 {
            let row = &spec.values()[j * 16..(j + 1) * 16];
            assert!(row.iter().all(|v| v.norm() < 1e-10));
        }
    }

    #[test]
    fn inverse_reproduces_tapered_trajectory() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let u = Trajectory::from_fn(g, 0.5, 0.05, 32, |x, t| {
            Complex64::new((x[0] + t).cos(), x[1] * t)
        })
        .unwrap();
        let window = Window::SmoothTaper { fraction: 0.2 };
        let w = window.weights(32);
        let spec = spacetime_dft(&u, window);
        let back = spacetime_inverse(&spec);
        let mut err: f64 = 0.0;
        for i in 0..32 {
            for (a, b) in back.frame(i).iter().zip(u.frame(i)) {
                err = err.max((a - b * w[i]).norm());
            }
        }
        assert!(err < 1e-10, "{err}");
        assert!((spec.l2_norm() - back.l2_norm()).abs() < 1e-10 * back.l2_norm());
    }

    #[test]
    fn taper_profile() {
        let w = Window::default().weights(64);
        assert!(w[0] < 0.05);
        assert!(w[63] < 0.05);
        assert_eq!(w[32], 1.0);
        assert!((w[10] - 1.0).abs() < 1e-15);
        for i in 0..32 {
            assert!((w[i] - w[63 - i]).abs() < 1e-14);
        }
    }
}
