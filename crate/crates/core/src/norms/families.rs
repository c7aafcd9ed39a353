use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{BumpPair, ConeAtlas, ETA_EDGE};
use crate::spectral::{check_order, inverse_in_place, Field, Grid, Trajectory};

/// Random inputs for the ratio checks; every draw has Gaussian coefficients
/// `c_ξ` weighted by `φ(|ξ|/2^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputFamily {
    /// `Σ c_ξ e^{i(ξ·x + λ_ξ t)}` with `λ_ξ` uniform in `[−Ω, Ω]`,
    /// `Ω = (1.95·2^k)^{2s}`.
    Shell,
    /// `Σ c_ξ e^{i(ξ·x + |ξ|^{2s} t)}`.
    Free,
    /// Free waves shifted off the characteristic by `μ_ξ` in the plateau of
    /// modulation shell `j`.
    Modulated { j: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    pub points: usize,
    pub box_length: f64,
    pub frames: usize,
    pub dt: f64,
    pub k: i32,
    pub family: InputFamily,
    /// Atlas direction used to cone-localize every draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<usize>,
    pub draws: usize,
    pub seed: u64,
}

impl FamilySpec {
    /// Grid with the shell `k` reaching just below the lattice Nyquist
    /// frequency, 64 frames centred on `t = 0`, and `dt` small enough that
    /// every temporal frequency stays below `π/dt`.
    pub fn standard(n: usize, k: i32, s: f64, family: InputFamily) -> Self {
        let points = if n <= 2 { 32 } else { 16 };
        Self::with_layout(n, points, k, s, family, 1.0)
    }

    /// As [`standard`](Self::standard) with the shell scaled down by
    /// `headroom` relative to the lattice, leaving room for products.
    pub fn with_layout(n: usize, points: usize, k: i32, s: f64, family: InputFamily, headroom: f64) -> Self {
        let reach = headroom * ETA_EDGE * 2f64.powi(k);
        let spacing = reach / (points as f64 / 2.0 - 1.0);
        let omega = reach.powf(2.0 * s);
        let extent = match family {
            InputFamily::Modulated { j } => 1.5 * 2f64.powi(j as i32),
            _ => 0.0,
        };
        let dt = f64::min(0.5, std::f64::consts::PI / (1.25 * (omega + extent)));
        FamilySpec {
            n,
            points,
            box_length: 2.0 * std::f64::consts::PI / spacing,
            frames: 64,
            dt,
            k,
            family,
            cone: None,
            draws: 64,
            seed: 0,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.points, self.box_length)
    }

    pub fn t0(&self) -> f64 {
        -((self.frames / 2) as f64) * self.dt
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn check(&self, atlas: Option<&ConeAtlas>) -> Result<()> {
        if self.frames < 2 || !(self.dt > 0.0) {
            return Err(Error::InvalidArgument("family needs ≥ 2 frames and dt > 0".into()));
        }
        if let Some(index) = self.cone {
            match atlas {
                Some(a) if index < a.len() && a.dim == self.n => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "cone index {index} needs a matching atlas"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Shell coefficients of draw `index`, normalized to unit `L²`.
    fn coefficients(&self, rng: &mut ChaCha8Rng, atlas: Option<&ConeAtlas>) -> Result<(Grid, Vec<Complex64>)> {
        let grid = self.grid()?;
        let bumps = BumpPair::default();
        let freqs = grid.frequencies();
        let norms = grid.frequency_norms();
        let mut c: Vec<Complex64> = (0..grid.len())
            .map(|p| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let mut w = bumps.dyadic(self.k, norms[p]);
                if let (Some(index), Some(a)) = (self.cone, atlas) {
                    w *= a.weight(index, &freqs[p * self.n..(p + 1) * self.n]);
                }
                Complex64::new(re, im) * w
            })
            .collect();
        let mass: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>() / grid.volume();
        if mass == 0.0 {
            return Err(Error::InvalidArgument(format!("shell k = {} holds no lattice frequency", self.k)));
        }
        let scale = mass.sqrt().recip();
        c.iter_mut().for_each(|v| *v *= scale);
        Ok((grid, c))
    }

    /// Initial data of draw `index` (the `t = 0` trace of the free family).
    pub fn data(&self, index: usize, atlas: Option<&ConeAtlas>) -> Result<Field> {
        self.check(atlas)?;
        let (grid, mut c) = self.coefficients(&mut self.rng(index), atlas)?;
        inverse_in_place(&mut c, &grid);
        Field::new(grid, c)
    }

    /// Space-time draw `index`.
    pub fn draw(&self, index: usize, s: f64, atlas: Option<&ConeAtlas>) -> Result<Trajectory> {
        check_order(s)?;
        self.check(atlas)?;
        let mut rng = self.rng(index);
        let (grid, c) = self.coefficients(&mut rng, atlas)?;
        let omega: Vec<f64> = grid.frequency_norms().iter().map(|r| r.powf(2.0 * s)).collect();
        let rate: Vec<f64> = match self.family {
            InputFamily::Free => omega,
            InputFamily::Shell => {
                let cap = (ETA_EDGE * 2f64.powi(self.k)).powf(2.0 * s);
                omega.iter().map(|_| rng.random_range(-cap..=cap)).collect()
            }
            InputFamily::Modulated { j } => omega
                .iter()
                .map(|w| {
                    let mu = if j == 0 {
                        rng.random_range(-1.4..=1.4)
                    } else {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        sign * 2f64.powi(j as i32) * rng.random_range(1.0..=1.45)
                    };
                    w + mu
                })
                .collect(),
        };
        let t0 = self.t0();
        let npts = grid.len();
        let mut values = Vec::with_capacity(self.frames * npts);
        for i in 0..self.frames {
            let t = t0 + i as f64 * self.dt;
            let mut row: Vec<Complex64> = c
                .iter()
                .zip(&rate)
                .map(|(v, r)| v * Complex64::from_polar(1.0, r * t))
                .collect();
            inverse_in_place(&mut row, &grid);
            values.extend(row);
        }
        Trajectory::from_values(grid, t0, self.dt, self.frames, values)
    }
}
