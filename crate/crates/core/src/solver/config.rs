use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::duhamel::TimeRule;
use super::nonlinearity::NonlinearitySpec;
use crate::error::{Error, Result};
use crate::smooth::{Plateau, Transition};
use crate::spectral::{check_order, fslb, homogeneous_sobolev_norm, inverse_in_place, Field, Grid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points: usize,
    pub box_length: f64,
}

/// Frames cover `[−window, window)` with `dt = 2·window/frames`; the frame
/// `frames/2` sits at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub window: f64,
    pub frames: usize,
    #[serde(default)]
    pub rule: TimeRule,
    #[serde(default = "default_cutoff")]
    pub cutoff: Plateau,
}

fn default_cutoff() -> Plateau {
    Plateau {
        inner: 1.0,
        outer: 2.0,
        transition: Transition::Exponential,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSection {
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSection {
    pub max_iter: usize,
    /// Stop once `‖u^{m+1} − u^m‖_{L^∞L²} < tolerance·‖u₀‖_{L²}`.
    pub tolerance: f64,
    /// Record the `F^{(n−2s)/2}` size of every Picard difference (n ≥ 2).
    #[serde(default = "yes")]
    pub track_f_sigma: bool,
}

fn yes() -> bool {
    true
}

/// Initial datum: a seeded Gaussian-spectrum field scaled to `Ḣ^{(n−2s)/2}`
/// size `epsilon`, or a field read from an FSLB file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Standard deviation of the Gaussian spectral envelope.
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_epsilon() -> f64 {
    1e-2
}

fn default_width() -> f64 {
    1.0
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            epsilon: default_epsilon(),
            width: default_width(),
            seed: 0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

/// Everything a solve needs, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub grid: GridSection,
    pub time: TimeSection,
    pub equation: EquationSection,
    /// The model nonlinearity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<NonlinearitySpec>,
    pub picard: PicardSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl SolveConfig {
    /// Small-data setup: `m` points on `[0, 8π)ⁿ`, 64 frames over `[−2, 2)`,
    /// model nonlinearity.
    pub fn small_data(n: usize, m: usize, s: f64) -> Self {
        SolveConfig {
            grid: GridSection { dim: n, points: m, box_length: 8.0 * PI },
            time: TimeSection { window: 2.0, frames: 64, rule: TimeRule::Trapezoid, cutoff: default_cutoff() },
            equation: EquationSection { s },
            nonlinearity: None,
            picard: PicardSection { max_iter: 30, tolerance: 1e-12, track_f_sigma: true },
            data: DataSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SolveConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        if let (Some(p), Some(dir)) = (config.data.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.equation.s).map_err(|e| Error::Config(e.to_string()))?;
        self.grid().map_err(|e| Error::Config(e.to_string()))?;
        let t = &self.time;
        if !(t.window > 0.0 && t.window.is_finite()) {
            return Err(Error::Config(format!("time.window must be positive, got {}", t.window)));
        }
        if t.frames < 4 || !t.frames.is_power_of_two() {
            return Err(Error::Config(format!("time.frames must be a power of two >= 4, got {}", t.frames)));
        }
        if !(t.cutoff.inner > 0.0 && t.cutoff.outer > t.cutoff.inner) {
            return Err(Error::Config("time.cutoff needs 0 < inner < outer".into()));
        }
        if !(self.picard.tolerance > 0.0) {
            return Err(Error::Config(format!("picard.tolerance must be positive, got {}", self.picard.tolerance)));
        }
        if self.picard.max_iter == 0 {
            return Err(Error::Config("picard.max_iter must be at least 1".into()));
        }
        if !(self.data.epsilon >= 0.0 && self.data.width > 0.0) {
            return Err(Error::Config("data needs epsilon >= 0 and width > 0".into()));
        }
        if self.grid.dim == 4 && self.grid.points > 8 {
            return Err(Error::Config("n = 4 solves are supported at points = 8 only".into()));
        }
        if self.grid.dim > 4 {
            return Err(Error::Config(format!("solver dimensions are 1..=4, got {}", self.grid.dim)));
        }
        self.nonlinearity()
            .validate(self.equation.s)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn nonlinearity(&self) -> NonlinearitySpec {
        self.nonlinearity.clone().unwrap_or_else(|| NonlinearitySpec::model(self.equation.s))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.dim, self.grid.points, self.grid.box_length)
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.time.window / self.time.frames as f64
    }

    pub fn t0(&self) -> f64 {
        -self.time.window
    }

    /// Regularity index `(n − 2s)/2` of the critical space.
    pub fn critical_sigma(&self) -> f64 {
        (self.grid.dim as f64 - 2.0 * self.equation.s) / 2.0
    }

    /// Datum from `data.path`, or the Gaussian-spectrum draw.
    pub fn initial_data(&self) -> Result<Field> {
        let grid = self.grid()?;
        if let Some(path) = &self.data.path {
            let f = fslb::read_field(path)?;
            if f.grid() != &grid {
                return Err(Error::Config(format!("{} is not on the configured grid", path.display())));
            }
            return Ok(f);
        }
        Ok(gaussian_data(grid, self.data.width, self.data.seed, self.data.epsilon, self.critical_sigma()))
    }
}

/// `f̂(ξ) ∝ e^{−|ξ|²/(2w²)}·e^{iθ_ξ}` with seeded phases, scaled to
/// `‖f‖_{Ḣ^σ} = size` (lattice seminorm, zero mode excluded).
pub fn gaussian_data(grid: Grid, width: f64, seed: u64, size: f64, sigma: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<Complex64> = grid
        .frequency_norms()
        .into_iter()
        .map(|r| Complex64::from_polar((-r * r / (2.0 * width * width)).exp(), rng.random_range(0.0..2.0 * PI)))
        .collect();
    inverse_in_place(&mut values, &grid);
    let raw = Field::from_raw(grid, values);
    let norm = homogeneous_sobolev_norm(&raw, sigma);
    if size == 0.0 || norm == 0.0 {
        return Field::zeros(grid);
    }
    raw.scale(Complex64::new(size / norm, 0.0))
}
