use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::axis_of;
use crate::spectral::{fft_axis, SpacetimeSpectrum, Trajectory};

/// Lebesgue exponent in `{1, 2, ∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exponent::One => "1",
            Exponent::Two => "2",
            Exponent::Infinity => "inf",
        })
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Exponent::One),
            "2" => Ok(Exponent::Two),
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            _ => Err(Error::InvalidArgument(format!("exponent must be 1, 2 or inf, got {s}"))),
        }
    }
}

/// `L^p_e L^q_{e⊥, t}`: `p` over the `e`-coordinate, `q` over the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub e: Vec<f64>,
    pub p: Exponent,
    pub q: Exponent,
}

impl MixedNormSpec {
    pub fn along_axis(n: usize, axis: usize, p: Exponent, q: Exponent) -> Self {
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        MixedNormSpec { e, p, q }
    }
}

struct Accumulator {
    exponent: Exponent,
    value: f64,
}

impl Accumulator {
    fn new(exponent: Exponent) -> Self {
        Accumulator { exponent, value: 0.0 }
    }

    fn push(&mut self, x: f64) {
        match self.exponent {
            Exponent::One => self.value += x,
            Exponent::Two => self.value += x * x,
            Exponent::Infinity => self.value = self.value.max(x),
        }
    }

    fn finish(&self, weight: f64) -> f64 {
        match self.exponent {
            Exponent::One => self.value * weight,
            Exponent::Two => (self.value * weight).sqrt(),
            Exponent::Infinity => self.value,
        }
    }
}

/// Discrete `‖u‖_{L^p_e L^q_{e⊥,t}}` for a lattice axis `e`: inner sums carry
/// `dx^{n−1}·dt`, the outer sum carries `dx`.
pub fn mixed_norm(u: &Trajectory, spec: &MixedNormSpec) -> Result<f64> {
    let grid = *u.grid();
    if spec.e.len() != grid.dim() {
        return Err(Error::ShapeMismatch(format!(
            "direction has {} components, grid dimension {}",
            spec.e.len(),
            grid.dim()
        )));
    }
    let (axis, _) = axis_of(&spec.e).ok_or_else(|| {
        Error::InvalidArgument(format!("direction {:?} is not a lattice axis", spec.e))
    })?;
    let m = grid.points();
    let stride = m.pow((grid.dim() - 1 - axis) as u32);
    let coordinate: Vec<usize> = (0..grid.len()).map(|p| (p / stride) % m).collect();
    let mut inner: Vec<Accumulator> = (0..m).map(|_| Accumulator::new(spec.q)).collect();
    for frame in u.frames() {
        for (v, &c) in frame.iter().zip(&coordinate) {
            inner[c].push(v.norm());
        }
    }
    let dx = grid.dx();
    let inner_weight = dx.powi(grid.dim() as i32 - 1) * u.dt();
    let mut outer = Accumulator::new(spec.p);
    for acc in &inner {
        outer.push(acc.finish(inner_weight));
    }
    Ok(outer.finish(dx))
}

/// `‖g‖_{L^p_e L²_{e⊥,t}}` of the trajectory `g` whose space-time spectrum
/// has the layout of `w` and the given `values`. Plancherel in `(x_⊥, t)`
/// leaves only the transform along `axis` to undo.
pub(crate) fn spectral_mixed_norm(mut values: Vec<Complex64>, w: &SpacetimeSpectrum, axis: usize, p: Exponent) -> f64 {
    let grid = w.grid();
    let (m, dim) = (grid.points(), grid.dim());
    fft_axis(&mut values, m, dim, axis, false);
    let stride = m.pow((dim - 1 - axis) as u32);
    let mut inner = vec![0.0; m];
    for row in values.chunks_exact(grid.len()) {
        for (q, v) in row.iter().enumerate() {
            inner[(q / stride) % m] += v.norm_sqr();
        }
    }
    let scale = w.parseval_constant() / grid.box_length();
    let mut outer = Accumulator::new(p);
    for e in inner {
        outer.push((e * scale).sqrt());
    }
    outer.finish(grid.dx())
}
