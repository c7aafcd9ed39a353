//! `x₁`-profiles of `sup_{x′,t} |I|` for ball cutoffs, and the large-`|x₁|`
//! regime check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decay::loglog_fit;
use super::dispersive::{dispersive_integral, Cutoff, PhaseIntegralSpec};
use super::table::SweepTable;
use crate::error::{Error, Result};
use crate::report::{RatioItem, RatioReport};

/// θ used for the tail exponent `θ·n/2`.
pub const TAIL_THETA: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupProfileSpec {
    pub k: i32,
    pub l: i32,
    #[serde(default)]
    pub shift: Vec<f64>,
    pub s: f64,
    pub n: usize,
    pub x1_grid: Vec<f64>,
    pub sample_budget: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SupProfileSpec {
    /// Unshifted profile with `k = ℓ` on `{0} ∪` a log grid up to `x_max`.
    pub fn unshifted(l: i32, s: f64, n: usize, x_max: f64, points: usize, sample_budget: usize) -> Self {
        Self {
            k: l,
            l,
            shift: vec![0.0; n],
            s,
            n,
            x1_grid: log_dense_grid(x_max, points),
            sample_budget,
            seed: 0,
        }
    }

    fn radial(&self) -> bool {
        self.shift.iter().all(|&c| c == 0.0)
    }
}

/// `0` followed by `points` log-spaced values in `[x_max/2^{10}, x_max]`.
pub fn log_dense_grid(x_max: f64, points: usize) -> Vec<f64> {
    let lo = x_max / 1024.0;
    let mut grid = vec![0.0];
    grid.extend((0..points).map(|i| lo * (x_max / lo).powf(i as f64 / (points - 1) as f64)));
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupProfile {
    pub x1: Vec<f64>,
    /// Approximate sup (lower bound) at each grid point, combining `±x₁`.
    pub sup: Vec<f64>,
    /// Trapezoid estimate of `∫_ℝ sup_{x′,t} |I| dx₁` over `[−X, X]`.
    pub integral: f64,
    /// `2^{(n−1)ℓ} 2^{k−ℓ}`.
    pub bound: f64,
    pub constant: f64,
    /// Log-log slope over the last decade of the grid.
    pub tail_slope: Option<f64>,
    /// `−θ·n/2`.
    pub tail_threshold: f64,
    /// Grid points where the local refinement ran out of budget.
    pub stagnated: Vec<f64>,
    pub note: String,
}

impl SupProfile {
    pub fn tail_pass(&self) -> bool {
        self.tail_slope.is_some_and(|s| s <= self.tail_threshold)
    }
}

struct Search<'a> {
    base: &'a PhaseIntegralSpec,
    x1: f64,
    radial: bool,
}

impl Search<'_> {
    /// Parameters: `t` then either `|x′|` (radial) or the components of `x′`.
    fn eval(&self, p: &[f64]) -> Result<f64> {
        let t = p[0];
        let spec = if self.radial {
            let r = (self.x1 * self.x1 + p[1] * p[1]).sqrt();
            self.base.at_radius(r, t)
        } else {
            let mut x = vec![self.x1];
            x.extend_from_slice(&p[1..]);
            self.base.at(&x, t)
        };
        Ok(dispersive_integral(&spec)?.norm())
    }
}

fn sup_at(search: &Search, spec: &SupProfileSpec, index: usize) -> Result<(f64, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1)));
    let scale = search.x1.abs() + 2f64.powi(-spec.l);
    // Stationary points need t = |x|/(2s r^{2s−1}); r ≥ 2^ℓ/8 keeps t ≤ t_cap.
    let group = 2.0 * spec.s * (2f64.powi(spec.l) / 8.0).powf(2.0 * spec.s - 1.0);
    let t_cap = scale / group + 4.0;
    let dims = if search.radial { 2 } else { spec.n };
    let mut starts: Vec<(f64, Vec<f64>)> = Vec::with_capacity(spec.sample_budget);
    for i in 0..spec.sample_budget.max(1) {
        let t = if i % 2 == 0 {
            t_cap * rng.random::<f64>()
        } else {
            (1e-2f64.ln() + (t_cap / 1e-2).ln() * rng.random::<f64>()).exp()
        };
        let mut p = vec![t];
        for _ in 1..dims {
            let v = if i % 4 == 0 { 0.0 } else { scale * rng.random_range(-1.0..=1.0) };
            p.push(if search.radial { v.abs() } else { v });
        }
        let value = search.eval(&p)?;
        starts.push((value, p));
    }
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = starts[0].0;
    let mut stagnated = false;
    for (value, point) in starts.into_iter().take(2) {
        let (v, converged) = coordinate_ascent(search, point, value, scale, t_cap)?;
        best = best.max(v);
        stagnated |= !converged;
    }
    Ok((best, stagnated))
}

fn coordinate_ascent(
    search: &Search,
    mut p: Vec<f64>,
    mut value: f64,
    scale: f64,
    t_cap: f64,
) -> Result<(f64, bool)> {
    let mut steps: Vec<f64> = (0..p.len())
        .map(|i| if i == 0 { 0.05 * t_cap } else { 0.05 * scale })
        .collect();
    let floor: Vec<f64> = steps.iter().map(|h| h * 1e-5).collect();
    for _ in 0..60 {
        if steps.iter().zip(&floor).all(|(h, f)| h < f) {
            return Ok((value, true));
        }
        for i in 0..p.len() {
            let mut improved = false;
            for dir in [1.0, -1.0] {
                let mut q = p.clone();
                q[i] += dir * steps[i];
                if (i == 0 || search.radial) && q[i] < 0.0 {
                    continue;
                }
                let v = search.eval(&q)?;
                if v > value {
                    value = v;
                    p = q;
                    improved = true;
                    break;
                }
            }
            if improved {
                steps[i] *= 1.5;
            } else {
                steps[i] *= 0.4;
            }
        }
    }
    Ok((value, false))
}

/// Approximate `x₁ ↦ sup_{x′,t} |∫ e^{i⟨x,ξ⟩} e^{−it|ξ−𝔫|^{2s}} η(ξ/2^ℓ) dξ|`
/// from seeded random starts plus coordinate ascent, and its `x₁`-integral.
pub fn l1_sup_profile(spec: &SupProfileSpec) -> Result<SupProfile> {
    if spec.n < 2 || spec.sample_budget == 0 {
        return Err(Error::InvalidArgument("profile needs n ≥ 2 and a positive budget".into()));
    }
    let grid = &spec.x1_grid;
    if grid.len() < 3 || grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "x₁ grid must start at 0 and increase strictly".into(),
        ));
    }
    let radial = spec.radial();
    let shift = if spec.shift.is_empty() { vec![0.0; spec.n] } else { spec.shift.clone() };
    let base = PhaseIntegralSpec {
        n: spec.n,
        s: spec.s,
        shift,
        cutoff: Cutoff::Ball { l: spec.l },
        x: vec![0.0; spec.n],
        t: 0.0,
    };
    let signs: &[f64] = if radial { &[1.0] } else { &[1.0, -1.0] };
    let jobs: Vec<(usize, f64)> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| signs.iter().map(move |sg| (i, sg * x)))
        .collect();
    let results = jobs
        .par_iter()
        .enumerate()
        .map(|(job, &(_, x1))| {
            let search = Search { base: &base, x1, radial };
            sup_at(&search, spec, job)
        })
        .collect::<Result<Vec<(f64, bool)>>>()?;
    let mut sup = vec![0.0; grid.len()];
    let mut integral = 0.0;
    let mut stagnated = Vec::new();
    for (half, &sign) in signs.iter().enumerate() {
        let values: Vec<f64> = (0..grid.len()).map(|i| results[i * signs.len() + half].0).collect();
        for i in 0..grid.len() {
            sup[i] = f64::max(sup[i], values[i]);
            if results[i * signs.len() + half].1 {
                stagnated.push(sign * grid[i]);
            }
        }
        integral += trapezoid(grid, &values);
    }
    if radial {
        integral *= 2.0;
    }
    let bound = 2f64.powi((spec.n as i32 - 1) * spec.l) * 2f64.powi(spec.k - spec.l);
    let x_max = *grid.last().expect("nonempty");
    let tail: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= x_max / 10.0).collect();
    let tail_slope = if tail.len() >= 3 {
        let xs: Vec<f64> = tail.iter().map(|&i| grid[i]).collect();
        let ys: Vec<f64> = tail.iter().map(|&i| sup[i]).collect();
        loglog_fit(&xs, &ys).ok().map(|f| f.0)
    } else {
        None
    };
    Ok(SupProfile {
        x1: grid.clone(),
        sup,
        integral,
        bound,
        constant: integral / bound,
        tail_slope,
        tail_threshold: -TAIL_THETA * spec.n as f64 / 2.0,
        stagnated,
        note: "approximate sup (lower bound)".into(),
    })
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Samples `|x₁| ≥ C t` (beyond the largest group velocity on the support)
/// and compares `|I|` for the unit ball cutoff with `min{1, (1 + t)|x₁|^{−2}}`.
pub fn far_field_sweep(s: f64, n: usize, samples: usize, seed: u64) -> Result<(RatioReport, SweepTable)> {
    let base = PhaseIntegralSpec::radial(n, s, Cutoff::Ball { l: 0 });
    let edge = crate::lp::ETA_EDGE;
    let speed = 2.0 * 2.0 * s * edge.powf(2.0 * s - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64, f64)> = (0..samples)
        .map(|_| {
            let t = (0.1f64.ln() + (1000.0f64).ln() * rng.random::<f64>()).exp();
            let x1 = (speed * t).max(1.0) * 2f64.powf(4.0 * rng.random::<f64>());
            let perp = x1 * rng.random::<f64>();
            (t, x1, perp)
        })
        .collect();
    let values = draws
        .par_iter()
        .map(|&(t, x1, perp)| {
            let r = (x1 * x1 + perp * perp).sqrt();
            Ok(dispersive_integral(&base.at_radius(r, t))?.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut table = SweepTable::new(&["t", "x1", "x_perp"]);
    let mut item = RatioItem::new("far_field");
    for (&(t, x1, perp), &v) in draws.iter().zip(&values) {
        let bound = f64::min(1.0, (1.0 + t) / (x1 * x1));
        table.push(vec![t, x1, perp], v, bound);
        item.push(v / bound);
    }
    let report = RatioReport {
        lemma: "far_field".into(),
        parameters: serde_json::json!({ "s": s, "n": n, "seed": seed, "speed": speed }),
        samples,
        skipped: 0,
        c_star: item.max,
        items: vec![item],
        stable: None,
        notes: vec![],
    };
    Ok((report, table))
}
