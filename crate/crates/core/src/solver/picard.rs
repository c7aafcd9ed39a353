use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SolveConfig;
use super::duhamel::{duhamel_integral, origin_frame, TimeRule};
use super::nonlinearity::{apply_nonlinearity, NonlinearitySpec};
use crate::error::{Error, Result};
use crate::lp::{build_cone_atlas, default_cone_margin};
use crate::norms::f_sigma_norm;
use crate::spectral::{forward_in_place, homogeneous_sobolev_norm, inverse_in_place, Field, Grid, Trajectory};

/// Consecutive non-contracting steps that count as divergence.
pub const DIVERGENCE_RUN: usize = 3;

/// `ψ(t_i)` on the frame lattice.
pub fn cutoff_weights(config: &SolveConfig) -> Vec<f64> {
    (0..config.time.frames)
        .map(|i| config.time.cutoff.eval(config.t0() + i as f64 * config.dt()))
        .collect()
}

/// `e^{itD^{2s}}u₀` on the configured frames; the `t = 0` frame is `u₀` itself.
pub fn free_evolution(u0: &Field, config: &SolveConfig) -> Result<Trajectory> {
    let grid = config.grid()?;
    check_field(u0, &grid)?;
    let s = config.equation.s;
    let npts = grid.len();
    let mut spectrum = u0.values().to_vec();
    forward_in_place(&mut spectrum, &grid);
    let omega: Vec<f64> = grid.frequency_norms().iter().map(|r| r.powf(2.0 * s)).collect();
    let (t0, dt) = (config.t0(), config.dt());
    let mut values = vec![Complex64::new(0.0, 0.0); config.time.frames * npts];
    values.par_chunks_mut(npts).enumerate().for_each(|(i, row)| {
        let t = t0 + i as f64 * dt;
        for ((v, c), w) in row.iter_mut().zip(&spectrum).zip(&omega) {
            *v = c * Complex64::from_polar(1.0, t * w);
        }
        inverse_in_place(row, &grid);
    });
    let mut u = Trajectory::from_values(grid, t0, dt, config.time.frames, values)?;
    let origin = origin_frame(&u)?;
    u.frame_mut(origin).copy_from_slice(u0.values());
    Ok(u)
}

fn check_field(u0: &Field, grid: &Grid) -> Result<()> {
    if u0.grid() != grid {
        return Err(Error::ShapeMismatch("initial data is not on the configured grid".into()));
    }
    Ok(())
}

fn check_trajectory(v: &Trajectory, config: &SolveConfig) -> Result<()> {
    let grid = config.grid()?;
    let same_time = v.frame_count() == config.time.frames
        && (v.dt() - config.dt()).abs() <= 1e-12 * config.dt()
        && (v.t0() - config.t0()).abs() <= 1e-9 * config.dt();
    if v.grid() != &grid || !same_time {
        return Err(Error::ShapeMismatch("trajectory does not match the configured grid and window".into()));
    }
    Ok(())
}

/// `F(v(t))` frame by frame.
pub fn nonlinearity_frames(v: &Trajectory, spec: &NonlinearitySpec, s: f64) -> Result<Trajectory> {
    let grid = *v.grid();
    let rows: Vec<Field> = (0..v.frame_count())
        .into_par_iter()
        .map(|i| apply_nonlinearity(&v.frame_field(i), spec, s))
        .collect::<Result<_>>()?;
    Trajectory::new(grid, v.t0(), v.dt(), rows)
}

/// `Tv(t) = e^{itD^{2s}}u₀ − ψ(t)·i∫₀ᵗ e^{i(t−t′)D^{2s}}F(v)(t′)dt′`.
pub fn duhamel_map(v: &Trajectory, u0: &Field, spec: &NonlinearitySpec, config: &SolveConfig) -> Result<Trajectory> {
    check_trajectory(v, config)?;
    let free = free_evolution(u0, config)?;
    if spec.is_empty() {
        return Ok(free);
    }
    let s = config.equation.s;
    let forcing = nonlinearity_frames(v, spec, s)?;
    let integral = duhamel_integral(&forcing, s, config.time.rule)?;
    let psi = cutoff_weights(config);
    let npts = free.grid().len();
    let origin = origin_frame(&free)?;
    let mut values = free.values().to_vec();
    values
        .par_chunks_mut(npts)
        .zip(integral.values().par_chunks(npts))
        .enumerate()
        .filter(|(i, _)| *i != origin)
        .for_each(|(i, (row, d))| row.iter_mut().zip(d).for_each(|(a, b)| *a += psi[i] * b));
    Ok(free.with_values(values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

/// One Picard step `u^{m} = T u^{m−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `‖u^m − u^{m−1}‖_{L^∞L²}`.
    #[serde(with = "crate::report::extended")]
    pub linf_l2: f64,
    /// `F^{(n−2s)/2}` of the same difference, when tracked.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::report::extended::option")]
    pub f_sigma: Option<f64>,
    /// Ratio to the previous difference.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::report::extended::option")]
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub dim: usize,
    pub points: usize,
    pub s: f64,
    pub frames: usize,
    pub dt: f64,
    pub tolerance: f64,
    pub rule: TimeRule,
    pub sigma: f64,
    #[serde(with = "crate::report::extended")]
    pub data_l2: f64,
    #[serde(with = "crate::report::extended")]
    pub data_sobolev: f64,
    pub iterations: Vec<IterationRecord>,
    /// `‖u − Tu‖_{L^∞L²(|t|<1)}/‖u₀‖_{L²}`.
    #[serde(with = "crate::report::extended")]
    pub residual: f64,
    /// `sup_t ‖u(t)‖_{Ḣ^σ}/‖u₀‖_{Ḣ^σ}`, `σ = (n−2s)/2`.
    #[serde(with = "crate::report::extended")]
    pub apriori_ratio: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.iterations.iter().filter_map(|r| r.ratio).collect()
    }

    /// Last contraction ratio, if at least two steps ran.
    pub fn tail_ratio(&self) -> Option<f64> {
        self.ratios().last().copied()
    }

    /// Correlation of `log‖u^{m} − u^{m−1}‖` with `m` over the nonzero
    /// differences; `None` below three points.
    pub fn log_linear_correlation(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .iterations
            .iter()
            .filter(|r| r.linf_l2 > 0.0)
            .map(|r| (r.iteration as f64, r.linf_l2.ln()))
            .collect();
        correlation(&pts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

fn correlation(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub solution: Trajectory,
    pub report: SolveReport,
}

impl SolveResult {
    /// `Err(Divergence)` unless the iteration converged.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.report.converged() {
            return Ok(());
        }
        Err(Error::Divergence {
            iterations: self.report.iterations.len(),
            ratio: self.report.tail_ratio().unwrap_or(f64::NAN),
        })
    }
}

/// Picard iteration seeded with the free evolution.
pub fn picard_solve(u0: &Field, spec: &NonlinearitySpec, config: &SolveConfig) -> Result<SolveResult> {
    config.validate()?;
    spec.validate(config.equation.s)?;
    let grid = config.grid()?;
    check_field(u0, &grid)?;
    let sigma = config.critical_sigma();
    let data_l2 = u0.l2_norm();
    let scale = if data_l2 > 0.0 { data_l2 } else { 1.0 };
    let atlas = if config.picard.track_f_sigma && grid.dim() >= 2 {
        Some(build_cone_atlas(grid.dim(), default_cone_margin(grid.dim()))?)
    } else {
        None
    };
    let mut u = free_evolution(u0, config)?;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut run = 0;
    for iteration in 1..=config.picard.max_iter {
        let next = duhamel_map(&u, u0, spec, config)?;
        let diff = next.sub(&u)?;
        let linf_l2 = diff.linf_l2_norm();
        let f_sigma = match &atlas {
            Some(a) if linf_l2 > 0.0 => Some(f_sigma_norm(&diff, sigma, config.equation.s, a)?),
            Some(_) => Some(0.0),
            None => None,
        };
        let ratio = records.last().map(|r| linf_l2 / r.linf_l2);
        records.push(IterationRecord { iteration, linf_l2, f_sigma, ratio });
        u = next;
        if !linf_l2.is_finite() {
            status = SolveStatus::Diverged;
            break;
        }
        if linf_l2 < config.picard.tolerance * scale {
            status = SolveStatus::Converged;
            break;
        }
        run = if ratio.is_some_and(|r| r >= 1.0) { run + 1 } else { 0 };
        if run >= DIVERGENCE_RUN {
            status = SolveStatus::Diverged;
            break;
        }
    }
    let residual = if u.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        residual_check(&u, u0, spec, config)?
    } else {
        f64::INFINITY
    };
    let data_sobolev = homogeneous_sobolev_norm(u0, sigma);
    let apriori_ratio = if data_sobolev > 0.0 { sup_sobolev(&u, sigma) / data_sobolev } else { 0.0 };
    let mut notes = Vec::new();
    if grid.dim() < 4 {
        notes.push(format!(
            "small-data theory is stated for n >= 4; this run uses n = {} as a desk-scale probe",
            grid.dim()
        ));
    }
    if data_sobolev == 0.0 {
        notes.push("zero data: a-priori ratio set to 0".into());
    }
    let report = SolveReport {
        status,
        dim: grid.dim(),
        points: grid.points(),
        s: config.equation.s,
        frames: config.time.frames,
        dt: config.dt(),
        tolerance: config.picard.tolerance,
        rule: config.time.rule,
        sigma,
        data_l2,
        data_sobolev,
        iterations: records,
        residual,
        apriori_ratio,
        notes,
    };
    Ok(SolveResult { solution: u, report })
}

fn sup_sobolev(u: &Trajectory, sigma: f64) -> f64 {
    (0..u.frame_count())
        .into_par_iter()
        .map(|i| homogeneous_sobolev_norm(&u.frame_field(i), sigma))
        .reduce(|| 0.0, f64::max)
}

/// Time at which the Duhamel identity is required to hold.
pub const RESIDUAL_TIME: f64 = 1.0;

/// `‖u − Tu‖_{L^∞_tL²}` over `|t| < 1`, relative to `‖u₀‖_{L²}`.
pub fn residual_check(u: &Trajectory, u0: &Field, spec: &NonlinearitySpec, config: &SolveConfig) -> Result<f64> {
    let mapped = duhamel_map(u, u0, spec, config)?;
    let defect = u.sub(&mapped)?;
    let npts = u.grid().len();
    let cell = u.grid().cell_volume();
    let worst = (0..u.frame_count())
        .filter(|&i| u.time(i).abs() < RESIDUAL_TIME)
        .map(|i| (defect.values()[i * npts..(i + 1) * npts].iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt())
        .fold(0.0, f64::max);
    let scale = u0.l2_norm();
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Solution difference over data difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceProbe {
    /// `‖u − v‖_{L^∞L²}/‖u₀ − v₀‖_{L²}`.
    pub l2_ratio: f64,
    /// `sup_t ‖u − v‖_{Ḣ^σ}/‖u₀ − v₀‖_{Ḣ^σ}`.
    pub sobolev_ratio: f64,
    /// Data coincide; both ratios are 0 by convention.
    pub identical: bool,
}

pub fn continuous_dependence_probe(
    u0: &Field,
    v0: &Field,
    spec: &NonlinearitySpec,
    config: &SolveConfig,
) -> Result<DependenceProbe> {
    let data = v0.sub(u0)?;
    let sigma = config.critical_sigma();
    let (d_l2, d_sob) = (data.l2_norm(), homogeneous_sobolev_norm(&data, sigma));
    if d_l2 == 0.0 {
        return Ok(DependenceProbe { l2_ratio: 0.0, sobolev_ratio: 0.0, identical: true });
    }
    let u = picard_solve(u0, spec, config)?;
    u.ensure_converged()?;
    let v = picard_solve(v0, spec, config)?;
    v.ensure_converged()?;
    let diff = v.solution.sub(&u.solution)?;
    let sobolev_ratio = if d_sob > 0.0 { sup_sobolev(&diff, sigma) / d_sob } else { 0.0 };
    Ok(DependenceProbe { l2_ratio: diff.linf_l2_norm() / d_l2, sobolev_ratio, identical: false })
}

/// Sensitivity of the converged solution to the time quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCheck {
    /// `‖u_{dt} − u_{dt/2}‖_{L^∞L²}` on the shared frames, trapezoid rule.
    pub halving_change: f64,
    /// `‖u_{trapezoid} − u_{simpson}‖_{L^∞L²}` at the configured `dt`.
    pub simpson_change: f64,
    /// `(dt²/12)·∫|ψ|·‖∂_t²(e^{−itD^{2s}}F(u))‖_{L²}dt`, the trapezoid error model.
    pub estimate: f64,
    /// `log₂` of successive halving changes (2 for a second-order rule).
    pub observed_order: f64,
}

impl QuadratureCheck {
    /// Both changes within `4×` the estimate.
    pub fn passes(&self) -> bool {
        self.halving_change <= 4.0 * self.estimate && self.simpson_change <= 4.0 * self.estimate
    }
}

pub fn quadrature_check(u0: &Field, spec: &NonlinearitySpec, config: &SolveConfig) -> Result<QuadratureCheck> {
    let mut levels = Vec::new();
    for factor in [1, 2, 4] {
        let mut c = config.clone();
        c.time.rule = TimeRule::Trapezoid;
        c.time.frames *= factor;
        let r = picard_solve(u0, spec, &c)?;
        r.ensure_converged()?;
        levels.push((factor, r.solution));
    }
    let coarse_change = |a: &Trajectory, b: &Trajectory, stride: usize| {
        let cell = a.grid().cell_volume();
        (0..a.frame_count())
            .map(|i| {
                let (x, y) = (a.frame(i), b.frame(i * stride));
                (x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>() * cell).sqrt()
            })
            .fold(0.0f64, f64::max)
    };
    let e1 = coarse_change(&levels[0].1, &levels[1].1, 2);
    let e2 = coarse_change(&levels[1].1, &levels[2].1, 2);
    let mut simpson = config.clone();
    simpson.time.rule = TimeRule::Simpson;
    let rs = picard_solve(u0, spec, &simpson)?;
    rs.ensure_converged()?;
    let simpson_change = rs.solution.sub(&levels[0].1)?.linf_l2_norm();
    let estimate = trapezoid_estimate(&levels[0].1, spec, config)?;
    let observed_order = if e1 > 0.0 && e2 > 0.0 { (e1 / e2).log2() } else { f64::NAN };
    Ok(QuadratureCheck { halving_change: e1, simpson_change, estimate, observed_order })
}

fn trapezoid_estimate(u: &Trajectory, spec: &NonlinearitySpec, config: &SolveConfig) -> Result<f64> {
    let s = config.equation.s;
    let grid = *u.grid();
    let npts = grid.len();
    let forcing = nonlinearity_frames(u, spec, s)?;
    let omega: Vec<f64> = grid.frequency_norms().iter().map(|r| r.powf(2.0 * s)).collect();
    let mut g = forcing.values().to_vec();
    g.par_chunks_mut(npts).enumerate().for_each(|(i, row)| {
        forward_in_place(row, &grid);
        let t = u.time(i);
        row.iter_mut().zip(&omega).for_each(|(v, w)| *v *= Complex64::from_polar(1.0, -t * w));
    });
    let dt = u.dt();
    let psi = cutoff_weights(config);
    // Plancherel: ‖f‖²_{L²} = L^{−n}Σ|f̂|².
    let norm = 1.0 / grid.volume();
    let mut integral = 0.0;
    for i in 1..u.frame_count() - 1 {
        let second: f64 = (0..npts)
            .map(|q| (g[(i + 1) * npts + q] - 2.0 * g[i * npts + q] + g[(i - 1) * npts + q]).norm_sqr())
            .sum::<f64>();
        integral += psi[i] * (second * norm).sqrt() / (dt * dt) * dt;
    }
    Ok(dt * dt / 12.0 * integral)
}
