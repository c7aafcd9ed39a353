//! Power-law fits of dispersive decay in `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dispersive::{dispersive_integral, sup_over_x, PhaseIntegralSpec};
use crate::error::{Error, Result};

/// Log-spaced abscissae `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl LogRange {
    pub fn new(start: f64, end: f64, count: usize) -> Self {
        Self { start, end, count }
    }

    pub fn decades(&self) -> f64 {
        (self.end / self.start).log10()
    }

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.start.ln(), self.end.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

/// What is fitted against `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayProbe {
    /// `|I(x, t)|` at the spec's `x`.
    Pointwise,
    /// `sup_x |I(x, t)|`.
    #[default]
    SupOverX,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub probe: DecayProbe,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// `−n/2`.
    pub target: f64,
}

impl DecayFit {
    /// Decay at least as fast as `t^{−n/2}` up to 0.15 in the exponent.
    pub fn pass(&self) -> bool {
        self.slope <= self.target + 0.15
    }

    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two paired points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, intercept, (rss / m).sqrt()))
}

/// Fits `sup_x |I(x, t)|` against `t`.
pub fn fit_dispersive_decay(spec: &PhaseIntegralSpec, t_range: LogRange) -> Result<DecayFit> {
    fit_decay(spec, t_range, DecayProbe::SupOverX)
}

pub fn fit_decay(spec: &PhaseIntegralSpec, t_range: LogRange, probe: DecayProbe) -> Result<DecayFit> {
    if t_range.count < 8 || !(t_range.start > 0.0) || t_range.decades() < 2.0 - 1e-12 {
        return Err(Error::DegenerateFit(format!(
            "t range needs ≥ 8 points over ≥ 2 decades, got {} over {:.2}",
            t_range.count,
            t_range.decades()
        )));
    }
    let ts = t_range.points();
    let values = ts
        .par_iter()
        .map(|&t| match probe {
            DecayProbe::Pointwise => Ok(dispersive_integral(&spec.at(&spec.x, t))?.norm()),
            DecayProbe::SupOverX => Ok(sup_over_x(spec, t)?.1),
        })
        .collect::<Result<Vec<f64>>>()?;
    let (slope, intercept, residual) = loglog_fit(&ts, &values)?;
    Ok(DecayFit {
        probe,
        abscissae: ts,
        values,
        slope,
        intercept,
        residual,
        target: -(spec.n as f64) / 2.0,
    })
}

/// `sup_x |I_k(·, t)| / sup_x |I_ref(·, t)|` for two dyadic annuli.
pub fn prefactor_ratio(spec: &PhaseIntegralSpec, reference: &PhaseIntegralSpec, t: f64) -> Result<f64> {
    let (a, b) = rayon::join(|| sup_over_x(spec, t), || sup_over_x(reference, t));
    Ok(a?.1 / b?.1)
}
