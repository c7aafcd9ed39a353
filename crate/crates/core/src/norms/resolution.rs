use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mixed::{spectral_mixed_norm, Exponent};
use crate::error::{Error, Result};
use crate::lp::{axis_of, default_cone_margin, dot, dyadic_range, max_modulation_shell, BumpPair, ConeAtlas};
use crate::spectral::{check_order, spacetime_dft, spacetime_inverse, SpacetimeSpectrum, Trajectory, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Xk,
    Yk,
    Zk,
    FSigma,
    NSigma,
}

/// Which candidate decomposition gave the `Z_k` bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZBranch {
    AllX,
    ConeSplit,
}

/// `X_k` and `Y_k^e` of one cone piece `ϑ_e f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePiece {
    pub index: usize,
    #[serde(with = "crate::report::extended")]
    pub x: f64,
    #[serde(with = "crate::report::extended")]
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// `+∞` marks a violated support condition.
    #[serde(with = "crate::report::extended")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<ZBranch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<ConePiece>,
    /// Energy share beyond the top representable modulation shell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl NormReport {
    fn new(kind: NormKind, s: f64, value: f64) -> Self {
        NormReport {
            kind,
            s,
            k: None,
            e: None,
            sigma: None,
            value,
            branch: None,
            pieces: Vec::new(),
            remainder_fraction: None,
            diagnostic: None,
        }
    }

    fn infinite(kind: NormKind, s: f64, diagnostic: String) -> Self {
        NormReport {
            diagnostic: Some(diagnostic),
            ..Self::new(kind, s, f64::INFINITY)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormOptions {
    pub bumps: BumpPair,
    pub window: Window,
    /// Relative L² mass allowed outside the required frequency support.
    pub support_tol: f64,
    /// Cone margin for the `Y_k^e` gate; the dimension default when unset.
    pub cone_margin: Option<f64>,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            bumps: BumpPair::default(),
            window: Window::default(),
            support_tol: 1e-8,
            cone_margin: None,
        }
    }
}

/// Symbol of `i∂_t + D^{2s} + i`: `−(τ + |ξ|^{2s}) + i`.
pub fn schrodinger_symbol(xi_norm: f64, tau: f64, s: f64) -> Complex64 {
    Complex64::new(-(tau + xi_norm.powf(2.0 * s)), 1.0)
}

/// `(i∂_t + D^{2s} + i) u`, periodic in time.
pub fn schrodinger_operator(u: &Trajectory, s: f64) -> Result<Trajectory> {
    check_order(s)?;
    let x = spacetime_dft(u, Window::None).map_symbol(|_, r, tau| schrodinger_symbol(r, tau, s));
    Ok(spacetime_inverse(&x))
}

/// `(i∂_t + D^{2s} + i)^{−1} F`, periodic in time.
pub fn inverse_schrodinger(f: &Trajectory, s: f64) -> Result<Trajectory> {
    check_order(s)?;
    let x = spacetime_dft(f, Window::None).map_symbol(|_, r, tau| 1.0 / schrodinger_symbol(r, tau, s));
    Ok(spacetime_inverse(&x))
}

fn energy(w: &SpacetimeSpectrum) -> f64 {
    w.values().iter().map(|v| v.norm_sqr()).sum()
}

/// `‖·‖` of the part of `w` at spatial frequencies failing `keep`, relative
/// to the whole.
fn leak(w: &SpacetimeSpectrum, keep: impl Fn(&[f64], f64) -> bool) -> f64 {
    let grid = w.grid();
    let freqs = grid.frequencies();
    let norms = grid.frequency_norms();
    let dim = grid.dim();
    let outside: Vec<bool> = (0..grid.len())
        .map(|p| !keep(&freqs[p * dim..(p + 1) * dim], norms[p]))
        .collect();
    let (mut bad, mut total) = (0.0, 0.0);
    for row in w.values().chunks_exact(grid.len()) {
        for (v, &o) in row.iter().zip(&outside) {
            let e = v.norm_sqr();
            total += e;
            if o {
                bad += e;
            }
        }
    }
    if total > 0.0 {
        (bad / total).sqrt()
    } else {
        0.0
    }
}

fn shell_gate(w: &SpacetimeSpectrum, k: i32, opts: &NormOptions) -> Option<String> {
    let leak = leak(w, |_, r| opts.bumps.dyadic(k, r) > 0.0);
    (leak > opts.support_tol)
        .then(|| format!("relative mass {leak:.3e} outside the dyadic shell k = {k}"))
}

fn cone_gate(w: &SpacetimeSpectrum, e: &[f64], margin: f64, opts: &NormOptions) -> Option<String> {
    let leak = leak(w, |xi, r| dot(xi, e) >= margin * r);
    (leak > opts.support_tol)
        .then(|| format!("relative mass {leak:.3e} outside the cone about {e:?} with margin {margin}"))
}

/// Spectrum with every spatial frequency multiplied by `m(ξ, |ξ|)`.
pub(crate) fn spatial_multiply(w: &SpacetimeSpectrum, m: impl Fn(&[f64], f64) -> f64) -> SpacetimeSpectrum {
    let grid = w.grid();
    let dim = grid.dim();
    let freqs = grid.frequencies();
    let symbol: Vec<f64> = grid
        .frequency_norms()
        .iter()
        .enumerate()
        .map(|(p, &r)| m(&freqs[p * dim..(p + 1) * dim], r))
        .collect();
    let mut out = w.clone();
    for row in out.values_mut().chunks_exact_mut(grid.len()) {
        row.iter_mut().zip(&symbol).for_each(|(v, a)| *v *= a);
    }
    out
}

/// Per spatial frequency `p`, the energies `Σ_τ |φ_j(a) W|²` for `j ≤ j_max`
/// and of the remainder `(1 − η(a/2^{j_max})) W`, with `a = τ + |ξ|^{2s}`.
/// `X_k` of any spatial multiple `m(ξ)·W` follows without another pass.
pub(crate) struct ModulationTable {
    j_max: u32,
    /// `j_max + 1` shell rows, then the remainder row.
    rows: Vec<Vec<f64>>,
    /// `Σ_τ |W|²` per spatial frequency.
    mass: Vec<f64>,
    parseval: f64,
}

impl ModulationTable {
    pub(crate) fn new(w: &SpacetimeSpectrum, s: f64, bumps: &BumpPair) -> Self {
        let j_max = max_modulation_shell(w.dt());
        let grid = w.grid();
        let npts = grid.len();
        let omega: Vec<f64> = grid.frequency_norms().iter().map(|r| r.powf(2.0 * s)).collect();
        let mut rows = vec![vec![0.0; npts]; j_max as usize + 2];
        let mut mass = vec![0.0; npts];
        let top = 2f64.powi(-(j_max as i32));
        for (t, row) in w.values().chunks_exact(npts).enumerate() {
            let tau = w.tau(t);
            for (p, (v, &om)) in row.iter().zip(&omega).enumerate() {
                let e = v.norm_sqr();
                if e == 0.0 {
                    continue;
                }
                mass[p] += e;
                let a = tau + om;
                let abs = a.abs();
                let (lo, hi) = if abs < 1.0 {
                    (0, 0)
                } else {
                    let clamp = |x: f64| (x as i64).clamp(0, j_max as i64) as u32;
                    (clamp((abs / 1.95).log2().floor()), clamp((abs / 0.75).log2().ceil()))
                };
                for j in lo..=hi {
                    let m = bumps.modulation(j, a);
                    rows[j as usize][p] += m * m * e;
                }
                let r = 1.0 - bumps.eta(a * top);
                rows[j_max as usize + 1][p] += r * r * e;
            }
        }
        ModulationTable {
            j_max,
            rows,
            mass,
            parseval: w.parseval_constant(),
        }
    }

    /// `‖m(ξ)·g‖²_{L²}` for a spatial symbol with squared values `m2`.
    pub(crate) fn energy(&self, m2: &[f64]) -> f64 {
        self.mass.iter().zip(m2).map(|(e, m)| e * m).sum::<f64>() * self.parseval
    }

    /// `X_k` of the spectrum multiplied by a spatial symbol with squared
    /// values `m2`, and the remainder energy.
    pub(crate) fn x_value(&self, m2: Option<&[f64]>) -> (f64, f64) {
        let energy = |row: &[f64]| -> f64 {
            match m2 {
                Some(m2) => row.iter().zip(m2).map(|(e, m)| e * m).sum::<f64>(),
                None => row.iter().sum::<f64>(),
            }
        };
        let shells: Vec<f64> = self.rows.iter().map(|r| energy(r) * self.parseval).collect();
        let rest = shells[self.j_max as usize + 1];
        let value = shells[..=self.j_max as usize]
            .iter()
            .enumerate()
            .map(|(j, e)| 2f64.powf(j as f64 / 2.0) * e.sqrt())
            .sum::<f64>()
            + 2f64.powf(self.j_max as f64 / 2.0) * rest.sqrt();
        (value, rest)
    }
}

/// `Σ_{j ≤ j_max} 2^{j/2}‖Q_j g‖ + 2^{j_max/2}‖remainder‖` and the remainder
/// energy share.
pub(crate) fn x_value(w: &SpacetimeSpectrum, s: f64, bumps: &BumpPair) -> (f64, f64) {
    let (value, rest) = ModulationTable::new(w, s, bumps).x_value(None);
    let total = energy(w) * w.parseval_constant();
    (value, if total > 0.0 { rest / total } else { 0.0 })
}

/// `2^{−k(2s−1)/2}‖(i∂_t + D^{2s} + i) g‖_{L¹_e L²}` for a lattice axis `e`.
pub(crate) fn y_value(w: &SpacetimeSpectrum, k: i32, e: &[f64], s: f64) -> Result<f64> {
    let lg = w.map_symbol(|_, r, tau| schrodinger_symbol(r, tau, s));
    y_from_image(lg.values().to_vec(), w, k, e, s)
}

/// As [`y_value`], given the spectrum values of `(i∂_t + D^{2s} + i) g`.
fn y_from_image(image: Vec<Complex64>, w: &SpacetimeSpectrum, k: i32, e: &[f64], s: f64) -> Result<f64> {
    let (axis, _) = axis_of(e)
        .ok_or_else(|| Error::InvalidArgument(format!("direction {e:?} is not a lattice axis")))?;
    Ok(2f64.powf(-(k as f64) * (2.0 * s - 1.0) / 2.0) * spectral_mixed_norm(image, w, axis, Exponent::One))
}

/// `ϑ_e(ξ)` for every spatial frequency (rows) and direction (columns).
pub(crate) fn cone_weights(w: &SpacetimeSpectrum, atlas: &ConeAtlas) -> Result<Vec<Vec<f64>>> {
    let grid = w.grid();
    if atlas.dim != grid.dim() {
        return Err(Error::ShapeMismatch(format!(
            "atlas dimension {} differs from grid dimension {}",
            atlas.dim,
            grid.dim()
        )));
    }
    Ok(grid.frequencies().chunks_exact(grid.dim()).map(|xi| atlas.weights(xi)).collect())
}

/// Shared inputs of repeated `Z_k` bounds on spatial multiples of one spectrum.
pub(crate) struct ZInputs<'a> {
    pub w: &'a SpacetimeSpectrum,
    /// Spectrum of `(i∂_t + D^{2s} + i) g`.
    image: SpacetimeSpectrum,
    pub table: ModulationTable,
    pub cones: Vec<Vec<f64>>,
    pub atlas: &'a ConeAtlas,
}

impl<'a> ZInputs<'a> {
    pub(crate) fn new(w: &'a SpacetimeSpectrum, s: f64, atlas: &'a ConeAtlas, opts: &NormOptions) -> Result<Self> {
        Ok(ZInputs {
            w,
            image: w.map_symbol(|_, r, tau| schrodinger_symbol(r, tau, s)),
            table: ModulationTable::new(w, s, &opts.bumps),
            cones: cone_weights(w, atlas)?,
            atlas,
        })
    }

    /// Two-branch `Z_k` bound of `m(ξ)·g`, `m ≡ 1` when absent.
    pub(crate) fn report(&self, m: Option<&[f64]>, k: i32, s: f64) -> Result<NormReport> {
        let npts = self.w.grid().len();
        let base: Vec<f64> = m.map(|m| m.to_vec()).unwrap_or_else(|| vec![1.0; npts]);
        let squared: Vec<f64> = base.iter().map(|v| v * v).collect();
        let (all_x, rest) = self.table.x_value(Some(&squared));
        let total = self.table.energy(&squared);
        let mut pieces = Vec::with_capacity(self.atlas.len());
        let mut split = 0.0;
        for index in 0..self.atlas.len() {
            let symbol: Vec<f64> = base.iter().zip(&self.cones).map(|(b, c)| b * c[index]).collect();
            let sq: Vec<f64> = symbol.iter().map(|v| v * v).collect();
            if self.table.energy(&sq) == 0.0 {
                pieces.push(ConePiece { index, x: 0.0, y: 0.0 });
                continue;
            }
            let (x, _) = self.table.x_value(Some(&sq));
            let y = match self.atlas.axis(index) {
                Some(_) => {
                    let mut piece = self.image.values().to_vec();
                    for row in piece.chunks_exact_mut(npts) {
                        row.iter_mut().zip(&symbol).for_each(|(v, a)| *v *= a);
                    }
                    y_from_image(piece, self.w, k, self.atlas.direction(index), s)?
                }
                None => f64::INFINITY,
            };
            split += x.min(y);
            pieces.push(ConePiece { index, x, y });
        }
        let (value, branch) = if split < all_x { (split, ZBranch::ConeSplit) } else { (all_x, ZBranch::AllX) };
        Ok(NormReport {
            k: Some(k),
            branch: Some(branch),
            pieces,
            remainder_fraction: Some(if total > 0.0 { rest / total } else { 0.0 }),
            ..NormReport::new(NormKind::Zk, s, value)
        })
    }
}

/// Two-branch upper bound for `Z_k` on a shell-supported spectrum.
pub(crate) fn z_report(w: &SpacetimeSpectrum, k: i32, s: f64, atlas: &ConeAtlas, opts: &NormOptions) -> Result<NormReport> {
    ZInputs::new(w, s, atlas, opts)?.report(None, k, s)
}

/// `(Σ_k 2^{2kσ} Z_k(Δ_k g)²)^{1/2}` over the representable shells.
pub(crate) fn f_value(w: &SpacetimeSpectrum, sigma: f64, s: f64, atlas: &ConeAtlas, opts: &NormOptions) -> Result<f64> {
    let (k_lo, k_hi) = dyadic_range(w.grid(), &opts.bumps);
    let inputs = ZInputs::new(w, s, atlas, opts)?;
    let norms = w.grid().frequency_norms();
    let mut sum = 0.0;
    for k in k_lo..=k_hi {
        let m: Vec<f64> = norms.iter().map(|&r| opts.bumps.dyadic(k, r)).collect();
        let m2: Vec<f64> = m.iter().map(|v| v * v).collect();
        if inputs.table.energy(&m2) == 0.0 {
            continue;
        }
        let z = inputs.report(Some(&m), k, s)?.value;
        sum += 2f64.powf(2.0 * k as f64 * sigma) * z * z;
    }
    Ok(sum.sqrt())
}

pub fn xk_norm(u: &Trajectory, k: i32, s: f64) -> Result<NormReport> {
    xk_norm_with(u, k, s, &NormOptions::default())
}

pub fn xk_norm_with(u: &Trajectory, k: i32, s: f64, opts: &NormOptions) -> Result<NormReport> {
    check_order(s)?;
    let w = spacetime_dft(u, opts.window);
    if let Some(d) = shell_gate(&w, k, opts) {
        return Ok(NormReport { k: Some(k), ..NormReport::infinite(NormKind::Xk, s, d) });
    }
    let (value, remainder) = x_value(&w, s, &opts.bumps);
    Ok(NormReport {
        k: Some(k),
        remainder_fraction: Some(remainder),
        ..NormReport::new(NormKind::Xk, s, value)
    })
}

pub fn yk_norm(u: &Trajectory, k: i32, e: &[f64], s: f64) -> Result<NormReport> {
    yk_norm_with(u, k, e, s, &NormOptions::default())
}

pub fn yk_norm_with(u: &Trajectory, k: i32, e: &[f64], s: f64, opts: &NormOptions) -> Result<NormReport> {
    check_order(s)?;
    let n = u.grid().dim();
    if e.len() != n {
        return Err(Error::ShapeMismatch(format!("direction has {} components, grid dimension {n}", e.len())));
    }
    let tagged = |r: NormReport| NormReport { k: Some(k), e: Some(e.to_vec()), ..r };
    if axis_of(e).is_none() {
        return Ok(tagged(NormReport::infinite(
            NormKind::Yk,
            s,
            format!("direction {e:?} is not a lattice axis"),
        )));
    }
    let w = spacetime_dft(u, opts.window);
    let margin = opts.cone_margin.unwrap_or_else(|| default_cone_margin(n));
    if let Some(d) = shell_gate(&w, k, opts).or_else(|| cone_gate(&w, e, margin, opts)) {
        return Ok(tagged(NormReport::infinite(NormKind::Yk, s, d)));
    }
    Ok(tagged(NormReport::new(NormKind::Yk, s, y_value(&w, k, e, s)?)))
}

/// Upper bound for `‖u‖_{Z_k}`: the smaller of `X_k(u)` and
/// `Σ_e min{X_k(ϑ_e u), Y_k^e(ϑ_e u)}`.
pub fn zk_upper(u: &Trajectory, k: i32, s: f64, atlas: &ConeAtlas) -> Result<NormReport> {
    zk_upper_with(u, k, s, atlas, &NormOptions::default())
}

pub fn zk_upper_with(u: &Trajectory, k: i32, s: f64, atlas: &ConeAtlas, opts: &NormOptions) -> Result<NormReport> {
    check_order(s)?;
    let w = spacetime_dft(u, opts.window);
    if let Some(d) = shell_gate(&w, k, opts) {
        return Ok(NormReport { k: Some(k), ..NormReport::infinite(NormKind::Zk, s, d) });
    }
    z_report(&w, k, s, atlas, opts)
}

pub fn f_sigma_norm(u: &Trajectory, sigma: f64, s: f64, atlas: &ConeAtlas) -> Result<f64> {
    f_sigma_norm_with(u, sigma, s, atlas, &NormOptions::default())
}

pub fn f_sigma_norm_with(u: &Trajectory, sigma: f64, s: f64, atlas: &ConeAtlas, opts: &NormOptions) -> Result<f64> {
    check_order(s)?;
    f_value(&spacetime_dft(u, opts.window), sigma, s, atlas, opts)
}

/// `F^σ`-type sum of `(i∂_t + D^{2s} + i)^{−1} F`, the inverse taken on the
/// periodic space-time spectrum.
pub fn n_sigma_norm(f: &Trajectory, sigma: f64, s: f64, atlas: &ConeAtlas) -> Result<f64> {
    n_sigma_norm_with(f, sigma, s, atlas, &NormOptions::default())
}

pub fn n_sigma_norm_with(f: &Trajectory, sigma: f64, s: f64, atlas: &ConeAtlas, opts: &NormOptions) -> Result<f64> {
    f_sigma_norm_with(&inverse_schrodinger(f, s)?, sigma, s, atlas, opts)
}

/// Wraps a scalar `F^σ`/`N^σ` value as a report.
pub fn sigma_report(kind: NormKind, value: f64, sigma: f64, s: f64) -> NormReport {
    NormReport {
        sigma: Some(sigma),
        ..NormReport::new(kind, s, value)
    }
}
