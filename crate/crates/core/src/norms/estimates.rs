use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::{FamilySpec, InputFamily};
use super::mixed::{mixed_norm, spectral_mixed_norm, Exponent, MixedNormSpec};
use super::resolution::{f_value, n_sigma_norm_with, spatial_multiply, x_value, y_value, z_report, NormOptions};
use crate::error::{Error, Result};
use crate::lp::{box_cells, max_modulation_shell, ConeAtlas};
use crate::report::{RatioItem, RatioReport};
use crate::solver::{duhamel_integral, trilinear_form, Conjugation, TimeRule};
use crate::spectral::{
    check_order, forward_in_place, homogeneous_sobolev_norm, spacetime_dft, spacetime_inverse,
    Field, SpacetimeSpectrum, Trajectory, Window, ZeroModePolicy,
};

/// Relative drift of `C*` allowed when the number of draws doubles.
pub const STABILITY_TOLERANCE: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    /// `X_k(Q_j f) ≤ C min{2^{ks}2^{−j/2}, 1} Y_k^e(f)` for cone-supported `f`.
    Embedding,
    /// `sup_t ‖f(t)‖_{L²} ≤ C Z_k(f)`.
    LinftyL2,
    /// `‖ϑ_e f‖_{L^∞_e L²} ≤ C 2^{−k(2s−1)/2} Z_k(f)`, for `f` and `f̄`.
    Smoothing,
    /// `‖f‖_{L²_e L^∞} ≤ C 2^{k(n−1)/2} Z_k(f)` and its box-summed refinement.
    Maximal,
    /// `‖D^β Δ_ℓ f‖ ≲ 2^{ℓβ} Σ_{|ℓ′−ℓ|≤1} ‖Δ_ℓ′ f‖` in three mixed norms.
    DsCommute,
    /// `Z_k(m f) ≤ C ‖K‖_{L¹} Z_k(f)` for translations and a Gaussian.
    MultiplierBound,
    /// `F^σ(e^{itD^{2s}}u₀) ≤ C ‖u₀‖_{Ḣ^σ}`, `σ = (n−2s)/2`.
    Homogeneous,
    /// `F^σ(u) ≤ C N^σ(F)` for the Duhamel integral `u` of `F`.
    Inhomogeneous,
    /// `N^σ((D^{−β}(f₁f̄₂))·D^β f₃) ≤ C Σ F^σ·F^σ·F^σ`.
    Trilinear,
}

impl EstimateKind {
    pub const ALL: [EstimateKind; 9] = [
        EstimateKind::Embedding,
        EstimateKind::LinftyL2,
        EstimateKind::Smoothing,
        EstimateKind::Maximal,
        EstimateKind::DsCommute,
        EstimateKind::MultiplierBound,
        EstimateKind::Homogeneous,
        EstimateKind::Inhomogeneous,
        EstimateKind::Trilinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimateKind::Embedding => "embedding",
            EstimateKind::LinftyL2 => "linfty_l2",
            EstimateKind::Smoothing => "smoothing",
            EstimateKind::Maximal => "maximal",
            EstimateKind::DsCommute => "ds_commute",
            EstimateKind::MultiplierBound => "multiplier_bound",
            EstimateKind::Homogeneous => "homogeneous",
            EstimateKind::Inhomogeneous => "inhomogeneous",
            EstimateKind::Trilinear => "trilinear",
        }
    }

    /// Checks with `Z_k` on the left, where only an upper bound is available.
    pub fn is_surrogate(self) -> bool {
        matches!(
            self,
            EstimateKind::MultiplierBound
                | EstimateKind::Homogeneous
                | EstimateKind::Inhomogeneous
                | EstimateKind::Trilinear
        )
    }

    fn items(self, s: f64, dt: f64) -> Vec<String> {
        match self {
            EstimateKind::Embedding => (0..=max_modulation_shell(dt)).map(|j| format!("j={j}")).collect(),
            EstimateKind::LinftyL2 => vec!["linfty_l2".into()],
            EstimateKind::Smoothing => vec!["f".into(), "conjugate".into()],
            EstimateKind::Maximal => vec!["global".into(), "box".into()],
            EstimateKind::DsCommute => ds_cases(s)
                .iter()
                .map(|(p, q, b)| format!("p={p},q={q},beta={b:.4}"))
                .collect(),
            EstimateKind::MultiplierBound => vec!["translation".into(), "gaussian".into()],
            EstimateKind::Homogeneous => vec!["homogeneous".into()],
            EstimateKind::Inhomogeneous => vec!["inhomogeneous".into()],
            EstimateKind::Trilinear => trilinear_betas(s).iter().map(|b| format!("beta={b:.4}")).collect(),
        }
    }
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown estimate kind {s}")))
    }
}

fn ds_cases(s: f64) -> Vec<(Exponent, Exponent, f64)> {
    let mut out = Vec::new();
    for (p, q) in [
        (Exponent::Infinity, Exponent::Two),
        (Exponent::Two, Exponent::Infinity),
        (Exponent::One, Exponent::Two),
    ] {
        for beta in [2.0 * s - 1.0, -(2.0 * s - 1.0) / 2.0] {
            out.push((p, q, beta));
        }
    }
    out
}

fn trilinear_betas(s: f64) -> [f64; 2] {
    [2.0 * s - 1.0, -(2.0 * s - 1.0) / 2.0]
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if lhs == 0.0 {
        Some(0.0)
    } else if rhs > 0.0 {
        Some(lhs / rhs)
    } else {
        None
    }
}

/// Per-draw inputs shared by the kinds.
struct Draw {
    w: SpacetimeSpectrum,
    g: Trajectory,
}

impl Draw {
    fn new(u: &Trajectory, window: Window) -> Self {
        let w = spacetime_dft(u, window);
        let g = spacetime_inverse(&w);
        Draw { w, g }
    }
}

fn axis_spec(n: usize, axis: usize, p: Exponent, q: Exponent) -> MixedNormSpec {
    MixedNormSpec::along_axis(n, axis, p, q)
}

fn axis_indices(atlas: &ConeAtlas) -> Vec<usize> {
    (0..atlas.len()).filter(|&i| atlas.axis(i).is_some()).collect()
}

/// Spectrum multiplied by the atlas weight of direction `index`.
fn cone_piece(w: &SpacetimeSpectrum, atlas: &ConeAtlas, index: usize) -> SpacetimeSpectrum {
    spatial_multiply(w, |xi, _| atlas.weight(index, xi))
}

struct Context<'a> {
    kind: EstimateKind,
    spec: &'a FamilySpec,
    s: f64,
    atlas: &'a ConeAtlas,
    opts: NormOptions,
}

impl Context<'_> {
    fn z(&self, w: &SpacetimeSpectrum) -> Result<f64> {
        Ok(z_report(w, self.spec.k, self.s, self.atlas, &self.opts)?.value)
    }

    fn sigma(&self) -> f64 {
        (self.spec.n as f64 - 2.0 * self.s) / 2.0
    }

    fn ratios(&self, index: usize) -> Result<Option<Vec<f64>>> {
        let (spec, s, atlas, k) = (self.spec, self.s, self.atlas, self.spec.k);
        let n = spec.n;
        let kf = k as f64;
        let out: Vec<Option<f64>> = match self.kind {
            EstimateKind::Embedding => {
                let cone = spec.cone.unwrap_or(0);
                let e = atlas.direction(cone).to_vec();
                if atlas.axis(cone).is_none() {
                    return Err(Error::InvalidArgument("embedding needs an axis direction".into()));
                }
                let localized = FamilySpec { cone: Some(cone), ..spec.clone() };
                let d = Draw::new(&localized.draw(index, s, Some(atlas))?, self.opts.window);
                let y = y_value(&d.w, k, &e, s)?;
                (0..=max_modulation_shell(spec.dt))
                    .map(|j| {
                        let wj = d.w.map_symbol(|_, r, tau| {
                            Complex64::new(self.opts.bumps.modulation(j, tau + r.powf(2.0 * s)), 0.0)
                        });
                        let (x, _) = x_value(&wj, s, &self.opts.bumps);
                        let factor = f64::min(2f64.powf(kf * s - j as f64 / 2.0), 1.0);
                        ratio(x, factor * y)
                    })
                    .collect()
            }
            EstimateKind::LinftyL2 => {
                let d = self.draw(index)?;
                vec![ratio(d.g.linf_l2_norm(), self.z(&d.w)?)]
            }
            EstimateKind::Smoothing => {
                let d = self.draw(index)?;
                let rhs = 2f64.powf(-kf * (2.0 * s - 1.0) / 2.0) * self.z(&d.w)?;
                let conj = spacetime_dft(&d.g.conj(), Window::None);
                let mut sides = Vec::new();
                for w in [&d.w, &conj] {
                    let mut lhs: f64 = 0.0;
                    for i in axis_indices(atlas) {
                        let (axis, _) = atlas.axis(i).expect("axis");
                        let piece = cone_piece(w, atlas, i);
                        lhs = lhs.max(spectral_mixed_norm(piece.values().to_vec(), w, axis, Exponent::Infinity));
                    }
                    sides.push(ratio(lhs, rhs));
                }
                sides
            }
            EstimateKind::Maximal => {
                let d = self.draw(index)?;
                let z = self.z(&d.w)?;
                let mut global: f64 = 0.0;
                for axis in 0..n {
                    global = global.max(mixed_norm(&d.g, &axis_spec(n, axis, Exponent::Two, Exponent::Infinity))?);
                }
                let k1 = k - 1;
                let boxed = box_sum(&d.g, k1, &self.opts)?;
                let scale = 2f64.powf(kf * (n as f64 - 1.0) / 2.0);
                let refine = 2f64.powf(-((k - k1) as f64) * (n as f64 - 2.0) / 2.0) * (1.0 + (k - k1).abs() as f64);
                vec![ratio(global, scale * z), ratio(boxed, scale * refine * z)]
            }
            EstimateKind::DsCommute => {
                let d = self.draw(index)?;
                let bumps = &self.opts.bumps;
                let shells: Vec<Trajectory> = (k - 1..=k + 1)
                    .map(|l| spacetime_inverse(&spatial_multiply(&d.w, |_, r| bumps.dyadic(l, r))))
                    .collect();
                let mut out = Vec::new();
                for (p, q, beta) in ds_cases(s) {
                    let spec_e = axis_spec(n, 0, p, q);
                    let lifted = spacetime_inverse(&spatial_multiply(&d.w, |_, r| {
                        if r == 0.0 {
                            0.0
                        } else {
                            bumps.dyadic(k, r) * r.powf(beta)
                        }
                    }));
                    let lhs = mixed_norm(&lifted, &spec_e)?;
                    let mut rhs = 0.0;
                    for piece in &shells {
                        rhs += mixed_norm(piece, &spec_e)?;
                    }
                    out.push(ratio(lhs, 2f64.powf(kf * beta) * rhs));
                }
                out
            }
            EstimateKind::MultiplierBound => {
                let d = self.draw(index)?;
                let z = self.z(&d.w)?;
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6d75_6c74);
                rng.set_stream(index as u64);
                let shift: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..spec.box_length)).collect();
                let translated = d.w.map_symbol(|xi, _, _| {
                    Complex64::from_polar(1.0, -xi.iter().zip(&shift).map(|(a, b)| a * b).sum::<f64>())
                });
                let width = 2f64.powi(2 * k);
                let smoothed = spatial_multiply(&d.w, |_, r| (-r * r / width).exp());
                vec![ratio(self.z(&translated)?, z), ratio(self.z(&smoothed)?, z)]
            }
            EstimateKind::Homogeneous => {
                let free = FamilySpec { family: InputFamily::Free, ..spec.clone() };
                let cone = spec.cone.map(|_| atlas);
                let u = free.draw(index, s, cone)?;
                let u0 = free.data(index, cone)?;
                let lhs = f_value(&spacetime_dft(&u, self.opts.window), self.sigma(), s, atlas, &self.opts)?;
                vec![ratio(lhs, homogeneous_sobolev_norm(&u0, self.sigma()))]
            }
            EstimateKind::Inhomogeneous => {
                let forcing = spec.draw(index, s, spec.cone.map(|_| atlas))?;
                let u = duhamel_integral(&forcing, s, TimeRule::Trapezoid)?;
                let lhs = f_value(&spacetime_dft(&u, self.opts.window), self.sigma(), s, atlas, &self.opts)?;
                let rhs = n_sigma_norm_with(&forcing, self.sigma(), s, atlas, &self.opts)?;
                vec![ratio(lhs, rhs)]
            }
            EstimateKind::Trilinear => {
                let cone = spec.cone.map(|_| atlas);
                let factors: Vec<Draw> = (0..3)
                    .map(|c| Ok(Draw::new(&spec.draw(3 * index + c, s, cone)?, self.opts.window)))
                    .collect::<Result<_>>()?;
                let norms: Vec<f64> = factors
                    .iter()
                    .map(|d| f_value(&d.w, self.sigma(), s, atlas, &self.opts))
                    .collect::<Result<_>>()?;
                let rhs = 3.0 * norms.iter().product::<f64>();
                let pattern = [Conjugation::Plain, Conjugation::Conjugate, Conjugation::Plain];
                trilinear_betas(s)
                    .iter()
                    .map(|&beta| {
                        let product = trilinear_trajectory(&factors, pattern, beta)?;
                        let lhs = n_sigma_norm_with(&product, self.sigma(), s, atlas, &self.opts)?;
                        Ok(ratio(lhs, rhs))
                    })
                    .collect::<Result<_>>()?
            }
        };
        Ok(out.into_iter().collect())
    }

    fn draw(&self, index: usize) -> Result<Draw> {
        let u = self.spec.draw(index, self.s, self.spec.cone.map(|_| self.atlas))?;
        Ok(Draw::new(&u, self.opts.window))
    }
}

/// `(D^{−β}(f̃₁f̃₂))·D^β f̃₃` frame by frame on the windowed factors.
fn trilinear_trajectory(factors: &[Draw], pattern: [Conjugation; 3], beta: f64) -> Result<Trajectory> {
    let g = &factors[0].g;
    let grid = *g.grid();
    let mut values = Vec::with_capacity(g.values().len());
    for i in 0..g.frame_count() {
        let f: Vec<Field> = factors
            .iter()
            .zip(pattern)
            .map(|(d, c)| c.apply(&d.g.frame_field(i)))
            .collect();
        values.extend(trilinear_form(&f[0], &f[1], &f[2], beta, ZeroModePolicy::ZeroOut)?.into_values());
    }
    Trajectory::from_values(grid, g.t0(), g.dt(), g.frame_count(), values)
}

/// Energy, relative to the peak, below which a lattice frequency holds only
/// transform round-off.
const ROUNDOFF_FLOOR: f64 = 1e-24;

/// `(Σ_𝔩 ‖P_{k₁,𝔩} g‖²_{L²_{e₁}L^∞})^{1/2}` over the cells meeting the support.
///
/// The box symbol factors over axes, so each cell touches a small tensor
/// block of lattice frequencies and its piece is synthesized axis by axis.
fn box_sum(g: &Trajectory, k1: i32, opts: &NormOptions) -> Result<f64> {
    let grid = *g.grid();
    let (m, npts) = (grid.points(), grid.len());
    let mut spectra = g.values().to_vec();
    spectra.par_chunks_mut(npts).for_each(|row| forward_in_place(row, &grid));
    let energy: Vec<f64> = (0..npts)
        .map(|p| spectra.chunks_exact(npts).map(|row| row[p].norm_sqr()).sum())
        .collect();
    let floor = ROUNDOFF_FLOOR * energy.iter().cloned().fold(0.0, f64::max);
    let active: Vec<bool> = energy.iter().map(|&e| e > floor).collect();
    let scale = 2f64.powi(-k1);
    let synth: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            let signed = grid.signed_index(i) as f64;
            (0..m)
                .map(|x| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * signed * x as f64 / m as f64))
                .collect()
        })
        .collect();
    let volume = grid.volume();
    let dx = grid.dx();
    let cells = box_cells(&grid, k1);
    let parts = cells
        .par_iter()
        .map(|cell| {
            let factors: Vec<Vec<(usize, f64)>> = cell
                .iter()
                .map(|&c| {
                    (0..m)
                        .filter_map(|i| {
                            let w = opts.bumps.chi(grid.wavenumber(i) * scale - c as f64);
                            (w != 0.0).then_some((i, w))
                        })
                        .collect()
                })
                .collect();
            let block = TensorBlock::new(&grid, &factors);
            if block.indices.iter().all(|&(p, _)| !active[p]) {
                return 0.0;
            }
            let mut peak = vec![0.0f64; m];
            let mut buffers = (Vec::new(), Vec::new());
            for row in spectra.chunks_exact(npts) {
                block.accumulate_peaks(row, &synth, m, &mut peak, &mut buffers);
            }
            peak.iter().sum::<f64>() * dx / (volume * volume)
        })
        .collect::<Vec<f64>>();
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Lattice frequencies `S₁ × … × S_n` of one cell with their symbol values.
struct TensorBlock {
    /// Per-axis slot lists.
    axes: Vec<Vec<usize>>,
    /// Flat lattice index and symbol value, in row-major block order.
    indices: Vec<(usize, f64)>,
}

impl TensorBlock {
    fn new(grid: &crate::spectral::Grid, factors: &[Vec<(usize, f64)>]) -> Self {
        let mut indices = vec![(0usize, 1.0f64)];
        for axis in factors {
            indices = indices
                .iter()
                .flat_map(|&(p, w)| axis.iter().map(move |&(i, v)| (p * grid.points() + i, w * v)))
                .collect();
        }
        TensorBlock {
            axes: factors.iter().map(|a| a.iter().map(|&(i, _)| i).collect()).collect(),
            indices,
        }
    }

    /// Raises `peak[x₁]` to `max |Σ_ξ m(ξ) F(ξ) e^{iξ·x}|²` over the other
    /// coordinates, without the `L^{−n}` factor.
    fn accumulate_peaks(
        &self,
        spectrum: &[Complex64],
        synth: &[Vec<Complex64>],
        m: usize,
        peak: &mut [f64],
        buffers: &mut (Vec<Complex64>, Vec<Complex64>),
    ) {
        let (data, next) = buffers;
        data.clear();
        data.extend(self.indices.iter().map(|&(p, w)| spectrum[p] * w));
        let n = self.axes.len();
        let mut dims: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        for (a, slots) in self.axes[..n - 1].iter().enumerate() {
            let outer: usize = dims[..a].iter().product();
            let inner: usize = dims[a + 1..].iter().product();
            next.clear();
            next.resize(outer * m * inner, Complex64::new(0.0, 0.0));
            for o in 0..outer {
                for (k, &slot) in slots.iter().enumerate() {
                    let src = &data[(o * slots.len() + k) * inner..(o * slots.len() + k + 1) * inner];
                    for (x, phase) in synth[slot].iter().enumerate() {
                        let dst = &mut next[(o * m + x) * inner..(o * m + x + 1) * inner];
                        dst.iter_mut().zip(src).for_each(|(d, v)| *d += v * phase);
                    }
                }
            }
            dims[a] = m;
            std::mem::swap(data, next);
        }
        let last = &self.axes[n - 1];
        let outer: usize = dims[..n - 1].iter().product();
        let per_lead = m.pow(n.saturating_sub(2) as u32);
        for o in 0..outer {
            let coefficients = &data[o * last.len()..(o + 1) * last.len()];
            let mut top: f64 = 0.0;
            for x in 0..m {
                let v: Complex64 = coefficients.iter().zip(last).map(|(c, &slot)| c * synth[slot][x]).sum();
                if n == 1 {
                    peak[x] = peak[x].max(v.norm_sqr());
                } else {
                    top = top.max(v.norm_sqr());
                }
            }
            if n > 1 {
                let lead = o / per_lead;
                peak[lead] = peak[lead].max(top);
            }
        }
    }
}

/// Worst ratio over `2·draws` seeded draws of `inputs`; stable when the worst
/// ratio over the first `draws` is within 25% of it.
pub fn verify_estimate(kind: EstimateKind, inputs: &FamilySpec, s: f64, atlas: &ConeAtlas) -> Result<RatioReport> {
    verify_estimate_with(kind, inputs, s, atlas, &NormOptions::default())
}

pub fn verify_estimate_with(
    kind: EstimateKind,
    inputs: &FamilySpec,
    s: f64,
    atlas: &ConeAtlas,
    opts: &NormOptions,
) -> Result<RatioReport> {
    check_order(s)?;
    if inputs.draws == 0 {
        return Err(Error::InvalidArgument("family needs at least one draw".into()));
    }
    if atlas.dim != inputs.n {
        return Err(Error::ShapeMismatch(format!(
            "atlas dimension {} differs from family dimension {}",
            atlas.dim, inputs.n
        )));
    }
    let ctx = Context {
        kind,
        spec: inputs,
        s,
        atlas,
        opts: opts.clone(),
    };
    let total = 2 * inputs.draws;
    let per_draw = (0..total)
        .into_par_iter()
        .map(|i| ctx.ratios(i))
        .collect::<Result<Vec<Option<Vec<f64>>>>>()?;
    let names = kind.items(s, inputs.dt);
    let mut items: Vec<RatioItem> = names.iter().map(RatioItem::new).collect();
    let mut half = 0.0f64;
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for (i, ratios) in per_draw.iter().enumerate() {
        let Some(ratios) = ratios else {
            skipped += 1;
            continue;
        };
        for (item, &r) in items.iter_mut().zip(ratios) {
            item.push(r);
            worst = worst.max(r);
            if i < inputs.draws {
                half = half.max(r);
            }
        }
    }
    let stable = worst.is_finite()
        && if half > 0.0 {
            (worst / half - 1.0).abs() < STABILITY_TOLERANCE
        } else {
            worst == 0.0
        };
    let mut notes = vec![format!(
        "inequality shape checked at n = {}; the dimensional hypothesis n >= 4 is not checked",
        inputs.n
    )];
    if kind.is_surrogate() {
        notes.push("surrogate: the Z_k upper bound stands on the left-hand side".into());
    }
    if kind == EstimateKind::Trilinear && skipped > 0 {
        notes.push(format!("{skipped} draws had a zero right-hand side and were skipped"));
    }
    Ok(RatioReport {
        lemma: kind.name().into(),
        parameters: serde_json::json!({
            "kind": kind.name(),
            "s": s,
            "n": inputs.n,
            "grid": { "points": inputs.points, "box_length": inputs.box_length },
            "frames": inputs.frames,
            "dt": inputs.dt,
            "family": inputs,
            "seed": inputs.seed,
            "draws": total,
            "c_star_half": half,
            "cone_margin": atlas.margin,
        }),
        samples: total - skipped,
        skipped,
        items,
        c_star: worst,
        stable: Some(stable),
        notes,
    })
}
