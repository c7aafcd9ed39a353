use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::atlas::ConeAtlas;
use super::bumps::{BumpPair, ETA_EDGE};
use crate::error::{Error, Result};
use crate::spectral::{
    apply_multiplier, apply_multiplier_frames, spacetime_dft, spacetime_inverse, Field, Grid,
    SpacetimeSpectrum, Trajectory, Window,
};

/// A frequency projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectionSpec {
    /// `Δ_k`, symbol `φ(|ξ|/2^k)`.
    Dyadic { k: i32 },
    /// `Δ_{≤k}`, symbol `η(|ξ|/2^k)`.
    DyadicLeq { k: i32 },
    /// `Q_j`, symbol `φ((τ + |ξ|^{2s})/2^j)` (`η` for `j = 0`).
    Modulation { j: u32, s: f64 },
    /// `P_{k,𝔩}` with `𝔩 = 2^k·cell`.
    Box { k: i32, cell: Vec<i64> },
    /// `ϑ_e(ξ/|ξ|)` for atlas direction `index`.
    Cone { index: usize },
}

/// Bumps plus an optional cone atlas; evaluates projection symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Projector {
    pub bumps: BumpPair,
    pub atlas: Option<ConeAtlas>,
}

impl Projector {
    pub fn new(bumps: BumpPair) -> Self {
        Projector { bumps, atlas: None }
    }

    pub fn with_atlas(mut self, atlas: ConeAtlas) -> Self {
        self.atlas = Some(atlas);
        self
    }

    fn check(&self, spec: &ProjectionSpec, dim: usize) -> Result<()> {
        match spec {
            ProjectionSpec::Modulation { s, .. } if !(*s > 0.5 && *s <= 1.0) => Err(
                Error::InvalidArgument(format!("s must lie in (1/2, 1], got {s}")),
            ),
            ProjectionSpec::Box { cell, .. } if cell.len() != dim => {
                Err(Error::ShapeMismatch(format!(
                    "box cell has {} coordinates, grid has dimension {dim}",
                    cell.len()
                )))
            }
            ProjectionSpec::Cone { index } => match &self.atlas {
                None => Err(Error::InvalidArgument("cone projection needs an atlas".into())),
                Some(a) if a.dim != dim => Err(Error::ShapeMismatch(format!(
                    "atlas dimension {} differs from grid dimension {dim}",
                    a.dim
                ))),
                Some(a) if *index >= a.len() => Err(Error::InvalidArgument(format!(
                    "cone index {index} out of range for {} directions",
                    a.len()
                ))),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Symbol of a spatial projection at `ξ`.
    pub fn spatial_symbol(&self, spec: &ProjectionSpec, xi: &[f64]) -> Result<f64> {
        self.check(spec, xi.len())?;
        self.spatial_symbol_unchecked(spec, xi)
    }

    fn spatial_symbol_unchecked(&self, spec: &ProjectionSpec, xi: &[f64]) -> Result<f64> {
        let norm = || xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(match spec {
            ProjectionSpec::Dyadic { k } => self.bumps.dyadic(*k, norm()),
            ProjectionSpec::DyadicLeq { k } => self.bumps.dyadic_leq(*k, norm()),
            ProjectionSpec::Box { k, cell } => self.bumps.box_symbol(*k, cell, xi),
            ProjectionSpec::Cone { index } => {
                self.atlas.as_ref().expect("checked").weight(*index, xi)
            }
            ProjectionSpec::Modulation { .. } => {
                return Err(Error::InvalidArgument(
                    "modulation projection needs a space-time spectrum".into(),
                ))
            }
        })
    }

    /// Symbol at `(ξ, τ)`; spatial kinds ignore `τ`.
    pub fn symbol(&self, spec: &ProjectionSpec, xi: &[f64], tau: f64) -> Result<f64> {
        self.check(spec, xi.len())?;
        match spec {
            ProjectionSpec::Modulation { j, s } => {
                let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                Ok(self.bumps.modulation(*j, tau + norm.powf(2.0 * s)))
            }
            _ => self.spatial_symbol_unchecked(spec, xi),
        }
    }

    fn spatial_values(&self, spec: &ProjectionSpec, grid: &Grid) -> Result<Vec<f64>> {
        self.check(spec, grid.dim())?;
        grid.frequencies()
            .chunks_exact(grid.dim())
            .map(|xi| self.spatial_symbol_unchecked(spec, xi))
            .collect()
    }

    /// Projection of a field given by its spectrum.
    pub fn project_frequency(&self, spectrum: &Field, spec: &ProjectionSpec) -> Result<Field> {
        let sym = self.spatial_values(spec, spectrum.grid())?;
        let values = spectrum.values().iter().zip(&sym).map(|(v, m)| v * m).collect();
        Field::new(*spectrum.grid(), values)
    }

    /// Projection of a field in physical space.
    pub fn project_field(&self, f: &Field, spec: &ProjectionSpec) -> Result<Field> {
        let sym = self.spatial_values(spec, f.grid())?;
        let grid = *f.grid();
        Ok(apply_multiplier(f, |xi| {
            Complex64::new(sym[index_of(&grid, xi)], 0.0)
        }))
    }

    /// Frame-by-frame projection; the modulation kind goes through an
    /// unwindowed space-time transform.
    pub fn project_trajectory(&self, u: &Trajectory, spec: &ProjectionSpec) -> Result<Trajectory> {
        if let ProjectionSpec::Modulation { .. } = spec {
            let x = self.project_spectrum(&spacetime_dft(u, Window::None), spec)?;
            return Ok(spacetime_inverse(&x));
        }
        let sym = self.spatial_values(spec, u.grid())?;
        let grid = *u.grid();
        Ok(apply_multiplier_frames(u, |xi| {
            Complex64::new(sym[index_of(&grid, xi)], 0.0)
        }))
    }

    pub fn project_spectrum(
        &self,
        x: &SpacetimeSpectrum,
        spec: &ProjectionSpec,
    ) -> Result<SpacetimeSpectrum> {
        self.check(spec, x.grid().dim())?;
        let mut out = x.clone();
        match spec {
            ProjectionSpec::Modulation { j, s } => {
                let (j, s) = (*j, *s);
                out.apply_symbol(|_, norm, tau| {
                    Complex64::new(self.bumps.modulation(j, tau + norm.powf(2.0 * s)), 0.0)
                });
            }
            _ => {
                let sym = self.spatial_values(spec, x.grid())?;
                let npts = x.grid().len();
                for row in out.values_mut().chunks_exact_mut(npts) {
                    row.iter_mut().zip(&sym).for_each(|(v, m)| *v *= m);
                }
            }
        }
        Ok(out)
    }
}

/// Flat lattice index of a lattice frequency.
fn index_of(grid: &Grid, xi: &[f64]) -> usize {
    let h = grid.freq_spacing();
    let slots: Vec<usize> = xi.iter().map(|x| grid.slot((x / h).round() as i64)).collect();
    grid.flatten(&slots)
}

/// Dyadic indices `k` whose shell meets a nonzero lattice frequency.
pub fn dyadic_range(grid: &Grid, bumps: &BumpPair) -> (i32, i32) {
    let (lo, hi) = bumps.phi_support();
    let min = grid.freq_spacing();
    let max = grid.max_frequency();
    let k_lo = (min / hi).log2().floor() as i32;
    let k_hi = (max / lo).log2().ceil() as i32;
    (k_lo, k_hi)
}

/// Box cells `c` (with `𝔩 = 2^k c`) whose `χ_{k;𝔩}` meets the lattice.
pub fn box_cells(grid: &Grid, k: i32) -> Vec<Vec<i64>> {
    let scale = 2f64.powi(-k);
    let m = grid.points() as i64;
    let h = grid.freq_spacing();
    let lo = ((-(m / 2) as f64) * h * scale).floor() as i64 - 1;
    let hi = (((m / 2 - 1) as f64) * h * scale).ceil() as i64 + 1;
    let mut cells = vec![vec![]];
    for _ in 0..grid.dim() {
        cells = cells
            .into_iter()
            .flat_map(|c: Vec<i64>| {
                (lo..=hi).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    cells
}

/// Largest modulation shell `j` whose support fits inside `|τ| ≤ π/dt`.
pub fn max_modulation_shell(dt: f64) -> u32 {
    let nyquist = PI / dt;
    let j = (nyquist / ETA_EDGE).log2().floor();
    if j < 0.0 {
        0
    } else {
        j as u32
    }
}

/// `Q_0 u, …, Q_{j_max} u` plus the remainder `(1 − η(a/2^{j_max})) u`.
#[derive(Clone, Debug)]
pub struct ModulationSplit {
    pub shells: Vec<(u32, Trajectory)>,
    pub remainder: Trajectory,
    /// Remainder energy over total energy of the windowed trajectory.
    pub remainder_fraction: f64,
    /// Set when the remainder holds more than 1% of the energy.
    pub warning: Option<String>,
}

impl ModulationSplit {
    /// Sum of all pieces; equals the windowed input.
    pub fn reconstruct(&self) -> Trajectory {
        let mut acc = self.remainder.clone();
        for (_, piece) in &self.shells {
            acc = acc.add(piece).expect("same layout");
        }
        acc
    }

    pub fn energy_fractions(&self) -> Vec<(u32, f64)> {
        let total: f64 = self
            .shells
            .iter()
            .map(|(_, p)| p.l2_norm().powi(2))
            .sum::<f64>()
            + self.remainder.l2_norm().powi(2);
        self.shells
            .iter()
            .map(|(j, p)| (*j, if total > 0.0 { p.l2_norm().powi(2) / total } else { 0.0 }))
            .collect()
    }
}

pub fn modulation_split(
    u: &Trajectory,
    s: f64,
    j_max: u32,
    window: Window,
    bumps: &BumpPair,
) -> Result<ModulationSplit> {
    if !(s > 0.5 && s <= 1.0) {
        return Err(Error::InvalidArgument(format!("s must lie in (1/2, 1], got {s}")));
    }
    let x = spacetime_dft(u, window);
    let proj = Projector::new(*bumps);
    let mut shells = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let xj = proj.project_spectrum(&x, &ProjectionSpec::Modulation { j, s })?;
        shells.push((j, spacetime_inverse(&xj)));
    }
    let top = 2f64.powi(-(j_max as i32));
    let rest = x.map_symbol(|_, norm, tau| {
        Complex64::new(1.0 - bumps.eta((tau + norm.powf(2.0 * s)) * top), 0.0)
    });
    let remainder_fraction = {
        let total = x.l2_norm().powi(2);
        if total > 0.0 {
            rest.l2_norm().powi(2) / total
        } else {
            0.0
        }
    };
    let warning = (remainder_fraction > 0.01).then(|| {
        format!(
            "{:.1}% of the energy lies beyond modulation shell {j_max}; the τ-lattice is too coarse",
            100.0 * remainder_fraction
        )
    });
    Ok(ModulationSplit {
        shells,
        remainder: spacetime_inverse(&rest),
        remainder_fraction,
        warning,
    })
}
