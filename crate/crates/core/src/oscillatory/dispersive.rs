//! The dispersive phase integral
//!
//! ```text
//! I(x, t) = ∫_{ℝⁿ} e^{i(t|ξ − 𝔫|^{2s} − ⟨x, ξ⟩)} ψ(ξ) dξ
//! ```
//!
//! for radial cutoffs `ψ`. With `𝔫 = 0` the angular integral is the sphere
//! kernel and `I` reduces to a single radial integral; otherwise it is
//! evaluated by nested polar quadrature (n ∈ {2, 3}).

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{sphere_area, sphere_kernel};
use super::quadrature::{integrate, phase_panels, QuadratureOptions};
use crate::error::{Error, Result};
use crate::lp::BumpPair;
use crate::spectral::check_order;

/// Radial frequency cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cutoff {
    /// Dyadic annulus `φ(|ξ|/2^k)`.
    Annulus { k: i32 },
    /// Ball `η(|ξ|/2^ℓ)`.
    Ball { l: i32 },
    /// Unit-width annulus `η(|ξ| − Λ)` around a large radius.
    Shell { lambda: f64 },
}

impl Cutoff {
    fn validate(&self, bumps: &BumpPair) -> Result<()> {
        match *self {
            Cutoff::Shell { lambda } if !(lambda > bumps.eta.outer) || !lambda.is_finite() => {
                Err(Error::InvalidArgument(format!(
                    "shell radius Λ = {lambda} must exceed the bump width {}",
                    bumps.eta.outer
                )))
            }
            Cutoff::Annulus { k } | Cutoff::Ball { l: k } if k.abs() > 60 => Err(
                Error::InvalidArgument(format!("dyadic scale {k} out of range")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, bumps: &BumpPair, r: f64) -> f64 {
        match *self {
            Cutoff::Annulus { k } => bumps.dyadic(k, r),
            Cutoff::Ball { l } => bumps.eta(r / 2f64.powi(l)),
            Cutoff::Shell { lambda } => bumps.eta(r - lambda),
        }
    }

    /// Radial support `[r_min, r_max]`.
    pub fn support(&self, bumps: &BumpPair) -> (f64, f64) {
        let (lo, hi) = bumps.phi_support();
        match *self {
            Cutoff::Annulus { k } => (lo * 2f64.powi(k), hi * 2f64.powi(k)),
            Cutoff::Ball { l } => (0.0, bumps.eta.outer * 2f64.powi(l)),
            Cutoff::Shell { lambda } => (lambda - bumps.eta.outer, lambda + bumps.eta.outer),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseIntegralSpec {
    pub n: usize,
    pub s: f64,
    #[serde(default)]
    pub shift: Vec<f64>,
    pub cutoff: Cutoff,
    pub x: Vec<f64>,
    pub t: f64,
}

impl PhaseIntegralSpec {
    pub fn radial(n: usize, s: f64, cutoff: Cutoff) -> Self {
        Self {
            n,
            s,
            shift: vec![0.0; n],
            cutoff,
            x: vec![0.0; n],
            t: 0.0,
        }
    }

    pub fn at(&self, x: &[f64], t: f64) -> Self {
        Self {
            x: x.to_vec(),
            t,
            ..self.clone()
        }
    }

    /// Copy evaluated at `x = (|x|, 0, …, 0)`.
    pub fn at_radius(&self, radius: f64, t: f64) -> Self {
        let mut x = vec![0.0; self.n];
        x[0] = radius;
        self.at(&x, t)
    }

    pub fn is_radial(&self) -> bool {
        self.shift.iter().all(|&c| c == 0.0)
    }

    pub fn validate(&self, bumps: &BumpPair) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "phase integrals need n ≥ 2, got {}",
                self.n
            )));
        }
        check_order(self.s)?;
        if self.x.len() != self.n || (!self.shift.is_empty() && self.shift.len() != self.n) {
            return Err(Error::ShapeMismatch(format!(
                "x has {} and 𝔫 has {} components in dimension {}",
                self.x.len(),
                self.shift.len(),
                self.n
            )));
        }
        if !self.t.is_finite() || self.x.iter().chain(&self.shift).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite evaluation point".into()));
        }
        if !self.is_radial() && !(2..=3).contains(&self.n) {
            return Err(Error::InvalidArgument(
                "shifted phase integrals are implemented for n ∈ {2, 3}".into(),
            ));
        }
        self.cutoff.validate(bumps)
    }

    fn x_norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `I(0, 0) = ∫ ψ`, the upper bound for `|I(x, t)|`.
pub fn dispersive_mass(spec: &PhaseIntegralSpec) -> Result<f64> {
    dispersive_mass_with(spec, &BumpPair::default())
}

pub fn dispersive_mass_with(spec: &PhaseIntegralSpec, bumps: &BumpPair) -> Result<f64> {
    spec.validate(bumps)?;
    let (lo, hi) = spec.cutoff.support(bumps);
    let n = spec.n;
    let q = integrate(
        |r| Complex64::new(spec.cutoff.eval(bumps, r) * r.powi(n as i32 - 1), 0.0),
        &[lo, 0.5 * (lo + hi), hi],
        &QuadratureOptions {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            ..Default::default()
        },
    )?;
    Ok(q.value.re * sphere_area(n))
}

/// Evaluates `I(x, t)` with absolute error target `1e−10 · I(0, 0)`.
pub fn dispersive_integral(spec: &PhaseIntegralSpec) -> Result<Complex64> {
    dispersive_integral_with(spec, &BumpPair::default())
}

pub fn dispersive_integral_with(spec: &PhaseIntegralSpec, bumps: &BumpPair) -> Result<Complex64> {
    let mass = dispersive_mass_with(spec, bumps)?;
    if spec.is_radial() {
        radial(spec, bumps, mass)
    } else {
        shifted(spec, bumps, mass)
    }
}

fn options_for(mass: f64, rel: f64) -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: rel * mass,
        rel_tol: 0.0,
        ..Default::default()
    }
}

fn radial(spec: &PhaseIntegralSpec, bumps: &BumpPair, mass: f64) -> Result<Complex64> {
    let (lo, hi) = spec.cutoff.support(bumps);
    let (n, s, t) = (spec.n, spec.s, spec.t);
    let radius = spec.x_norm();
    let speed = |r: f64| t.abs() * 2.0 * s * r.powf(2.0 * s - 1.0) + radius;
    let breaks = phase_panels(lo, hi, 8, speed);
    let q = integrate(
        |r| {
            let w = spec.cutoff.eval(bumps, r);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let amplitude = w * r.powi(n as i32 - 1) * sphere_kernel(r * radius, n);
            Complex64::from_polar(amplitude, t * r.powf(2.0 * s))
        },
        &breaks,
        &options_for(mass, 1e-10),
    )?;
    Ok(q.value)
}

/// Nested polar quadrature around the origin of ξ for a shifted phase.
fn shifted(spec: &PhaseIntegralSpec, bumps: &BumpPair, mass: f64) -> Result<Complex64> {
    let (lo, hi) = spec.cutoff.support(bumps);
    let (n, s, t) = (spec.n, spec.s, spec.t);
    let shift = &spec.shift;
    let shift_norm = shift.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x = &spec.x;
    let x_norm = spec.x_norm();
    let speed = move |r: f64| {
        t.abs() * 2.0 * s * (r + shift_norm).powf(2.0 * s - 1.0) + x_norm
    };
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let phase = |xi: &[f64]| {
        let d2: f64 = xi.iter().zip(shift).map(|(a, b)| (a - b) * (a - b)).sum();
        let dot: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
        t * d2.powf(s) - dot
    };
    let inner_options = options_for(mass, 1e-11);
    let record = |e: Error| {
        inner_failure.borrow_mut().get_or_insert(e);
        Complex64::new(0.0, 0.0)
    };
    let outer = |r: f64| -> Complex64 {
        let w = spec.cutoff.eval(bumps, r);
        if w == 0.0 || r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let angular_rate = r * speed(r);
        let angle_breaks = |span: f64| phase_panels(0.0, span, 4, |_| angular_rate);
        let value = if n == 2 {
            integrate(
                |th| Complex64::from_polar(1.0, phase(&[r * th.cos(), r * th.sin()])),
                &angle_breaks(2.0 * PI),
                &inner_options,
            )
            .map(|q| q.value)
        } else {
            integrate(
                |pol| {
                    let (sp, cp) = pol.sin_cos();
                    if sp == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    integrate(
                        |az| {
                            let xi = [r * sp * az.cos(), r * sp * az.sin(), r * cp];
                            Complex64::from_polar(1.0, phase(&xi))
                        },
                        &phase_panels(0.0, 2.0 * PI, 4, |_| r * sp * speed(r)),
                        &inner_options,
                    )
                    .map(|q| q.value * sp)
                    .unwrap_or_else(record)
                },
                &angle_breaks(PI),
                &inner_options,
            )
            .map(|q| q.value)
        };
        match value {
            Ok(v) => v * w * r.powi(n as i32 - 1),
            Err(e) => record(e),
        }
    };
    let q = integrate(outer, &phase_panels(lo, hi, 8, speed), &options_for(mass, 1e-9))?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    Ok(q.value)
}

/// `sup_x |I(x, t)|` for a radial cutoff and phase, with its maximizing `|x|`.
///
/// The radius is scanned over the stationary window `|x| ≈ t·2s r^{2s−1}`,
/// `r ∈ supp ψ`, and the best grid point is refined by golden-section search.
pub fn sup_over_x(spec: &PhaseIntegralSpec, t: f64) -> Result<(f64, f64)> {
    sup_over_x_with(spec, t, &BumpPair::default())
}

pub fn sup_over_x_with(spec: &PhaseIntegralSpec, t: f64, bumps: &BumpPair) -> Result<(f64, f64)> {
    if !spec.is_radial() {
        return Err(Error::InvalidArgument(
            "sup over x is implemented for unshifted phases".into(),
        ));
    }
    spec.validate(bumps)?;
    let (lo, hi) = spec.cutoff.support(bumps);
    let s = spec.s;
    let velocity = |r: f64| t.abs() * 2.0 * s * r.powf(2.0 * s - 1.0);
    let r_lo = 0.8 * velocity(lo);
    let r_hi = 1.2 * velocity(hi) + 4.0 / hi;
    let eval = |radius: f64| -> Result<f64> {
        Ok(dispersive_integral_with(&spec.at_radius(radius, t), bumps)?.norm())
    };
    let count = 64;
    let step = (r_hi - r_lo) / count as f64;
    let grid: Vec<f64> = (0..=count).map(|i| r_lo + step * i as f64).collect();
    let mut values = Vec::with_capacity(grid.len());
    for &radius in &grid {
        values.push(eval(radius)?);
    }
    let origin = eval(0.0)?;
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let (mut a, mut b) = (
        (grid[best] - step).max(0.0),
        grid[best] + step,
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d)?;
        }
        if b - a < 1e-9 * (1.0 + b) {
            break;
        }
    }
    let candidates = [
        (0.0, origin),
        (grid[best], best_value),
        (c, fc),
        (d, fd),
    ];
    let (radius, value) = candidates
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("nonempty");
    Ok((radius, value))
}
