use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_fractional, check_order, Field, ZeroModePolicy};

/// Whether a factor enters as `u` or `ū`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjugation {
    Plain,
    Conjugate,
}

impl Conjugation {
    pub fn apply(self, u: &Field) -> Field {
        match self {
            Conjugation::Plain => u.clone(),
            Conjugation::Conjugate => u.conj(),
        }
    }
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `c·(D^{−β}(ũ₁ũ₂))·D^β ũ₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearTerm {
    pub beta: f64,
    pub pattern: [Conjugation; 3],
    #[serde(default = "unit")]
    pub coefficient: Complex64,
}

impl NonlinearTerm {
    /// `(D^{−β}|u|²)·D^β u`.
    pub fn modulus_squared(beta: f64) -> Self {
        NonlinearTerm {
            beta,
            pattern: [Conjugation::Plain, Conjugation::Conjugate, Conjugation::Plain],
            coefficient: unit(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub terms: Vec<NonlinearTerm>,
    #[serde(default)]
    pub zero_mode: ZeroModePolicy,
}

impl NonlinearitySpec {
    /// The model nonlinearity `(D^{−(2s−1)}|u|²)·D^{2s−1}u`.
    pub fn model(s: f64) -> Self {
        NonlinearitySpec {
            terms: vec![NonlinearTerm::modulus_squared(2.0 * s - 1.0)],
            zero_mode: ZeroModePolicy::ZeroOut,
        }
    }

    pub fn empty() -> Self {
        NonlinearitySpec {
            terms: Vec::new(),
            zero_mode: ZeroModePolicy::ZeroOut,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every `β` must lie in `[−(2s−1)/2, 2s−1]`.
    pub fn validate(&self, s: f64) -> Result<()> {
        check_order(s)?;
        let (lo, hi) = (-(2.0 * s - 1.0) / 2.0, 2.0 * s - 1.0);
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.beta >= lo - 1e-12 && t.beta <= hi + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "term {i}: beta = {} outside [{lo}, {hi}]",
                    t.beta
                )));
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("term {i}: non-finite coefficient")));
            }
        }
        Ok(())
    }
}

/// `D^{−β}(a·b)·D^β c` with products on the grid and derivatives spectral.
pub fn trilinear_form(a: &Field, b: &Field, c: &Field, beta: f64, policy: ZeroModePolicy) -> Result<Field> {
    let grid = *a.grid();
    if b.grid() != &grid || c.grid() != &grid {
        return Err(Error::ShapeMismatch("trilinear factors on different grids".into()));
    }
    let product: Vec<Complex64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    let inner = apply_fractional(&Field::from_raw(grid, product), -beta, policy)?;
    let outer = apply_fractional(c, beta, policy)?;
    let values = inner.values().iter().zip(outer.values()).map(|(x, y)| x * y).collect();
    Ok(Field::from_raw(grid, values))
}

/// `Σ_i c_i·(D^{−β_i}(ũ_{i,1}ũ_{i,2}))·D^{β_i}ũ_{i,3}`.
pub fn apply_nonlinearity(u: &Field, spec: &NonlinearitySpec, s: f64) -> Result<Field> {
    spec.validate(s)?;
    let mut out = Field::zeros(*u.grid());
    for term in &spec.terms {
        let [p1, p2, p3] = term.pattern;
        let piece = trilinear_form(&p1.apply(u), &p2.apply(u), &p3.apply(u), term.beta, spec.zero_mode)?;
        for (o, v) in out.values_mut().iter_mut().zip(piece.values()) {
            *o += term.coefficient * v;
        }
    }
    Ok(out)
}
