use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A phase-space point `(ξ, τ)` with an order `s` and a direction `e`,
/// split as `ξ = ξ_{e,1} e + ξ'_e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSample {
    pub xi: Vec<f64>,
    pub tau: f64,
    pub s: f64,
    pub e: Vec<f64>,
}

impl SymbolSample {
    pub fn new(xi: Vec<f64>, tau: f64, s: f64, e: Vec<f64>) -> Result<Self> {
        check_order(s)?;
        check_direction(&e)?;
        if xi.len() != e.len() {
            return Err(Error::ShapeMismatch(format!(
                "ξ has {} components, e has {}",
                xi.len(),
                e.len()
            )));
        }
        Ok(SymbolSample { xi, tau, s, e })
    }

    /// `ξ_{e,1} = ⟨ξ, e⟩`.
    pub fn xi_e1(&self) -> f64 {
        self.xi.iter().zip(&self.e).map(|(a, b)| a * b).sum()
    }

    /// `ξ'_e = ξ − ξ_{e,1} e`.
    pub fn xi_perp(&self) -> Vec<f64> {
        let p = self.xi_e1();
        self.xi.iter().zip(&self.e).map(|(x, e)| x - p * e).collect()
    }

    pub fn xi_perp_normsq(&self) -> f64 {
        let p = self.xi_e1();
        let total: f64 = self.xi.iter().map(|x| x * x).sum();
        (total - p * p).max(0.0)
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Modulation `τ + |ξ|^{2s}`.
    pub fn modulation(&self) -> f64 {
        self.tau + self.xi_norm().powf(2.0 * self.s)
    }
}

pub(crate) fn check_order(s: f64) -> Result<()> {
    if s > 0.5 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("s must lie in (1/2, 1], got {s}")))
    }
}

pub(crate) fn check_direction(e: &[f64]) -> Result<()> {
    let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if e.is_empty() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |e| = {norm}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition() {
        let e = vec![0.6, 0.8];
        let p = SymbolSample::new(vec![2.0, 1.0], -3.0, 1.0, e).unwrap();
        assert!((p.xi_e1() - 2.0).abs() < 1e-15);
        let perp = p.xi_perp();
        assert!((perp[0] * 0.6 + perp[1] * 0.8).abs() < 1e-15);
        assert!((p.xi_perp_normsq() - 1.0).abs() < 1e-14);
        assert!((p.modulation() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SymbolSample::new(vec![1.0, 0.0], 0.0, 0.5, vec![1.0, 0.0]).is_err());
        assert!(SymbolSample::new(vec![1.0, 0.0], 0.0, 0.75, vec![1.0, 0.1]).is_err());
        assert!(SymbolSample::new(vec![1.0], 0.0, 0.75, vec![1.0, 0.0]).is_err());
    }
}
