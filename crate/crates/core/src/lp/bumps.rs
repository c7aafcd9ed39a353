use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth::{Plateau, Transition};

/// `η ≡ 1` on `[0, ETA_PLATEAU]` and `η = 0` from `ETA_EDGE` on.
pub const ETA_PLATEAU: f64 = 1.5;
pub const ETA_EDGE: f64 = 1.95;
/// `χ ≡ 1` on `[0, CHI_PLATEAU]` and `χ = 0` from `CHI_EDGE` on.
pub const CHI_PLATEAU: f64 = 1.0 / 3.0;
pub const CHI_EDGE: f64 = 2.0 / 3.0;

/// Littlewood-Paley bumps.
///
/// * `η`: even, 1 on `[−1.5, 1.5]`, vanishing outside `(−1.95, 1.95)`;
/// * `φ(r) = η(r) − η(2r)`, so `η(r) + Σ_{k≥1} φ(r/2^k) = 1` and
///   `Σ_{ℓ≤k} φ(r/2^ℓ) = η(r/2^k)` for `r ≠ 0`;
/// * `χ`: even box bump whose unit translates sum to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpPair {
    pub eta: Plateau,
    pub chi: Plateau,
}

impl Default for BumpPair {
    fn default() -> Self {
        Self::with_transition(Transition::Exponential)
    }
}

/// Bumps built from a polynomial smoothstep with `smoothness` continuous
/// derivatives.
pub fn build_bumps(smoothness: u32) -> Result<BumpPair> {
    if smoothness < 2 {
        return Err(Error::InvalidArgument(format!(
            "bump smoothness must be at least 2, got {smoothness}"
        )));
    }
    Ok(BumpPair::with_transition(Transition::Polynomial(smoothness)))
}

impl BumpPair {
    pub fn with_transition(transition: Transition) -> Self {
        BumpPair {
            eta: Plateau {
                inner: ETA_PLATEAU,
                outer: ETA_EDGE,
                transition,
            },
            chi: Plateau {
                inner: CHI_PLATEAU,
                outer: CHI_EDGE,
                transition,
            },
        }
    }

    pub fn eta(&self, r: f64) -> f64 {
        self.eta.eval(r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.eta(r) - self.eta(2.0 * r)
    }

    pub fn chi(&self, x: f64) -> f64 {
        self.chi.eval(x)
    }

    /// `φ(r/2^k)`.
    pub fn dyadic(&self, k: i32, r: f64) -> f64 {
        self.phi(r * 2f64.powi(-k))
    }

    /// `η(r/2^k)`, the symbol of `Δ_{≤k}`.
    pub fn dyadic_leq(&self, k: i32, r: f64) -> f64 {
        self.eta(r * 2f64.powi(-k))
    }

    /// Symbol of `Q_j` at modulation `a = τ + |ξ|^{2s}`.
    pub fn modulation(&self, j: u32, a: f64) -> f64 {
        if j == 0 {
            self.eta(a)
        } else {
            self.phi(a * 2f64.powi(-(j as i32)))
        }
    }

    /// `χ_{k;𝔩}(ξ) = Π_i χ((ξ^i − 2^k c^i)/2^k)` with `𝔩 = 2^k c`.
    pub fn box_symbol(&self, k: i32, cell: &[i64], xi: &[f64]) -> f64 {
        let scale = 2f64.powi(-k);
        xi.iter()
            .zip(cell)
            .map(|(x, &c)| self.chi(x * scale - c as f64))
            .product()
    }

    /// Support of `φ`.
    pub fn phi_support(&self) -> (f64, f64) {
        (self.eta.inner / 2.0, self.eta.outer)
    }

    /// Region where `φ ≡ 1`.
    pub fn phi_plateau(&self) -> (f64, f64) {
        (self.eta.outer / 2.0, self.eta.inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let b = BumpPair::default();
        assert_eq!(b.eta(0.5), 1.0);
        assert_eq!(b.eta(3.0), 0.0);
        assert_eq!(b.phi(1.5), 1.0);
        let r = 1.5;
        let total = b.eta(r) + (1..=20).map(|k| b.dyadic(k, r)).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_low_smoothness() {
        assert!(build_bumps(1).is_err());
        assert!(build_bumps(2).is_ok());
    }

    #[test]
    fn telescoping_dense() {
        for b in [BumpPair::default(), build_bumps(3).unwrap()] {
            for i in 0..5000 {
                let r = i as f64 * 1e-3 * 37.0;
                let total = b.eta(r) + (1..=40).map(|k| b.dyadic(k, r)).sum::<f64>();
                assert!((total - 1.0).abs() < 1e-12, "r={r}: {total}");
            }
        }
    }

    #[test]
    fn chi_translates_sum_to_one() {
        let b = BumpPair::default();
        for i in 0..4000 {
            let x = -2.0 + i as f64 * 1e-3;
            let total: f64 = (-6..=6).map(|l| b.chi(x - l as f64)).sum();
            assert!((total - 1.0).abs() < 1e-14, "x={x}: {total}");
        }
    }

    #[test]
    fn supports() {
        let b = BumpPair::default();
        let (lo, hi) = b.phi_support();
        assert_eq!(b.phi(lo * 0.999), 0.0);
        assert_eq!(b.phi(hi), 0.0);
        assert!(b.phi(lo * 1.01) > 0.0);
        let (p0, p1) = b.phi_plateau();
        assert_eq!(b.phi(p0), 1.0);
        assert_eq!(b.phi(p1), 1.0);
        // shells two apart never overlap
        assert!(hi < 4.0 * lo);
    }

    #[test]
    fn bumps_are_c2() {
        // second difference quotients stay bounded across the transitions
        let b = build_bumps(2).unwrap();
        let h = 1e-4;
        let mut max: f64 = 0.0;
        for i in 0..2000 {
            let r = 0.5 + i as f64 * 1e-3;
            let d2 = (b.phi(r + h) - 2.0 * b.phi(r) + b.phi(r - h)) / (h * h);
            max = max.max(d2.abs());
        }
        assert!(max < 1e3);
    }
}
