//! Smooth transition profiles shared by the bump functions, the temporal
//! taper and the solver cutoff.

use serde::{Deserialize, Serialize};

/// Shape of the monotone `0 → 1` transition on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "order")]
pub enum Transition {
    /// `exp(−1/x)`-based, C^∞.
    Exponential,
    /// Polynomial smoothstep with `order` continuous derivatives.
    Polynomial(u32),
}

impl Default for Transition {
    fn default() -> Self {
        Transition::Exponential
    }
}

impl Transition {
    /// 0 for `x ≤ 0`, 1 for `x ≥ 1`, monotone in between, and
    /// `step(x) + step(1 − x) = 1`.
    pub fn step(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match *self {
            Transition::Exponential => {
                let a = (-1.0 / x).exp();
                let b = (-1.0 / (1.0 - x)).exp();
                a / (a + b)
            }
            Transition::Polynomial(order) if x > 0.5 => 1.0 - smoothstep(1.0 - x, order),
            Transition::Polynomial(order) => smoothstep(x, order),
        }
    }
}

/// Generalized smoothstep `S_N` (C^N at both ends), symmetric about 1/2.
fn smoothstep(x: f64, order: u32) -> f64 {
    let n = order as i64;
    // S_N(x) = x^{N+1} Σ_{k=0}^{N} C(N+k, k) C(2N+1, N−k) (−x)^k
    let mut sum = 0.0;
    for k in 0..=n {
        sum += binom(n + k, k) * binom(2 * n + 1, n - k) * (-x).powi(k as i32);
    }
    x.powi((n + 1) as i32) * sum
}

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Even plateau bump: 1 on `[−inner, inner]`, 0 outside `(−outer, outer)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub inner: f64,
    pub outer: f64,
    pub transition: Transition,
}

impl Plateau {
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= self.inner {
            1.0
        } else if r >= self.outer {
            0.0
        } else {
            self.transition
                .step((self.outer - r) / (self.outer - self.inner))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_are_symmetric() {
        for t in [Transition::Exponential, Transition::Polynomial(2), Transition::Polynomial(5)] {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let s = t.step(x) + t.step(1.0 - x);
                assert!((s - 1.0).abs() < 1e-14, "{t:?} at {x}: {s}");
            }
        }
    }

    #[test]
    fn polynomial_smoothstep_low_orders() {
        // S_1 = 3x² − 2x³
        let x: f64 = 0.3;
        assert!((smoothstep(x, 1) - (3.0 * x * x - 2.0 * x.powi(3))).abs() < 1e-14);
        // S_2 = 6x⁵ − 15x⁴ + 10x³
        assert!((smoothstep(x, 2) - (6.0 * x.powi(5) - 15.0 * x.powi(4) + 10.0 * x.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn plateau_values() {
        let p = Plateau {
            inner: 1.0,
            outer: 2.0,
            transition: Transition::Exponential,
        };
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(-0.9), 1.0);
        assert_eq!(p.eval(2.5), 0.0);
        assert!((p.eval(1.5) - 0.5).abs() < 1e-14);
    }
}
