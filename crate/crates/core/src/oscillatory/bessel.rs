//! Bessel functions of integer and half-integer order and the Fourier
//! transform of the surface measure on the unit sphere.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{integrate, phase_panels, QuadratureOptions};
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 14.0;

fn check_order(nu: f64) -> Result<()> {
    if !(nu >= 0.0) || (2.0 * nu).fract() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel order must be a nonnegative multiple of 1/2, got {nu}"
        )));
    }
    Ok(())
}

/// Γ(z) for `z` a positive multiple of 1/2.
pub fn gamma_half_integer(z: f64) -> f64 {
    debug_assert!(z > 0.0 && (2.0 * z).fract() == 0.0);
    let (mut acc, mut w) = if z.fract() == 0.0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while w < z {
        acc *= w;
        w += 1.0;
    }
    acc
}

/// `x^{−ν} J_ν(x)` from the power series; finite at `x = 0`.
fn reduced_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5f64.powf(nu) / gamma_half_integer(nu + 1.0);
    let mut sum = term;
    for m in 1..200 {
        let m = m as f64;
        term *= -q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion. Terminates (and is exact) for half-integer ν.
fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = x - (0.5 * nu + 0.25) * PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let terminating = nu.fract() != 0.0;
    let mut last = f64::INFINITY;
    for k in 0..64 {
        let term = a / x.powi(k);
        if term == 0.0 || (!terminating && term.abs() > last) {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        let odd = (2 * k + 1) as f64;
        a *= (mu - odd * odd) / ((k + 1) as f64 * 8.0);
        if term.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_ν(x)` for `x ≥ 0` and `2ν ∈ ℕ`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("Bessel argument must be ≥ 0, got {x}")));
    }
    Ok(if x < switch(nu) {
        reduced_series(nu, x) * x.powf(nu)
    } else {
        asymptotic(nu, x)
    })
}

/// Crossover to the Hankel form; the half-integer expansion is exact and
/// needs no large argument.
fn switch(nu: f64) -> f64 {
    if nu.fract() != 0.0 {
        2.0 + nu
    } else {
        SERIES_LIMIT
    }
}

/// `x^{−ν} J_ν(x)`, continuous at the origin.
pub fn bessel_j_reduced(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    Ok(reduced_unchecked(nu, x.abs()))
}

pub(crate) fn reduced_unchecked(nu: f64, x: f64) -> f64 {
    if x < switch(nu) {
        reduced_series(nu, x)
    } else {
        asymptotic(nu, x) / x.powf(nu)
    }
}

/// Surface area of `S^{n−1}`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n as f64 / 2.0)
}

/// `∫_{S^{n−1}} e^{iρθ₁} dθ` in closed form: `(2π)^{n/2} ρ^{−ν} J_ν(ρ)`, `ν = (n−2)/2`.
pub fn sphere_phase_bessel(rho: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    Ok(sphere_kernel(rho, n))
}

pub(crate) fn sphere_kernel(rho: f64, n: usize) -> f64 {
    let nu = 0.5 * (n as f64 - 2.0);
    (2.0 * PI).powf(n as f64 / 2.0) * reduced_unchecked(nu, rho.abs())
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "the spherical reduction needs n ≥ 2, got {n}"
        )));
    }
    Ok(())
}

/// `∫_{S^{n−1}} e^{iρθ₁} dθ` by adaptive quadrature over the polar angle:
/// `|S^{n−2}| ∫_0^π e^{iρ cos φ} sin^{n−2} φ dφ`.
pub fn sphere_phase_integral(rho: f64, n: usize) -> Result<Complex64> {
    check_dim(n)?;
    if !(rho >= 0.0) {
        return Err(Error::InvalidArgument(format!("ρ must be ≥ 0, got {rho}")));
    }
    let slice = if n == 2 { 2.0 } else { sphere_area(n - 1) };
    let power = (n - 2) as i32;
    let breaks = phase_panels(0.0, PI, 4, |_| rho);
    let options = QuadratureOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        ..Default::default()
    };
    let q = integrate(
        |phi| Complex64::from_polar(phi.sin().powi(power), rho * phi.cos()),
        &breaks,
        &options,
    )?;
    Ok(q.value * slice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half_integer(1.0), 1.0);
        assert_eq!(gamma_half_integer(5.0), 24.0);
        assert!((gamma_half_integer(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(2.5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn half_integer_orders_match_elementary_forms() {
        for i in 1..400 {
            let x = 0.137 * i as f64;
            let j_half = (2.0 / (PI * x)).sqrt() * x.sin();
            let j_three_halves = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((bessel_j(0.5, x).unwrap() - j_half).abs() < 1e-12, "x = {x}");
            assert!((bessel_j(1.5, x).unwrap() - j_three_halves).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn integer_orders_at_reference_points() {
        // J0, J1 zeros and values from standard tables.
        assert!(bessel_j(0.0, 2.404_825_557_695_773).unwrap().abs() < 1e-13);
        assert!(bessel_j(0.0, 30.634_606_468_431_976).unwrap().abs() < 1e-12);
        assert!(bessel_j(1.0, 3.831_705_970_207_512).unwrap().abs() < 1e-13);
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1.0, 20.0).unwrap() - 0.066_833_124_175_850_05).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for nu in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let a = reduced_series(nu, SERIES_LIMIT);
            let b = asymptotic(nu, SERIES_LIMIT) / SERIES_LIMIT.powf(nu);
            assert!((a - b).abs() < 1e-11, "ν = {nu}: {a} vs {b}");
        }
    }

    #[test]
    fn sphere_area_low_dims() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
