use crate::error::{Error, Result};

/// `N = ((−τ)^{1/s} − |ζ'|²)^{1/2}`, the `e`-frequency at which `(ξ, τ)` meets
/// the characteristic.
pub fn n_multiplier(zeta_normsq: f64, tau: f64, s: f64) -> Result<f64> {
    if !(zeta_normsq >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "|ζ'|² must be nonnegative, got {zeta_normsq}"
        )));
    }
    if !(tau < 0.0) {
        return Err(Error::OutsideDomain(format!("N needs τ < 0, got τ = {tau}")));
    }
    let top = (-tau).powf(1.0 / s);
    if !(top > zeta_normsq) {
        return Err(Error::OutsideDomain(format!(
            "N needs (−τ)^(1/s) > |ζ'|², got {top} <= {zeta_normsq}"
        )));
    }
    Ok((top - zeta_normsq).sqrt())
}

/// `K = 2s (N² + |ξ'|²)^{s−1} N`.
pub fn k_weight(zeta_normsq: f64, tau: f64, s: f64) -> Result<f64> {
    let n = n_multiplier(zeta_normsq, tau, s)?;
    Ok(2.0 * s * (n * n + zeta_normsq).powf(s - 1.0) * n)
}

/// `|−(|ξ|² + τ) − (N + ξ_{e,1})(N − ξ_{e,1})|` at `s = 1`.
pub fn s1_factorization_check(xi: &[f64], tau: f64, e: &[f64]) -> Result<f64> {
    crate::spectral::check_direction(e)?;
    if xi.len() != e.len() {
        return Err(Error::ShapeMismatch("ξ and e differ in dimension".into()));
    }
    let xi1: f64 = xi.iter().zip(e).map(|(a, b)| a * b).sum();
    let normsq: f64 = xi.iter().map(|x| x * x).sum();
    let perp = (normsq - xi1 * xi1).max(0.0);
    let n = n_multiplier(perp, tau, 1.0)?;
    Ok((-(normsq + tau) - (n + xi1) * (n - xi1)).abs())
}
