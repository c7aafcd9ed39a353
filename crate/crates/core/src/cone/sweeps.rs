use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::multiplier::{k_weight, n_multiplier};
use super::params::{random_perp, sample_admissible, ConeParams, MainCutoffs};
use crate::error::{Error, Result};
use crate::lp::BumpPair;
use crate::report::{RatioItem, RatioReport};
use crate::spectral::SymbolSample;

/// Ratios of the three cone-multiplier properties over admissible draws:
///
/// * `modulation_shift`: `(τ + |ξ'|^{2s}) / (−2^{2sk})`;
/// * `n_size`: `N / 2^k`;
/// * `xi1_gap`: `|ξ_{e,1} − N| / (2^{−k(2s−1)} |τ + |ξ|^{2s}|)`.
pub fn verify_n_properties(params: &ConeParams, num_samples: usize, seed: u64) -> Result<RatioReport> {
    let samples = sample_admissible(params, num_samples, seed)?;
    let k = params.k as f64;
    let s = params.s;
    let rows: Vec<Result<[Option<f64>; 3]>> = samples
        .par_iter()
        .map(|p| {
            let perp = p.xi_perp_normsq();
            let n = n_multiplier(perp, p.tau, s)?;
            let shift = (p.tau + perp.powf(s)) / -(2f64.powf(2.0 * s * k));
            let size = n / 2f64.powf(k);
            let a = p.modulation();
            let gap = (a != 0.0).then(|| (p.xi_e1() - n).abs() / (2f64.powf(-k * (2.0 * s - 1.0)) * a.abs()));
            Ok([Some(shift), Some(size), gap])
        })
        .collect();
    let mut items = vec![
        RatioItem::new("modulation_shift"),
        RatioItem::new("n_size"),
        RatioItem::new("xi1_gap"),
    ];
    let mut skipped = 0;
    for row in rows {
        let row = row?;
        for (item, v) in items.iter_mut().zip(row) {
            match v {
                Some(v) => item.push(v),
                None => skipped += 1,
            }
        }
    }
    let c_star = items.iter().map(RatioItem::bracket).fold(1.0, f64::max);
    Ok(RatioReport {
        lemma: "n_properties".into(),
        parameters: json!(params),
        samples: samples.len(),
        skipped,
        items,
        c_star,
        stable: None,
        notes: vec![],
    })
}

/// `η^+_{[lo, hi]}(r) = Σ_{m=lo}^{hi} φ(r/2^m)` restricted to `r > 0`.
fn band(bumps: &BumpPair, lo: f64, hi: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    bumps.eta(r * 2f64.powf(-hi)) - bumps.eta(r * 2f64.powf(1.0 - lo))
}

/// Cutoff multiplier `1_{|ξ'| ≤ C₁2^k} η^+_{[k−c̃,k+c̃]}(ξ_{e,1}) η_{≤2sk−c'}(a) / (a + i)`
/// with `a = τ + |ξ|^{2s}`.
pub fn factorization_lhs(p: &SymbolSample, params: &ConeParams, bumps: &BumpPair) -> Complex64 {
    let k = params.k as f64;
    let s = params.s;
    if p.xi_perp_normsq().sqrt() > params.c1 * 2f64.powf(k) {
        return Complex64::new(0.0, 0.0);
    }
    let a = p.modulation();
    let cut = band(bumps, k - params.c_tilde, k + params.c_tilde, p.xi_e1())
        * bumps.eta(a * 2f64.powf(params.c_prime - 2.0 * s * k));
    if cut == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    cut / Complex64::new(a, 1.0)
}

/// Main term `1_{τ+|ξ'|^{2s} ≤ −2^{2s(k−c')}} 1_{|ξ'| ≤ C₁2^k} · cut / (K (ξ_{e,1} − N + i 2^{−k(2s−1)}))`,
/// with `cut` chosen by [`MainCutoffs`].
pub fn factorization_main(p: &SymbolSample, params: &ConeParams, bumps: &BumpPair) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let k = params.k as f64;
    let s = params.s;
    let perp = p.xi_perp_normsq();
    if perp.sqrt() > params.c1 * 2f64.powf(k) {
        return zero;
    }
    if !(p.tau + perp.powf(s) <= -(2f64.powf(2.0 * s * (k - params.c_prime)))) {
        return zero;
    }
    let (Ok(n), Ok(kw)) = (n_multiplier(perp, p.tau, s), k_weight(perp, p.tau, s)) else {
        return zero;
    };
    let gap = p.xi_e1() - n;
    let cut = match params.main_cutoffs {
        MainCutoffs::Source => {
            band(bumps, k - params.c_tilde, k + params.c_tilde, p.xi_e1())
                * bumps.eta(p.modulation() * 2f64.powf(params.c_prime - 2.0 * s * k))
        }
        MainCutoffs::Characteristic => {
            band(bumps, k - params.c_tilde, k + params.c_tilde, n)
                * bumps.eta(gap * 2f64.powf(params.c_prime - k))
        }
    };
    if cut == 0.0 {
        return zero;
    }
    cut / (kw * Complex64::new(gap, 2f64.powf(-k * (2.0 * s - 1.0))))
}

/// `(main, E)` with `E = lhs − main`.
pub fn factorization_decomposition(
    xi: &[f64],
    tau: f64,
    params: &ConeParams,
) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    let p = SymbolSample::new(xi.to_vec(), tau, params.s, params.e.clone())?;
    let bumps = BumpPair::default();
    let lhs = factorization_lhs(&p, params, &bumps);
    let main = factorization_main(&p, params, &bumps);
    Ok((main, lhs - main))
}

/// `2^{−2sk} + (1 + |τ + |ξ|^{2s}|)^{−2}`.
pub fn factorization_envelope(p: &SymbolSample, k: i32) -> f64 {
    2f64.powf(-2.0 * p.s * k as f64) + (1.0 + p.modulation().abs()).powi(-2)
}

/// Draws covering the supports of both sides: `ξ_{e,1}/2^k ∈ [2^{−c̃−1}, 2^{c̃+1}]`,
/// `|ξ'|/2^k ∈ [0, C₁]`, and the modulation half uniform on
/// `±8·2^{2sk−c'}`, half log-uniform in magnitude down to `2^{−6}`.
pub fn factorization_samples(params: &ConeParams, count: usize, seed: u64) -> Result<Vec<SymbolSample>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = params.k as f64;
    let s = params.s;
    let lo1 = 2f64.powf(-params.c_tilde - 1.0);
    let hi1 = 2f64.powf(params.c_tilde + 1.0);
    let cap = 8.0 * params.modulation_cap();
    let unit = 2f64.powf(2.0 * s * k);
    let tiny = 2f64.powi(-6);
    if !(cap > tiny) {
        return Err(Error::EmptyAdmissibleSet(format!(
            "modulation window {cap:e} is below the sampling floor"
        )));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let u1 = rng.random_range(lo1..=hi1);
        let rp = if params.e.len() == 1 { 0.0 } else { rng.random_range(0.0..=params.c1) };
        let w = random_perp(&mut rng, &params.e);
        let a = if i % 2 == 0 {
            rng.random_range(-cap..=cap)
        } else {
            let mag = (rng.random_range(tiny.ln()..=cap.ln())).exp();
            if rng.random_bool(0.5) { mag } else { -mag }
        };
        out.push(params.point(u1, rp, &w, a / unit));
    }
    Ok(out)
}

/// Sweep of `|E| / envelope`; `c_star` is the largest ratio.
pub fn factorization_sweep(params: &ConeParams, count: usize, seed: u64) -> Result<RatioReport> {
    let samples = factorization_samples(params, count, seed)?;
    let bumps = BumpPair::default();
    let ratios: Vec<(f64, bool)> = samples
        .par_iter()
        .map(|p| {
            let lhs = factorization_lhs(p, params, &bumps);
            let main = factorization_main(p, params, &bumps);
            let e = (lhs - main).norm();
            (e / factorization_envelope(p, params.k), lhs.norm() > 0.0 || main.norm() > 0.0)
        })
        .collect();
    let mut item = RatioItem::new("error_envelope");
    let mut support = 0;
    for (r, active) in ratios {
        item.push(r);
        support += active as usize;
    }
    Ok(RatioReport {
        lemma: "factorization".into(),
        parameters: json!(params),
        samples: samples.len(),
        skipped: 0,
        c_star: item.max,
        items: vec![item],
        stable: None,
        notes: vec![format!("{support} draws inside the support of either side")],
    })
}
