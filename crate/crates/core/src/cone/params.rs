use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_direction, check_order, SymbolSample};

/// Constants of the cone estimates: the dyadic scale `k`, shell width `C₁`, cone
/// depth `c̃`, modulation depth `c'`, order `s` and direction `e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub k: i32,
    pub c1: f64,
    pub c_tilde: f64,
    pub c_prime: f64,
    pub s: f64,
    pub e: Vec<f64>,
    #[serde(default)]
    pub main_cutoffs: MainCutoffs,
}

/// Cutoffs carried by the main term of the factorization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MainCutoffs {
    /// `η^+_{[k−c̃,k+c̃]}(ξ_{e,1}) η_{≤2sk−c'}(τ + |ξ|^{2s})`, the cutoffs of the
    /// left-hand side.
    #[default]
    Source,
    /// `η^+_{[k−c̃,k+c̃]}(N) η_{≤k−c'}(ξ_{e,1} − N)`, the same cutoffs moved onto
    /// the characteristic coordinates. The mismatch adds an error of size
    /// `2^{c'}·2^{−2sk}` near `|τ + |ξ|^{2s}| ≈ 2^{2sk−c'}`, so the envelope
    /// constant only settles once `sk ≫ c'`.
    Characteristic,
}

impl ConeParams {
    /// `C₁ = 2`, `c̃ = 1`, `c' = 6`, `e = e₁`.
    pub fn new(k: i32, s: f64, n: usize) -> Self {
        let mut e = vec![0.0; n.max(1)];
        e[0] = 1.0;
        ConeParams {
            k,
            c1: 2.0,
            c_tilde: 1.0,
            c_prime: 6.0,
            s,
            e,
            main_cutoffs: MainCutoffs::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.s)?;
        check_direction(&self.e)?;
        if !(self.c1 >= 1.0) || !(self.c_tilde > 0.0) || !(self.c_prime > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need C1 >= 1, c~ > 0, c' > 0; got C1 = {}, c~ = {}, c' = {}",
                self.c1, self.c_tilde, self.c_prime
            )));
        }
        let floor = self.c_tilde + self.c1.log2() + 4.0;
        if self.c_prime < floor {
            return Err(Error::InvalidArgument(format!(
                "c' = {} is below c~ + log2 C1 + 4 = {floor}",
                self.c_prime
            )));
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        2f64.powi(self.k)
    }

    /// `2^{2sk − c'}`.
    pub fn modulation_cap(&self) -> f64 {
        2f64.powf(2.0 * self.s * self.k as f64 - self.c_prime)
    }

    pub fn is_admissible(&self, p: &SymbolSample) -> bool {
        let r = p.xi_norm();
        let scale = self.scale();
        r >= scale / self.c1
            && r <= self.c1 * scale
            && p.xi_e1() >= 2f64.powf(self.k as f64 - self.c_tilde)
            && p.modulation().abs() <= self.modulation_cap()
    }

    /// Point with `ξ = 2^k (u₁ e + r' w)` and `τ = 2^{2sk}(a − |u|^{2s})`.
    pub(crate) fn point(&self, u1: f64, r_perp: f64, w: &[f64], a: f64) -> SymbolSample {
        let scale = self.scale();
        let xi: Vec<f64> = self
            .e
            .iter()
            .zip(w)
            .map(|(e, w)| scale * (u1 * e + r_perp * w))
            .collect();
        let u_norm = (u1 * u1 + r_perp * r_perp).sqrt();
        let tau = 2f64.powf(2.0 * self.s * self.k as f64) * (a - u_norm.powf(2.0 * self.s));
        SymbolSample {
            xi,
            tau,
            s: self.s,
            e: self.e.clone(),
        }
    }
}

/// Random unit vector orthogonal to `e` (zero when `n = 1`).
pub(crate) fn random_perp(rng: &mut ChaCha8Rng, e: &[f64]) -> Vec<f64> {
    if e.len() == 1 {
        return vec![0.0];
    }
    loop {
        let mut v: Vec<f64> = (0..e.len()).map(|_| rng.sample(StandardNormal)).collect();
        let p: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(e).for_each(|(a, b)| *a -= p * b);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform draws in the admissible box, in the coordinates
/// `(ξ_{e,1}, |ξ'|, τ + |ξ|^{2s})` rescaled by `(2^k, 2^k, 2^{2sk})`.
///
/// The same seed yields the same normalized points at every `k`.
pub fn sample_admissible(params: &ConeParams, count: usize, seed: u64) -> Result<Vec<SymbolSample>> {
    params.validate()?;
    let cap = 2f64.powf(-params.c_prime);
    let physical_cap = params.modulation_cap();
    if !(physical_cap.is_normal() && cap.is_normal()) {
        return Err(Error::EmptyAdmissibleSet(format!(
            "modulation window 2^(2sk - c') = {physical_cap:e} is not representable"
        )));
    }
    let lo1 = 2f64.powf(-params.c_tilde);
    let hi = params.c1;
    if lo1 > hi {
        return Err(Error::EmptyAdmissibleSet(format!(
            "cone condition needs |ξ| >= 2^(k - c~) > C1 2^k"
        )));
    }
    let n = params.e.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(Error::EmptyAdmissibleSet(format!(
                "accepted {} of {count} points after {tries} draws",
                out.len()
            )));
        }
        let u1 = rng.random_range(lo1..=hi);
        let rp = if n == 1 { 0.0 } else { rng.random_range(0.0..=hi) };
        let a = rng.random_range(-cap..=cap);
        let w = random_perp(&mut rng, &params.e);
        let r = (u1 * u1 + rp * rp).sqrt();
        if r < 1.0 / params.c1 || r > params.c1 {
            continue;
        }
        out.push(params.point(u1, rp, &w, a));
    }
    Ok(out)
}
