use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth::Transition;

/// Directions are placed so every unit vector lies within this fraction of
/// `arccos(𝔠)` of some direction.
const COVER_FRACTION: f64 = 0.8;
/// `ψ_e` saturates at this fraction of `arccos(𝔠)`.
const FULL_FRACTION: f64 = 0.9;

/// Finite direction set `𝓔 ⊂ S^{n−1}` with a smooth partition of unity
/// `ϑ_e = ψ_e / Σ ψ`, where `ψ_e(ω)` rises from 0 at `⟨ω,e⟩ = 𝔠` to 1 at
/// `⟨ω,e⟩ = full`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeAtlas {
    pub dim: usize,
    pub margin: f64,
    pub full: f64,
    pub transition: Transition,
    pub directions: Vec<Vec<f64>>,
}

pub fn build_cone_atlas(n: usize, margin: f64) -> Result<ConeAtlas> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "cone atlas needs n >= 2, got {n}"
        )));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cone margin must lie in (0, 1), got {margin}"
        )));
    }
    let theta = margin.acos();
    let cover = (COVER_FRACTION * theta).cos();
    let full = (FULL_FRACTION * theta).cos();
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[axis] = sign;
            directions.push(e);
        }
    }
    for w in sphere_samples(n) {
        if !directions.iter().any(|e| dot(e, &w) >= cover) {
            directions.push(w);
        }
    }
    Ok(ConeAtlas {
        dim: n,
        margin,
        full,
        transition: Transition::Exponential,
        directions,
    })
}

/// Cone margin `𝔠` used when none is given: 0.5 on the circle, 0.35 above.
pub fn default_cone_margin(n: usize) -> f64 {
    if n <= 2 {
        0.5
    } else {
        0.35
    }
}

fn sphere_samples(n: usize) -> Vec<Vec<f64>> {
    match n {
        2 => {
            let m = 20_000;
            (0..m)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / m as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        3 => {
            let m = 20_000;
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a71a5);
            (0..50_000)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    normalized(&v).unwrap_or_else(|| {
                        let mut e = vec![0.0; n];
                        e[0] = 1.0;
                        e
                    })
                })
                .collect()
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let r = dot(v, v).sqrt();
    (r > 0.0).then(|| v.iter().map(|x| x / r).collect())
}

impl ConeAtlas {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, index: usize) -> &[f64] {
        &self.directions[index]
    }

    /// `(axis, sign)` when direction `index` is a coordinate axis.
    pub fn axis(&self, index: usize) -> Option<(usize, f64)> {
        axis_of(&self.directions[index])
    }

    fn psi(&self, omega: &[f64], e: &[f64]) -> f64 {
        self.transition
            .step((dot(omega, e) - self.margin) / (self.full - self.margin))
    }

    /// `ϑ_e(ξ/|ξ|)` for every `e`; uniform weights at `ξ = 0`.
    pub fn weights(&self, xi: &[f64]) -> Vec<f64> {
        let Some(omega) = normalized(xi) else {
            return vec![1.0 / self.len() as f64; self.len()];
        };
        let psi: Vec<f64> = self.directions.iter().map(|e| self.psi(&omega, e)).collect();
        let total: f64 = psi.iter().sum();
        psi.into_iter().map(|p| p / total).collect()
    }

    pub fn weight(&self, index: usize, xi: &[f64]) -> f64 {
        self.weights(xi)[index]
    }

    /// `⟨ξ, e⟩ ≥ 𝔠|ξ|`.
    pub fn in_cone(&self, index: usize, xi: &[f64]) -> bool {
        dot(xi, &self.directions[index]) >= self.margin * dot(xi, xi).sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("atlas serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

pub(crate) fn axis_of(e: &[f64]) -> Option<(usize, f64)> {
    let mut found = None;
    for (i, &v) in e.iter().enumerate() {
        if (v.abs() - 1.0).abs() < 1e-12 {
            if found.is_some() {
                return None;
            }
            found = Some((i, v.signum()));
        } else if v.abs() > 1e-12 {
            return None;
        }
    }
    found
}
