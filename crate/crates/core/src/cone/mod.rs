//! The cone multiplier `N_e`, the weight `K`, the factorization of the
//! Schrödinger symbol along a cone direction, and ratio sweeps over admissible
//! phase-space points.

mod multiplier;
mod params;
mod sweeps;

pub use multiplier::{k_weight, n_multiplier, s1_factorization_check};
pub use params::{sample_admissible, ConeParams, MainCutoffs};
pub use sweeps::{
    factorization_decomposition, factorization_envelope, factorization_lhs, factorization_main,
    factorization_samples, factorization_sweep, verify_n_properties,
};
