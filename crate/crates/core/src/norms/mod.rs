//! Adapted space-time norms and ratio checks of the estimates built on them.
//!
//! Every norm acts on the windowed trajectory `g = w(t)·u`: the spectrum is
//! the [`Window::default`](crate::spectral::Window) space-time transform, and
//! `X_k`, `Y_k^e`, the `Z_k` upper bound, `F^σ` and `N^σ` are evaluated from
//! it. Support conditions are gated: mass outside the required frequency
//! region beyond `support_tol` makes the norm `+∞` with a diagnostic.

mod estimates;
mod families;
mod mixed;
mod resolution;

pub use estimates::{verify_estimate, verify_estimate_with, EstimateKind, STABILITY_TOLERANCE};
pub use families::{FamilySpec, InputFamily};
pub use mixed::{mixed_norm, Exponent, MixedNormSpec};
pub use resolution::{
    f_sigma_norm, f_sigma_norm_with, inverse_schrodinger, n_sigma_norm, n_sigma_norm_with, schrodinger_operator,
    schrodinger_symbol, sigma_report, xk_norm, xk_norm_with, yk_norm, yk_norm_with, zk_upper, zk_upper_with,
    ConePiece, NormKind, NormOptions, NormReport, ZBranch,
};
