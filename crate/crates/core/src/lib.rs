//! A spectral laboratory for the fractional Schrödinger model equation
//!
//! ```text
//! (i∂_t + (−Δ)^s) u = (D^{−(2s−1)} |u|²) · D^{2s−1} u,     s ∈ (1/2, 1]
//! ```
//!
//! on a periodic truncation of ℝⁿ. The crate has two halves:
//!
//! * a Picard/Duhamel solver for the equation and its generalized trilinear
//!   nonlinearities ([`solver`]), built on FFT machinery in [`spectral`];
//! * numerical checks of the harmonic-analysis toolkit used to control the
//!   equation: Littlewood–Paley, modulation and box projections plus the cone
//!   atlas ([`lp`]), the cone multiplier `N_e` and weight `K` ([`cone`]), the
//!   adapted space-time norms and estimate ratio sweeps ([`norms`]), and
//!   stationary-phase / measure bounds evaluated by quadrature ([`oscillatory`]).
//!
//! Every inequality is checked as a measured ratio over a seeded family of
//! inputs. Constants are reported, never assumed.

pub mod cone;
pub mod error;
pub mod lp;
pub mod norms;
pub mod oscillatory;
pub mod report;
pub mod smooth;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
