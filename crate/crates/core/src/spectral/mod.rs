//! Grids, fields, discrete Fourier transforms and Fourier multipliers.
//!
//! The continuum convention `𝓕f(ξ) = ∫ e^{−iξ·x} f(x) dx` is discretized on
//! the torus `[0, L)ⁿ` with forward kernel `e^{−iξ·x}·dxⁿ` and inverse kernel
//! `e^{+iξ·x}·L^{−n}`, so the roundtrip is exact. In time the space-time
//! transform uses `e^{+iτt}`, which places the free wave `e^{i(ξ·x + |ξ|^{2s}t)}`
//! on the characteristic `τ + |ξ|^{2s} = 0`.

mod fft;
mod field;
mod fractional;
pub mod fslb;
mod grid;
mod spectrum;
mod symbol;

pub use fft::{dft_forward, dft_inverse};
pub(crate) use fft::{fft_axis, forward_in_place, inverse_in_place};
pub use field::{Field, Trajectory};
pub use fractional::{
    apply_fractional, apply_multiplier, apply_multiplier_frames, fractional_symbol, homogeneous_sobolev_norm,
    linear_propagate, ZeroModePolicy,
};
pub use grid::Grid;
pub use symbol::SymbolSample;
pub(crate) use symbol::{check_direction, check_order};
pub use spectrum::{spacetime_dft, spacetime_inverse, SpacetimeSpectrum, Window};
