//! Picard/Duhamel solver for the fractional Schrödinger model equation and its
//! trilinear generalizations.

mod config;
mod duhamel;
mod nonlinearity;
mod picard;

pub use config::{
    gaussian_data, DataSection, EquationSection, GridSection, OutputSection, PicardSection, SolveConfig, TimeSection,
};
pub use duhamel::{duhamel_integral, origin_frame, TimeRule};
pub use nonlinearity::{apply_nonlinearity, trilinear_form, Conjugation, NonlinearTerm, NonlinearitySpec};
pub use picard::{
    continuous_dependence_probe, cutoff_weights, duhamel_map, free_evolution, nonlinearity_frames, picard_solve,
    quadrature_check, residual_check, DependenceProbe, IterationRecord, QuadratureCheck, SolveReport, SolveResult,
    SolveStatus, DIVERGENCE_RUN, RESIDUAL_TIME,
};
