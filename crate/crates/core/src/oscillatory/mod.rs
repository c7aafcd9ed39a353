//! Stationary-phase and measure estimates evaluated by quadrature.

mod bessel;
mod decay;
mod dispersive;
mod measure;
mod profile;
mod quadrature;
mod table;

pub use bessel::{
    bessel_j, bessel_j_reduced, gamma_half_integer, sphere_area, sphere_phase_bessel,
    sphere_phase_integral,
};
pub use decay::{fit_decay, fit_dispersive_decay, loglog_fit, prefactor_ratio, DecayFit, DecayProbe, LogRange};
pub use dispersive::{
    dispersive_integral, dispersive_integral_with, dispersive_mass, dispersive_mass_with,
    sup_over_x, sup_over_x_with, Cutoff, PhaseIntegralSpec,
};
pub use measure::{sigma_bound, sigma_measure, sigma_measure_s1, sigma_sweep};
pub use profile::{far_field_sweep, l1_sup_profile, log_dense_grid, SupProfile, SupProfileSpec, TAIL_THETA};
pub use quadrature::{integrate, phase_panels, Quadrature, QuadratureOptions};
pub use table::{SweepRow, SweepTable};
