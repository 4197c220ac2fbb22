//! Flow equations for the measured-mode cumulants along the propagation axis.
//!
//! The default frame is the rotated one: both measured modes stay equally
//! occupied, so the phase-space matrix never sees an emptied mode. The lab
//! frame is kept for cross-checks.

pub mod coefficients;
pub mod export;
pub mod integrate;

pub use coefficients::{
    coefficients, coefficients_numeric, diffusion_matrix, flux, flux_vector_numeric, flux_vector_two_level,
    phase_space_matrix, rotated_coefficients, CoefficientSource, ROTATED_PHASES,
};
pub use export::{write_lab_csv, write_rotated_csv};
pub use integrate::{
    frame_to_lab, integrate_lab, integrate_lab_with, integrate_rotated, integrate_rotated_means, integrate_rotated_with,
    phase_from_rotation, LabTrajectory, RotatedTrajectory, DEFAULT_STEPS,
};
