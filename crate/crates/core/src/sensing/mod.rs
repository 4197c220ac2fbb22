//! Observables, estimators and Fisher information of the measured photon counts.

pub mod benchmarks;
pub mod fisher;
pub mod observables;
pub mod sensitivity;

pub use benchmarks::{weak_dissipation_benchmarks, WeakDissipation, WEAK_DISSIPATION_LIMIT};
pub use fisher::{discrete_fisher, gaussian_fisher, gaussian_table, FisherResult, Grid2, MAX_CONDITION};
pub use observables::{
    intensity_estimate, phase_estimate, plus_minus_stats, rotation_estimate, MeasurementStatistics,
};
pub use sensitivity::{fisher_at, fisher_scan, FisherOptions, FisherPoint, REL_STEP};
