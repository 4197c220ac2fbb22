//! Full counting statistics of coherent light after propagation through
//! ensembles of dissipative emitters.
//!
//! The crate builds counting-field tilted Liouvillians, extracts cumulant
//! aptitudes (first and second counting-field derivatives of the dominant
//! eigenvalue), integrates the mean/covariance flow equations along the
//! propagation axis and turns the terminal photon statistics into Fisher
//! information for parameter estimation.
//!
//! Module map:
//!
//! * [`units`], [`types`]: unit conversion and validated value types.
//! * [`engine`]: tilted generators and the three eigenvalue-derivative strategies.
//! * [`flow`]: flow coefficients and RK4 integration in lab and rotated frames.
//! * [`sensing`]: observables, estimators, Gaussian/discrete Fisher information.
//! * [`models`]: model catalog and four-level dressed-state diagnostics.
//! * [`config`], [`scan`]: declarative scan configs, the batch runner and CSV output.

pub mod config;
pub mod engine;
pub mod error;
pub mod flow;
pub mod models;
pub mod scan;
pub mod sensing;
pub mod types;
pub mod units;

pub use error::{Error, Result};
pub use models::Model;
pub use types::{
    initial_coherent_state, CountingVector, CumulantAptitudes, Drive, FlowCoefficients,
    FourLevelParams, Mat2, PhotonModeSet, TwoLevelParams, Vec2, C64,
};

/// Crate version, written into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
