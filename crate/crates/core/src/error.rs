use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate generator: {0}")]
    DegenerateGenerator(String),

    #[error("singular phase-space matrix: mode {mode} is unoccupied")]
    SingularPhaseSpace { mode: usize },

    #[error("integration unstable at z = {z:.6e} m: {reason}")]
    IntegrationInstability { z: f64, reason: String },

    #[error("estimator saturated: normalized argument {0} outside [-1, 1]")]
    EstimatorSaturation(f64),

    #[error("singular covariance (condition number {0:.3e})")]
    SingularCovariance(f64),

    #[error("numerical quality: {0}")]
    Numerical(String),

    #[error("grid point {index} ({value:.6e}): {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        source: Box<Error>,
    },
}

impl Error {
    /// Innermost error, unwrapping grid-point tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
