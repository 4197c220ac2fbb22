//! Spectroscopic observables and their estimators.

use crate::error::{Error, Result};
use crate::types::PhotonModeSet;
use crate::units::HBAR;

/// Statistics of `n₊ = n₁ + n₂` and `n₋ = n₁ − n₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementStatistics {
    pub n_plus: f64,
    pub n_minus: f64,
    /// Polarisation rotation inferred from the means.
    pub theta: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    pub cov_pm: f64,
}

pub fn plus_minus_stats(state: &PhotonModeSet) -> MeasurementStatistics {
    let m = &state.means;
    let s = &state.covariance;
    let n_plus = m[0] + m[1];
    MeasurementStatistics {
        n_plus,
        n_minus: m[0] - m[1],
        theta: if n_plus > 0.0 { rotation_estimate(m[0], m[1]) } else { 0.0 },
        var_plus: s[(0, 0)] + s[(1, 1)] + 2.0 * s[(0, 1)],
        var_minus: s[(0, 0)] + s[(1, 1)] - 2.0 * s[(0, 1)],
        cov_pm: s[(0, 0)] - s[(1, 1)],
    }
}

/// Local-oscillator phase estimate `arcsin((n₁ − n₂)/(2√(n̄₀n̄_LO)))`.
pub fn phase_estimate(n1: f64, n2: f64, n0: f64, n_lo: f64) -> Result<f64> {
    if !(n0 > 0.0 && n_lo > 0.0) {
        return Err(Error::Domain(format!("probe and local-oscillator photon numbers must be positive ({n0}, {n_lo})")));
    }
    let arg = (n1 - n2) / (2.0 * (n0 * n_lo).sqrt());
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::EstimatorSaturation(arg));
    }
    Ok(arg.asin())
}

/// Polarisation rotation `arcsin((√n̄₂ − √n̄₁)/√(2n̄₊))`.
pub fn rotation_estimate(n1: f64, n2: f64) -> f64 {
    let n_plus = n1 + n2;
    ((n2.max(0.0).sqrt() - n1.max(0.0).sqrt()) / (2.0 * n_plus).sqrt()).clamp(-1.0, 1.0).asin()
}

/// Radiant intensity `ħωn/(t_M𝒜)` in W/m².
pub fn intensity_estimate(n: f64, omega: f64, t_m: f64, area: f64) -> f64 {
    HBAR * omega * n / (t_m * area)
}
