//! Weak-coupling rate-equation aptitudes on a dressed-state basis.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Jump rates between dressed states together with the per-state photon flux.
#[derive(Debug, Clone)]
pub struct RateModel {
    /// Photon flux `ε'_μ` carried by each dressed state (photons/s).
    pub flux_per_state: DVector<f64>,
    /// Rate matrix, columns summing to zero.
    pub jumps: DMatrix<f64>,
    /// Stationary populations.
    pub stationary: DVector<f64>,
}

/// `κ₁ = Σ ε'_μ p_μ` and
/// `κ₂ = −2 Σ (ε'_{μ₁} − κ₁) [Γ⁺]_{μ₁μ₂} (ε'_{μ₂} − κ₁) p_{μ₂}`.
pub fn rate_equation_aptitudes(model: &RateModel) -> Result<(f64, f64)> {
    let n = model.flux_per_state.len();
    let g = &model.jumps;
    if g.nrows() != n || g.ncols() != n || model.stationary.len() != n {
        return Err(Error::Domain("rate model dimensions disagree".into()));
    }
    let scale = g.abs().max().max(f64::MIN_POSITIVE);
    for j in 0..n {
        if g.column(j).sum().abs() > 1e-10 * scale {
            return Err(Error::Domain(format!("column {j} of the rate matrix does not sum to zero")));
        }
    }
    if (model.stationary.sum() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("stationary populations are not normalised".into()));
    }
    let svd = g.clone().svd(true, true);
    let null_dims = svd.singular_values.iter().filter(|s| **s <= 1e-10 * scale).count();
    if null_dims > 1 {
        return Err(Error::DegenerateGenerator(format!("rate matrix has {null_dims} null directions")));
    }
    let kappa1 = model.flux_per_state.dot(&model.stationary);
    let pinv = svd
        .pseudo_inverse(1e-10 * scale)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let centered = model.flux_per_state.map(|f| f - kappa1);
    let weighted = centered.component_mul(&model.stationary);
    let kappa2 = -2.0 * centered.dot(&(pinv * weighted));
    Ok((kappa1, kappa2))
}

/// Resonant two-level system in the dressed basis |±⟩: fluxes ∓Ω/2 on the
/// phase-transfer channel, decay mixing the dressed states at rate γ/4.
pub fn two_level_resonant_rate_model(gamma: f64, omega: f64) -> RateModel {
    RateModel {
        flux_per_state: DVector::from_vec(vec![-0.5 * omega, 0.5 * omega]),
        jumps: DMatrix::from_row_slice(2, 2, &[-0.25 * gamma, 0.25 * gamma, 0.25 * gamma, -0.25 * gamma]),
        stationary: DVector::from_vec(vec![0.5, 0.5]),
    }
}
