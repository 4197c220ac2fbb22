//! Flux vector, diffusion matrix and phase-space matrix at a propagation point.

use crate::engine::analytic::{two_level_gain_rates, two_level_lambda_derivatives, two_level_leading_covariance, two_level_rabi_jacobian};
use crate::engine::perturb::perturbative_with_rabi;
use crate::engine::{lambda_derivatives, LambdaStrategy};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::types::{Drive, FlowCoefficients, Mat2, TwoLevelParams, Vec2};
use std::f64::consts::FRAC_PI_2;

/// Phases of the balanced rotated measurement basis.
pub const ROTATED_PHASES: [f64; 2] = [FRAC_PI_2, 0.0];

/// Where the per-emitter rates come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientSource {
    /// Closed forms for two-level, exact perturbation for four-level.
    Exact,
    /// A numeric λ strategy for I and D, with central differences in Ω for C.
    Numeric(LambdaStrategy),
}

/// Two-level flux `ρ_A𝒜t_M κ_k` with `Ω₁, Ω₂` and phase difference `phi`.
///
/// `I_k = −ρ_A𝒜t_M [γ(Ω_k² + Ω₁Ω₂cos φ) ± 2εΩ₁Ω₂ sin φ] / (4ε² + 2Ω_φ² + γ²)`.
pub fn flux_vector_two_level(params: &TwoLevelParams, rabi: [f64; 2], phi: f64) -> Vec2 {
    let rates = two_level_gain_rates(params, &Drive::new(rabi, [phi, 0.0]));
    Vec2::from(rates) * params.ensemble.prefactor()
}

/// Small-γ leading diffusion of the two-level model, photons²/m.
pub fn diffusion_leading_two_level(params: &TwoLevelParams, rabi: [f64; 2], phi: f64) -> Mat2 {
    two_level_leading_covariance(params, &Drive::new(rabi, [phi, 0.0])) * params.ensemble.prefactor()
}

fn chain_rule(model: &Model, means: &Vec2, d_omega: [[f64; 2]; 2]) -> Result<Mat2> {
    let g = model.coupling();
    let p = model.ensemble().prefactor();
    let mut c = Mat2::zeros();
    for j in 0..2 {
        if !(means[j] > 0.0) {
            return Err(Error::SingularPhaseSpace { mode: j });
        }
        // ∂/∂n̄_j = (Ω_j/(2n̄_j)) ∂/∂Ω_j with Ω_j = g√n̄_j
        let factor = g / (2.0 * means[j].sqrt());
        for k in 0..2 {
            c[(k, j)] = p * factor * d_omega[k][j];
        }
    }
    Ok(c)
}

/// Per-emitter gain rates only; defined for γ = 0 as well.
pub fn gain_rates(model: &Model, drive: Drive) -> Result<[f64; 2]> {
    match model {
        Model::TwoLevel(p) => Ok(two_level_gain_rates(p, &drive)),
        Model::FourLevel(_) => Ok(perturbative_with_rabi(&model.spec(drive))?.0.gain_rates()),
    }
}

/// Flux vector in photons/m at mode means `means`.
pub fn flux(model: &Model, means: &Vec2, phases: &Vec2) -> Result<Vec2> {
    let drive = Drive::from_modes(model.coupling(), means, phases);
    Ok(Vec2::from(gain_rates(model, drive)?) * model.ensemble().prefactor())
}

/// I, D, C from the exact per-emitter rates.
pub fn coefficients(model: &Model, means: &Vec2, phases: &Vec2) -> Result<FlowCoefficients> {
    let drive = Drive::from_modes(model.coupling(), means, phases);
    let p = model.ensemble().prefactor();
    let (gain, cov, d_omega) = match model {
        Model::TwoLevel(params) => {
            let lam = two_level_lambda_derivatives(params, &drive)?;
            (
                two_level_gain_rates(params, &drive),
                lam.covariance_rates(),
                two_level_rabi_jacobian(params, &drive),
            )
        }
        Model::FourLevel(_) => {
            let (lam, mixed) = perturbative_with_rabi(&model.spec(drive))?;
            let mut d = [[0.0; 2]; 2];
            for k in 0..2 {
                for j in 0..2 {
                    d[k][j] = lam.counting_sign * mixed[k][j].im;
                }
            }
            (lam.gain_rates(), lam.covariance_rates(), d)
        }
    };
    let out = FlowCoefficients {
        flux: Vec2::from(gain) * p,
        diffusion: Mat2::new(cov[0][0], cov[0][1], cov[1][0], cov[1][1]) * p,
        phase_space: chain_rule(model, means, d_omega)?,
    };
    out.validate()?;
    Ok(out)
}

/// Relative Ω step for the numeric phase-space matrix.
const RABI_STEP: f64 = 1e-4;

/// I, D from a numeric λ strategy and C from Richardson-extrapolated Ω differences.
pub fn coefficients_numeric(model: &Model, means: &Vec2, phases: &Vec2, strategy: LambdaStrategy) -> Result<FlowCoefficients> {
    let drive = Drive::from_modes(model.coupling(), means, phases);
    let p = model.ensemble().prefactor();
    let lam = lambda_derivatives(&model.spec(drive), strategy)?;
    let gain_at = |d: Drive| -> Result<[f64; 2]> { Ok(lambda_derivatives(&model.spec(d), strategy)?.gain_rates()) };
    let mut d_omega = [[0.0; 2]; 2];
    for j in 0..2 {
        let h = RABI_STEP * drive.rabi[j].max(drive.rabi[0].hypot(drive.rabi[1]));
        let diff = |h: f64| -> Result<[f64; 2]> {
            let mut up = drive;
            let mut dn = drive;
            up.rabi[j] += h;
            dn.rabi[j] -= h;
            let (a, b) = (gain_at(up)?, gain_at(dn)?);
            Ok([(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)])
        };
        let (coarse, fine) = (diff(h)?, diff(0.5 * h)?);
        for k in 0..2 {
            d_omega[k][j] = (4.0 * fine[k] - coarse[k]) / 3.0;
        }
    }
    let cov = lam.covariance_rates();
    let out = FlowCoefficients {
        flux: Vec2::from(lam.gain_rates()) * p,
        diffusion: Mat2::new(cov[0][0], cov[0][1], cov[1][0], cov[1][1]) * p,
        phase_space: chain_rule(model, means, d_omega)?,
    };
    out.validate()?;
    Ok(out)
}

pub fn coefficients_from(model: &Model, means: &Vec2, phases: &Vec2, source: CoefficientSource) -> Result<FlowCoefficients> {
    match source {
        CoefficientSource::Exact => coefficients(model, means, phases),
        CoefficientSource::Numeric(s) => coefficients_numeric(model, means, phases, s),
    }
}

/// Flux vector with numeric χ-derivatives.
pub fn flux_vector_numeric(model: &Model, means: &Vec2, phases: &Vec2, strategy: LambdaStrategy) -> Result<Vec2> {
    let drive = Drive::from_modes(model.coupling(), means, phases);
    let lam = lambda_derivatives(&model.spec(drive), strategy)?;
    Ok(Vec2::from(lam.gain_rates()) * model.ensemble().prefactor())
}

pub fn diffusion_matrix(model: &Model, means: &Vec2, phases: &Vec2) -> Result<Mat2> {
    Ok(coefficients(model, means, phases)?.diffusion)
}

pub fn phase_space_matrix(model: &Model, means: &Vec2, phases: &Vec2) -> Result<Mat2> {
    Ok(coefficients(model, means, phases)?.phase_space)
}

/// Coefficients seen in the balanced rotated basis at total photon number `n_plus`.
pub fn rotated_coefficients(model: &Model, n_plus: f64, source: CoefficientSource) -> Result<FlowCoefficients> {
    let m = Vec2::new(0.5 * n_plus, 0.5 * n_plus);
    coefficients_from(model, &m, &Vec2::from(ROTATED_PHASES), source)
}
