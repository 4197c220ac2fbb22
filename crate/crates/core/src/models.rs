//! Model catalog and the four-level dressed-state picture.

use crate::engine::generator::{four_level_spec, two_level_spec};
use crate::engine::{GeneratorSpec, LambdaStrategy, ModelTag, PropagationOptions};
use crate::error::{Error, Result};
use crate::types::{Drive, Ensemble, FourLevelParams, TwoLevelParams};
use std::fmt;
use std::str::FromStr;

/// A parameter that can be scanned or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamTag {
    /// ε_Δ for two-level, ε_b − ε_a for four-level.
    Detuning,
    /// γ for two-level, γ_b for four-level.
    Gamma,
    Density,
    OmegaS,
}

impl ParamTag {
    pub fn name(self) -> &'static str {
        match self {
            ParamTag::Detuning => "detuning",
            ParamTag::Gamma => "gamma",
            ParamTag::Density => "density",
            ParamTag::OmegaS => "omega_s",
        }
    }

    /// Floor for relative finite-difference steps when the value is 0.
    pub fn step_floor(self) -> f64 {
        match self {
            ParamTag::Detuning | ParamTag::OmegaS => 1e6,
            ParamTag::Gamma => 1e4,
            ParamTag::Density => 1.0,
        }
    }
}

impl fmt::Display for ParamTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detuning" | "probe_detuning" => Ok(ParamTag::Detuning),
            "gamma" | "gamma_b" => Ok(ParamTag::Gamma),
            "density" | "rho_a" => Ok(ParamTag::Density),
            "omega_s" => Ok(ParamTag::OmegaS),
            other => Err(Error::Config(format!(
                "unknown parameter '{other}' (expected detuning, gamma, density or omega_s)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    TwoLevel(TwoLevelParams),
    FourLevel(FourLevelParams),
}

impl Model {
    pub fn tag(&self) -> ModelTag {
        match self {
            Model::TwoLevel(_) => ModelTag::TwoLevel,
            Model::FourLevel(_) => ModelTag::FourLevel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::TwoLevel(p) => p.validate(),
            Model::FourLevel(p) => p.validate(),
        }
    }

    pub fn spec(&self, drive: Drive) -> GeneratorSpec {
        match self {
            Model::TwoLevel(p) => two_level_spec(p, drive),
            Model::FourLevel(p) => four_level_spec(p, drive),
        }
    }

    /// Per-mode coupling g with Ω_k = g√n̄_k.
    pub fn coupling(&self) -> f64 {
        match self {
            Model::TwoLevel(p) => p.coupling(),
            Model::FourLevel(p) => p.coupling(),
        }
    }

    /// Reference total photon number.
    pub fn n_ref(&self) -> f64 {
        match self {
            Model::TwoLevel(p) => p.n_ref,
            Model::FourLevel(p) => p.n_ref,
        }
    }

    pub fn ensemble(&self) -> &Ensemble {
        match self {
            Model::TwoLevel(p) => &p.ensemble,
            Model::FourLevel(p) => &p.ensemble,
        }
    }

    pub fn ensemble_mut(&mut self) -> &mut Ensemble {
        match self {
            Model::TwoLevel(p) => &mut p.ensemble,
            Model::FourLevel(p) => &mut p.ensemble,
        }
    }

    /// Drive of the balanced rotated basis at total photon number `n_plus`.
    pub fn rotated_drive(&self, n_plus: f64) -> Drive {
        Drive::rotated(self.coupling() * n_plus.max(0.0).sqrt())
    }

    /// Slowest relaxation rate of the emitter (sets the propagation burn-in).
    pub fn slowest_rate(&self) -> f64 {
        match self {
            Model::TwoLevel(p) => p.gamma,
            Model::FourLevel(p) => [p.gamma_b, p.gamma_c, p.gamma_d]
                .into_iter()
                .filter(|g| *g > 0.0)
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn propagation_options(&self, drive: Drive) -> PropagationOptions {
        PropagationOptions::for_rates(self.slowest_rate(), self.spec(drive).rate_scale)
    }

    pub fn default_strategy(&self) -> LambdaStrategy {
        LambdaStrategy::default_for(self.tag())
    }

    pub fn param(&self, tag: ParamTag) -> f64 {
        match (self, tag) {
            (Model::TwoLevel(p), ParamTag::Detuning) => p.detuning,
            (Model::TwoLevel(p), ParamTag::Gamma) => p.gamma,
            (Model::TwoLevel(_), ParamTag::OmegaS) => 0.0,
            (Model::FourLevel(p), ParamTag::Detuning) => p.probe_detuning(),
            (Model::FourLevel(p), ParamTag::Gamma) => p.gamma_b,
            (Model::FourLevel(p), ParamTag::OmegaS) => p.omega_s,
            (m, ParamTag::Density) => m.ensemble().density,
        }
    }

    pub fn set_param(&mut self, tag: ParamTag, value: f64) -> Result<()> {
        match (&mut *self, tag) {
            (Model::TwoLevel(p), ParamTag::Detuning) => p.detuning = value,
            (Model::TwoLevel(p), ParamTag::Gamma) => p.gamma = value,
            (Model::TwoLevel(_), ParamTag::OmegaS) => {
                return Err(Error::Config("omega_s is a four-level parameter".into()))
            }
            (Model::FourLevel(p), ParamTag::Detuning) => *p = p.with_probe_detuning(value),
            (Model::FourLevel(p), ParamTag::Gamma) => p.gamma_b = value,
            (Model::FourLevel(p), ParamTag::OmegaS) => p.omega_s = value,
            (m, ParamTag::Density) => m.ensemble_mut().density = value,
        }
        Ok(())
    }

    pub fn with_param(mut self, tag: ParamTag, value: f64) -> Result<Self> {
        self.set_param(tag, value)?;
        self.validate()?;
        Ok(self)
    }
}

impl From<TwoLevelParams> for Model {
    fn from(p: TwoLevelParams) -> Self {
        Model::TwoLevel(p)
    }
}

impl From<FourLevelParams> for Model {
    fn from(p: FourLevelParams) -> Self {
        Model::FourLevel(p)
    }
}

/// Partially diagonalised ladder |b⟩, |c⟩, |d⟩ seen by the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedStates {
    pub e_zero: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    /// Probe Rabi frequency onto the centre state.
    pub omega_zero: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl DressedStates {
    pub fn splitting(&self) -> f64 {
        self.e_plus - self.e_minus
    }
}

/// Dressed energies `ε_b ± ½√(Ω_C² + Ω_S²)`, `ε_b`, and the probe projections.
pub fn dressed_states(params: &FourLevelParams) -> Result<DressedStates> {
    let (c, s) = (params.omega_c, params.omega_s);
    let root = c.hypot(s);
    if root == 0.0 {
        return Err(Error::Domain("dressed basis is degenerate when omega_c = omega_s = 0".into()));
    }
    let e_b = params.detunings[1];
    let wp = params.omega_p_ref;
    Ok(DressedStates {
        e_zero: e_b,
        e_plus: e_b + 0.5 * root,
        e_minus: e_b - 0.5 * root,
        omega_zero: s / (2.0 * root) * wp,
        omega_plus: c / root * wp,
        omega_minus: -c / root * wp,
    })
}

/// Probe detunings ε_b − ε_a where the probe meets a dressed level, ascending.
pub fn resonance_predictions(params: &FourLevelParams) -> Vec<f64> {
    let root = params.omega_c.hypot(params.omega_s);
    if root == 0.0 {
        return vec![0.0];
    }
    vec![-0.5 * root, 0.0, 0.5 * root]
}
