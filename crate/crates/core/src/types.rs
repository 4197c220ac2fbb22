//! Value types shared by every module. All rates are rad/s, lengths m.

use crate::error::{Error, Result};
use crate::units::{photon_budget, MHZ};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

pub type C64 = Complex<f64>;
pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn sym2_eigenvalues(m: &Mat2) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let r = half_diff.hypot(off);
    (mean - r, mean + r)
}

/// True when the symmetric part of `m` has no eigenvalue below `-tol_rel·|trace|`.
pub fn is_psd(m: &Mat2, tol_rel: f64) -> bool {
    let (lo, _) = sym2_eigenvalues(m);
    lo >= -tol_rel * m.trace().abs()
}

pub fn symmetrize(m: &Mat2) -> Mat2 {
    0.5 * (m + m.transpose())
}

/// Means, phases and covariance of the two measured laser modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonModeSet {
    pub means: Vec2,
    pub phases: Vec2,
    pub covariance: Mat2,
}

impl PhotonModeSet {
    pub fn new(means: Vec2, phases: Vec2, covariance: Mat2) -> Result<Self> {
        let s = Self {
            means,
            phases,
            covariance,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn mode_count(&self) -> usize {
        2
    }

    pub fn validate(&self) -> Result<()> {
        if self.means.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Domain(format!(
                "means must be finite and non-negative, got {:?}",
                self.means.as_slice()
            )));
        }
        let c = &self.covariance;
        let scale = c.abs().max().max(f64::MIN_POSITIVE);
        if (c[(0, 1)] - c[(1, 0)]).abs() > 1e-12 * scale {
            return Err(Error::Domain("covariance is not symmetric".into()));
        }
        if c[(0, 0)] < 0.0 || c[(1, 1)] < 0.0 {
            return Err(Error::Domain("negative variance".into()));
        }
        if !is_psd(c, 1e-9) {
            return Err(Error::Domain("covariance is not positive semidefinite".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.means.sum()
    }

    /// A mode with zero mean cannot be handled by the phase-space matrix.
    pub fn has_unoccupied_mode(&self) -> bool {
        self.means.iter().any(|m| *m == 0.0)
    }
}

/// Coherent product state with Poissonian covariance diag(n̄_k).
pub fn initial_coherent_state(n_plus: f64, split: [f64; 2], phases: [f64; 2]) -> Result<PhotonModeSet> {
    if !(n_plus > 0.0) {
        return Err(Error::Domain(format!("total photon number must be positive, got {n_plus}")));
    }
    if split.iter().any(|f| *f < 0.0) {
        return Err(Error::Domain(format!("negative split fraction in {split:?}")));
    }
    if ((split[0] + split[1]) - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("split fractions must sum to 1, got {split:?}")));
    }
    let means = Vec2::new(split[0] * n_plus, split[1] * n_plus);
    PhotonModeSet::new(means, Vec2::from(phases), Mat2::from_diagonal(&means))
}

/// Counting fields conjugate to the two mode photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CountingVector(pub [f64; 2]);

impl CountingVector {
    pub const ZERO: CountingVector = CountingVector([0.0, 0.0]);

    pub fn new(chi: [f64; 2]) -> Result<Self> {
        if chi.iter().any(|c| !c.is_finite() || c.abs() > std::f64::consts::PI) {
            return Err(Error::Domain(format!("counting field out of range: {chi:?}")));
        }
        Ok(Self(chi))
    }

    /// From (χ₊, χ₋) with χ₁ = χ₊ + χ₋, χ₂ = χ₊ − χ₋.
    pub fn from_plus_minus(plus: f64, minus: f64) -> Self {
        Self([plus + minus, plus - minus])
    }
}

/// Per-mode Rabi frequencies and phases seen by one emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub rabi: [f64; 2],
    pub phase: [f64; 2],
}

impl Drive {
    pub fn new(rabi: [f64; 2], phase: [f64; 2]) -> Self {
        Self { rabi, phase }
    }

    /// Balanced rotated measurement basis: Ω₁ = Ω₂ = Ω/√2, φ₁ − φ₂ = π/2.
    pub fn rotated(omega: f64) -> Self {
        Self {
            rabi: [omega * FRAC_1_SQRT_2, omega * FRAC_1_SQRT_2],
            phase: [FRAC_PI_2, 0.0],
        }
    }

    /// Rabi frequencies g√n̄_k from mode means.
    pub fn from_modes(coupling: f64, means: &Vec2, phases: &Vec2) -> Self {
        Self {
            rabi: [coupling * means[0].max(0.0).sqrt(), coupling * means[1].max(0.0).sqrt()],
            phase: [phases[0], phases[1]],
        }
    }

    pub fn phase_difference(&self) -> f64 {
        self.phase[0] - self.phase[1]
    }
}

/// Ensemble and pulse parameters common to both models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ensemble {
    /// Emitter density, m⁻³.
    pub density: f64,
    /// Beam cross-section, m².
    pub area: f64,
    /// Measurement time, s.
    pub t_m: f64,
    /// Propagation length, m.
    pub z_max: f64,
}

impl Ensemble {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("density", self.density),
            ("area", self.area),
            ("t_m", self.t_m),
            ("z_max", self.z_max),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// ρ_A·𝒜·t_M, the prefactor turning per-emitter rates into per-length coefficients.
    pub fn prefactor(&self) -> f64 {
        self.density * self.area * self.t_m
    }

    /// Number of emitters in the illuminated slab.
    pub fn emitters(&self) -> f64 {
        self.density * self.area * self.z_max
    }

    pub fn fig2() -> Self {
        Self {
            density: 1e14,
            area: 1e-4,
            t_m: 1.0,
            z_max: 0.1,
        }
    }
}

/// Photon number of the Fig. 2 pulse: 100 mW for 1 s at 500 nm.
pub fn fig2_photon_number() -> f64 {
    photon_budget(0.1, 1.0, 500e-9)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    /// Laser detuning ε_Δ, rad/s.
    pub detuning: f64,
    /// Spontaneous decay rate γ, rad/s.
    pub gamma: f64,
    /// Effective Rabi frequency at `n_ref` total photons, rad/s.
    pub omega_ref: f64,
    pub n_ref: f64,
    pub ensemble: Ensemble,
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(Error::Domain(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.n_ref > 0.0) {
            return Err(Error::Domain("n_ref must be positive".into()));
        }
        if !(self.omega_ref >= 0.0) || !self.detuning.is_finite() {
            return Err(Error::Domain("invalid Rabi frequency or detuning".into()));
        }
        self.ensemble.validate()
    }

    /// g such that Ω(n̄) = g√n̄.
    pub fn coupling(&self) -> f64 {
        self.omega_ref / self.n_ref.sqrt()
    }

    pub fn rabi(&self, n_plus: f64) -> f64 {
        self.coupling() * n_plus.max(0.0).sqrt()
    }

    /// Fig. 2: γ = 1 MHz, Ω = 60 MHz, 𝒜 = 1 cm², ρ_A = 1e14 m⁻³, z_max = 10 cm, on resonance.
    pub fn fig2() -> Self {
        Self {
            detuning: 0.0,
            gamma: MHZ,
            omega_ref: 60.0 * MHZ,
            n_ref: fig2_photon_number(),
            ensemble: Ensemble::fig2(),
        }
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelParams {
    /// Level energies of |a⟩, |b⟩, |c⟩, |d⟩ in the rotating frame, rad/s.
    pub detunings: [f64; 4],
    /// Probe Rabi frequency at `n_ref` in the balanced rotated basis, rad/s.
    pub omega_p_ref: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    /// Decay rates of |b⟩, |c⟩, |d⟩ into |a⟩.
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub gamma_d: f64,
    pub n_ref: f64,
    pub ensemble: Ensemble,
}

impl FourLevelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
            ("omega_p", self.omega_p_ref),
            ("omega_c", self.omega_c),
            ("omega_s", self.omega_s),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.n_ref > 0.0) {
            return Err(Error::Domain("n_ref must be positive".into()));
        }
        if self.detunings.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("non-finite level detuning".into()));
        }
        self.ensemble.validate()
    }

    /// Per-mode coupling g with |Ω_P| = √2·g·√n̄₊ in the balanced rotated basis.
    pub fn coupling(&self) -> f64 {
        self.omega_p_ref / (2.0 * self.n_ref).sqrt()
    }

    /// Probe detuning ε_b − ε_a.
    pub fn probe_detuning(&self) -> f64 {
        self.detunings[1] - self.detunings[0]
    }

    /// Shift |b⟩, |c⟩, |d⟩ rigidly so that ε_b − ε_a equals `delta`.
    pub fn with_probe_detuning(mut self, delta: f64) -> Self {
        let shift = delta - self.probe_detuning();
        for e in &mut self.detunings[1..] {
            *e += shift;
        }
        self
    }

    /// Fig. 5: Ω_P = 1.9, Ω_C = 20, Ω_S = 3 MHz; γ_b = 0.1, γ_c = γ_d = 0.01 MHz;
    /// ρ_A = 5e13 m⁻³, P = 0.1 mW, z_max = 10 cm, t_M = 1 s.
    pub fn fig5() -> Self {
        Self {
            detunings: [0.0; 4],
            omega_p_ref: 1.9 * MHZ,
            omega_c: 20.0 * MHZ,
            omega_s: 3.0 * MHZ,
            gamma_b: 0.1 * MHZ,
            gamma_c: 0.01 * MHZ,
            gamma_d: 0.01 * MHZ,
            n_ref: photon_budget(1e-4, 1.0, 500e-9),
            ensemble: Ensemble {
                density: 5e13,
                ..Ensemble::fig2()
            },
        }
    }
}

/// Per-emitter counting rates in the (+, −) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantAptitudes {
    pub plus: f64,
    pub minus: f64,
    pub plus_plus: f64,
    pub minus_minus: f64,
    pub plus_minus: f64,
}

impl CumulantAptitudes {
    /// Combine per-mode gain rates and covariance rates (χ₁, χ₂ basis).
    pub fn from_modes(gain: [f64; 2], cov: [[f64; 2]; 2]) -> Self {
        Self {
            plus: gain[0] + gain[1],
            minus: gain[0] - gain[1],
            plus_plus: cov[0][0] + cov[1][1] + 2.0 * cov[0][1],
            minus_minus: cov[0][0] + cov[1][1] - 2.0 * cov[0][1],
            plus_minus: cov[0][0] - cov[1][1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.plus_plus.abs().max(self.minus_minus.abs());
        if self.plus_plus < -1e-9 * scale || self.minus_minus < -1e-9 * scale {
            return Err(Error::Numerical(format!("negative second aptitude: {self:?}")));
        }
        if self.plus_minus.powi(2) > self.plus_plus * self.minus_minus * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Numerical(format!("aptitudes violate Cauchy-Schwarz: {self:?}")));
        }
        Ok(())
    }
}

/// Flux vector (photons/m), diffusion matrix (photons²/m), phase-space matrix (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowCoefficients {
    pub flux: Vec2,
    pub diffusion: Mat2,
    pub phase_space: Mat2,
}

impl FlowCoefficients {
    pub fn validate(&self) -> Result<()> {
        let all = self.flux.iter().chain(self.diffusion.iter()).chain(self.phase_space.iter());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite flow coefficient".into()));
        }
        let d = &self.diffusion;
        if (d[(0, 1)] - d[(1, 0)]).abs() > 1e-9 * d.abs().max() {
            return Err(Error::Numerical("diffusion matrix is not symmetric".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_balanced() {
        let s = initial_coherent_state(100.0, [0.5, 0.5], [0.0, FRAC_PI_2]).unwrap();
        assert_eq!(s.means, Vec2::new(50.0, 50.0));
        assert_eq!(s.covariance, Mat2::new(50.0, 0.0, 0.0, 50.0));
    }

    #[test]
    fn coherent_state_errors_and_flags() {
        assert!(initial_coherent_state(1.0, [-0.5, 1.5], [0.0; 2]).is_err());
        let s = initial_coherent_state(1.0, [1.0, 0.0], [0.0; 2]).unwrap();
        assert!(s.has_unoccupied_mode());
    }

    #[test]
    fn coherent_state_fig2_budget() {
        let n = fig2_photon_number();
        let s = initial_coherent_state(n, [0.5, 0.5], [0.0, FRAC_PI_2]).unwrap();
        assert!((s.means[0] / 1.25e17 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn coupling_reproduces_reference_rabi() {
        let p = TwoLevelParams::fig2();
        assert!((p.rabi(p.n_ref) / p.omega_ref - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_level_probe_shift_is_rigid() {
        let mut p = FourLevelParams::fig5();
        p.detunings = [0.0, 1.0, 3.0, 6.0];
        let q = p.with_probe_detuning(-2.0);
        assert_eq!(q.detunings, [0.0, -2.0, 0.0, 3.0]);
    }

    #[test]
    fn aptitude_basis_change() {
        let a = CumulantAptitudes::from_modes([1.0, -3.0], [[2.0, 0.5], [0.5, 1.0]]);
        assert_eq!(a.plus, -2.0);
        assert_eq!(a.minus, 4.0);
        assert_eq!(a.plus_plus, 4.0);
        assert_eq!(a.minus_minus, 2.0);
        assert_eq!(a.plus_minus, 1.0);
    }

    #[test]
    fn sym2_eigen() {
        let (lo, hi) = sym2_eigenvalues(&Mat2::new(2.0, 1.0, 1.0, 2.0));
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
