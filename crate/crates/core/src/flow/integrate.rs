//! Fixed-step RK4 integration of the mean/covariance flow along z.

use super::coefficients::{coefficients_from, flux, rotated_coefficients, CoefficientSource, ROTATED_PHASES};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::types::{is_psd, Mat2, PhotonModeSet, Vec2};
use std::f64::consts::FRAC_PI_4;

pub const DEFAULT_STEPS: usize = 1000;

/// PSD tolerance relative to the trace.
const PSD_TOL: f64 = 1e-6;

/// `iσ_y + σ_z`.
pub fn xi() -> Mat2 {
    Mat2::new(1.0, 1.0, -1.0, -1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabTrajectory {
    pub z: Vec<f64>,
    pub states: Vec<PhotonModeSet>,
}

impl LabTrajectory {
    pub fn last(&self) -> &PhotonModeSet {
        self.states.last().expect("trajectory has at least one sample")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotatedTrajectory {
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    pub n_plus: Vec<f64>,
    /// Covariance in the rotated basis; empty for a means-only integration.
    pub covariance: Vec<Mat2>,
}

impl RotatedTrajectory {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn final_theta(&self) -> f64 {
        *self.theta.last().expect("non-empty trajectory")
    }

    pub fn final_n_plus(&self) -> f64 {
        *self.n_plus.last().expect("non-empty trajectory")
    }

    pub fn final_covariance(&self) -> Option<Mat2> {
        self.covariance.last().copied()
    }

    /// Lab-frame state at sample `i`.
    pub fn to_lab(&self, i: usize) -> PhotonModeSet {
        let cov = self.covariance.get(i).copied().unwrap_or_else(|| Mat2::identity() * (0.5 * self.n_plus[i]));
        frame_to_lab(self.theta[i], self.n_plus[i], &cov)
    }
}

/// Classical RK4 step for a small state array.
pub fn rk4_step<const N: usize, F>(y: &[f64; N], h: f64, f: &F) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let shift = |base: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *base;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&shift(y, &k1, 0.5 * h))?;
    let k3 = f(&shift(y, &k2, 0.5 * h))?;
    let k4 = f(&shift(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn unpack(s11: f64, s12: f64, s22: f64) -> Mat2 {
    Mat2::new(s11, s12, s12, s22)
}

fn covariance_rate(d: &Mat2, c: &Mat2, sigma: &Mat2) -> [f64; 3] {
    let r = d + c * sigma + sigma * c.transpose();
    [r[(0, 0)], 0.5 * (r[(0, 1)] + r[(1, 0)]), r[(1, 1)]]
}

fn check_psd(sigma: &Mat2, z: f64, hint: &str) -> Result<()> {
    if !sigma.iter().all(|v| v.is_finite()) || !is_psd(sigma, PSD_TOL) {
        return Err(Error::IntegrationInstability {
            z,
            reason: format!("covariance lost positive semidefiniteness{hint}"),
        });
    }
    Ok(())
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 10 {
        return Err(Error::Domain(format!("at least 10 steps required, got {steps}")));
    }
    Ok(())
}

pub fn integrate_lab(model: &Model, initial: &PhotonModeSet, steps: usize) -> Result<LabTrajectory> {
    integrate_lab_with(model, initial, steps, CoefficientSource::Exact)
}

/// Lab-frame flow `dn̄/dz = I`, `dΣ²/dz = D + CΣ² + Σ²Cᵀ`.
pub fn integrate_lab_with(model: &Model, initial: &PhotonModeSet, steps: usize, source: CoefficientSource) -> Result<LabTrajectory> {
    check_steps(steps)?;
    initial.validate()?;
    let z_max = model.ensemble().z_max;
    let h = z_max / steps as f64;
    let phases = initial.phases;
    let rhs = |y: &[f64; 5]| -> Result<[f64; 5]> {
        let means = Vec2::new(y[0], y[1]);
        let c = coefficients_from(model, &means, &phases, source)?;
        let s = covariance_rate(&c.diffusion, &c.phase_space, &unpack(y[2], y[3], y[4]));
        Ok([c.flux[0], c.flux[1], s[0], s[1], s[2]])
    };
    let c0 = &initial.covariance;
    let mut y = [initial.means[0], initial.means[1], c0[(0, 0)], c0[(0, 1)], c0[(1, 1)]];
    let mut z = vec![0.0];
    let mut states = vec![*initial];
    for i in 1..=steps {
        let zi = i as f64 * h;
        y = rk4_step(&y, h, &rhs).map_err(|e| match e {
            Error::SingularPhaseSpace { mode } => Error::IntegrationInstability {
                z: zi,
                reason: format!("mode {mode} emptied; integrate in the rotated frame instead"),
            },
            other => other,
        })?;
        let sigma = unpack(y[2], y[3], y[4]);
        check_psd(&sigma, zi, "; integrate in the rotated frame instead")?;
        if y[0] < 0.0 || y[1] < 0.0 {
            return Err(Error::IntegrationInstability {
                z: zi,
                reason: "negative mean photon number; integrate in the rotated frame instead".into(),
            });
        }
        z.push(zi);
        states.push(PhotonModeSet {
            means: Vec2::new(y[0], y[1]),
            phases,
            covariance: sigma,
        });
    }
    Ok(LabTrajectory { z, states })
}

pub fn integrate_rotated(model: &Model, n_plus: f64, steps: usize) -> Result<RotatedTrajectory> {
    integrate_rotated_with(model, n_plus, steps, CoefficientSource::Exact)
}

/// Rotated-frame flow for (θ̄, n̄₊, Σ²_rot) from balanced shot noise.
///
/// `θ̄' = (I₂ − I₁)/(2n̄₊)`, `n̄₊' = I₁ + I₂`, `C̃ = C + θ̄'Ξ`.
pub fn integrate_rotated_with(model: &Model, n_plus: f64, steps: usize, source: CoefficientSource) -> Result<RotatedTrajectory> {
    check_steps(steps)?;
    if !(n_plus > 0.0) {
        return Err(Error::Domain(format!("initial photon number must be positive, got {n_plus}")));
    }
    let z_max = model.ensemble().z_max;
    let h = z_max / steps as f64;
    let xi = xi();
    let rhs = |y: &[f64; 5]| -> Result<[f64; 5]> {
        let np = y[1];
        if !(np > 0.0) {
            return Err(Error::Domain("all photons absorbed".into()));
        }
        let c = rotated_coefficients(model, np, source)?;
        let theta_dot = (c.flux[1] - c.flux[0]) / (2.0 * np);
        let ct = c.phase_space + xi * theta_dot;
        let s = covariance_rate(&c.diffusion, &ct, &unpack(y[2], y[3], y[4]));
        Ok([theta_dot, c.flux[0] + c.flux[1], s[0], s[1], s[2]])
    };
    let mut y = [0.0, n_plus, 0.5 * n_plus, 0.0, 0.5 * n_plus];
    let mut out = RotatedTrajectory {
        z: vec![0.0],
        theta: vec![0.0],
        n_plus: vec![n_plus],
        covariance: vec![unpack(y[2], y[3], y[4])],
    };
    for i in 1..=steps {
        let zi = i as f64 * h;
        y = rk4_step(&y, h, &rhs).map_err(|e| match e {
            Error::Domain(r) => Error::IntegrationInstability { z: zi, reason: r },
            other => other,
        })?;
        let sigma = unpack(y[2], y[3], y[4]);
        check_psd(&sigma, zi, "")?;
        out.z.push(zi);
        out.theta.push(y[0]);
        out.n_plus.push(y[1]);
        out.covariance.push(sigma);
    }
    Ok(out)
}

/// Means-only rotated flow. Works for lossless emitters where the
/// covariance flow is undefined.
pub fn integrate_rotated_means(model: &Model, n_plus: f64, steps: usize) -> Result<RotatedTrajectory> {
    check_steps(steps)?;
    if !(n_plus > 0.0) {
        return Err(Error::Domain(format!("initial photon number must be positive, got {n_plus}")));
    }
    let h = model.ensemble().z_max / steps as f64;
    let phases = Vec2::from(ROTATED_PHASES);
    let rhs = |y: &[f64; 2]| -> Result<[f64; 2]> {
        let np = y[1];
        let i = flux(model, &Vec2::new(0.5 * np, 0.5 * np), &phases)?;
        Ok([(i[1] - i[0]) / (2.0 * np), i[0] + i[1]])
    };
    let mut y = [0.0, n_plus];
    let mut out = RotatedTrajectory {
        z: vec![0.0],
        theta: vec![0.0],
        n_plus: vec![n_plus],
        covariance: Vec::new(),
    };
    for i in 1..=steps {
        y = rk4_step(&y, h, &rhs)?;
        out.z.push(i as f64 * h);
        out.theta.push(y[0]);
        out.n_plus.push(y[1]);
    }
    Ok(out)
}

/// Lab-frame means and covariance from the rotated frame.
///
/// `n̄₁ = n̄₊cos²(π/4 + θ̄)`, `n̄₂ = n̄₊sin²(π/4 + θ̄)`,
/// `Σ²_{αβ} = (2√(n̄_α n̄_β)/n̄₊)(RᵀΣ²_rot R)_{αβ}` with `R = [[c, s], [−s, c]]`.
pub fn frame_to_lab(theta: f64, n_plus: f64, sigma_rot: &Mat2) -> PhotonModeSet {
    let a = FRAC_PI_4 + theta;
    let means = Vec2::new(n_plus * a.cos().powi(2), n_plus * a.sin().powi(2));
    let (s, c) = theta.sin_cos();
    let r = Mat2::new(c, s, -s, c);
    let turned = r.transpose() * sigma_rot * r;
    let mut cov = Mat2::zeros();
    if n_plus > 0.0 {
        let d = [(2.0 * means[0] / n_plus).sqrt(), (2.0 * means[1] / n_plus).sqrt()];
        for i in 0..2 {
            for j in 0..2 {
                cov[(i, j)] = d[i] * d[j] * turned[(i, j)];
            }
        }
    }
    PhotonModeSet {
        means,
        phases: Vec2::from(ROTATED_PHASES),
        covariance: cov,
    }
}

/// Δφ̄ = 2Δθ̄.
pub fn phase_from_rotation(delta_theta: f64) -> f64 {
    2.0 * delta_theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{initial_coherent_state, FourLevelParams, TwoLevelParams};
    use crate::units::MHZ;

    #[test]
    fn frame_to_lab_identity_at_zero() {
        let s = Mat2::new(3.0, 0.4, 0.4, 2.0);
        let lab = frame_to_lab(0.0, 10.0, &s);
        assert!((lab.means - Vec2::new(5.0, 5.0)).abs().max() < 1e-14);
        assert!((lab.covariance - s).abs().max() < 1e-14);
    }

    #[test]
    fn quarter_turn_empties_mode_one() {
        let lab = frame_to_lab(FRAC_PI_4, 8.0, &Mat2::identity());
        assert!(lab.means[0].abs() < 1e-14);
        assert!((lab.means[1] - 8.0).abs() < 1e-14);
    }

    #[test]
    fn phase_from_rotation_doubles() {
        assert_eq!(phase_from_rotation(0.0), 0.0);
        assert!((phase_from_rotation(std::f64::consts::PI / 8.0) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn decoupled_model_is_constant() {
        let mut p = TwoLevelParams::fig2();
        p.omega_ref = 0.0;
        let m = Model::TwoLevel(p);
        let init = initial_coherent_state(1e6, [0.5, 0.5], ROTATED_PHASES).unwrap();
        let tr = integrate_lab(&m, &init, 20).unwrap();
        assert!(tr.states.iter().all(|s| s == &init));
    }

    #[test]
    fn resonant_rotation_vanishes() {
        let m = Model::TwoLevel(TwoLevelParams::fig2());
        let tr = integrate_rotated(&m, m.n_ref(), 50).unwrap();
        assert!(tr.theta.iter().all(|t| *t == 0.0));
        assert!(tr.n_plus.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn too_few_steps_rejected() {
        let m = Model::TwoLevel(TwoLevelParams::fig2());
        assert!(integrate_rotated(&m, 1e17, 5).is_err());
    }

    #[test]
    fn lossless_means_conserve_photons() {
        let m = Model::TwoLevel(TwoLevelParams::fig2().with_gamma(0.0).with_detuning(20.0 * MHZ));
        let tr = integrate_rotated_means(&m, m.n_ref(), 100).unwrap();
        let n0 = tr.n_plus[0];
        assert!(tr.n_plus.iter().all(|n| ((n - n0) / n0).abs() < 1e-12));
        let slope = tr.theta[1] / tr.z[1];
        for (z, t) in tr.z.iter().zip(&tr.theta) {
            assert!((t - slope * z).abs() <= 1e-9 * tr.final_theta().abs());
        }
    }

    #[test]
    fn four_level_rotated_runs() {
        let m = Model::FourLevel(FourLevelParams::fig5());
        let tr = integrate_rotated(&m, m.n_ref(), 20).unwrap();
        assert!(tr.final_n_plus() < m.n_ref());
    }

    #[test]
    fn rotated_maps_onto_lab() {
        let m = Model::TwoLevel(TwoLevelParams::fig2().with_detuning(30.0 * MHZ));
        let n0 = m.n_ref();
        let rot = integrate_rotated(&m, n0, 200).unwrap();
        let init = initial_coherent_state(n0, [0.5, 0.5], ROTATED_PHASES).unwrap();
        let lab = integrate_lab(&m, &init, 200).unwrap();
        let mut worst_mean: f64 = 0.0;
        let mut worst_cov: f64 = 0.0;
        for i in 0..rot.len() {
            let mapped = rot.to_lab(i);
            let direct = &lab.states[i];
            for k in 0..2 {
                worst_mean = worst_mean.max((mapped.means[k] / direct.means[k] - 1.0).abs());
            }
            let scale = direct.covariance.abs().max();
            worst_cov = worst_cov.max((mapped.covariance - direct.covariance).abs().max() / scale);
        }
        assert!(worst_mean < 1e-6, "means {worst_mean:e}");
        assert!(worst_cov < 1e-4, "covariance {worst_cov:e}");
    }
}
