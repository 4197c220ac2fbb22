//! Closed forms for the two-level emitter, obtained from its characteristic
//! polynomial coefficients and the truncated-polynomial formulas.

use super::charpoly::{truncated_poly_cumulants, TruncatedInput};
use super::LambdaDerivatives;
use crate::error::Result;
use crate::types::{CumulantAptitudes, Drive, Mat2, TwoLevelParams, C64};

struct Basis {
    w1: f64,
    w2: f64,
    cos: f64,
    sin: f64,
    omega_sq: f64,
    gamma: f64,
    eps: f64,
}

impl Basis {
    fn new(params: &TwoLevelParams, drive: &Drive) -> Self {
        let [w1, w2] = drive.rabi;
        let phi = drive.phase_difference();
        let (sin, cos) = phi.sin_cos();
        Self {
            w1,
            w2,
            cos,
            sin,
            omega_sq: w1 * w1 + w2 * w2 + 2.0 * w1 * w2 * cos,
            gamma: params.gamma,
            eps: params.detuning,
        }
    }

    fn den(&self) -> f64 {
        4.0 * self.eps * self.eps + 2.0 * self.omega_sq + self.gamma * self.gamma
    }

    /// Numerators N_k with gain rate κ_k = −N_k/den.
    fn numerators(&self) -> [f64; 2] {
        let (w1, w2, g, e) = (self.w1, self.w2, self.gamma, self.eps);
        let cross = w1 * w2 * self.cos;
        let transfer = 2.0 * e * w1 * w2 * self.sin;
        [g * (w1 * w1 + cross) + transfer, g * (w2 * w2 + cross) - transfer]
    }
}

/// Per-mode photon gain rates (photons/s per emitter), valid for γ ≥ 0.
pub fn two_level_gain_rates(params: &TwoLevelParams, drive: &Drive) -> [f64; 2] {
    let b = Basis::new(params, drive);
    let den = b.den();
    if den == 0.0 {
        return [0.0, 0.0];
    }
    let n = b.numerators();
    [-n[0] / den, -n[1] / den]
}

/// `∂κ_k/∂Ω_j` of [`two_level_gain_rates`].
pub fn two_level_rabi_jacobian(params: &TwoLevelParams, drive: &Drive) -> [[f64; 2]; 2] {
    let b = Basis::new(params, drive);
    let den = b.den();
    if den == 0.0 {
        return [[0.0; 2]; 2];
    }
    let (w1, w2, g, e, c, s) = (b.w1, b.w2, b.gamma, b.eps, b.cos, b.sin);
    let n = b.numerators();
    let dn = [
        [g * (2.0 * w1 + w2 * c) + 2.0 * e * w2 * s, g * w1 * c + 2.0 * e * w1 * s],
        [g * w2 * c - 2.0 * e * w2 * s, g * (2.0 * w2 + w1 * c) - 2.0 * e * w1 * s],
    ];
    let dden = [4.0 * (w1 + w2 * c), 4.0 * (w2 + w1 * c)];
    let mut out = [[0.0; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            out[k][j] = -(dn[k][j] * den - n[k] * dden[j]) / (den * den);
        }
    }
    out
}

/// Coefficients `a_0, a_1, a_2` and their χ-derivatives at χ = 0, in closed form.
pub fn two_level_truncated_input(params: &TwoLevelParams, drive: &Drive) -> TruncatedInput {
    let b = Basis::new(params, drive);
    let (w1, w2, g, e, c, s) = (b.w1, b.w2, b.gamma, b.eps, b.cos, b.sin);
    let i = C64::new(0.0, 1.0);
    let sign = [1.0, -1.0];
    let b_first = [-2.0 * w1 * w2 * s, 2.0 * w1 * w2 * s];
    let c_first = [-i * (w1 * w1 + w1 * w2 * c), -i * (w2 * w2 + w1 * w2 * c)];
    let mut a0_first = [C64::new(0.0, 0.0); 2];
    let mut a1_first = [C64::new(0.0, 0.0); 2];
    let mut a0_second = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        a0_first[k] = -c_first[k] * (g * g / 4.0) - i * (e * g * b_first[k] / 4.0);
        a1_first[k] = -c_first[k] * (g / 2.0);
        for l in 0..2 {
            let a_kl = -w1 * w2 * c * sign[k] * sign[l];
            let c_kl = if k == l { -[w1 * w1, w2 * w2][k] } else { 0.0 } - 0.5 * w1 * w2 * c;
            a0_second[k][l] = C64::new(b_first[k] * b_first[l] / 8.0 + g * g / 8.0 * (a_kl - 2.0 * c_kl), 0.0);
        }
    }
    let a1 = g / 4.0 * (2.0 * b.omega_sq + 4.0 * e * e + g * g);
    let a2 = b.omega_sq + e * e + 1.25 * g * g;
    TruncatedInput {
        a0_first,
        a0_second,
        a1: C64::new(a1, 0.0),
        a1_first,
        a2: C64::new(a2, 0.0),
        scale: g.max(b.omega_sq.sqrt()).max(e.abs()).max(f64::MIN_POSITIVE),
    }
}

/// λ derivatives in a general basis from the closed-form coefficients.
pub fn two_level_lambda_derivatives(params: &TwoLevelParams, drive: &Drive) -> Result<LambdaDerivatives> {
    let (first, second) = truncated_poly_cumulants(&two_level_truncated_input(params, drive))?;
    Ok(LambdaDerivatives {
        first,
        second,
        counting_sign: 1.0,
        richardson_gap: 0.0,
    })
}

/// Rotated-basis aptitudes (Ω₁ = Ω₂ = Ω/√2, φ₁ − φ₂ = π/2) in closed form.
///
/// `den = 4ε² + 2Ω² + γ²`. The cross aptitude vanishes only on resonance.
pub fn aptitudes_analytic_two_level(params: &TwoLevelParams, omega: f64) -> CumulantAptitudes {
    let (g, e, w2) = (params.gamma, params.detuning, omega * omega);
    let w4 = w2 * w2;
    let den = 4.0 * e * e + 2.0 * w2 + g * g;
    let den3 = den * den * den;
    CumulantAptitudes {
        plus: -g * w2 / den,
        minus: -2.0 * e * w2 / den,
        plus_plus: g * w2 / den + w4 * g * (8.0 * e * e - 6.0 * g * g) / den3,
        minus_minus: (2.0 * w4 + g * g * w2) / (g * den) - 8.0 * e * e * w4 * (4.0 * w2 + 4.0 * e * e + 5.0 * g * g) / (g * den3),
        plus_minus: -8.0 * w4 * e * (w2 + 2.0 * g * g) / den3,
    }
}

/// Small-γ leading term of the per-emitter covariance rates,
/// `8Ω₁²Ω₂²Ω_φ⁴ sin²φ /(γ(4ε² + 2Ω_φ²)³) · [[1, −1], [−1, 1]]`.
pub fn two_level_leading_covariance(params: &TwoLevelParams, drive: &Drive) -> Mat2 {
    let b = Basis::new(params, drive);
    let den0 = 4.0 * b.eps * b.eps + 2.0 * b.omega_sq;
    let c = 8.0 * (b.w1 * b.w2).powi(2) * b.omega_sq.powi(2) * b.sin.powi(2) / (b.gamma * den0.powi(3));
    Mat2::new(c, -c, -c, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::perturb::perturbative_derivatives;
    use crate::engine::generator::two_level_spec;
    use crate::units::MHZ;

    #[test]
    fn spec_reference_values_on_resonance() {
        let p = TwoLevelParams::fig2();
        let a = aptitudes_analytic_two_level(&p, 6e7);
        assert_eq!(a.minus, 0.0);
        assert!((a.plus.abs() / 4.9993e5 - 1.0).abs() < 1e-4, "{}", a.plus);
        assert!((a.minus_minus / 3.6e9 - 1.0).abs() < 1e-3, "{}", a.minus_minus);
        assert_eq!(a.plus_minus, 0.0);
    }

    #[test]
    fn closed_forms_match_exact_perturbation() {
        for (e, g) in [(0.0, 1.0), (13.0, 0.5), (-42.0, 2.0), (90.0, 0.1)] {
            let p = TwoLevelParams::fig2().with_detuning(e * MHZ).with_gamma(g * MHZ);
            let omega = 60.0 * MHZ;
            let exact = perturbative_derivatives(&two_level_spec(&p, Drive::rotated(omega))).unwrap().aptitudes();
            let closed = aptitudes_analytic_two_level(&p, omega);
            let tol = |a: f64, b: f64, s: f64| (a - b).abs() <= 1e-9 * s;
            let s1 = closed.plus.abs().max(closed.minus.abs());
            let s2 = closed.minus_minus.abs();
            assert!(tol(exact.plus, closed.plus, s1), "{exact:?} {closed:?}");
            assert!(tol(exact.minus, closed.minus, s1), "{exact:?} {closed:?}");
            assert!(tol(exact.plus_plus, closed.plus_plus, s2), "{exact:?} {closed:?}");
            assert!(tol(exact.minus_minus, closed.minus_minus, s2), "{exact:?} {closed:?}");
            assert!(tol(exact.plus_minus, closed.plus_minus, s2), "{exact:?} {closed:?}");
        }
    }

    #[test]
    fn general_basis_closed_forms_match_perturbation() {
        let p = TwoLevelParams::fig2().with_detuning(-21.0 * MHZ).with_gamma(3.0 * MHZ);
        let drive = Drive::new([2.1e7, 4.4e7], [0.9, -0.35]);
        let exact = perturbative_derivatives(&two_level_spec(&p, drive)).unwrap();
        let closed = two_level_lambda_derivatives(&p, &drive).unwrap();
        let rates = two_level_gain_rates(&p, &drive);
        for k in 0..2 {
            assert!((exact.first[k] - closed.first[k]).norm() < 1e-9 * 1e7);
            assert!((exact.gain_rates()[k] - rates[k]).abs() < 1e-9 * 1e7);
            for l in 0..2 {
                let s = exact.second[k][l].norm().max(1.0);
                assert!((exact.second[k][l] - closed.second[k][l]).norm() < 1e-8 * s);
            }
        }
    }

    #[test]
    fn leading_covariance_approaches_exact_for_small_gamma() {
        let p = TwoLevelParams::fig2().with_detuning(11.0 * MHZ).with_gamma(1e3);
        let drive = Drive::new([3e7, 5e7], [1.1, 0.0]);
        let exact = two_level_lambda_derivatives(&p, &drive).unwrap().covariance_rates();
        let lead = two_level_leading_covariance(&p, &drive);
        for k in 0..2 {
            for l in 0..2 {
                assert!((exact[k][l] / lead[(k, l)] - 1.0).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn rabi_jacobian_matches_differences() {
        let p = TwoLevelParams::fig2().with_detuning(8.0 * MHZ);
        let drive = Drive::new([2e7, 3e7], [0.4, -0.6]);
        let jac = two_level_rabi_jacobian(&p, &drive);
        for j in 0..2 {
            let h = 1e2;
            let mut up = drive;
            up.rabi[j] += h;
            let mut dn = drive;
            dn.rabi[j] -= h;
            let a = two_level_gain_rates(&p, &up);
            let b = two_level_gain_rates(&p, &dn);
            for k in 0..2 {
                let fd = (a[k] - b[k]) / (2.0 * h);
                assert!((fd - jac[k][j]).abs() < 1e-6 * jac[k][j].abs().max(1e-3), "{k}{j}");
            }
        }
    }
}
