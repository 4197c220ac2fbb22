//! Characteristic polynomials and the truncated-polynomial cumulant formulas.

use super::generator::{CMatrix, GeneratorSpec, TiltedGenerator};
use super::{plus_minus_to_modes, stencil_pm, LambdaDerivatives};
use crate::error::{Error, Result};
use crate::types::{CountingVector, Drive, TwoLevelParams, C64};

/// Monic coefficients `a_0..a_n` of `det(z − L) = Σ a_j z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coeffs: Vec<C64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
    }
}

/// Faddeev–LeVerrier recursion on `L/s`, unscaled afterwards.
pub fn char_poly_scaled(l: &CMatrix, scale: f64) -> CharPoly {
    let n = l.nrows();
    let inv = C64::new(1.0 / scale, 0.0);
    let ls = l * inv;
    let id = CMatrix::identity(n, n);
    let mut a = vec![C64::new(0.0, 0.0); n + 1];
    a[n] = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        m = &ls * &m + &id * a[n - k + 1];
        a[n - k] = -(&ls * &m).trace() / C64::new(k as f64, 0.0);
    }
    for (j, c) in a.iter_mut().enumerate() {
        *c *= scale.powi((n - j) as i32);
    }
    CharPoly { coeffs: a }
}

/// Characteristic polynomial of a built generator, rescaled by its rate scale.
pub fn char_poly(g: &TiltedGenerator) -> Result<CharPoly> {
    if g.matrix.nrows() > 16 {
        return Err(Error::Domain("char_poly supports d² ≤ 16".into()));
    }
    Ok(char_poly_scaled(&g.matrix, g.rate_scale))
}

/// Closed-form coefficients for the two-level generator in a general basis.
pub fn char_poly_two_level_analytic(params: &TwoLevelParams, drive: Drive, chi: CountingVector) -> CharPoly {
    let [w1, w2] = drive.rabi;
    let phi = drive.phase_difference();
    let [c1, c2] = chi.0;
    let (g, e) = (params.gamma, params.detuning);
    let half_diff = 0.5 * (c1 - c2);
    let a_chi = 2.0 * w1 * w1 + 2.0 * w2 * w2 + 4.0 * w1 * w2 * phi.cos() * half_diff.cos();
    let b_chi = -4.0 * w1 * w2 * phi.sin() * half_diff.sin();
    let c_chi = C64::from_polar(w1 * w1, -c1)
        + C64::from_polar(w2 * w2, -c2)
        + C64::from_polar(2.0 * w1 * w2 * phi.cos(), -0.5 * (c1 + c2));
    let a = C64::new(a_chi, 0.0);
    let i = C64::new(0.0, 1.0);
    let a0 = C64::new(b_chi * b_chi / 16.0, 0.0) + (a - c_chi * 2.0) * (g * g / 8.0) - i * (e * g * b_chi / 4.0);
    let a1 = (a - c_chi) * (g / 2.0) + C64::new(g * e * e + g * g * g / 4.0, 0.0);
    let a2 = C64::new(a_chi / 2.0 + e * e + 1.25 * g * g, 0.0);
    CharPoly {
        coeffs: vec![a0, a1, a2, C64::new(2.0 * g, 0.0), C64::new(1.0, 0.0)],
    }
}

/// Inputs of the truncated-polynomial formulas (coefficients at χ = 0 and their χ-derivatives).
#[derive(Debug, Clone, Copy)]
pub struct TruncatedInput {
    pub a0_first: [C64; 2],
    pub a0_second: [[C64; 2]; 2],
    pub a1: C64,
    pub a1_first: [C64; 2],
    pub a2: C64,
    /// Typical rate of the problem; fixes the ergodicity threshold on `a_1`.
    pub scale: f64,
}

/// `λ_α = −a₀^α/a₁` and
/// `λ_αβ = −a₀^{αβ}/a₁ + (a₀^α a₁^β + a₀^β a₁^α)/a₁² − 2a₂a₀^α a₀^β/a₁³`.
pub fn truncated_poly_cumulants(t: &TruncatedInput) -> Result<([C64; 2], [[C64; 2]; 2])> {
    if !(t.a1.norm() > 1e-12 * t.a2.norm() * t.scale) {
        return Err(Error::DegenerateGenerator(format!(
            "a_1 = {:.3e} vanishes: generator is not ergodic",
            t.a1.norm()
        )));
    }
    let a1 = t.a1;
    let first = [-t.a0_first[0] / a1, -t.a0_first[1] / a1];
    let mut second = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let (p, q) = (t.a0_first[k], t.a0_first[l]);
            second[k][l] = -t.a0_second[k][l] / a1 + (p * t.a1_first[l] + q * t.a1_first[k]) / (a1 * a1)
                - t.a2 * p * q * 2.0 / (a1 * a1 * a1);
        }
    }
    Ok((first, second))
}

/// Central differences of the coefficients `a_j(χ)` of a model along (χ₊, χ₋),
/// Richardson-extrapolated. The returned input lives in the (±) basis.
pub fn char_poly_derivatives<F>(coeffs: F, h: [f64; 2], scale: f64) -> Result<(TruncatedInput, f64)>
where
    F: Fn([f64; 2]) -> Vec<C64>,
{
    let at0 = coeffs([0.0, 0.0]);
    let (d1, d2, gaps) = stencil_pm(|chi| Ok(coeffs(chi)[..2].to_vec()), h)?;
    Ok((
        TruncatedInput {
            a0_first: d1[0],
            a0_second: d2[0],
            a1: at0[1],
            a1_first: d1[1],
            a2: at0[2],
            scale,
        },
        gaps[0],
    ))
}

/// Default numeric strategy: Faddeev–LeVerrier coefficients, differenced in χ.
pub fn char_poly_strategy(spec: &GeneratorSpec, h: [f64; 2]) -> Result<LambdaDerivatives> {
    let coeffs = |chi: [f64; 2]| char_poly_scaled(&spec.tilted(CountingVector(chi)).matrix, spec.rate_scale).coeffs;
    let s = spec.rate_scale;
    let (input, gap) = char_poly_derivatives(coeffs, h, s)?;
    let (first, second) = truncated_poly_cumulants(&input)?;
    let (first, second) = plus_minus_to_modes(first, second);
    Ok(LambdaDerivatives {
        first,
        second,
        counting_sign: spec.counting_sign,
        richardson_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::generator::build_two_level;
    use crate::units::MHZ;

    fn rel(a: C64, b: C64, scale: C64) -> f64 {
        (a - b).norm() / scale.norm().max(1e-300)
    }

    #[test]
    fn faddeev_leverrier_matches_analytic_two_level() {
        let p = TwoLevelParams::fig2().with_detuning(17.0 * MHZ).with_gamma(2.3 * MHZ);
        let drive = Drive::new([2.0e7, 3.5e7], [0.7, -0.4]);
        let chi = CountingVector([0.13, -0.07]);
        let g = build_two_level(&p, drive, chi);
        let num = char_poly(&g).unwrap();
        let ana = char_poly_two_level_analytic(&p, drive, chi);
        for j in 0..=4 {
            let scale = 4e7f64.powi(4 - j as i32);
            assert!(
                rel(num.coeffs[j], ana.coeffs[j], C64::new(scale, 0.0)) < 1e-8,
                "a_{j}: {} vs {}",
                num.coeffs[j],
                ana.coeffs[j]
            );
        }
    }

    #[test]
    fn paper_structure_of_coefficients() {
        let p = TwoLevelParams::fig2();
        let ana = char_poly_two_level_analytic(&p, Drive::rotated(6e7), CountingVector::ZERO);
        assert_eq!(ana.coeffs[0], C64::new(0.0, 0.0));
        assert_eq!(ana.coeffs[4], C64::new(1.0, 0.0));
        assert_eq!(ana.coeffs[3], C64::new(2.0 * p.gamma, 0.0));
    }

    #[test]
    fn rotated_basis_a1_a2_use_full_detuning_square() {
        let (w, g, e) = (6e7, 1e6, 2.5e7);
        let p = TwoLevelParams::fig2().with_detuning(e).with_gamma(g);
        let gen = build_two_level(&p, Drive::rotated(w), CountingVector::ZERO);
        let num = char_poly(&gen).unwrap();
        let a1 = g * (2.0 * w * w + 4.0 * e * e + g * g) / 4.0;
        let a2 = w * w + e * e + 1.25 * g * g;
        assert!((num.coeffs[1].re / a1 - 1.0).abs() < 1e-9);
        assert!((num.coeffs[2].re / a2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_first_derivatives_give_zero_first_cumulant() {
        let t = TruncatedInput {
            a0_first: [C64::new(0.0, 0.0); 2],
            a0_second: [[C64::new(1.0, 0.0); 2]; 2],
            a1: C64::new(2.0, 0.0),
            a1_first: [C64::new(0.3, 0.1); 2],
            a2: C64::new(1.0, 0.0),
            scale: 1.0,
        };
        let (first, _) = truncated_poly_cumulants(&t).unwrap();
        assert_eq!(first, [C64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn vanishing_a1_is_degenerate() {
        let t = TruncatedInput {
            a0_first: [C64::new(1.0, 0.0); 2],
            a0_second: [[C64::new(1.0, 0.0); 2]; 2],
            a1: C64::new(0.0, 0.0),
            a1_first: [C64::new(0.0, 0.0); 2],
            a2: C64::new(1.0, 0.0),
            scale: 1.0,
        };
        assert!(matches!(truncated_poly_cumulants(&t), Err(Error::DegenerateGenerator(_))));
    }

    #[test]
    fn polynomial_vanishes_at_dominant_root() {
        let p = TwoLevelParams::fig2().with_detuning(5.0 * MHZ);
        let g = build_two_level(&p, Drive::rotated(6e7), CountingVector::ZERO);
        let cp = char_poly(&g).unwrap();
        let a1 = cp.coeffs[1].norm();
        assert!(cp.coeffs[0].norm() <= 1e-10 * a1);
        assert!(cp.eval(C64::new(0.0, 0.0)).norm() <= 1e-10 * a1);
    }
}
