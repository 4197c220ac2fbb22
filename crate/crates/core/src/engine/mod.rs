//! Tilted generators and the dominant-eigenvalue derivatives that define the
//! cumulant aptitudes.
//!
//! Three strategies produce `∂λ/∂χ` and `∂²λ/∂χ∂χ`:
//!
//! * [`LambdaStrategy::CharPoly`]: Faddeev–LeVerrier coefficients differenced in χ,
//!   fed through the truncated-polynomial formulas.
//! * [`LambdaStrategy::Perturbative`]: exact stationary-state perturbation theory.
//! * [`LambdaStrategy::Propagation`]: slope of `log tr ρ_χ(t)` under RK4, differenced in χ.

pub mod analytic;
pub mod charpoly;
pub mod generator;
pub mod perturb;
pub mod propagate;
pub mod rate;

pub use analytic::{aptitudes_analytic_two_level, two_level_gain_rates, two_level_lambda_derivatives};
pub use charpoly::{char_poly, char_poly_two_level_analytic, truncated_poly_cumulants, CharPoly, TruncatedInput};
pub use generator::{build_four_level, build_two_level, GeneratorSpec, ModelTag, TiltedGenerator};
pub use propagate::{dominant_eigenvalue_prop, PropagationEstimate, PropagationOptions};
pub use rate::{rate_equation_aptitudes, RateModel};

use crate::error::Result;
use crate::types::{CumulantAptitudes, C64};

/// Counting-field steps (χ₊, χ₋) for finite differences, rad. χ₋ is finer:
/// with strong phase diffusion λ curves on a scale of κ₋/κ₋₋ there.
pub const CHI_STEP: [f64; 2] = [1e-2, 1e-3];

/// Richardson threshold above which a stencil is flagged.
pub const RICHARDSON_WARN: f64 = 1e-3;

/// First and second derivatives of the dominant eigenvalue in (χ₁, χ₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaDerivatives {
    pub first: [C64; 2],
    pub second: [[C64; 2]; 2],
    pub counting_sign: f64,
    /// Largest relative disagreement between the two Richardson levels (0 for exact methods).
    pub richardson_gap: f64,
}

impl LambdaDerivatives {
    /// Mean photon gain per mode and unit time for one emitter.
    pub fn gain_rates(&self) -> [f64; 2] {
        // −i·s·λ_k has real part s·Im λ_k
        [self.counting_sign * self.first[0].im, self.counting_sign * self.first[1].im]
    }

    /// Photon-number covariance rates `−∂²λ/∂χ_k∂χ_l`.
    pub fn covariance_rates(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (k, row) in out.iter_mut().enumerate() {
            for (l, v) in row.iter_mut().enumerate() {
                *v = -self.second[k][l].re;
            }
        }
        out
    }

    pub fn aptitudes(&self) -> CumulantAptitudes {
        CumulantAptitudes::from_modes(self.gain_rates(), self.covariance_rates())
    }

    pub fn needs_attention(&self) -> bool {
        self.richardson_gap > RICHARDSON_WARN
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaStrategy {
    CharPoly,
    Perturbative,
    Propagation(PropagationOptions),
}

impl LambdaStrategy {
    /// Char-poly for 4×4 generators; perturbative for the 16×16 ladder, where
    /// Faddeev–LeVerrier loses the small low-order coefficients to rounding.
    pub fn default_for(model: ModelTag) -> Self {
        match model {
            ModelTag::TwoLevel => LambdaStrategy::CharPoly,
            ModelTag::FourLevel => LambdaStrategy::Perturbative,
        }
    }
}

/// Richardson combination of central differences at h and h/2, with the relative gap.
pub(crate) fn richardson(coarse: C64, fine: C64) -> (C64, f64) {
    let value = (fine * 4.0 - coarse) / 3.0;
    let gap = (fine - coarse).norm() / value.norm().max(fine.norm()).max(1e-300);
    (value, gap)
}

/// Counting field for stencil coordinates `(χ₊, χ₋)`: χ₁ = χ₊ + χ₋, χ₂ = χ₊ − χ₋.
pub(crate) fn modes_from_plus_minus(u: [f64; 2]) -> [f64; 2] {
    [u[0] + u[1], u[0] - u[1]]
}

/// Maps (±)-coordinate derivatives back to per-mode derivatives.
///
/// Stencils run along χ± so the small sum and difference aptitudes are
/// differenced directly rather than recovered from cancelling mode entries.
pub(crate) fn plus_minus_to_modes(first: [C64; 2], second: [[C64; 2]; 2]) -> ([C64; 2], [[C64; 2]; 2]) {
    let t = [[0.5, 0.5], [0.5, -0.5]];
    let mut f = [C64::new(0.0, 0.0); 2];
    let mut s = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for a in 0..2 {
            f[k] += first[a] * t[k][a];
        }
        for l in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    s[k][l] += second[a][b] * (t[k][a] * t[l][b]);
                }
            }
        }
    }
    (f, s)
}

/// Second-order central stencil of a vector-valued function of (χ₊, χ₋),
/// Richardson-combined over `h` and `h/2`, with separate steps along χ₊ and
/// χ₋. Returns per-component first and second derivatives and the largest
/// relative Richardson gap per component.
pub(crate) fn stencil_pm<F>(f: F, h: [f64; 2]) -> Result<(Vec<[C64; 2]>, Vec<[[C64; 2]; 2]>, Vec<f64>)>
where
    F: Fn([f64; 2]) -> Result<Vec<C64>>,
{
    let at = |u: [f64; 2]| f(modes_from_plus_minus(u));
    let f0 = at([0.0, 0.0])?;
    let n = f0.len();
    type Level = (Vec<[C64; 2]>, Vec<[[C64; 2]; 2]>);
    let level = |h: [f64; 2]| -> Result<Level> {
        let zero = C64::new(0.0, 0.0);
        let mut d1 = vec![[zero; 2]; n];
        let mut d2 = vec![[[zero; 2]; 2]; n];
        for a in 0..2 {
            let mut e = [0.0; 2];
            e[a] = h[a];
            let p = at(e)?;
            let m = at([-e[0], -e[1]])?;
            for j in 0..n {
                d1[j][a] = (p[j] - m[j]) / (2.0 * h[a]);
                d2[j][a][a] = (p[j] - f0[j] * 2.0 + m[j]) / (h[a] * h[a]);
            }
        }
        let [u, v] = h;
        let (pp, pm, mp, mm) = (at([u, v])?, at([u, -v])?, at([-u, v])?, at([-u, -v])?);
        for j in 0..n {
            let mixed = (pp[j] - pm[j] - mp[j] + mm[j]) / (4.0 * u * v);
            d2[j][0][1] = mixed;
            d2[j][1][0] = mixed;
        }
        Ok((d1, d2))
    };
    let (c1, c2) = level(h)?;
    let (f1, f2) = level([0.5 * h[0], 0.5 * h[1]])?;
    let mut gaps = vec![0.0f64; n];
    let mut d1 = c1.clone();
    let mut d2 = c2.clone();
    for j in 0..n {
        // gaps are measured against the largest entry of the same order, so
        // a derivative that vanishes by symmetry does not trip the flag
        let mut diff1: f64 = 0.0;
        let mut diff2: f64 = 0.0;
        for a in 0..2 {
            d1[j][a] = richardson(c1[j][a], f1[j][a]).0;
            diff1 = diff1.max((f1[j][a] - c1[j][a]).norm());
            for b in 0..2 {
                d2[j][a][b] = richardson(c2[j][a][b], f2[j][a][b]).0;
                diff2 = diff2.max((f2[j][a][b] - c2[j][a][b]).norm());
            }
        }
        let s1 = d1[j].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let s2 = d2[j].iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let rel = |d: f64, s: f64| if s > 0.0 { d / s } else { 0.0 };
        gaps[j] = rel(diff1, s1).max(rel(diff2, s2));
    }
    Ok((d1, d2, gaps))
}

/// Central-difference λ derivatives from any scalar λ(χ) evaluator.
pub(crate) fn central_stencil<F>(lambda: F, h: [f64; 2], counting_sign: f64) -> Result<LambdaDerivatives>
where
    F: Fn([f64; 2]) -> Result<C64>,
{
    let (d1, d2, gaps) = stencil_pm(|chi| Ok(vec![lambda(chi)?]), h)?;
    let (first, second) = plus_minus_to_modes(d1[0], d2[0]);
    Ok(LambdaDerivatives {
        first,
        second,
        counting_sign,
        richardson_gap: gaps[0],
    })
}

/// λ derivatives of `spec` with the chosen strategy.
pub fn lambda_derivatives(spec: &GeneratorSpec, strategy: LambdaStrategy) -> Result<LambdaDerivatives> {
    match strategy {
        LambdaStrategy::CharPoly => charpoly::char_poly_strategy(spec, CHI_STEP),
        LambdaStrategy::Perturbative => perturb::perturbative_derivatives(spec),
        LambdaStrategy::Propagation(opts) => propagate::propagation_strategy(spec, &opts, opts.chi_steps),
    }
}

/// Cumulant aptitudes of one emitter from a numeric λ strategy.
pub fn aptitudes_numeric(spec: &GeneratorSpec, strategy: LambdaStrategy) -> Result<CumulantAptitudes> {
    Ok(lambda_derivatives(spec, strategy)?.aptitudes())
}

#[cfg(test)]
mod tests {
    use super::generator::{four_level_spec, two_level_spec};
    use super::*;
    use crate::types::{CountingVector, Drive, FourLevelParams, TwoLevelParams};
    use crate::units::MHZ;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn char_poly_strategy_matches_closed_forms() {
        for e in [-100.0, -35.0, 0.0, 12.0, 77.0] {
            let p = TwoLevelParams::fig2().with_detuning(e * MHZ);
            let spec = two_level_spec(&p, Drive::rotated(60.0 * MHZ));
            let num = lambda_derivatives(&spec, LambdaStrategy::CharPoly).unwrap();
            assert!(!num.needs_attention());
            let a = num.aptitudes();
            let c = aptitudes_analytic_two_level(&p, 60.0 * MHZ);
            assert!(rel(a.plus, c.plus) < 1e-6, "{a:?} {c:?}");
            assert!(rel(a.minus_minus, c.minus_minus) < 1e-6, "{a:?} {c:?}");
            assert!(rel(a.plus_plus, c.plus_plus) < 1e-5, "{a:?} {c:?}");
            if e != 0.0 {
                assert!(rel(a.minus, c.minus) < 1e-6, "{a:?} {c:?}");
            }
        }
    }

    #[test]
    fn paper_extra_term_vanishes_for_two_level() {
        // The a₂^{(α)} term of the paper's second-derivative formula multiplies a₂'s χ-slope,
        // which is zero for the two-level generator.
        let p = TwoLevelParams::fig2().with_detuning(20.0 * MHZ);
        let spec = two_level_spec(&p, Drive::new([3e7, 4e7], [0.3, -0.5]));
        let a2 = |chi: [f64; 2]| charpoly::char_poly_scaled(&spec.tilted(CountingVector(chi)).matrix, spec.rate_scale).coeffs[2];
        for k in 0..2 {
            let mut e = [0.0; 2];
            e[k] = 1e-3;
            let d = (a2(e) - a2([-e[0], -e[1]])) / 2e-3;
            assert!(d.norm() < 1e-9 * a2([0.0, 0.0]).norm());
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let p = TwoLevelParams::fig2().with_detuning(9.0 * MHZ);
        let spec = two_level_spec(&p, Drive::rotated(60.0 * MHZ));
        let opts = PropagationOptions::for_rates(p.gamma, 60.0 * MHZ);
        let chi = [0.03, -0.01];
        let a = dominant_eigenvalue_prop(&spec.tilted(CountingVector(chi)), &opts).unwrap().lambda;
        let b = dominant_eigenvalue_prop(&spec.tilted(CountingVector([-chi[0], -chi[1]])), &opts)
            .unwrap()
            .lambda;
        assert!((a - b.conj()).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn four_level_zero_probe_has_zero_aptitudes() {
        let q = FourLevelParams::fig5();
        let spec = four_level_spec(&q, Drive::new([0.0, 0.0], [0.0, 0.0]));
        let a = aptitudes_numeric(&spec, LambdaStrategy::Perturbative).unwrap();
        for v in [a.plus, a.minus, a.plus_plus, a.minus_minus, a.plus_minus] {
            assert!(v.abs() < 1e-20, "{a:?}");
        }
    }

    #[test]
    fn four_level_absorbs_on_resonance() {
        let q = FourLevelParams::fig5();
        let w = q.omega_p_ref / std::f64::consts::SQRT_2;
        let a = aptitudes_numeric(&four_level_spec(&q, Drive::rotated(w)), LambdaStrategy::Perturbative).unwrap();
        assert!(a.plus < 0.0, "{a:?}");
        a.validate().unwrap();
    }

    #[test]
    fn four_level_perturbative_matches_propagation() {
        let q = FourLevelParams::fig5().with_probe_detuning(9.0 * MHZ);
        let w = q.omega_p_ref / std::f64::consts::SQRT_2;
        let spec = four_level_spec(&q, Drive::rotated(w));
        let exact = aptitudes_numeric(&spec, LambdaStrategy::Perturbative).unwrap();
        let opts = PropagationOptions::for_rates(q.gamma_c, spec.rate_scale);
        let prop = aptitudes_numeric(&spec, LambdaStrategy::Propagation(opts)).unwrap();
        assert!(rel(prop.plus, exact.plus) < 1e-3, "{prop:?} {exact:?}");
        assert!(rel(prop.minus_minus, exact.minus_minus) < 1e-3, "{prop:?} {exact:?}");
    }
}
