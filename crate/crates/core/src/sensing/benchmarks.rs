//! Closed-form phase shift and Fisher information of the two-level ensemble
//! for γ ≪ Ω.

use crate::types::TwoLevelParams;

/// Above this γ/Ω the closed forms are reported with a warning.
pub const WEAK_DISSIPATION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakDissipation {
    /// Total phase shift φ̄₀ = 2θ̄(z_max), rad.
    pub phase: f64,
    pub fisher_density: f64,
    pub fisher_detuning: f64,
    pub gamma_over_omega: f64,
}

impl WeakDissipation {
    pub fn outside_regime(&self) -> bool {
        self.gamma_over_omega > WEAK_DISSIPATION_LIMIT
    }
}

/// Closed forms at initial photon number `n_plus`, with N_A = ρ_A𝒜z_max,
/// t = t_M and D₀ = 4ε² + 2Ω²:
///
/// * φ̄₀ = 2εΩ²tN_A/(n̄₊D₀)
/// * 𝓘_ρ = [t𝒜z·2εΩ²/D₀]² / (n̄₊ + 8tN_AΩ⁸/(γD₀³))
/// * 𝓘_ε = [tN_A·2Ω²(2Ω² − 4ε²)/D₀²]² / (same denominator)
pub fn weak_dissipation_benchmarks(params: &TwoLevelParams, n_plus: f64) -> WeakDissipation {
    let e = &params.ensemble;
    let omega = params.rabi(n_plus);
    let o2 = omega * omega;
    let eps = params.detuning;
    let t = e.t_m;
    let n_a = e.emitters();
    let d0 = 4.0 * eps * eps + 2.0 * o2;
    let noise = n_plus + 8.0 * t * n_a * o2.powi(4) / (params.gamma * d0.powi(3));
    let d_density = t * e.area * e.z_max * 2.0 * eps * o2 / d0;
    let d_detuning = t * n_a * 2.0 * o2 * (2.0 * o2 - 4.0 * eps * eps) / (d0 * d0);
    WeakDissipation {
        phase: 2.0 * eps * o2 * t * n_a / (n_plus * d0),
        fisher_density: d_density * d_density / noise,
        fisher_detuning: d_detuning * d_detuning / noise,
        gamma_over_omega: params.gamma / omega,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MHZ;

    #[test]
    fn resonance_structure() {
        let p = TwoLevelParams::fig2().with_gamma(0.1 * MHZ);
        let n = p.n_ref;
        let on = weak_dissipation_benchmarks(&p, n);
        assert_eq!(on.phase, 0.0);
        assert_eq!(on.fisher_density, 0.0);
        let off = weak_dissipation_benchmarks(&p.with_detuning(5.0 * MHZ), n);
        assert!(on.fisher_detuning > 0.0);
        assert!(off.fisher_detuning < on.fisher_detuning);
        assert!(!on.outside_regime());
        assert!(weak_dissipation_benchmarks(&p.with_gamma(30.0 * MHZ), n).outside_regime());
    }

    #[test]
    fn density_information_linear_in_small_gamma() {
        let p = TwoLevelParams::fig2().with_detuning(20.0 * MHZ);
        let n = p.n_ref;
        let a = weak_dissipation_benchmarks(&p.with_gamma(1e-6 * MHZ), n).fisher_density;
        let b = weak_dissipation_benchmarks(&p.with_gamma(2e-6 * MHZ), n).fisher_density;
        assert!((b / a - 2.0).abs() < 1e-3, "{}", b / a);
    }

    #[test]
    fn closed_forms_saturate_at_shot_noise() {
        // γ only enters the added-noise term, so the closed forms rise
        // monotonically towards the shot-noise limit. The decline at large γ
        // comes from the suppressed flux, which only the full flow captures.
        let p = TwoLevelParams::fig2().with_detuning(20.0 * MHZ);
        let n = p.n_ref;
        let v: Vec<f64> = (0..40)
            .map(|i| weak_dissipation_benchmarks(&p.with_gamma(1e4 * 10f64.powf(i as f64 * 0.1)), n).fisher_density)
            .collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let big = weak_dissipation_benchmarks(&p.with_gamma(1e30), n).fisher_density;
        let o2 = p.omega_ref.powi(2);
        let e = &p.ensemble;
        let slope = e.t_m * e.area * e.z_max * 2.0 * p.detuning * o2 / (4.0 * p.detuning.powi(2) + 2.0 * o2);
        assert!((big / (slope * slope / n) - 1.0).abs() < 1e-9);
    }
}
