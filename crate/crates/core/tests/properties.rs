use nalgebra::{Matrix2, Vector2};
use prft_sense::engine::{aptitudes_analytic_two_level, aptitudes_numeric, LambdaStrategy};
use prft_sense::flow::{frame_to_lab, integrate_rotated};
use prft_sense::models::ParamTag;
use prft_sense::sensing::{
    discrete_fisher, fisher_at, gaussian_fisher, gaussian_table, plus_minus_stats, rotation_estimate, FisherOptions,
    Grid2,
};
use prft_sense::types::is_psd;
use prft_sense::units::MHZ;
use prft_sense::{Mat2, Model, PhotonModeSet, TwoLevelParams, Vec2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn covariance(v1: f64, v2: f64, rho: f64) -> Mat2 {
    let c = rho * (v1 * v2).sqrt();
    Mat2::new(v1, c, c, v2)
}

fn spd() -> impl Strategy<Value = Mat2> {
    (1.0f64..50.0, 1.0f64..50.0, -0.95f64..0.95).prop_map(|(a, b, r)| covariance(a, b, r))
}

fn vec2() -> impl Strategy<Value = Vec2> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| Vec2::new(a, b))
}

proptest! {
    #[test]
    fn gaussian_fisher_is_non_negative(dn in vec2(), s in spd()) {
        let r = gaussian_fisher(&dn, &s).unwrap();
        prop_assert!(r.value >= 0.0);
        if dn.norm() > 1e-6 {
            prop_assert!(r.value > 0.0);
        }
    }

    #[test]
    fn channels_sum_to_total(dn in vec2(), s in spd()) {
        let r = gaussian_fisher(&dn, &s).unwrap();
        let sum = r.phase_channel + r.intensity_channel + r.cross;
        prop_assert!((sum - r.value).abs() <= 1e-12 * r.value.max(1e-300) + 1e-14);
    }

    #[test]
    fn rescaling_the_parameter(dn in vec2(), s in spd()) {
        // X → 10X divides ∂X n̄ by 10.
        let a = gaussian_fisher(&dn, &s).unwrap().value;
        let b = gaussian_fisher(&(dn / 10.0), &s).unwrap().value;
        prop_assert!((b * 100.0 - a).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn plus_minus_variances_are_consistent(s in spd(), m1 in 1.0f64..1e6, m2 in 1.0f64..1e6) {
        let st = plus_minus_stats(&PhotonModeSet { means: Vec2::new(m1, m2), phases: Vec2::zeros(), covariance: s });
        prop_assert!(st.var_plus >= 0.0 && st.var_minus >= 0.0);
        prop_assert!(st.cov_pm.abs() <= (st.var_plus * st.var_minus).sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn rotation_round_trip(theta in -0.78f64..0.78, n in 1e3f64..1e18) {
        let lab = frame_to_lab(theta, n, &Mat2::identity());
        prop_assert!((rotation_estimate(lab.means[0], lab.means[1]) - theta).abs() < 1e-10);
    }

    #[test]
    fn lab_covariance_stays_psd(theta in -0.7f64..0.7, s in spd()) {
        let lab = frame_to_lab(theta, 1e6, &s);
        prop_assert!(is_psd(&lab.covariance, 1e-12));
    }

    #[test]
    fn char_poly_matches_closed_forms(eps in -100.0f64..100.0, g in 0.5f64..2.0) {
        let p = TwoLevelParams::fig2().with_detuning(eps * MHZ).with_gamma(g * MHZ);
        let m = Model::from(p);
        let a = aptitudes_numeric(&m.spec(m.rotated_drive(p.n_ref)), LambdaStrategy::CharPoly).unwrap();
        let c = aptitudes_analytic_two_level(&p, p.omega_ref);
        prop_assert!((a.plus / c.plus - 1.0).abs() < 1e-5);
        prop_assert!((a.minus_minus / c.minus_minus - 1.0).abs() < 1e-5);
    }
}

/// 20 random desk-scale Gaussians: analytic Fisher against the brute-force sum.
#[test]
fn gaussian_matches_discrete_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    use rand::Rng;
    for _ in 0..20 {
        let mean = Vec2::new(rng.random_range(100.0..1000.0), rng.random_range(100.0..1000.0));
        let sigma = covariance(mean[0], mean[1], rng.random_range(-0.9..0.9));
        let slope = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let dx = 1e-3;
        let grid = Grid2::around(&mean, &sigma, 10.0);
        let table = |x: f64| gaussian_table(&(mean + slope * x), &sigma, &grid).unwrap();
        let oracle = discrete_fisher(&table(-dx), &table(0.0), &table(dx), dx).unwrap();
        let exact = gaussian_fisher(&slope, &sigma).unwrap().value;
        assert!((oracle / exact - 1.0).abs() < 0.01, "{oracle} vs {exact}");
    }
}

/// Maximum-likelihood estimates from 10⁴ draws of the terminal Gaussian
/// cannot beat 1/I (checked at 3σ of the sample-variance spread).
#[test]
fn cramer_rao_holds_for_sampled_estimates() {
    let p = TwoLevelParams::fig2().with_detuning(30.0 * MHZ);
    let model = Model::from(p);
    let opts = FisherOptions {
        steps: 200,
        ..Default::default()
    };
    let point = fisher_at(&model, ParamTag::Density, &opts).unwrap();
    let sigma = integrate_rotated(&model, p.n_ref, opts.steps).unwrap().final_covariance().unwrap();
    let inv = sigma.try_inverse().unwrap();
    let v = point.derivative;
    let info = v.dot(&(inv * v));
    let chol = Matrix2::from(sigma).cholesky().unwrap().l();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 10_000;
    let mut est = Vec::with_capacity(draws);
    for _ in 0..draws {
        let z = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let dev = chol * z;
        // linear-Gaussian MLE of the density offset
        est.push(v.dot(&(inv * dev)) / info);
    }
    let mean = est.iter().sum::<f64>() / draws as f64;
    let var = est.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let bound = 1.0 / point.fisher.value;
    let spread = (2.0 / (draws - 1) as f64).sqrt();
    assert!(var >= bound * (1.0 - 3.0 * spread), "var {var:e} below bound {bound:e}");
    assert!(var <= bound * (1.0 + 3.0 * spread), "MLE should be efficient: {var:e} vs {bound:e}");
}
