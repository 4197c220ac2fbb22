//! Fisher information of the terminal photon statistics with respect to a
//! model parameter, and scans of it over a second parameter.

use super::fisher::{gaussian_fisher, FisherResult};
use crate::error::{Error, Result};
use crate::flow::{integrate_rotated_means, integrate_rotated_with, CoefficientSource, DEFAULT_STEPS};
use crate::models::{Model, ParamTag};
use crate::types::{Mat2, Vec2};
use rayon::prelude::*;

/// Relative finite-difference step for ∂X n̄.
pub const REL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherOptions {
    pub steps: usize,
    pub rel_step: f64,
    pub source: CoefficientSource,
    /// Initial total photon number. `None` uses the model's reference.
    pub n_plus: Option<f64>,
}

impl Default for FisherOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            rel_step: REL_STEP,
            source: CoefficientSource::Exact,
            n_plus: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherPoint {
    pub estimated: ParamTag,
    pub x_value: f64,
    pub fisher: FisherResult,
    /// Same mean derivative against the initial shot noise diag(n̄₊/2).
    pub shot_noise: FisherResult,
    pub mean_nplus: f64,
    pub mean_theta: f64,
    pub var_nplus: f64,
    pub var_nminus: f64,
    /// ∂X n̄ in the rotated measurement basis.
    pub derivative: Vec2,
    pub richardson_gap: f64,
}

/// Terminal (θ̄, n̄₊) with only the mean flow.
fn terminal_means(model: &Model, n_plus: f64, steps: usize) -> Result<[f64; 2]> {
    let t = integrate_rotated_means(model, n_plus, steps)?;
    Ok([t.final_theta(), t.final_n_plus()])
}

/// Fisher information for `estimated` at the model's current parameters.
pub fn fisher_at(model: &Model, estimated: ParamTag, opts: &FisherOptions) -> Result<FisherPoint> {
    let n0 = opts.n_plus.unwrap_or_else(|| model.n_ref());
    let x = model.param(estimated);
    let dx = (opts.rel_step * x.abs()).max(opts.rel_step * estimated.step_floor());
    let shifted = |s: f64| -> Result<[f64; 2]> {
        let m = model.with_param(estimated, x + s)?;
        terminal_means(&m, n0, opts.steps)
    };
    let central = |h: f64| -> Result<[f64; 2]> {
        let (p, m) = (shifted(h)?, shifted(-h)?);
        Ok([(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)])
    };
    let coarse = central(dx)?;
    let fine = central(0.5 * dx)?;
    let mut d = [0.0; 2];
    let mut gap: f64 = 0.0;
    for k in 0..2 {
        d[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
        let scale = fine[k].abs().max(coarse[k].abs());
        if scale > 0.0 {
            gap = gap.max((fine[k] - coarse[k]).abs() / scale);
        }
    }

    let traj = integrate_rotated_with(model, n0, opts.steps, opts.source)?;
    let np = traj.final_n_plus();
    let sigma = traj
        .final_covariance()
        .ok_or_else(|| Error::Numerical("rotated integration returned no covariance".into()))?;
    // n̄₁ = n̄₊(1 − sin 2θ̄)/2, n̄₂ = n̄₊(1 + sin 2θ̄)/2, linearised about the
    // measurement basis at X.
    let [d_theta, d_np] = d;
    let dn = Vec2::new(-np * d_theta + 0.5 * d_np, np * d_theta + 0.5 * d_np);
    let fisher = gaussian_fisher(&dn, &sigma)?;
    let shot_noise = gaussian_fisher(&dn, &(Mat2::identity() * (0.5 * n0)))?;
    Ok(FisherPoint {
        estimated,
        x_value: x,
        fisher,
        shot_noise,
        mean_nplus: np,
        mean_theta: traj.final_theta(),
        var_nplus: sigma[(0, 0)] + sigma[(1, 1)] + 2.0 * sigma[(0, 1)],
        var_nminus: sigma[(0, 0)] + sigma[(1, 1)] - 2.0 * sigma[(0, 1)],
        derivative: dn,
        richardson_gap: gap,
    })
}

/// Fisher information for `estimated` over a grid of `scanned`. Points run in
/// parallel; results keep grid order and failures are tagged with their index.
/// `x_value` in each point is the scanned value.
pub fn fisher_scan(
    model: &Model,
    scanned: ParamTag,
    grid: &[f64],
    estimated: ParamTag,
    opts: &FisherOptions,
) -> Vec<Result<FisherPoint>> {
    grid.par_iter()
        .enumerate()
        .map(|(index, &value)| {
            let tag = |e: Error| Error::AtGridPoint {
                index,
                value,
                source: Box::new(e),
            };
            let m = model.with_param(scanned, value).map_err(tag)?;
            let mut p = fisher_at(&m, estimated, opts).map_err(tag)?;
            p.x_value = value;
            Ok(p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TwoLevelParams;
    use crate::units::MHZ;

    fn opts() -> FisherOptions {
        FisherOptions {
            steps: 200,
            ..Default::default()
        }
    }

    #[test]
    fn density_derivative_is_converged() {
        let m = Model::from(TwoLevelParams::fig2().with_detuning(20.0 * MHZ));
        let p = fisher_at(&m, ParamTag::Density, &opts()).unwrap();
        assert!(p.fisher.value > 0.0);
        assert!(p.richardson_gap < 1e-3, "{}", p.richardson_gap);
        let sum = p.fisher.phase_channel + p.fisher.intensity_channel + p.fisher.cross;
        assert!((sum - p.fisher.value).abs() <= 1e-10 * p.fisher.value);
    }

    #[test]
    fn scan_keeps_grid_order_and_tags_failures() {
        let m = Model::from(TwoLevelParams::fig2());
        let grid = [10.0 * MHZ, -1.0 * MHZ, 30.0 * MHZ];
        let out = fisher_scan(&m, ParamTag::Gamma, &grid, ParamTag::Density, &opts());
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].as_ref().unwrap().x_value, grid[0]);
        assert!(matches!(out[1], Err(Error::AtGridPoint { index: 1, .. })));
        assert_eq!(out[2].as_ref().unwrap().x_value, grid[2]);
    }

    #[test]
    fn fisher_grows_with_length() {
        let m = Model::from(TwoLevelParams::fig2().with_detuning(30.0 * MHZ));
        let mut long = m;
        long.ensemble_mut().z_max *= 2.0;
        let a = fisher_at(&m, ParamTag::Detuning, &opts()).unwrap().fisher.value;
        let b = fisher_at(&long, ParamTag::Detuning, &opts()).unwrap().fisher.value;
        assert!(b > a);
    }
}
