//! Dominant eigenvalue from the growth rate of `tr ρ_χ(t)` under RK4 propagation.
//!
//! The linear RK4 step is the fixed matrix `M = Σ_{n≤4} (hL)ⁿ/n!`, so `N`
//! steps are `M^N`, evaluated by repeated squaring.

use super::generator::{maximally_mixed, trace_functional, CMatrix, GeneratorSpec, TiltedGenerator};
use super::{central_stencil, LambdaDerivatives};
use crate::error::{Error, Result};
use crate::types::{CountingVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub burn_in: f64,
    pub window: f64,
    pub dt: f64,
    /// Number of slope samples over the window.
    pub samples: usize,
    /// Counting-field steps along (χ₊, χ₋). λ bends much faster in χ₋ when
    /// phase noise dominates, while κ₊₊ is small and loses digits to the fit.
    pub chi_steps: [f64; 2],
}

impl PropagationOptions {
    /// dt = 0.01/max rate, burn-in 40/γ, window 10/γ.
    pub fn for_rates(slowest: f64, fastest: f64) -> Self {
        Self {
            burn_in: 40.0 / slowest,
            window: 10.0 / slowest,
            dt: 0.01 / fastest,
            samples: 64,
            chi_steps: [1e-2, 1e-4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationEstimate {
    pub lambda: C64,
    /// RMS residual of the linear fit relative to the total change of log tr ρ over the window.
    pub residual: f64,
    pub converged: bool,
}

fn rk4_step_matrix(l: &CMatrix, dt: f64) -> CMatrix {
    let n = l.nrows();
    let hl = l * C64::new(dt, 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut m = term.clone();
    for k in 1..=4 {
        term = &term * &hl / C64::new(k as f64, 0.0);
        m += &term;
    }
    m
}

fn matrix_power(m: &CMatrix, mut e: u64) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

fn fit_slope(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|ti| (ti - tm).powi(2)).sum();
    let sxy: f64 = t.iter().zip(y).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    let slope = sxy / sxx;
    let rms = (t
        .iter()
        .zip(y)
        .map(|(ti, yi)| (yi - ym - slope * (ti - tm)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

/// Least-squares slope of `log tr ρ_χ(t)` over `[burn_in, burn_in + window]`, from ρ(0) = I/d.
pub fn dominant_eigenvalue_prop(g: &TiltedGenerator, opts: &PropagationOptions) -> Result<PropagationEstimate> {
    if !(opts.dt > 0.0 && opts.window > 0.0 && opts.burn_in >= 0.0) || opts.samples < 2 {
        return Err(Error::Domain(format!("invalid propagation options {opts:?}")));
    }
    let step = rk4_step_matrix(&g.matrix, opts.dt);
    let burn_steps = (opts.burn_in / opts.dt).round() as u64;
    let stride = ((opts.window / opts.dt / opts.samples as f64).round() as u64).max(1);
    let burn = matrix_power(&step, burn_steps);
    let hop = matrix_power(&step, stride);
    let trace = trace_functional(g.dim);
    let mut rho = &burn * maximally_mixed(g.dim);
    let mut t = Vec::with_capacity(opts.samples + 1);
    let mut re = Vec::with_capacity(opts.samples + 1);
    let mut im = Vec::with_capacity(opts.samples + 1);
    let mut log_scale = 0.0;
    let mut prev_phase: Option<f64> = None;
    let mut unwrap = 0.0;
    for s in 0..=opts.samples {
        let tr = trace.dot(&rho);
        if !(tr.norm() > 0.0) || !tr.norm().is_finite() {
            return Err(Error::Numerical("trace vanished or overflowed during propagation".into()));
        }
        let phase = tr.arg();
        if let Some(p) = prev_phase {
            let mut d = phase - p;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            unwrap += d;
        } else {
            unwrap = phase;
        }
        prev_phase = Some(phase);
        t.push((burn_steps + s as u64 * stride) as f64 * opts.dt);
        re.push(tr.norm().ln() + log_scale);
        im.push(unwrap);
        log_scale += tr.norm().ln();
        rho /= C64::new(tr.norm(), 0.0);
        rho = &hop * rho;
    }
    let (sr, rr) = fit_slope(&t, &re);
    let (si, ri) = fit_slope(&t, &im);
    let span = (t[t.len() - 1] - t[0]) * C64::new(sr, si).norm();
    let rms = rr.hypot(ri);
    let residual = if span > 0.0 { rms / span } else { rms };
    let converged = residual < 1e-6 || rms < 1e-12;
    Ok(PropagationEstimate {
        lambda: C64::new(sr, si),
        residual,
        converged,
    })
}

/// λ derivatives from propagation slopes on a Richardson-extrapolated χ stencil.
pub fn propagation_strategy(spec: &GeneratorSpec, opts: &PropagationOptions, h: [f64; 2]) -> Result<LambdaDerivatives> {
    let lambda = |chi: [f64; 2]| -> Result<C64> {
        Ok(dominant_eigenvalue_prop(&spec.tilted(CountingVector(chi)), opts)?.lambda)
    };
    central_stencil(lambda, h, spec.counting_sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::generator::build_two_level;
    use crate::types::{Drive, TwoLevelParams};

    #[test]
    fn zero_chi_gives_zero_eigenvalue() {
        let p = TwoLevelParams::fig2().with_detuning(3e6);
        let g = build_two_level(&p, Drive::rotated(6e7), CountingVector::ZERO);
        let est = dominant_eigenvalue_prop(&g, &PropagationOptions::for_rates(p.gamma, 6e7)).unwrap();
        assert!(est.lambda.norm() <= 1e-9 * 6e7, "{}", est.lambda);
        assert!(est.converged);
    }

    #[test]
    fn pure_decay_has_zero_eigenvalue_for_any_chi() {
        let p = TwoLevelParams::fig2();
        let g = build_two_level(&p, Drive::new([0.0, 0.0], [0.0, 0.0]), CountingVector([0.05, -0.08]));
        let est = dominant_eigenvalue_prop(&g, &PropagationOptions::for_rates(p.gamma, p.gamma)).unwrap();
        assert!(est.lambda.norm() <= 1e-9 * p.gamma);
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let p = TwoLevelParams::fig2().with_detuning(1e6);
        let g = build_two_level(&p, Drive::rotated(3e6), CountingVector([0.01, 0.0]));
        let m = rk4_step_matrix(&g.matrix, 1e-8);
        let mut prod = CMatrix::identity(4, 4);
        for _ in 0..13 {
            prod = &prod * &m;
        }
        let fast = matrix_power(&m, 13);
        assert!((prod - fast).iter().all(|z| z.norm() < 1e-13));
    }
}
