//! Gaussian Fisher information and its brute-force discrete oracle.

use crate::error::{Error, Result};
use crate::types::{sym2_eigenvalues, Mat2, Vec2};

/// Largest accepted condition number of Σ².
pub const MAX_CONDITION: f64 = 1e12;

/// `I_X = (∂X n̄)ᵀ Σ⁻² (∂X n̄)` split along the (−1, 1) phase channel and
/// the (1, 1) intensity channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    pub value: f64,
    pub phase_channel: f64,
    pub intensity_channel: f64,
    pub cross: f64,
}

pub fn gaussian_fisher(dn: &Vec2, sigma: &Mat2) -> Result<FisherResult> {
    let (lo, hi) = sym2_eigenvalues(sigma);
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(cond < MAX_CONDITION) {
        return Err(Error::SingularCovariance(cond));
    }
    let inv = sigma.try_inverse().ok_or(Error::SingularCovariance(cond))?;
    let value = dn.dot(&(inv * dn)).max(0.0);
    let u_phase = Vec2::new(-1.0, 1.0);
    let u_int = Vec2::new(1.0, 1.0);
    let a = 0.5 * (dn[1] - dn[0]);
    let b = 0.5 * (dn[0] + dn[1]);
    Ok(FisherResult {
        value,
        phase_channel: a * a * u_phase.dot(&(inv * u_phase)),
        intensity_channel: b * b * u_int.dot(&(inv * u_int)),
        cross: 2.0 * a * b * u_phase.dot(&(inv * u_int)),
    })
}

/// `Σ_n p (∂X ln p)²` with a central-difference score on a shared integer grid.
pub fn discrete_fisher(p_minus: &[f64], p0: &[f64], p_plus: &[f64], delta: f64) -> Result<f64> {
    if p_minus.len() != p0.len() || p_plus.len() != p0.len() {
        return Err(Error::Domain("probability tables differ in size".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {delta}")));
    }
    for table in [p_minus, p0, p_plus] {
        if table.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::Domain("negative or non-finite probability".into()));
        }
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
    }
    let mut sum = 0.0;
    for i in 0..p0.len() {
        if p0[i] < 1e-300 {
            continue;
        }
        let dp = (p_plus[i] - p_minus[i]) / (2.0 * delta);
        sum += dp * dp / p0[i];
    }
    Ok(sum)
}

/// Integer grid `[lo, lo + shape)` in two dimensions, row-major in the first index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2 {
    pub lo: [i64; 2],
    pub shape: [usize; 2],
}

impl Grid2 {
    /// Box covering `width` standard deviations around `mean`.
    pub fn around(mean: &Vec2, sigma: &Mat2, width: f64) -> Self {
        let mut lo = [0i64; 2];
        let mut shape = [1usize; 2];
        for k in 0..2 {
            let s = sigma[(k, k)].max(0.0).sqrt();
            let a = (mean[k] - width * s).floor() as i64;
            let b = (mean[k] + width * s).ceil() as i64;
            lo[k] = a;
            shape[k] = (b - a + 1).max(1) as usize;
        }
        Self { lo, shape }
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Normalised Gaussian weights on the integer grid. A zero variance along an
/// axis collapses it to a single column.
pub fn gaussian_table(mean: &Vec2, sigma: &Mat2, grid: &Grid2) -> Result<Vec<f64>> {
    let degenerate = [sigma[(0, 0)] <= 0.0, sigma[(1, 1)] <= 0.0];
    let inv = if degenerate[0] || degenerate[1] {
        let mut d = Mat2::zeros();
        for k in 0..2 {
            if !degenerate[k] {
                d[(k, k)] = 1.0 / sigma[(k, k)];
            }
        }
        d
    } else {
        sigma.try_inverse().ok_or(Error::SingularCovariance(f64::INFINITY))?
    };
    let mut logs = Vec::with_capacity(grid.len());
    for i in 0..grid.shape[0] {
        for j in 0..grid.shape[1] {
            let d = Vec2::new((grid.lo[0] + i as i64) as f64 - mean[0], (grid.lo[1] + j as i64) as f64 - mean[1]);
            logs.push(-0.5 * d.dot(&(inv * d)));
        }
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}
