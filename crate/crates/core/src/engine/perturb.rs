//! Exact eigenvalue derivatives by stationary-state perturbation theory.
//!
//! With `r` the stationary state (`L₀r = 0`, `⟨⟨1|r⟩⟩ = 1`) and `⟨⟨1|` the
//! trace functional:
//!
//! ```text
//! λ_k  = ⟨⟨1| L_k r
//! λ_kl = ⟨⟨1| (L_kl r + L_k r_l + L_l r_k),   L₀ r_k = −(L_k − λ_k) r,  ⟨⟨1|r_k⟩⟩ = 0
//! ```
//!
//! All solves share one LU factorisation of the bordered matrix
//! `[[L₀, 1], [1ᵀ, 0]]`, which is regular exactly when the stationary state is unique.

use super::generator::{trace_functional, CMatrix, CVector, GeneratorSpec};
use super::LambdaDerivatives;
use crate::error::{Error, Result};
use crate::types::{CountingVector, C64};
use nalgebra::LU;
use nalgebra::Dyn;

pub struct StationarySolver {
    lu: LU<C64, Dyn, Dyn>,
    trace: CVector,
    stationary: CVector,
    n: usize,
}

impl StationarySolver {
    pub fn new(l0: &CMatrix, dim: usize) -> Result<Self> {
        let n = l0.nrows();
        let trace = trace_functional(dim);
        let mut b = CMatrix::zeros(n + 1, n + 1);
        b.view_mut((0, 0), (n, n)).copy_from(l0);
        for i in 0..n {
            b[(i, n)] = trace[i];
            b[(n, i)] = trace[i];
        }
        let scale = l0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let lu = b.lu();
        let u = lu.u();
        let pivots: Vec<f64> = (0..=n).map(|i| u[(i, i)].norm()).collect();
        let min_pivot = pivots.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_pivot > 1e-11 * scale) {
            return Err(Error::DegenerateGenerator(format!(
                "stationary state is not unique (smallest pivot {min_pivot:.3e}, scale {scale:.3e})"
            )));
        }
        let mut rhs = CVector::zeros(n + 1);
        rhs[n] = C64::new(1.0, 0.0);
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateGenerator("bordered system is singular".into()))?;
        let stationary = sol.rows(0, n).into_owned();
        Ok(Self {
            lu,
            trace,
            stationary,
            n,
        })
    }

    pub fn stationary(&self) -> &CVector {
        &self.stationary
    }

    /// Solve `L₀x = b` with `⟨⟨1|x⟩⟩ = 0` for `b` in the range of `L₀`.
    pub fn solve_range(&self, b: &CVector) -> Result<CVector> {
        let mut rhs = CVector::zeros(self.n + 1);
        rhs.rows_mut(0, self.n).copy_from(b);
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateGenerator("bordered system is singular".into()))?;
        Ok(sol.rows(0, self.n).into_owned())
    }

    fn expect(&self, op: &CMatrix, v: &CVector) -> C64 {
        self.trace.dot(&(op * v))
    }

    /// First-order response `r_k` of the dominant right eigenvector to `dl`.
    fn response(&self, dl: &CMatrix, first: C64) -> Result<CVector> {
        let r = &self.stationary;
        let b = -(dl * r - r * first);
        self.solve_range(&b)
    }
}

/// λ derivatives in the per-mode counting fields (χ₁, χ₂).
pub fn perturbative_derivatives(spec: &GeneratorSpec) -> Result<LambdaDerivatives> {
    let l0 = spec.tilted(CountingVector::ZERO).matrix;
    let solver = StationarySolver::new(&l0, spec.dim)?;
    let r = solver.stationary().clone();
    let dl = [spec.d_chi(0), spec.d_chi(1)];
    let first = [solver.expect(&dl[0], &r), solver.expect(&dl[1], &r)];
    let resp = [solver.response(&dl[0], first[0])?, solver.response(&dl[1], first[1])?];
    let mut second = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for l in k..2 {
            let v = solver.expect(&spec.d2_chi(k, l), &r)
                + solver.expect(&dl[k], &resp[l])
                + solver.expect(&dl[l], &resp[k]);
            second[k][l] = v;
            second[l][k] = v;
        }
    }
    Ok(LambdaDerivatives {
        first,
        second,
        counting_sign: spec.counting_sign,
        richardson_gap: 0.0,
    })
}

/// λ derivatives plus the mixed derivatives `∂²λ/∂χ_k∂Ω_j`.
pub fn perturbative_with_rabi(spec: &GeneratorSpec) -> Result<(LambdaDerivatives, [[C64; 2]; 2])> {
    let l0 = spec.tilted(CountingVector::ZERO).matrix;
    let solver = StationarySolver::new(&l0, spec.dim)?;
    let r = solver.stationary().clone();
    let dl = [spec.d_chi(0), spec.d_chi(1)];
    let first = [solver.expect(&dl[0], &r), solver.expect(&dl[1], &r)];
    let resp = [solver.response(&dl[0], first[0])?, solver.response(&dl[1], first[1])?];
    let mut second = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for l in k..2 {
            let v = solver.expect(&spec.d2_chi(k, l), &r)
                + solver.expect(&dl[k], &resp[l])
                + solver.expect(&dl[l], &resp[k]);
            second[k][l] = v;
            second[l][k] = v;
        }
    }
    // Ω_j leaves the trace invariant, so its first-order eigenvalue shift is 0.
    let dw = [spec.d_rabi(0), spec.d_rabi(1)];
    let resp_w = [solver.response(&dw[0], C64::new(0.0, 0.0))?, solver.response(&dw[1], C64::new(0.0, 0.0))?];
    let mut mixed = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            mixed[k][j] = solver.expect(&spec.d_chi_d_rabi(k, j), &r)
                + solver.expect(&dl[k], &resp_w[j])
                + solver.expect(&dw[j], &resp[k]);
        }
    }
    Ok((
        LambdaDerivatives {
            first,
            second,
            counting_sign: spec.counting_sign,
            richardson_gap: 0.0,
        },
        mixed,
    ))
}

/// Stationary density matrix (column-stacked) of the untilted generator.
pub fn stationary_state(spec: &GeneratorSpec) -> Result<CVector> {
    let l0 = spec.tilted(CountingVector::ZERO).matrix;
    Ok(StationarySolver::new(&l0, spec.dim)?.stationary().clone())
}
