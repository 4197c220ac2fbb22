//! Counting-field tilted Liouvillians on column-stacked density matrices.
//!
//! `vec(AρB) = (Bᵀ ⊗ A) vec ρ`, so left multiplication is `I ⊗ H` and right
//! multiplication is `Hᵀ ⊗ I`. The trace functional is `vec(I)ᵀ`.

use crate::types::{CountingVector, Drive, FourLevelParams, TwoLevelParams, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::SQRT_2;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    TwoLevel,
    FourLevel,
}

/// Everything needed to assemble `L_χ` and its derivatives for one emitter.
///
/// The Hamiltonian is `H(φ) = H₀ + Σ_k Ω_k (e^{iφ_k} U_k + h.c.)`.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub model: ModelTag,
    pub dim: usize,
    pub h0: CMatrix,
    /// Coupling operator per unit Rabi frequency of each mode.
    pub unit_couplings: [CMatrix; 2],
    pub drive: Drive,
    /// (rate, jump operator) pairs.
    pub jumps: Vec<(f64, CMatrix)>,
    /// Photon gain rate is `−i·sign·∂λ/∂χ`.
    pub counting_sign: f64,
    /// Largest rate in the problem, used for rescaling and step sizes.
    pub rate_scale: f64,
}

/// A built generator together with the snapshot it was built from.
#[derive(Debug, Clone)]
pub struct TiltedGenerator {
    pub model: ModelTag,
    pub dim: usize,
    pub matrix: CMatrix,
    pub drive: Drive,
    pub chi: CountingVector,
    pub counting_sign: f64,
    pub rate_scale: f64,
}

impl TiltedGenerator {
    /// `Lᵀ vec(I)`, the trace row stored as a column; zero at χ = 0 for a trace-preserving generator.
    pub fn trace_row(&self) -> CVector {
        self.matrix.transpose() * trace_functional(self.dim)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `vec(I)` for a `d`-dimensional Hilbert space.
pub fn trace_functional(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i + d * i] = C64::new(1.0, 0.0);
    }
    v
}

/// `vec(I/d)`.
pub fn maximally_mixed(d: usize) -> CVector {
    trace_functional(d) / C64::new(d as f64, 0.0)
}

fn left(h: &CMatrix) -> CMatrix {
    let d = h.nrows();
    CMatrix::identity(d, d).kronecker(h)
}

fn right(h: &CMatrix) -> CMatrix {
    let d = h.nrows();
    h.transpose().kronecker(&CMatrix::identity(d, d))
}

/// Lindblad dissipator `OρO† − ½{O†O, ρ}` as a superoperator.
pub fn dissipator(op: &CMatrix) -> CMatrix {
    let odo = op.adjoint() * op;
    op.conjugate().kronecker(op) - (left(&odo) + right(&odo)) * C64::new(0.5, 0.0)
}

fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

impl GeneratorSpec {
    /// `H` with the drive phases replaced by `phases`.
    pub fn hamiltonian(&self, phases: [f64; 2]) -> CMatrix {
        let mut h = self.h0.clone();
        for k in 0..2 {
            let x = &self.unit_couplings[k] * C64::from_polar(self.drive.rabi[k], phases[k]);
            h += &x + x.adjoint();
        }
        h
    }

    fn phase_derivative(&self, k: usize, order: u32) -> CMatrix {
        // d^n/dφ^n of Ω(e^{iφ}U + e^{−iφ}U†) = Ω(iⁿ e^{iφ}U + (−i)ⁿ e^{−iφ}U†)
        let x = &self.unit_couplings[k] * C64::from_polar(self.drive.rabi[k], self.drive.phase[k]);
        let ip = I.powu(order);
        let im = (-I).powu(order);
        &x * ip + x.adjoint() * im
    }

    fn dissipative_part(&self) -> CMatrix {
        let n = self.dim * self.dim;
        let mut l = CMatrix::zeros(n, n);
        for (rate, op) in &self.jumps {
            if *rate != 0.0 {
                l += dissipator(op) * C64::new(*rate, 0.0);
            }
        }
        l
    }

    /// `L_χ ρ = −i[H_{φ+χ/2}ρ − ρH_{φ−χ/2}] + Σ γ_j D[O_j]ρ`.
    pub fn tilted(&self, chi: CountingVector) -> TiltedGenerator {
        let p = self.drive.phase;
        let c = chi.0;
        let hp = self.hamiltonian([p[0] + 0.5 * c[0], p[1] + 0.5 * c[1]]);
        let hm = self.hamiltonian([p[0] - 0.5 * c[0], p[1] - 0.5 * c[1]]);
        let matrix = (left(&hp) - right(&hm)) * (-I) + self.dissipative_part();
        TiltedGenerator {
            model: self.model,
            dim: self.dim,
            matrix,
            drive: self.drive,
            chi,
            counting_sign: self.counting_sign,
            rate_scale: self.rate_scale,
        }
    }

    /// `∂L/∂χ_k` at χ = 0.
    pub fn d_chi(&self, k: usize) -> CMatrix {
        let h1 = self.phase_derivative(k, 1);
        (left(&h1) + right(&h1)) * (-0.5 * I)
    }

    /// `∂²L/∂χ_k∂χ_l` at χ = 0 (zero unless k = l).
    pub fn d2_chi(&self, k: usize, l: usize) -> CMatrix {
        let n = self.dim * self.dim;
        if k != l {
            return CMatrix::zeros(n, n);
        }
        let h2 = self.phase_derivative(k, 2);
        (left(&h2) - right(&h2)) * (-0.25 * I)
    }

    /// `∂L/∂Ω_j` at χ = 0.
    pub fn d_rabi(&self, j: usize) -> CMatrix {
        let x = &self.unit_couplings[j] * C64::from_polar(1.0, self.drive.phase[j]);
        let h = &x + x.adjoint();
        (left(&h) - right(&h)) * (-I)
    }

    /// `∂²L/∂χ_k∂Ω_j` at χ = 0.
    pub fn d_chi_d_rabi(&self, k: usize, j: usize) -> CMatrix {
        let n = self.dim * self.dim;
        if k != j {
            return CMatrix::zeros(n, n);
        }
        let x = &self.unit_couplings[k] * C64::from_polar(1.0, self.drive.phase[k]);
        let h1 = &x * I - x.adjoint() * I;
        (left(&h1) + right(&h1)) * (-0.5 * I)
    }
}

/// Two-level emitter, |e⟩ = 0, |g⟩ = 1:
/// `H = ε/2 σ_z + Σ_k (Ω_k/2 e^{iφ_k} σ₋ + h.c.)`, decay `γ D[σ₋]`.
pub fn two_level_spec(params: &TwoLevelParams, drive: Drive) -> GeneratorSpec {
    let d = 2;
    let mut h0 = CMatrix::zeros(d, d);
    h0[(0, 0)] = C64::new(0.5 * params.detuning, 0.0);
    h0[(1, 1)] = C64::new(-0.5 * params.detuning, 0.0);
    let sigma_minus = ket_bra(d, 1, 0);
    let unit = &sigma_minus * C64::new(0.5, 0.0);
    let omega_eff = drive.rabi[0].hypot(drive.rabi[1]);
    GeneratorSpec {
        model: ModelTag::TwoLevel,
        dim: d,
        h0,
        unit_couplings: [unit.clone(), unit],
        drive,
        jumps: vec![(params.gamma, sigma_minus)],
        counting_sign: 1.0,
        rate_scale: params.gamma.max(omega_eff).max(params.detuning.abs()).max(f64::MIN_POSITIVE),
    }
}

/// Ladder |a⟩–|b⟩–|c⟩–|d⟩ with probe `Ω_P/2 |b⟩⟨a|`,
/// `Ω_P = (√2/i)(Ω₁e^{iφ₁} − Ω₂e^{iφ₂})`, coupling `Ω_C/2 |c⟩⟨b|`, signal
/// `Ω_S/2 |d⟩⟨c|`, and decays |j⟩ → |a⟩.
pub fn four_level_spec(params: &FourLevelParams, drive: Drive) -> GeneratorSpec {
    let d = 4;
    let mut h0 = CMatrix::zeros(d, d);
    for (j, e) in params.detunings.iter().enumerate() {
        h0[(j, j)] = C64::new(*e, 0.0);
    }
    let half = C64::new(0.5, 0.0);
    let c = ket_bra(d, 2, 1) * C64::new(0.5 * params.omega_c, 0.0);
    let s = ket_bra(d, 3, 2) * C64::new(0.5 * params.omega_s, 0.0);
    h0 += &c + c.adjoint() + &s + s.adjoint();
    let probe = ket_bra(d, 1, 0) * (half * C64::new(SQRT_2, 0.0) / I);
    let jumps = vec![
        (params.gamma_b, ket_bra(d, 0, 1)),
        (params.gamma_c, ket_bra(d, 0, 2)),
        (params.gamma_d, ket_bra(d, 0, 3)),
    ];
    let mut scale = params.omega_c.max(params.omega_s).max(params.gamma_b);
    scale = scale.max(SQRT_2 * drive.rabi[0].hypot(drive.rabi[1]));
    for e in params.detunings {
        scale = scale.max(e.abs());
    }
    GeneratorSpec {
        model: ModelTag::FourLevel,
        dim: d,
        h0,
        unit_couplings: [probe.clone(), -probe],
        drive,
        jumps,
        counting_sign: -1.0,
        rate_scale: scale.max(f64::MIN_POSITIVE),
    }
}

pub fn build_two_level(params: &TwoLevelParams, drive: Drive, chi: CountingVector) -> TiltedGenerator {
    two_level_spec(params, drive).tilted(chi)
}

pub fn build_four_level(params: &FourLevelParams, drive: Drive, chi: CountingVector) -> TiltedGenerator {
    four_level_spec(params, drive).tilted(chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MHZ;
    use std::f64::consts::FRAC_PI_2;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn trace_preserved_at_zero_chi() {
        let p = TwoLevelParams::fig2().with_detuning(13.0 * MHZ);
        let g = build_two_level(&p, Drive::new([3e7, 4e7], [0.3, -1.1]), CountingVector::ZERO);
        assert!(g.trace_row().camax() <= 1e-10 * g.frobenius_norm());
        let q = FourLevelParams::fig5().with_probe_detuning(2.0 * MHZ);
        let g = build_four_level(&q, Drive::rotated(2e6), CountingVector::ZERO);
        assert!(g.trace_row().camax() <= 1e-10 * g.frobenius_norm());
    }

    #[test]
    fn analytic_chi_derivatives_match_differences() {
        let q = FourLevelParams::fig5().with_probe_detuning(1.5 * MHZ);
        let spec = four_level_spec(&q, Drive::new([1e6, 1.7e6], [0.4, 1.2]));
        let h = 1e-4;
        for k in 0..2 {
            let mut e = [0.0; 2];
            e[k] = h;
            let lp = spec.tilted(CountingVector(e)).matrix;
            let lm = spec.tilted(CountingVector([-e[0], -e[1]])).matrix;
            let l0 = spec.tilted(CountingVector::ZERO).matrix;
            let fd1 = (&lp - &lm) / C64::new(2.0 * h, 0.0);
            let fd2 = (&lp - &l0 * C64::new(2.0, 0.0) + &lm) / C64::new(h * h, 0.0);
            assert!(max_abs(&(fd1 - spec.d_chi(k))) < 1e-6 * max_abs(&spec.d_chi(k)));
            assert!(max_abs(&(fd2 - spec.d2_chi(k, k))) < 1e-4 * max_abs(&spec.d2_chi(k, k)));
        }
    }

    #[test]
    fn rabi_derivatives_match_differences() {
        let p = TwoLevelParams::fig2().with_detuning(7.0 * MHZ);
        let drive = Drive::new([2e7, 3e7], [0.2, 1.0]);
        let spec = two_level_spec(&p, drive);
        for j in 0..2 {
            let dw = 1e3;
            let mut up = drive;
            up.rabi[j] += dw;
            let mut dn = drive;
            dn.rabi[j] -= dw;
            let fd = (two_level_spec(&p, up).tilted(CountingVector::ZERO).matrix
                - two_level_spec(&p, dn).tilted(CountingVector::ZERO).matrix)
                / C64::new(2.0 * dw, 0.0);
            assert!(max_abs(&(fd - spec.d_rabi(j))) < 1e-8);
            let fdk = (two_level_spec(&p, up).d_chi(j) - two_level_spec(&p, dn).d_chi(j)) / C64::new(2.0 * dw, 0.0);
            assert!(max_abs(&(fdk - spec.d_chi_d_rabi(j, j))) < 1e-8);
        }
    }

    #[test]
    fn four_level_without_ladder_reduces_to_two_level_block() {
        let mut q = FourLevelParams::fig5();
        q.omega_c = 0.0;
        q.omega_s = 0.0;
        q.detunings = [0.0, 3e5, 0.0, 0.0];
        let (w1, w2, f1, f2) = (1.1e6, 0.7e6, 0.4, -0.9);
        let chi = [0.02, -0.01];
        let l4 = build_four_level(&q, Drive::new([w1, w2], [f1, f2]), CountingVector(chi)).matrix;
        // |a⟩ plays |g⟩ and |b⟩ plays |e⟩; the probe's |a⟩⟨b| amplitude is
        // i(√2/2)(Ω₁e^{−iφ₁} − Ω₂e^{−iφ₂}), i.e. a two-level drive with
        // Ω' = √2Ω, φ' = (π/2 − φ₁, −π/2 − φ₂) and a mirrored counting field.
        let p2 = TwoLevelParams {
            detuning: 3e5,
            gamma: q.gamma_b,
            omega_ref: 1.0,
            n_ref: 1.0,
            ensemble: q.ensemble,
        };
        let drive2 = Drive::new([SQRT_2 * w1, SQRT_2 * w2], [FRAC_PI_2 - f1, -FRAC_PI_2 - f2]);
        let l2 = build_two_level(&p2, drive2, CountingVector([-chi[0], -chi[1]])).matrix;
        let map = [1usize, 0];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let a = l2[(i + 2 * j, k + 2 * l)];
                        let b = l4[(map[i] + 4 * map[j], map[k] + 4 * map[l])];
                        assert!((a - b).norm() < 1e-9 * 1e6, "{i}{j}{k}{l}: {a} vs {b}");
                    }
                }
            }
        }
    }
}
