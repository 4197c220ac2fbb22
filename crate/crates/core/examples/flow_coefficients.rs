//! Flux, diffusion and phase-space matrices in the rotated frame, exact and numeric.

use anyhow::Result;
use prft_sense::flow::{rotated_coefficients, CoefficientSource};
use prft_sense::units::MHZ;
use prft_sense::{FourLevelParams, Model, TwoLevelParams};

fn main() -> Result<()> {
    let two = Model::from(TwoLevelParams::fig2().with_detuning(30.0 * MHZ));
    let n = two.n_ref();
    for (name, src) in [
        ("exact", CoefficientSource::Exact),
        ("charpoly", CoefficientSource::Numeric(two.default_strategy())),
    ] {
        let c = rotated_coefficients(&two, n, src)?;
        println!("two-level {name}:");
        println!("  flux        {:.6e} {:.6e} photons/m", c.flux[0], c.flux[1]);
        println!("  diffusion   {:.6e} {:.6e} / {:.6e}", c.diffusion[(0, 0)], c.diffusion[(0, 1)], c.diffusion[(1, 1)]);
        println!("  phase space {:.6e} {:.6e} / {:.6e} {:.6e}", c.phase_space[(0, 0)], c.phase_space[(0, 1)], c.phase_space[(1, 0)], c.phase_space[(1, 1)]);
    }

    let four = Model::from(FourLevelParams::fig5());
    let c = rotated_coefficients(&four, four.n_ref(), CoefficientSource::Exact)?;
    println!("four-level on resonance: flux {:.6e} {:.6e}, D_11 {:.6e}", c.flux[0], c.flux[1], c.diffusion[(0, 0)]);
    Ok(())
}
