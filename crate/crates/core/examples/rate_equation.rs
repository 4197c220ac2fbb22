//! Weak-coupling rate-equation aptitudes against the full generator on resonance.

use anyhow::Result;
use prft_sense::engine::rate::two_level_resonant_rate_model;
use prft_sense::engine::{aptitudes_analytic_two_level, rate_equation_aptitudes};
use prft_sense::units::MHZ;
use prft_sense::TwoLevelParams;

fn main() -> Result<()> {
    let omega = 60.0 * MHZ;
    println!("{:>10} {:>14} {:>14} {:>8}", "gamma/MHz", "rate kappa_--", "exact", "ratio");
    for g in [0.01, 0.1, 1.0, 10.0] {
        let (_, k2) = rate_equation_aptitudes(&two_level_resonant_rate_model(g * MHZ, omega))?;
        let exact = aptitudes_analytic_two_level(&TwoLevelParams::fig2().with_gamma(g * MHZ), omega).minus_minus;
        println!("{g:>10} {k2:>14.6e} {exact:>14.6e} {:>8.4}", k2 / exact);
    }
    Ok(())
}
