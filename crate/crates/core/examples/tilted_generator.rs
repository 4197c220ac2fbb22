//! Build the counting-field tilted generator and inspect it at χ = 0 and χ ≠ 0.

use anyhow::Result;
use prft_sense::engine::{build_four_level, build_two_level, char_poly};
use prft_sense::types::{CountingVector, Drive, FourLevelParams, TwoLevelParams};
use prft_sense::units::MHZ;

fn main() -> Result<()> {
    let params = TwoLevelParams::fig2().with_detuning(20.0 * MHZ);
    let drive = Drive::rotated(60.0 * MHZ);

    let l0 = build_two_level(&params, drive, CountingVector::ZERO);
    println!("two-level L_0: {}x{}, |tr row| = {:.2e} (trace preserving)", l0.dim * l0.dim, l0.dim * l0.dim, l0.trace_row().norm());

    let chi = CountingVector::new([0.3, -0.1])?;
    let lc = build_two_level(&params, drive, chi);
    println!("two-level L_chi: |tr row| = {:.3e} rad/s, ||L|| = {:.3e}", lc.trace_row().norm(), lc.frobenius_norm());

    let poly = char_poly(&l0)?;
    println!("char poly degree {}, a_0 = {:.3e}", poly.degree(), poly.coeffs[0].norm());

    let four = build_four_level(&FourLevelParams::fig5(), Drive::rotated(1.9 * MHZ), CountingVector::ZERO);
    println!("four-level L_0: {}x{}, |tr row| = {:.2e}", four.dim * four.dim, four.dim * four.dim, four.trace_row().norm());
    Ok(())
}
