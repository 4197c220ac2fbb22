//! Unit conversion at the config boundary and the photon budget of a pulse.

use anyhow::Result;
use prft_sense::types::fig2_photon_number;
use prft_sense::units::{convert_tagged, photon_budget, Unit};

fn main() -> Result<()> {
    for (value, tag) in [(1.0, "MHz"), (10.0, "cm"), (1.0, "cm2"), (100.0, "mW"), (1e14, "per_m3"), (2.0, "rad_s")] {
        println!("{value:>8} {tag:<7} -> {:.6e}", convert_tagged(value, tag)?);
    }
    println!("known tags: {}", Unit::ALL.map(|u| u.tag()).join(", "));

    // 100 mW for 1 s at 500 nm
    let n = photon_budget(0.1, 1.0, 500e-9);
    println!("photons in the Fig. 2 pulse: {n:.4e} (stored constant {:.4e})", fig2_photon_number());

    if let Err(e) = convert_tagged(1.0, "furlong") {
        println!("rejected: {e}");
    }
    Ok(())
}
