//! Estimators for intensity, polarisation rotation and phase.

use anyhow::Result;
use prft_sense::flow::frame_to_lab;
use prft_sense::sensing::{intensity_estimate, phase_estimate, rotation_estimate};
use prft_sense::types::fig2_photon_number;
use prft_sense::units::SPEED_OF_LIGHT;
use prft_sense::Mat2;
use std::f64::consts::PI;

fn main() -> Result<()> {
    let n = fig2_photon_number();
    let omega = 2.0 * PI * SPEED_OF_LIGHT / 500e-9;
    println!("intensity: {:.1} W/m^2", intensity_estimate(n, omega, 1.0, 1e-4));

    let lab = frame_to_lab(0.04, n, &Mat2::identity());
    println!("rotation recovered: {:.12} rad (set 0.04)", rotation_estimate(lab.means[0], lab.means[1]));

    let n0 = 1e6;
    println!("phase, imbalance 100: {:.3e} rad", phase_estimate(n0 + 50.0, n0 - 50.0, n0, n0)?);
    match phase_estimate(3e6, 0.0, n0, n0) {
        Ok(v) => println!("unexpected {v}"),
        Err(e) => println!("saturated: {e}"),
    }
    Ok(())
}
