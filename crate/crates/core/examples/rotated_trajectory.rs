//! Integrate the rotated-frame flow through the cell and write both frames to CSV.

use anyhow::{Context, Result};
use prft_sense::flow::{integrate_rotated, phase_from_rotation, write_rotated_csv, DEFAULT_STEPS};
use prft_sense::sensing::plus_minus_stats;
use prft_sense::units::MHZ;
use prft_sense::{Model, TwoLevelParams};
use std::fs::File;
use std::path::PathBuf;

fn main() -> Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("rotated_trajectory.csv"));
    let model = Model::from(TwoLevelParams::fig2().with_detuning(30.0 * MHZ));
    let traj = integrate_rotated(&model, model.n_ref(), DEFAULT_STEPS)?;

    for i in (0..traj.len()).step_by(DEFAULT_STEPS / 5) {
        let s = plus_minus_stats(&traj.to_lab(i));
        println!(
            "z = {:5.3} m  theta = {:+.5e}  n1 = {:.6e}  n2 = {:.6e}  Var n- / n+ = {:.3}",
            traj.z[i],
            traj.theta[i],
            traj.to_lab(i).means[0],
            traj.to_lab(i).means[1],
            s.var_minus / s.n_plus
        );
    }
    println!("phase shift at the exit: {:.6e} rad", phase_from_rotation(traj.final_theta()));

    let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    write_rotated_csv(&traj, file)?;
    println!("wrote {}", out.display());
    Ok(())
}
