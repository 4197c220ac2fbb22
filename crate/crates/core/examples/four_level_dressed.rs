//! Dressed states of the Rydberg ladder and where the transmission dips should sit.

use anyhow::Result;
use prft_sense::flow::integrate_rotated_means;
use prft_sense::models::{dressed_states, resonance_predictions, ParamTag};
use prft_sense::units::MHZ;
use prft_sense::{FourLevelParams, Model};

fn main() -> Result<()> {
    let p = FourLevelParams::fig5();
    let d = dressed_states(&p)?;
    println!("dressed energies: {:+.3} {:+.3} {:+.3} MHz", d.e_minus / MHZ, d.e_zero / MHZ, d.e_plus / MHZ);
    let predicted: Vec<String> = resonance_predictions(&p).iter().map(|x| format!("{:+.3}", x / MHZ)).collect();
    println!("predicted dips at {} MHz", predicted.join(", "));

    let model = Model::from(p);
    let grid: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.25 * MHZ).collect();
    let mut n_out = Vec::with_capacity(grid.len());
    for x in &grid {
        let m = model.with_param(ParamTag::Detuning, *x)?;
        n_out.push(integrate_rotated_means(&m, m.n_ref(), 100)?.final_n_plus());
    }
    let dips: Vec<String> = (1..grid.len() - 1)
        .filter(|&i| n_out[i] < n_out[i - 1] && n_out[i] < n_out[i + 1])
        .map(|i| format!("{:+.2}", grid[i] / MHZ))
        .collect();
    println!("transmission minima at {} MHz", dips.join(", "));
    Ok(())
}
