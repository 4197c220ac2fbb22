//! Density Fisher information across detuning, with the shot-noise comparison.

use anyhow::Result;
use prft_sense::models::ParamTag;
use prft_sense::sensing::{fisher_scan, FisherOptions};
use prft_sense::units::MHZ;
use prft_sense::{Model, TwoLevelParams};

fn main() -> Result<()> {
    let model = Model::from(TwoLevelParams::fig2());
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 40.0 * MHZ).collect();
    let opts = FisherOptions::default();
    println!("{:>9} {:>12} {:>12} {:>9} {:>12}", "eps/MHz", "I_prft", "I_shot", "ratio", "VarN-/shot");
    for point in fisher_scan(&model, ParamTag::Detuning, &grid, ParamTag::Density, &opts) {
        let p = point?;
        println!(
            "{:>9.1} {:>12.4e} {:>12.4e} {:>9.3} {:>12.3}",
            p.x_value / MHZ,
            p.fisher.value,
            p.shot_noise.value,
            p.shot_noise.value / p.fisher.value,
            p.var_nminus / model.n_ref()
        );
    }
    Ok(())
}
