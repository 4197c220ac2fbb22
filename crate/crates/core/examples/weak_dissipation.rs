//! Numeric Fisher information against the γ ≪ Ω closed forms.

use anyhow::Result;
use prft_sense::flow::integrate_rotated_means;
use prft_sense::models::ParamTag;
use prft_sense::sensing::{fisher_at, weak_dissipation_benchmarks, FisherOptions};
use prft_sense::units::MHZ;
use prft_sense::{Model, TwoLevelParams};

fn main() -> Result<()> {
    let opts = FisherOptions::default();
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "eps/MHz", "phi", "phi_cf", "I_rho", "I_rho_cf", "I_eps", "I_eps_cf");
    for eps in [0.0, 10.0, 20.0, 30.0, 50.0] {
        let p = TwoLevelParams::fig2().with_gamma(0.1 * MHZ).with_detuning(eps * MHZ);
        let cf = weak_dissipation_benchmarks(&p, p.n_ref);
        let m = Model::from(p);
        let phi = 2.0 * integrate_rotated_means(&m, p.n_ref, opts.steps)?.final_theta();
        let rho = fisher_at(&m, ParamTag::Density, &opts)?;
        let det = fisher_at(&m, ParamTag::Detuning, &opts)?;
        println!(
            "{eps:>8.1} {phi:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            cf.phase, rho.fisher.value, cf.fisher_density, det.fisher.value, cf.fisher_detuning
        );
    }
    Ok(())
}
