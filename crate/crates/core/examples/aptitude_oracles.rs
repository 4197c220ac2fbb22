//! Two-level cumulant aptitudes from the closed forms, the characteristic
//! polynomial and propagation slopes, side by side.

use anyhow::Result;
use prft_sense::engine::{aptitudes_analytic_two_level, aptitudes_numeric, LambdaStrategy};
use prft_sense::units::MHZ;
use prft_sense::{Model, TwoLevelParams};

fn main() -> Result<()> {
    let omega = 60.0 * MHZ;
    println!("{:>8} {:>10} {:>14} {:>14} {:>14}", "eps/MHz", "source", "kappa_+", "kappa_--", "kappa_+-");
    for eps in [-60.0, 0.0, 25.0] {
        let p = TwoLevelParams::fig2().with_detuning(eps * MHZ);
        let model = Model::from(p);
        let spec = model.spec(model.rotated_drive(p.n_ref));
        let prop = LambdaStrategy::Propagation(model.propagation_options(model.rotated_drive(p.n_ref)));
        let rows = [
            ("closed", aptitudes_analytic_two_level(&p, omega)),
            ("charpoly", aptitudes_numeric(&spec, LambdaStrategy::CharPoly)?),
            ("perturb", aptitudes_numeric(&spec, LambdaStrategy::Perturbative)?),
            ("propagate", aptitudes_numeric(&spec, prop)?),
        ];
        for (name, a) in rows {
            println!("{eps:>8.1} {name:>10} {:>14.6e} {:>14.6e} {:>14.6e}", a.plus, a.minus_minus, a.plus_minus);
        }
    }
    Ok(())
}
