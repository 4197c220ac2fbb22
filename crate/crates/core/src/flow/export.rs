//! CSV export of trajectories at full double precision.

use super::integrate::{LabTrajectory, RotatedTrajectory};
use crate::error::{Error, Result};
use std::io::Write;

/// 17 significant digits, round-trips an f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("csv output failed: {e}"))
}

/// Columns `z_m, theta_rad, n_plus, var_plus, var_minus, cov_pm`.
pub fn write_rotated_csv<W: Write>(traj: &RotatedTrajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z_m", "theta_rad", "n_plus", "var_plus", "var_minus", "cov_pm"])
        .map_err(csv_err)?;
    for i in 0..traj.len() {
        let (vp, vm, cpm) = match traj.covariance.get(i) {
            Some(s) => (
                s[(0, 0)] + s[(1, 1)] + 2.0 * s[(0, 1)],
                s[(0, 0)] + s[(1, 1)] - 2.0 * s[(0, 1)],
                s[(0, 0)] - s[(1, 1)],
            ),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let row = [traj.z[i], traj.theta[i], traj.n_plus[i], vp, vm, cpm].map(fmt_f64);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Columns `z_m, n1, n2, s11, s22, s12`.
pub fn write_lab_csv<W: Write>(traj: &LabTrajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z_m", "n1", "n2", "s11", "s22", "s12"]).map_err(csv_err)?;
    for (z, s) in traj.z.iter().zip(&traj.states) {
        let c = &s.covariance;
        let row = [*z, s.means[0], s.means[1], c[(0, 0)], c[(1, 1)], c[(0, 1)]].map(fmt_f64);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}
