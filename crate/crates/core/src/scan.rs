//! Batch runner: evaluates every grid point of a [`RunConfig`] and writes
//! one CSV per requested output plus `manifest.json`.
//!
//! Grid points run in parallel on the ambient rayon pool; rows are written in
//! grid order so outputs are byte-identical across runs and thread counts.

use crate::config::{Benchmark, Output, RunConfig, Spacing};
use crate::engine::{aptitudes_numeric, CHI_STEP};
use crate::error::{Error, Result};
use crate::flow::{frame_to_lab, integrate_rotated_means, integrate_rotated_with, write_rotated_csv, CoefficientSource};
use crate::flow::export::fmt_f64;
use crate::models::{Model, ParamTag};
use crate::sensing::{
    fisher_at, plus_minus_stats, weak_dissipation_benchmarks, FisherOptions, FisherPoint, MeasurementStatistics,
    REL_STEP,
};
use crate::types::{CumulantAptitudes, TwoLevelParams};
use crate::flow::RotatedTrajectory;
use crate::VERSION;
use rayon::prelude::*;
use serde::Serialize;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub phase_numeric: f64,
    pub phase_closed: f64,
    pub fisher_density_numeric: f64,
    pub fisher_density_closed: f64,
    pub fisher_detuning_numeric: f64,
    pub fisher_detuning_closed: f64,
    pub gamma_over_omega: f64,
}

/// Everything computed at one grid point. Missing entries were not requested.
#[derive(Debug, Clone, Default)]
pub struct PointResult {
    pub index: usize,
    pub value: f64,
    pub trajectory: Option<RotatedTrajectory>,
    pub statistics: Option<MeasurementStatistics>,
    pub fisher: Option<FisherPoint>,
    pub aptitudes: Option<CumulantAptitudes>,
    pub benchmark: Option<BenchmarkRow>,
    pub error: Option<Error>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub points: usize,
    pub failed: usize,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    /// More than half of the grid failed.
    pub fn majority_failed(&self) -> bool {
        2 * self.failed > self.points
    }
}

fn fisher_options(config: &RunConfig) -> FisherOptions {
    FisherOptions {
        steps: config.steps,
        ..Default::default()
    }
}

fn benchmark_row(p: &TwoLevelParams, steps: usize) -> Result<BenchmarkRow> {
    let model = Model::from(*p);
    let cf = weak_dissipation_benchmarks(p, p.n_ref);
    let opts = FisherOptions {
        steps,
        ..Default::default()
    };
    let phase = 2.0 * integrate_rotated_means(&model, p.n_ref, steps)?.final_theta();
    let rho = fisher_at(&model, ParamTag::Density, &opts)?;
    let eps = fisher_at(&model, ParamTag::Detuning, &opts)?;
    Ok(BenchmarkRow {
        phase_numeric: phase,
        phase_closed: cf.phase,
        fisher_density_numeric: rho.fisher.value,
        fisher_density_closed: cf.fisher_density,
        fisher_detuning_numeric: eps.fisher.value,
        fisher_detuning_closed: cf.fisher_detuning,
        gamma_over_omega: cf.gamma_over_omega,
    })
}

/// Evaluate one grid point. The first failure is stored and the remaining
/// outputs of that point are skipped.
pub fn evaluate_point(config: &RunConfig, index: usize, value: f64) -> PointResult {
    let mut out = PointResult {
        index,
        value,
        ..Default::default()
    };
    let run = |out: &mut PointResult| -> Result<()> {
        let model = config.model.with_param(config.scan.param, value)?;
        let n0 = model.n_ref();
        let wants = |o: Output| config.outputs.contains(&o);
        if wants(Output::Trajectory) || wants(Output::Statistics) {
            let traj = integrate_rotated_with(&model, n0, config.steps, CoefficientSource::Exact)?;
            if wants(Output::Statistics) {
                let sigma = traj.final_covariance().unwrap_or_default();
                let lab = frame_to_lab(traj.final_theta(), traj.final_n_plus(), &sigma);
                out.statistics = Some(plus_minus_stats(&lab));
            }
            if wants(Output::Trajectory) {
                out.trajectory = Some(traj);
            }
        }
        if wants(Output::Aptitudes) {
            let spec = model.spec(model.rotated_drive(n0));
            out.aptitudes = Some(aptitudes_numeric(&spec, model.default_strategy())?);
        }
        if wants(Output::Fisher) {
            out.fisher = Some(fisher_at(&model, config.fisher_param, &fisher_options(config))?);
        }
        if let (Some(Benchmark::WeakDissipation), Model::TwoLevel(p)) = (config.benchmark, &model) {
            out.benchmark = Some(benchmark_row(p, config.steps)?);
        }
        Ok(())
    };
    if let Err(e) = run(&mut out) {
        out.error = Some(Error::AtGridPoint {
            index,
            value,
            source: Box::new(e),
        });
    }
    out
}

/// All grid points in grid order.
pub fn evaluate(config: &RunConfig) -> Vec<PointResult> {
    let grid = config.scan.grid();
    grid.par_iter()
        .enumerate()
        .map(|(i, &v)| evaluate_point(config, i, v))
        .collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("writing {}: {e}", path.display()))
}

fn error_cell(p: &PointResult) -> String {
    p.error.as_ref().map(|e| e.root().to_string()).unwrap_or_default()
}

fn write_table<F>(path: &Path, header: &[&str], points: &[PointResult], row: F) -> Result<()>
where
    F: Fn(&PointResult) -> Option<Vec<f64>>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut head: Vec<&str> = vec!["x_value"];
    head.extend_from_slice(header);
    head.push("error");
    w.write_record(&head).map_err(|e| io_err(path, e))?;
    for p in points {
        let values = row(p).unwrap_or_else(|| vec![f64::NAN; header.len()]);
        let mut rec = vec![fmt_f64(p.value)];
        rec.extend(values.into_iter().map(fmt_f64));
        rec.push(error_cell(p));
        w.write_record(&rec).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    model: serde_json::Value,
    scan: serde_json::Value,
    outputs: Vec<&'a str>,
    fisher_param: &'a str,
    benchmark: Option<&'a str>,
    numerics: serde_json::Value,
    points: usize,
    failed: usize,
    failures: Vec<serde_json::Value>,
    files: Vec<String>,
}

fn model_json(model: &Model) -> serde_json::Value {
    use serde_json::json;
    match model {
        Model::TwoLevel(p) => json!({
            "kind": "two_level",
            "detuning_rad_s": p.detuning,
            "gamma_rad_s": p.gamma,
            "omega_ref_rad_s": p.omega_ref,
            "n_ref_photons": p.n_ref,
            "density_per_m3": p.ensemble.density,
            "area_m2": p.ensemble.area,
            "t_m_s": p.ensemble.t_m,
            "z_max_m": p.ensemble.z_max,
        }),
        Model::FourLevel(p) => json!({
            "kind": "four_level",
            "level_energies_rad_s": p.detunings,
            "omega_p_ref_rad_s": p.omega_p_ref,
            "omega_c_rad_s": p.omega_c,
            "omega_s_rad_s": p.omega_s,
            "gamma_b_rad_s": p.gamma_b,
            "gamma_c_rad_s": p.gamma_c,
            "gamma_d_rad_s": p.gamma_d,
            "n_ref_photons": p.n_ref,
            "density_per_m3": p.ensemble.density,
            "area_m2": p.ensemble.area,
            "t_m_s": p.ensemble.t_m,
            "z_max_m": p.ensemble.z_max,
        }),
    }
}

/// Evaluate the scan and write its files into `out_dir`.
pub fn run_scan(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let points = evaluate(config);
    let mut files = Vec::new();

    for output in &config.outputs {
        match output {
            Output::Trajectory => {
                for p in &points {
                    if let Some(t) = &p.trajectory {
                        let path = out_dir.join(format!("trajectory_{:03}.csv", p.index));
                        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
                        write_rotated_csv(t, BufWriter::new(f))?;
                        files.push(path);
                    }
                }
            }
            Output::Statistics => {
                let path = out_dir.join("statistics.csv");
                write_table(
                    &path,
                    &["n_plus", "n_minus", "theta_rad", "var_nplus", "var_nminus", "cov_pm"],
                    &points,
                    |p| p.statistics.map(|s| vec![s.n_plus, s.n_minus, s.theta, s.var_plus, s.var_minus, s.cov_pm]),
                )?;
                files.push(path);
            }
            Output::Fisher => {
                let path = out_dir.join("fisher.csv");
                write_table(
                    &path,
                    &[
                        "fisher_prft",
                        "fisher_shotnoise",
                        "mean_nplus",
                        "mean_theta_rad",
                        "var_nplus",
                        "var_nminus",
                        "phase_channel",
                        "intensity_channel",
                        "cross_channel",
                        "richardson_gap",
                    ],
                    &points,
                    |p| {
                        p.fisher.map(|f| {
                            vec![
                                f.fisher.value,
                                f.shot_noise.value,
                                f.mean_nplus,
                                f.mean_theta,
                                f.var_nplus,
                                f.var_nminus,
                                f.fisher.phase_channel,
                                f.fisher.intensity_channel,
                                f.fisher.cross,
                                f.richardson_gap,
                            ]
                        })
                    },
                )?;
                files.push(path);
            }
            Output::Aptitudes => {
                let path = out_dir.join("aptitudes.csv");
                write_table(
                    &path,
                    &["kappa_plus", "kappa_minus", "kappa_pp", "kappa_mm", "kappa_pm"],
                    &points,
                    |p| p.aptitudes.map(|a| vec![a.plus, a.minus, a.plus_plus, a.minus_minus, a.plus_minus]),
                )?;
                files.push(path);
            }
        }
    }
    if config.benchmark.is_some() {
        let path = out_dir.join("benchmark.csv");
        write_table(
            &path,
            &[
                "phase_numeric",
                "phase_closed",
                "fisher_density_numeric",
                "fisher_density_closed",
                "fisher_detuning_numeric",
                "fisher_detuning_closed",
                "gamma_over_omega",
            ],
            &points,
            |p| {
                p.benchmark.as_ref().map(|b| {
                    vec![
                        b.phase_numeric,
                        b.phase_closed,
                        b.fisher_density_numeric,
                        b.fisher_density_closed,
                        b.fisher_detuning_numeric,
                        b.fisher_detuning_closed,
                        b.gamma_over_omega,
                    ]
                })
            },
        )?;
        files.push(path);
    }

    let failed: Vec<&PointResult> = points.iter().filter(|p| p.error.is_some()).collect();
    let s = &config.scan;
    let manifest = Manifest {
        version: VERSION,
        model: model_json(&config.model),
        scan: serde_json::json!({
            "param": s.param.name(),
            "min": s.min,
            "max": s.max,
            "points": s.points,
            "spacing": match s.spacing { Spacing::Linear => "linear", Spacing::Log => "log" },
        }),
        outputs: config.outputs.iter().map(|o| o.name()).collect(),
        fisher_param: config.fisher_param.name(),
        benchmark: config.benchmark.map(|_| "weak_dissipation"),
        numerics: serde_json::json!({
            "integrator": "rk4",
            "steps": config.steps,
            "frame": "rotated",
            "coefficients": "exact",
            "fisher_rel_step": REL_STEP,
            "fisher_richardson_halvings": 1,
            "counting_field_step": CHI_STEP,
            "aptitude_strategy": format!("{:?}", config.model.default_strategy()),
        }),
        points: points.len(),
        failed: failed.len(),
        failures: failed
            .iter()
            .map(|p| serde_json::json!({"index": p.index, "x_value": p.value, "error": error_cell(p)}))
            .collect(),
        files: files
            .iter()
            .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| io_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    files.push(path);

    Ok(RunSummary {
        points: points.len(),
        failed: failed.len(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load;

    const CFG: &str = r#"
model = "two_level"
scan_param = "gamma"
scan_min_MHz = -1
scan_max_MHz = 2
scan_points = 4
outputs = ["statistics", "aptitudes"]
steps = 50
"#;

    #[test]
    fn failed_points_get_error_column() {
        let (c, _) = load(CFG).unwrap();
        let dir = std::env::temp_dir().join(format!("prft-scan-unit-{}", std::process::id()));
        let s = run_scan(&c, &dir).unwrap();
        // γ < 0 is rejected, γ = 0 is not ergodic.
        assert_eq!((s.points, s.failed), (4, 2));
        assert!(!s.majority_failed());
        let text = fs::read_to_string(dir.join("statistics.csv")).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 5);
        assert!(rows[1].contains("NaN") && rows[1].contains("gamma"));
        assert!(rows[2].contains("ergodic"));
        assert!(rows[3].ends_with(','));
        fs::remove_dir_all(dir).ok();
    }
}
