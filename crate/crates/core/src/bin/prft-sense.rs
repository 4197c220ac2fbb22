use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use prft_sense::config::{self, Diagnostic};
use prft_sense::scan::run_scan;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_MAJORITY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "prft-sense", about = "Photon counting statistics and Fisher scans for emitter ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scan and write CSVs plus manifest.json.
    Run {
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; overrides output_dir in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    Version,
}

fn read(path: &Path) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(t) => Some(t),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn report(path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}: {d}", path.display());
    }
}

fn run(config_path: &Path, jobs: Option<usize>, out: Option<PathBuf>) -> Result<ExitCode> {
    let Some(text) = read(config_path) else {
        return Ok(ExitCode::from(EXIT_CONFIG));
    };
    let (cfg, diags) = config::parse_config(&text);
    report(config_path, &diags);
    let Some(cfg) = cfg else {
        return Ok(ExitCode::from(EXIT_CONFIG));
    };
    let out_dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| {
        let stem = config_path.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "run".into());
        Path::new("out").join(stem)
    });
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().context("starting worker pool")?;
    let summary = pool.install(|| run_scan(&cfg, &out_dir)).context("running scan")?;
    println!(
        "{} points, {} failed, output in {}",
        summary.points,
        summary.failed,
        out_dir.display()
    );
    if summary.majority_failed() {
        eprintln!("error: more than half of the grid points failed");
        return Ok(ExitCode::from(EXIT_MAJORITY_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { config, jobs, out } => run(&config, jobs, out),
        Command::Validate { config } => {
            let Some(text) = read(&config) else {
                return Ok(ExitCode::from(EXIT_CONFIG));
            };
            let diags = config::validate(&text);
            report(&config, &diags);
            if diags.iter().any(Diagnostic::is_error) {
                return Ok(ExitCode::from(EXIT_CONFIG));
            }
            println!("{}: ok", config.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Version => {
            println!("prft-sense {}", prft_sense::VERSION);
            Ok(ExitCode::SUCCESS)
        }
    }
}
