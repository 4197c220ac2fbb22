//! Validate and run a bundled figure config through the library.

use anyhow::{bail, Context, Result};
use prft_sense::config::parse_config;
use prft_sense::scan::run_scan;
use std::path::PathBuf;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig4.cfg")));
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let (config, diags) = parse_config(&text);
    for d in &diags {
        println!("{d}");
    }
    let Some(config) = config else {
        bail!("{} has errors", path.display());
    };
    let out = std::env::temp_dir().join("prft-run-config");
    let summary = run_scan(&config, &out)?;
    println!("{} points, {} failed", summary.points, summary.failed);
    for f in &summary.files {
        println!("  {}", f.display());
    }
    Ok(())
}
