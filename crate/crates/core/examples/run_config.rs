//! Runs a JSON experiment config through the library API.
//!
//! cargo run --example run_config -- crates/core/configs/hahn_scaling.json

use std::path::PathBuf;

use tdcontrol::config::{run_config, RunOptions};

fn main() -> tdcontrol::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/hahn_scaling.json")));
    let out_dir = std::env::temp_dir().join("tdcontrol-example");
    let outcome = run_config(&path, &RunOptions { out_dir, ..Default::default() })?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap());
    if let Some(csv) = outcome.csv {
        println!("rows written to {}", csv.display());
    }
    Ok(())
}
