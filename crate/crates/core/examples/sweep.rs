//! Runs a TOML experiment config and writes the report files.
//!
//! `cargo run --release --example sweep -- examples/configs/simulate.toml`

use std::path::PathBuf;

use markov_coord::harness::{emit_report, load_config, run_experiment};

fn main() -> markov_coord::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/simulate.toml")));
    let cfg = load_config(&path)?;
    println!("config {} (hash {})", path.display(), cfg.hash());
    let rs = run_experiment(&cfg)?;
    for s in &rs.summaries {
        let params: Vec<String> = rs
            .param_names
            .iter()
            .zip(&s.params)
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let cells: Vec<String> = s
            .metrics
            .iter()
            .map(|m| format!("{}={:.4}", m.name, m.median))
            .collect();
        println!("{}: {}", params.join(" "), cells.join(" "));
    }
    let out = PathBuf::from(&cfg.output_path);
    emit_report(&rs, &out)?;
    println!("{} rows, {} errors, written to {}", rs.rows.len(), rs.error_rows(), out.display());
    Ok(())
}
