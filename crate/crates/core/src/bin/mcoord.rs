use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use markov_coord::harness::{emit_report, load_config, run_experiment, ExperimentConfig, Kind};

#[derive(Parser)]
#[command(name = "mcoord", version, about = "Coordination over Markov channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search the auxiliary variable and report inner/outer slacks.
    Region(Opts),
    /// Run the block-Markov scheme.
    Simulate(Opts),
    /// Sample sequence pairs and check Markov typicality relations.
    TypicalityAudit(Opts),
    /// Exhaustive or sampled audit of the probability sandwich.
    AepAudit(Opts),
    /// Frequency of the joint packing event.
    PackingProbe(Opts),
}

#[derive(clap::Args)]
struct Opts {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Print the default configuration for this subcommand and exit.
    #[arg(long)]
    print_defaults: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Region(o) => (Kind::Region, o),
        Command::Simulate(o) => (Kind::Simulate, o),
        Command::TypicalityAudit(o) => (Kind::TypicalityAudit, o),
        Command::AepAudit(o) => (Kind::AepAudit, o),
        Command::PackingProbe(o) => (Kind::PackingProbe, o),
    };
    if opts.print_defaults {
        match ExperimentConfig::defaults(kind).to_toml_string() {
            Ok(t) => {
                print!("{t}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let mut cfg = match &opts.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::defaults(kind),
    };
    if cfg.kind != kind {
        eprintln!(
            "error: config kind is {} but the subcommand is {}",
            cfg.kind.name(),
            kind.name()
        );
        return ExitCode::from(2);
    }
    if let Some(s) = opts.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = opts.trials {
        cfg.trials = t;
    }
    if let Some(o) = &opts.out {
        cfg.output_path = o.display().to_string();
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let rs = match run_experiment(&cfg) {
        Ok(rs) => rs,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = PathBuf::from(&cfg.output_path);
    if let Err(e) = emit_report(&rs, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let errors = rs.error_rows();
    eprintln!(
        "{} rows ({} errors) written to {}",
        rs.rows.len(),
        errors,
        out.display()
    );
    if errors > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
