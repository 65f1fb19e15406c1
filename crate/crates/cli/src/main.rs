//! `surface-fidelity <command> --config <file> [--seed N] [--out DIR]`

mod artifact;
mod config;
mod error;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use crate::config::Command;
use crate::error::CliError;

/// Default output directory when neither `--out` nor `[output] dir` is set.
pub const OUT_DIR_ENV: &str = "SURFACE_FIDELITY_OUT";

#[derive(Debug, Parser)]
#[command(name = "surface-fidelity", version, about = "One-cycle surface-code fidelity under correlated noise")]
struct Args {
    /// exact | tm | mc | scan | predict | validate
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `[run] seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<ExitCode, CliError> {
    let command = Command::parse(&args.command)
        .ok_or_else(|| CliError::Usage(format!("unknown command `{}`", args.command)))?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let mut cfg = config::parse_config(&text, base)?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
        cfg.mc.seed = seed;
    }
    let out_dir = args
        .out
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let outcome = run::execute(&cfg, command)?;
    let header = artifact::header_line(&artifact::config_hash(&cfg.canonical), cfg.seed);
    let written = artifact::write_all(&out_dir, &header, &outcome.artifacts)?;
    print!("{}", outcome.summary);
    for path in written {
        println!("wrote {}", path.display());
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
