use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use neoqec_cli::commands::run;
use neoqec_cli::config::{ExperimentConfig, Mode, SEED_ENV};
use neoqec_cli::CliError;

#[derive(Parser)]
#[command(name = "neoqec", about = "Two-stage online surface-code decoding experiments")]
struct Args {
    /// gen-data, decode, ls-decode, sweep, npu-verify or power
    mode: String,
    /// Flat key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value overrides applied after the config file
    overrides: Vec<String>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let mode: Mode = args.mode.parse()?;
    let file = match &args.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let seed = std::env::var(SEED_ENV).ok();
    let cfg = ExperimentConfig::load(mode, file.as_deref(), &args.overrides, seed.as_deref())?;
    let out = run(&cfg)?;
    match (&cfg.output_path, cfg.mode) {
        (Some(p), m) if m != Mode::GenData => {
            fs::write(p, &out).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?
        }
        _ => std::io::stdout()
            .write_all(&out)
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Verify(report) = &e {
                print!("{report}");
            }
            eprintln!("neoqec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
