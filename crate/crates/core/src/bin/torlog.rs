use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use torlog::cli::{exit_code, run, weight_cap_from_env, Command};
use torlog::model::load_model;
use torlog::report::Format;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

/// Exact checks for logarithmic connections on toric vector bundles.
#[derive(Parser, Debug)]
#[command(name = "torlog", version)]
struct Args {
    command: Command,
    model: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("torlog: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cap = match weight_cap_from_env() {
        Ok(cap) => cap,
        Err(e) => return fail(e.exit_code(), e),
    };
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(e) => return fail(e.exit_code(), e),
    };
    for w in model.warnings() {
        eprintln!("torlog: warning: {w}");
    }
    let report = match run(args.command, &model, cap) {
        Ok(r) => r,
        Err(e) => return fail(e.exit_code(), e),
    };
    let format = match args.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    let out = report.emit(format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out) {
                return fail(2, format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{out}"),
    }
    ExitCode::from(exit_code(&report) as u8)
}
