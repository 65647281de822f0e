//! `luttinger`: reproducible experiments for the thermal Hamiltonian.
//!
//! Exit codes: 0 success, 1 numerical failure (artifacts are still written
//! where possible), 2 configuration error.

mod commands;
mod config;
mod output;

use clap::Parser;
use config::{parse_param, schema, CliError, Command, Experiment, FileConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "luttinger", version, about = "Numerical experiments for the one-dimensional thermal Hamiltonian")]
struct Cli {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON config: {"command", "params", "output_path", "seed", "tol", "threads"}.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (default: current directory).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Tolerance passed to the command's numerical routines.
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,

    #[arg(long, value_name = "INT")]
    seed: Option<u64>,

    /// Worker threads for lattice evaluations.
    #[arg(long, value_name = "INT")]
    threads: Option<usize>,

    /// Command parameter as key=value (value parsed as JSON); repeatable, overrides the file.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn build(cli: Cli) -> Result<Experiment, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let command = match (cli.command, file.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(schema(format!("command `{}` conflicts with `{}` in the config file", a.name(), b.name())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(schema("no command given (pass one or set \"command\" in the config)")),
    };
    let mut params = file.params;
    for kv in &cli.params {
        let (k, v) = parse_param(kv)?;
        params.insert(k, v);
    }
    let exp = Experiment {
        command,
        params,
        output_path: cli.out.or(file.output_path).unwrap_or_else(|| PathBuf::from(".")),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        tol: cli.tol.or(file.tol),
        threads: cli.threads.or(file.threads).unwrap_or(1),
    };
    exp.validate()?;
    Ok(exp)
}

fn run(exp: &Experiment) -> Result<commands::Outcome, CliError> {
    match exp.command {
        Command::Specfun => commands::specfun(exp),
        Command::Kernel => commands::kernel(exp),
        Command::Propagate => commands::propagate(exp),
        Command::Resolvent => commands::resolvent(exp),
        Command::Spectrum => commands::spectrum(exp),
        Command::Scatter => commands::scatter(exp),
        Command::Classical => commands::classical(exp),
        Command::Selftest => commands::selftest(exp),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(cli).and_then(|exp| run(&exp));
    match result {
        Ok(commands::Outcome { failure: None }) => ExitCode::SUCCESS,
        Ok(commands::Outcome { failure: Some(msg) }) => {
            eprintln!("luttinger: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("luttinger: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
