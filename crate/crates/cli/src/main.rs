use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use probarith::trace::DEFAULT_STEPS;
use probarith::SweepMode;
use probarith_cli::commands::{self, TraceArgs};
use probarith_cli::{CliError, Op, EXIT_INVALID};

/// Refine uncertain operands under a soft sum or product constraint.
#[derive(Debug, Parser)]
#[command(name = "probarith", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Refine one request document (JSON) and print the result document.
    Refine {
        /// Request file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Sweep one prior mean and print the refined means as CSV.
    Trace {
        /// Overrides the document's "op".
        #[arg(long, value_enum)]
        op: Option<Op>,
        /// Operand whose prior mean is swept (1, 2 or 3).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        sweep_operand: u8,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Cold)]
        mode: Mode,
        /// Base request file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the built-in worked examples and compare against expected means.
    Examples {
        #[arg(long, hide = true)]
        inject_fault: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Follow one branch from the previous sample.
    Warm,
    /// Independent multi-start solve per sample.
    Cold,
}

impl From<Mode> for SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Warm => SweepMode::WarmStart,
            Mode::Cold => SweepMode::ColdMultiStart,
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(e.to_string()))?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    match cli.command {
        Command::Refine { input } => commands::refine(&read_input(input.as_ref())?),
        Command::Trace { op, sweep_operand, from, to, steps, mode, input } => {
            let args = TraceArgs { op, operand: sweep_operand as usize, from, to, steps, mode: mode.into() };
            Ok((commands::trace(&read_input(input.as_ref())?, &args)?, 0))
        }
        Command::Examples { inject_fault } => commands::examples(inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INVALID,
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            let mut out = io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(EXIT_INVALID as u8);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let doc = serde_json::to_string(&e.to_document()).expect("error document serializes");
            eprintln!("{doc}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
