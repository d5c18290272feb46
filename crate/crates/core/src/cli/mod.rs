//! Command-line front end: `predict`, `simulate`, `ballot` and `figures`.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

mod args;
mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;

pub use args::{BallotArgs, Cli, Command, FiguresArgs, Format, ModeChoice, ModelArgs, PredictArgs, RegimeChoice, SimulateArgs};
pub use commands::{FIG1A_RHO, FIG1B, FIG2_RHO};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE }
}

/// Reads `key = value` lines into flags. `#` starts a comment; boolean flags
/// take `true` or `false`.
pub fn config_flags(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| output::io_error(path, e))?;
    let mut flags = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("{}:{}: expected key = value", path.display(), lineno + 1)));
        };
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        match value {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                flags.push(format!("--{key}").into());
                flags.push(value.into());
            }
        }
    }
    Ok(flags)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    argv.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            argv.get(i + 1).cloned()
        } else {
            s.strip_prefix("--config=").map(OsString::from)
        }
    })
}

/// Inserts config-file flags right after the subcommand name, so that
/// command-line flags, which come later, override them.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let flags = config_flags(Path::new(&path))?;
    let Some(at) = argv.iter().position(|a| a.to_str().is_some_and(|s| args::SUBCOMMANDS.contains(&s))) else {
        return Ok(argv);
    };
    let mut out = argv[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<()> {
    let started = output::timestamp();
    match &cli.command {
        Command::Predict(a) => commands::predict_cmd(a, started),
        Command::Simulate(a) => commands::simulate_cmd(a, started),
        Command::Ballot(a) => commands::ballot_cmd(a, started),
        Command::Figures(a) => commands::figures_cmd(a, started),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv = match expand_config(argv.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
