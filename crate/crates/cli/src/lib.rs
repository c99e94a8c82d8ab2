//! Library side of the `bbm92` command-line tool.

pub mod args;
pub mod commands;
pub mod output;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use output::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Directory that relative `--out` paths are resolved against.
pub const OUTPUT_DIR_ENV: &str = "BBM92_OUTPUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(bbm92_core::Error),
    Io(String),
    /// The self test ran but some check failed.
    Checks,
}

impl From<bbm92_core::Error> for CliError {
    fn from(e: bbm92_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bbm92_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(E::Infeasible { .. }) => EXIT_INFEASIBLE,
            CliError::Core(E::Numerical(_)) | CliError::Checks => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Checks => f.write_str("self test failed"),
        }
    }
}

fn resolve_out(path: &PathBuf) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.clone()
}

fn emit<F: serde::Serialize>(
    table: &Table,
    out: &OutputArgs,
    command: &str,
    flags: &F,
) -> Result<(), CliError> {
    let text = match out.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json(command, flags))
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match &out.out {
        Some(p) => {
            let p = resolve_out(p);
            let mut f =
                File::create(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            f.write_all(text.as_bytes()).map_err(io_err)
        }
        // a reader that stops early (e.g. `head`) is not an error
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(io_err),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    match &cli.command {
        Command::Tau(a) => emit(&commands::tau(a)?, &a.output, name, a),
        Command::Keyrate(a) => emit(&commands::keyrate(a)?, &a.output, name, a),
        Command::Tradeoff(a) => emit(&commands::tradeoff(a)?, &a.output, name, a),
        Command::Attack(a) => emit(&commands::attack(a)?, &a.output, name, a),
        Command::Simulate(a) => emit(&commands::simulate(a)?, &a.output, name, a),
        Command::Selftest(a) => {
            let (t, ok) = commands::selftest(a)?;
            emit(&t, &a.output, name, a)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Checks)
            }
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let args = match args::expand_config(args) {
        Ok(a) => a,
        Err(m) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
