//! `wstate` command-line tool: point evaluation, phase scans, the
//! oracle/closed-form verification suite, and figure datasets.

pub mod error;
pub mod eval;
pub mod figures;
pub mod output;
pub mod scan;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use wstate_core::analysis::Engine;

pub use error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "wstate",
    version,
    about = "Photon correlations of N two-level atoms in generalized W states"
)]
pub struct Cli {
    /// Evaluation engine: closed forms or brute-force state vector.
    #[arg(long, global = true)]
    pub engine: Option<Engine>,

    /// Output format (eval defaults to text, scan to csv).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file (scan, verify report) or directory (figures).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for the randomized verification checks.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Suppress status messages.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate G1, G2 and g2 at one detector pair.
    Eval(eval::EvalArgs),
    /// Sweep the first detector and report zeros, peaks and visibility.
    Scan(scan::ScanArgs),
    /// Cross-check the closed forms against the state-vector oracle.
    Verify(verify::VerifyArgs),
    /// Write the datasets behind the three correlation figures.
    Figures,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct GlobalOptions {
    pub engine: Engine,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub quiet: bool,
}

impl From<&Cli> for GlobalOptions {
    fn from(cli: &Cli) -> Self {
        Self {
            engine: cli.engine.unwrap_or_default(),
            format: cli.format,
            output: cli.output.clone(),
            seed: cli.seed,
            quiet: cli.quiet,
        }
    }
}

/// Write `bytes` to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Run a parsed command line, returning the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let global = GlobalOptions::from(cli);
    let result = match &cli.command {
        Command::Eval(args) => eval::run(args, &global, stdout),
        Command::Scan(args) => scan::run(args, &global, stdout, stderr),
        Command::Verify(args) => verify::run(args, &global, stdout, stderr),
        Command::Figures => figures::run(&global, stderr),
    };
    match result {
        Ok(()) => error::EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}

/// Parse `args` and run; clap usage errors map to exit code 2.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(err) => {
            let code = if err.use_stderr() {
                error::EXIT_UNSUPPORTED
            } else {
                error::EXIT_OK
            };
            let rendered = err.render().to_string();
            if err.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            code
        }
    }
}
