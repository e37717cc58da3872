//! Command-line front end: argument parsing, the subcommands, report output.

pub mod args;
pub mod commands;
pub mod report;
pub mod verify;

use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use commands::*;
pub use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CRITERION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<toeplitz_asy::Error> for CliError {
    fn from(e: toeplitz_asy::Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERIC };
        CliError { code, message: format!("{}: {e}", e.kind()) }
    }
}

/// Progress lines on stderr, unless quiet.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    quiet: bool,
}

impl Progress {
    pub fn new(quiet: bool) -> Self {
        Progress { quiet }
    }

    pub fn quiet() -> Self {
        Progress { quiet: true }
    }

    pub fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "toeplitz-asy", version, about = "Structured determinants, their asymptotics and limits")]
pub struct Cli {
    /// Also write the report rows as CSV
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// No progress output on stderr
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Toeplitz determinants with Szego / Fisher-Hartwig / Basor-Tracy predictions
    Toeplitz(ToeplitzArgs),
    /// Hankel determinants from moments
    Hankel(HankelArgs),
    /// Toeplitz+Hankel determinants against their Hankel forms
    Th(ThArgs),
    /// Fredholm determinants of the sine, ch, Bessel and Airy kernels
    Fredholm(FredholmArgs),
    /// Merging-singularity symbol against the Painleve V expansion
    Transition(TransitionArgs),
    /// Tracy-Widom distribution
    Tw(TwArgs),
    /// Monte Carlo of the scaled longest increasing subsequence
    Lis(LisArgs),
    /// Gessel identity check
    Gessel(GesselArgs),
    /// Run an acceptance suite (all, a name, or a number 1..12)
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

/// Caps the global thread pool at TOEPLITZ_ASY_THREADS, if set.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TOEPLITZ_ASY_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::input(format!("TOEPLITZ_ASY_THREADS = {v:?} is not a positive integer")))?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(command: &Command, progress: &Progress) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = match command {
        Command::Toeplitz(a) => cmd_toeplitz(a, progress),
        Command::Hankel(a) => cmd_hankel(a, progress),
        Command::Th(a) => cmd_th(a, progress),
        Command::Fredholm(a) => cmd_fredholm(a, progress),
        Command::Transition(a) => cmd_transition(a, progress),
        Command::Tw(a) => cmd_tw(a, progress),
        Command::Lis(a) => cmd_lis(a, progress),
        Command::Gessel(a) => cmd_gessel(a, progress),
        Command::Verify { suite } => verify::cmd_verify(suite, progress),
    }?;
    report.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Full run: parse, execute, emit. Returns the exit code.
pub fn run(argv: impl IntoIterator<Item = String>, mut out: impl Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let progress = Progress::new(cli.quiet);
    let result = configure_threads().and_then(|_| execute(&cli.command, &progress));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    if let Err(e) = report.write_jsonl(&mut out) {
        eprintln!("error: stdout: {e}");
        return EXIT_INPUT;
    }
    if let Some(path) = &cli.csv {
        if let Err(e) = report.write_csv(path) {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    }
    match report.passed {
        Some(false) => EXIT_CRITERION,
        _ => EXIT_OK,
    }
}
