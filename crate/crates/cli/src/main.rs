use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use csgrav_cli::{run, CliError, CliResult, Command, RunSpec};

#[derive(Parser)]
#[command(
    name = "csgrav",
    version,
    about = "Chern–Simons gravity checks on periodic charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the algebraic and differential identity suite.
    Verify(Opts),
    /// Compare Chern–Simons and Palatini integrals over random sections.
    Correspond(Opts),
    /// Check d cs = ⟨F ∧ F⟩ and its vanishing integral on a 4-torus.
    Chern(Opts),
    /// Descend to a flat lattice configuration and test stationarity.
    Extremize(Opts),
}

#[derive(Args)]
struct Opts {
    /// Run spec (JSON). Defaults to the built-in spec for the subcommand.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the spec seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the report on stdout.
    #[arg(long)]
    quiet: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the iteration history as CSV (extremize only).
    #[arg(long)]
    history: Option<PathBuf>,
}

fn write_file(path: &PathBuf, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(command: Command, opts: &Opts) -> CliResult<bool> {
    let mut spec = match &opts.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunSpec::from_json(&text)?
        }
        None => RunSpec::default_for(command),
    };
    if spec.command != command {
        return Err(CliError::Invalid(format!(
            "spec is for {}, not {}",
            spec.command.name(),
            command.name()
        )));
    }
    if let Some(seed) = opts.seed {
        spec.seed = Some(seed);
    }
    if opts.history.is_some() && command != Command::Extremize {
        return Err(CliError::Invalid(
            "--history is only valid for extremize".into(),
        ));
    }
    if opts.threads == Some(0) {
        return Err(CliError::Invalid("--threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| run(&spec))?;
    let json = outcome.report.to_json();
    match &opts.out {
        Some(path) => write_file(path, &json)?,
        None if !opts.quiet => {
            let mut out = std::io::stdout().lock();
            out.write_all(json.as_bytes())
                .map_err(|e| CliError::Internal(e.to_string()))?;
        }
        None => {}
    }
    if let (Some(path), Some(history)) = (&opts.history, &outcome.history) {
        write_file(path, &history.to_csv())?;
    }
    if !opts.quiet {
        eprintln!(
            "{}: {:?} in {:.3} s",
            command.name(),
            outcome.report.status,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, opts) = match &cli.command {
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Correspond(o) => (Command::Correspond, o),
        Sub::Chern(o) => (Command::Chern, o),
        Sub::Extremize(o) => (Command::Extremize, o),
    };
    match execute(command, opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
