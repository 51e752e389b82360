use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use xyz_gaudin_cli::config::Format;
use xyz_gaudin_cli::record::Status;
use xyz_gaudin_cli::{cmd_bethe, cmd_spectrum, cmd_verify, Job, EXIT_CONFIG};

/// Spectra, Bethe roots and verification suites for the inhomogeneous XYZ
/// chain and its Gaudin limit.
#[derive(Parser)]
#[command(name = "xyzg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Job configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Treat unmatched Bethe solutions as failures
    #[arg(long, global = true)]
    strict: bool,

    /// Override the configured seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Joint spectrum of the Gaudin Hamiltonians
    Spectrum,
    /// Solve the Bethe equations and match against exact diagonalization
    Bethe,
    /// Run the verification suites
    Verify,
}

fn write_atomic(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let Some(config) = &cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    let job = match Job::load(config, cli.seed) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let start = Instant::now();
    let (name, result) = match cli.command {
        Command::Spectrum => ("spectrum", cmd_spectrum(&job)),
        Command::Bethe => ("bethe", cmd_bethe(&job, cli.strict)),
        Command::Verify => ("verify", cmd_verify(&job)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {name} failed: {e}");
            return ExitCode::from(Status::VerificationFailed.exit_code() as u8);
        }
    };
    eprintln!("{name} finished in {:.2} s", start.elapsed().as_secs_f64());
    for c in outcome.record.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}::{} = {:e} (threshold {:e}){}", c.suite, c.name, c.value, c.threshold, c.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default());
    }
    let format = cli.format.or(job.config.outputs.format).unwrap_or(Format::Json);
    let text = match format {
        Format::Json => outcome.record.to_json_line(),
        Format::Csv => outcome.csv.render(),
    };
    let out = cli.out.clone().or_else(|| job.config.outputs.path.clone());
    let written = match &out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.record.status.exit_code() as u8)
}
