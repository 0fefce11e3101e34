use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prismopt::config::StudyConfig;
use prismopt::study::{export, run_study, Manifest, RunOptions};

/// Topology optimization and multi-objective sizing of prismatic sandwich
/// beams.
///
/// Exit status: 0 success, 1 configuration error, 2 runtime failure.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study from a TOML study file or from a previous run's
    /// manifest.json.
    Run {
        config: PathBuf,
        /// Cap on worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write artifacts here instead of the configured output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check a study file without running it.
    Validate { config: PathBuf },
    /// Re-render images and plots of a finished run from its CSV files.
    Export {
        run_dir: PathBuf,
        /// Destination directory (default: the run directory).
        #[arg(long)]
        to: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

fn load(path: &Path) -> Result<StudyConfig, Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        let manifest = Manifest::load(path).map_err(|e| Failure::Config(format!("{e:#}")))?;
        manifest
            .config
            .validate()
            .map_err(|e| Failure::Config(format!("{}:\n{e}", path.display())))?;
        return Ok(manifest.config);
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    StudyConfig::parse(&text).map_err(|e| Failure::Config(format!("{}:\n{e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config } => {
            load(&config)?;
            println!("{}: ok", config.display());
        }
        Command::Run {
            config,
            jobs,
            output_dir,
        } => {
            if jobs == Some(0) {
                return Err(Failure::Config("--jobs must be at least 1".into()));
            }
            let study = load(&config)?;
            let report = run_study(&study, &RunOptions { jobs, output_dir })
                .map_err(|e| Failure::Runtime(format!("{e:#}")))?;
            println!("{}", report.dir.join(prismopt::study::MANIFEST).display());
            if report.failed() {
                return Err(Failure::Runtime(format!(
                    "run failed; partial artifacts in {}",
                    report.dir.display()
                )));
            }
        }
        Command::Export { run_dir, to } => {
            let files = export(&run_dir, to.as_deref()).map_err(|e| Failure::Runtime(format!("{e:#}")))?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
