//! `capflow`: run, sweep and verify capillary flows from JSON configurations.

mod config;
mod emit;
mod error;
mod plots;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{default_config, load_config, Regime};
use crate::emit::{run_and_emit, EmitOptions, RunManifest};
use crate::error::CliResult;

const EXIT_ABORT: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "capflow", version, about = "Volume-preserving capillary flow in the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Emit {
    /// JSON flow configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Write SVG plots of the profiles, energy and volume.
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    plots: bool,
    /// Number of profile snapshots to write.
    #[arg(long, default_value_t = 0)]
    snapshots: usize,
}

impl Emit {
    fn options(&self) -> EmitOptions {
        EmitOptions { plots: self.plots, snapshots: self.snapshots }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one flow.
    Run(Emit),
    /// Run the configuration once per contact angle, concurrently.
    Sweep {
        #[command(flatten)]
        emit: Emit,
        /// Contact angles in radians.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        thetas: Vec<f64>,
    },
    /// Check the discretization against its invariants and print a table.
    Verify {
        /// JSON flow configuration; n = 2, theta = pi/3, M = 64, R = 1 when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the configured resolution.
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn report_run(label: &str, m: &RunManifest) {
    let r = &m.final_record;
    println!(
        "{label}: {:?} after {} samples, t = {}, volume = {}, energy = {}, umbilicity = {:.3e}",
        m.termination, m.samples, r.t, r.volume, r.energy, r.umbilicity
    );
}

fn run_one(args: &Emit) -> CliResult<u8> {
    let config = load_config(&args.config)?;
    println!("{}", Regime::of(&config).describe(config.n));
    let manifest = run_and_emit(&config, &args.out, args.options())?;
    report_run("run", &manifest);
    Ok(if manifest.aborted() { EXIT_ABORT } else { 0 })
}

fn sweep_dir(out: &Path, k: usize, theta: f64) -> PathBuf {
    out.join(format!("theta_{k:02}_{theta:.6}"))
}

fn sweep(args: &Emit, thetas: &[f64]) -> CliResult<u8> {
    let base = load_config(&args.config)?;
    let configs = thetas
        .iter()
        .map(|&theta| {
            let mut c = base.clone();
            c.theta = theta;
            c.validate().map(|_| c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<CliResult<RunManifest>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let dir = sweep_dir(&args.out, k, c.theta);
                s.spawn(move || run_and_emit(c, &dir, args.options()))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut code = 0;
    for (c, result) in configs.iter().zip(results) {
        let label = format!("theta = {:.6}", c.theta);
        match result {
            Ok(m) => {
                report_run(&label, &m);
                if m.aborted() {
                    code = code.max(EXIT_ABORT);
                }
            }
            Err(e) => {
                eprintln!("{label}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    Ok(code)
}

fn verify_cmd(config: Option<&Path>, resolution: Option<usize>) -> CliResult<u8> {
    let mut config = match config {
        Some(path) => load_config(path)?,
        None => default_config(),
    };
    if let Some(m) = resolution {
        config.resolution = m;
        config.validate()?;
    }
    println!(
        "verify: n = {}, theta = {}, M = {}, boundary_sign = {}",
        config.n, config.theta, config.resolution, config.boundary_sign
    );
    let report = verify::verify(&config);
    print!("{report}");
    if report.passed() {
        println!("all checks passed");
        Ok(0)
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("failed: {}", names.join("; "));
        Ok(EXIT_VERIFY)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_one(args),
        Command::Sweep { emit, thetas } => sweep(emit, thetas),
        Command::Verify { config, resolution } => verify_cmd(config.as_deref(), *resolution),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_directories_are_distinct() {
        let out = Path::new("o");
        assert_ne!(sweep_dir(out, 0, 1.0), sweep_dir(out, 1, 1.0));
    }

    #[test]
    fn plots_flag_takes_a_value() {
        let cli = Cli::try_parse_from(["capflow", "run", "--config", "c", "--out", "o", "--plots", "true"]).unwrap();
        match cli.command {
            Command::Run(e) => assert!(e.plots),
            _ => unreachable!(),
        }
    }
}
