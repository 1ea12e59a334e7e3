use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod error;
mod output;
mod plan;
mod sweep;
mod trajectory;
mod verify;

use config::{parse_class, read_entries, Mode, Settings};
use error::CliError;

#[derive(Parser)]
#[command(name = "qbtangle", version, about = "Tangle dynamics of a controlled three-qubit chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tangle trajectory as CSV.
    Trajectory(RunArgs),
    /// Optimal time and control fields as key=value lines.
    Optimal(RunArgs),
    /// Optimal time and fields over a grid of K as CSV.
    Sweep(SweepArgs),
    /// Cross-check closed forms against the numerical oracle.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Initial state class: s, b1, b2, b3, w or ghz.
    #[arg(long, value_parser = parse_class)]
    class: Option<qbtangle_core::StateClass>,
    /// Dimensionless energy omega-hat squared (> 1).
    #[arg(long, allow_hyphen_values = true)]
    omega_sq: Option<f64>,
    /// Coupling ratio K = J23/J12.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Rotating-field frequency.
    #[arg(long, allow_hyphen_values = true)]
    omega_big: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
    /// Use the optimal control fields.
    #[arg(long)]
    optimal: bool,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Adds a t_seconds column, t = tau / J12.
    #[arg(long)]
    j12_hz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, allow_hyphen_values = true)]
    k_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k_max: Option<f64>,
    #[arg(long)]
    k_steps: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario file: `scenario = class, omega_sq, k[, known-discrepancy]` lines and tolerances.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let cli = Settings {
            class: self.class,
            omega_sq: self.omega_sq,
            k: self.k,
            phi: self.phi,
            omega_big: self.omega_big,
            theta0: self.theta0,
            optimal: self.optimal.then_some(true),
            tau_max: self.tau_max,
            steps: self.steps,
            mode: self.mode,
            j12_hz: self.j12_hz,
            out: self.out.clone(),
            ..Default::default()
        };
        let file = match &self.config {
            Some(p) => Settings::from_entries(&read_entries(p)?, &p.display().to_string())?,
            None => Settings::default(),
        };
        Ok(file.overlay(cli))
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Trajectory(a) => {
            let s = a.settings()?;
            let run = trajectory::TrajectoryRun::from_settings(&s)?;
            let mut w = output::sink(s.out.as_deref())?;
            run.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Optimal(a) => {
            let s = a.settings()?;
            let mut w = output::sink(s.out.as_deref())?;
            let r = plan::run(&s, &mut w);
            w.flush()?;
            r?;
        }
        Command::Sweep(a) => {
            let mut s = a.run.settings()?;
            s = s.overlay(Settings {
                k_min: a.k_min,
                k_max: a.k_max,
                k_steps: a.k_steps,
                ..Default::default()
            });
            let mut w = output::sink(s.out.as_deref())?;
            sweep::run(&s, &mut w)?;
            w.flush()?;
        }
        Command::Verify(a) => {
            let mut w = output::sink(a.out.as_deref())?;
            verify::run(a.config.as_deref(), &mut w)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
