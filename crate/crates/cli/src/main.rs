//! `rgdc`: builds admissible sets and runs governed closed-loop experiments
//! described by TOML scenario files.

mod experiments;
mod manifest;
mod scenario;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use scenario::{Experiment, Overrides, Scenario};

#[derive(Parser)]
#[command(
    name = "rgdc",
    version,
    about = "Reference governor experiments on LTI plants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the static and dynamic admissible sets and export their rows.
    Mas(RunArgs),
    /// Simulate the governed loop against the scenario reference.
    Simulate(RunArgs),
    /// Simulate a piecewise-constant reference.
    Multistep(RunArgs),
    /// Sweep sinusoidal references and record the sup-norm gain.
    Bode(RunArgs),
    /// Build robust sets over a VCO gain interval and simulate each plant.
    Robust(RunArgs),
    /// Simulate from random initial conditions against one sinusoid.
    Converge(RunArgs),
    /// Run the experiment named in the scenario file.
    Run(RunArgs),
    /// Check plant stability, DC gain and epsilon without running anything.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML). A run manifest is accepted as well.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, replacing `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn load(&self) -> Result<Scenario> {
        let mut s = Scenario::load(&self.config)?;
        s.apply(&Overrides {
            output_dir: self.out.clone(),
            epsilon: self.epsilon,
            seed: self.seed,
        });
        Ok(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    let (args, experiment) = match command {
        Command::Validate(args) => {
            let s = args.load()?;
            print!("{}", validate::report(&s));
            return Ok(());
        }
        Command::Run(args) => {
            let exp = args
                .load()?
                .experiment
                .context("scenario names no experiment; set `experiment` or use a subcommand")?;
            (args, exp)
        }
        Command::Mas(a) => (a, Experiment::Mas),
        Command::Simulate(a) => (a, Experiment::Simulate),
        Command::Multistep(a) => (a, Experiment::Multistep),
        Command::Bode(a) => (a, Experiment::Bode),
        Command::Robust(a) => (a, Experiment::Robust),
        Command::Converge(a) => (a, Experiment::Converge),
    };
    let mut scenario = args.load()?;
    let report = experiments::run(&mut scenario, experiment)?;
    for line in &report.lines {
        println!("{experiment}: {line}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
