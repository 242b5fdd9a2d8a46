use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qht_cli::commands::{self, Overrides, SweepRequest};
use qht_cli::config::PropagatorChoice;
use qht_cli::{load_config, CliError, RunConfig};

/// Quantum heat transformer simulator.
#[derive(Parser, Debug)]
#[command(name = "qht", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    t_final: Option<f64>,
    /// RK4 step
    #[arg(long)]
    dt: Option<f64>,
    /// rk4, expm or both
    #[arg(long)]
    propagator: Option<PropagatorChoice>,
    /// Transient-window margin
    #[arg(long)]
    margin: Option<f64>,
    /// Directory relative output paths are resolved against
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the system; write trajectory CSV, metrics JSON and optional plot
    Run(Common),
    /// Solve for the steady state directly
    Steady(Common),
    /// Evaluate C_H over a range of one parameter
    Sweep {
        #[command(flatten)]
        common: Common,
        /// g, tauN, alphaN or cutoffN (1-based qubit index)
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Print operating mode and transient window
    Classify(Common),
    /// Render a trajectory CSV as SVG
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = load_config(&common.config)?;
    Overrides { t_final: common.t_final, dt: common.dt, propagator: common.propagator, margin: common.margin }
        .apply(&mut cfg)?;
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => print_json(&commands::cmd_run(&load(&c)?, &c.out)?),
        Command::Steady(c) => print_json(&commands::cmd_steady(&load(&c)?, &c.out)?),
        Command::Sweep { common, param, from, to, steps } => {
            let cfg = load(&common)?;
            let req = SweepRequest::resolve(&cfg, param.as_deref(), from, to, steps)?;
            let (_, text) = commands::cmd_sweep(&cfg, &req, commands::thread_count()?, &common.out)?;
            print!("{text}");
        }
        Command::Classify(c) => print_json(&commands::cmd_classify(&load(&c)?)?),
        Command::Plot { csv, out, title } => commands::cmd_plot(&csv, &out, &title)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
