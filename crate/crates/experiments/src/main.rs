use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sta3d_experiments::commands::{
    cmd_evolve, cmd_pulses, cmd_sweep_decoherence, cmd_sweep_delta, cmd_sweep_eps, cmd_sweep_tf,
};
use sta3d_experiments::output::write_text;
use sta3d_experiments::verify::cmd_verify;
use sta3d_experiments::{Grid, Overrides, Result, RunConfig};

/// Shortcut-to-adiabaticity simulator for two-atom qutrit entanglement in a
/// cavity-fiber-cavity system.
#[derive(Parser, Debug)]
#[command(name = "sta3d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Laser profiles Omega1(t), Omega2'(t) of the reference protocol.
    Pulses,
    /// Populations and fidelity along the protocol.
    Evolve,
    /// Fidelity versus operation time.
    SweepTf,
    /// Fidelity versus epsilon, with the closed form.
    SweepEps,
    /// Fidelity over relative deviations of tf and epsilon.
    SweepDelta,
    /// Fidelity over photon leakage and spontaneous emission rates.
    SweepDecoherence,
    /// Run the property checks and print a pass/fail report.
    Verify,
}

#[derive(Args, Debug)]
struct Flags {
    /// Operation time in units of 1/g.
    #[arg(long, global = true)]
    tf: Option<f64>,
    /// Reference-protocol angle epsilon (radians).
    #[arg(long, global = true, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Cavity-fiber coupling in units of g.
    #[arg(long, global = true)]
    v_over_g: Option<f64>,
    /// Photon leakage rate in units of g.
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Spontaneous emission rate in units of g.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// RK4 steps for a run of duration tf.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Sweep grid start:stop:count; give twice for 2-D sweeps.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Vec<Grid>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key = value config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool> {
    let f = cli.flags;
    let overrides = Overrides {
        tf: f.tf,
        eps: f.eps,
        v_over_g: f.v_over_g,
        kappa: f.kappa,
        gamma: f.gamma,
        steps: f.steps,
        grids: f.grid,
        workers: f.workers,
        out: f.out,
    };
    let cfg = RunConfig::resolve(f.config.as_deref(), overrides)?;
    let table = match cli.command {
        Command::Pulses => cmd_pulses(&cfg)?,
        Command::Evolve => cmd_evolve(&cfg)?,
        Command::SweepTf => cmd_sweep_tf(&cfg)?,
        Command::SweepEps => cmd_sweep_eps(&cfg)?,
        Command::SweepDelta => cmd_sweep_delta(&cfg)?,
        Command::SweepDecoherence => cmd_sweep_decoherence(&cfg)?,
        Command::Verify => {
            let report = cmd_verify(&cfg);
            write_text(&report.render(), cfg.out.as_deref())?;
            return Ok(report.passed());
        }
    };
    table.write(cfg.out.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sta3d: {e}");
            ExitCode::from(2)
        }
    }
}
