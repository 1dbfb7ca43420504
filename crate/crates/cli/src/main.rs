//! `islm`: analysis, simulation, waveform reconstruction and parameter
//! sweeps for the delayed IS-LM model.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use islm_core::normal_form::E1Variant;
use islm_core::CoeffForm;

#[derive(Parser, Debug)]
#[command(name = "islm", version, about = "Delayed IS-LM model: stability switches, Hopf normal form and simulation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// key=value parameter file (all 13 keys). Defaults to the reference
    /// set with epsilon = 0.3.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Override one parameter, e.g. `--set epsilon=0.8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Closed form of the characteristic coefficients.
    #[arg(long, value_enum, default_value_t = Form::Determinant, global = true)]
    pub form: Form,
    /// Delay factor in the second-order center-manifold solve.
    #[arg(long, value_enum, default_value_t = Variant::Double, global = true)]
    pub e1: Variant,
    /// Output directory.
    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Determinant,
    Printed,
}

impl From<Form> for CoeffForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Determinant => CoeffForm::Determinant,
            Form::Printed => CoeffForm::Printed,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Double,
    Single,
}

impl From<Variant> for E1Variant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Double => E1Variant::DoubleFrequency,
            Variant::Single => E1Variant::SingleFrequency,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Equilibrium, stability switch and normal form; writes report.txt
    /// and report.kv.
    Analyze,
    /// Integrate the delayed system; writes trajectory.csv.
    Simulate(SimulateArgs),
    /// Center-manifold waveform at the first switch; writes waveform.csv.
    Waveform(WaveformArgs),
    /// Repeat the analysis over a grid; writes sweep.csv.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub tau: f64,
    /// End time (default: 60 periods at the switch frequency, else 500).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Step; must divide tau (default: tau / n, n >= 200, RK4-stable).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Constant history offset from equilibrium, `dY,dr,dK,dM`.
    #[arg(long, default_value = "1,0,0,0", value_parser = parse_offset)]
    pub offset: [f64; 4],
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Args, Debug)]
pub struct WaveformArgs {
    /// End time (default: 20 periods).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Step (default: period / 200).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Real initial center-manifold coordinate.
    #[arg(long, default_value_t = 0.01)]
    pub z0: f64,
    /// Position in the delay window, in [-tau0, 0].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long)]
    pub plot: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Epsilon,
    Tau,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "sweep", value_enum)]
    pub var: SweepVar,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
}

fn parse_offset(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected 4 comma-separated values, got {}", v.len()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("islm: {e}");
            ExitCode::from(e.code())
        }
    }
}
