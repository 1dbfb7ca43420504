use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use islm_core::dde_sim::{self, HistorySpec, SimError};
use islm_core::stability::scan_rightmost;
use islm_core::waveform::{self, ReducedEquation};
use islm_core::{analyze, kv, Analysis, Error, ModelParams, ParamValues};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::report;
use crate::{Cli, Command, Common, SimulateArgs, SweepArgs, SweepVar, WaveformArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or parameters (exit 2).
    Config(String),
    /// No usable Hopf point (exit 3).
    NoSwitch(String),
    /// The integration left the admissible region (exit 4).
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::NoSwitch(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::NoSwitch(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{}: {e}", path.display()))
}

fn analysis_err(e: Error) -> CliError {
    match e {
        Error::Parameter(_) | Error::Parse { .. } => CliError::Config(e.to_string()),
        other => CliError::NoSwitch(other.to_string()),
    }
}

pub fn load_values(common: &Common) -> Result<ParamValues> {
    let mut values = match &common.params {
        None => ParamValues::reference(0.3),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            kv::parse_params(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
    };
    for o in &common.overrides {
        kv::apply_override(&mut values, o).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(values)
}

fn load_params(common: &Common) -> Result<ModelParams> {
    ModelParams::new(load_values(common)?).map_err(|e| CliError::Config(e.to_string()))
}

fn run_analysis(common: &Common, params: &ModelParams) -> Result<Analysis> {
    analyze(params, common.form.into(), common.e1.into()).map_err(analysis_err)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::File::create(&path).map(BufWriter::new).map_err(io_err(&path))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze => cmd_analyze(&cli.common),
        Command::Simulate(args) => cmd_simulate(&cli.common, args),
        Command::Waveform(args) => cmd_waveform(&cli.common, args),
        Command::Sweep(args) => cmd_sweep(&cli.common, args),
    }
}

fn cmd_analyze(common: &Common) -> Result<()> {
    let params = load_params(common)?;
    let a = run_analysis(common, &params)?;
    let text = report::text(&a);
    write_file(&common.out, "report.txt", &text)?;
    write_file(&common.out, "report.kv", &report::records(&a).to_kv())?;
    print!("{text}");
    match &a.normal_form {
        None => Err(CliError::NoSwitch("no stability switch: no Hopf point for this parameter set".into())),
        Some(Err(e)) => Err(CliError::NoSwitch(format!("normal form failed: {e}"))),
        Some(Ok(_)) => Ok(()),
    }
}

const GNUPLOT_TRAJECTORY: &str = "\
set datafile separator ','
set key autotitle columnhead
set multiplot layout 2,2
plot 'trajectory.csv' using 1:2 with lines
plot 'trajectory.csv' using 1:3 with lines
plot 'trajectory.csv' using 1:4 with lines
plot 'trajectory.csv' using 1:5 with lines
unset multiplot
";

const GNUPLOT_WAVEFORM: &str = "\
set datafile separator ','
set key autotitle columnhead
set multiplot layout 3,2
do for [c=2:7] { plot 'waveform.csv' using 1:c with lines }
unset multiplot
";

fn cmd_simulate(common: &Common, args: &SimulateArgs) -> Result<()> {
    let params = load_params(common)?;
    if !(args.tau > 0.0) {
        return Err(CliError::Config(format!("--tau must be positive, got {}", args.tau)));
    }
    let a = run_analysis(common, &params).ok();
    let dt = match args.dt {
        Some(dt) => dt,
        None => {
            let tc = islm_core::taylor_coefficients(&params, &params.equilibrium());
            dde_sim::default_dt(&islm_core::linearize(&params, &tc), args.tau)
        }
    };
    let t_end = args.tmax.unwrap_or_else(|| match a.as_ref().and_then(|a| a.switch()) {
        Some(h) => 60.0 * 2.0 * std::f64::consts::PI / h.omega0,
        None => 500.0,
    });
    let history = HistorySpec::ConstantOffset(args.offset);
    let (traj, failure) = match dde_sim::simulate(&params, args.tau, &history, t_end, dt) {
        Ok(t) => (t, None),
        Err(SimError { error, partial: Some(t) }) => (t, Some(error)),
        Err(SimError { error, partial: None }) => return Err(CliError::Config(error.to_string())),
    };
    let mut out = create(&common.out, "trajectory.csv")?;
    traj.write_csv(&mut out).map_err(io_err(&common.out))?;
    if args.plot {
        write_file(&common.out, "trajectory.gp", GNUPLOT_TRAJECTORY)?;
    }
    if let Some(e) = failure {
        return Err(CliError::Domain(format!("simulation stopped: {e}")));
    }
    let envelope = match traj.envelope(0) {
        Ok(e) => e.name().to_string(),
        Err(e) => format!("unclassified ({e})"),
    };
    let tail = traj.tail(t_end / 2.0);
    let period = match tail.period(0) {
        Ok(p) => report::full(p),
        Err(_) => "n/a".into(),
    };
    println!(
        "tau = {} dt = {} t_end = {} classification = {envelope} period = {period} max|Y - Y0| = {}",
        args.tau,
        report::full(dt),
        report::full(traj.times.last().copied().unwrap_or(0.0)),
        report::full(traj.max_deviation(0)),
    );
    Ok(())
}

fn cmd_waveform(common: &Common, args: &WaveformArgs) -> Result<()> {
    let params = load_params(common)?;
    let a = run_analysis(common, &params)?;
    let nf = a.require_normal_form().map_err(|e| CliError::NoSwitch(e.to_string()))?;
    if !(args.theta <= 0.0 && args.theta >= -nf.tau0) {
        return Err(CliError::Config(format!("--theta must lie in [-{}, 0]", nf.tau0)));
    }
    let period = 2.0 * std::f64::consts::PI / nf.omega0;
    let t_end = args.tmax.unwrap_or(20.0 * period);
    let dt = args.dt.unwrap_or(period / 200.0);
    let zs = waveform::integrate_reduced(&ReducedEquation::from(nf), Complex64::new(args.z0, 0.0), t_end, dt)
        .map_err(|e| match e {
            Error::Step(_) => CliError::Config(e.to_string()),
            other => CliError::Domain(other.to_string()),
        })?;
    let samples = waveform::reconstruct(&zs, args.theta, &nf.manifold, &a.equilibrium);
    let mut out = create(&common.out, "waveform.csv")?;
    waveform::write_csv(&samples, &params, &mut out).map_err(io_err(&common.out))?;
    if args.plot {
        write_file(&common.out, "waveform.gp", GNUPLOT_WAVEFORM)?;
    }
    let residue = samples.iter().map(|s| s.imag_residue).fold(0.0, f64::max);
    println!("samples = {} max imaginary residue = {residue:.3e}", samples.len());
    Ok(())
}

fn grid(args: &SweepArgs) -> Result<Vec<f64>> {
    if !(args.from.is_finite() && args.to.is_finite()) || args.from == args.to {
        return Err(CliError::Config(format!("sweep range [{}, {}] has zero width", args.from, args.to)));
    }
    if args.steps < 2 {
        return Err(CliError::Config("--steps must be at least 2".into()));
    }
    let n = args.steps - 1;
    Ok((0..=n).map(|i| args.from + (args.to - args.from) * i as f64 / n as f64).collect())
}

fn opt(x: Option<f64>) -> String {
    x.map(report::full).unwrap_or_default()
}

fn cmd_sweep(common: &Common, args: &SweepArgs) -> Result<()> {
    let values = load_values(common)?;
    let points = grid(args)?;
    let csv = match args.var {
        SweepVar::Epsilon => {
            let rows: Vec<String> = points
                .par_iter()
                .map(|&eps| {
                    let mut v = values;
                    v.epsilon = eps;
                    let a = ModelParams::new(v).ok().and_then(|p| run_analysis(common, &p).ok());
                    let h = a.as_ref().and_then(|a| a.switch());
                    let q = a.as_ref().and_then(|a| a.require_normal_form().ok()).map(|nf| nf.quantities);
                    format!(
                        "{},{},{},{},{},{}",
                        report::full(eps),
                        opt(h.map(|h| h.omega0)),
                        opt(h.map(|h| h.tau0)),
                        opt(q.map(|q| q.mu2)),
                        opt(q.map(|q| q.beta2)),
                        opt(q.map(|q| q.t2)),
                    )
                })
                .collect();
            std::iter::once("epsilon,omega0,tau0,mu2,beta2,T2".to_string()).chain(rows).collect::<Vec<_>>()
        }
        SweepVar::Tau => {
            if points.iter().any(|&t| !(t > 0.0)) {
                return Err(CliError::Config("tau sweep values must be positive".into()));
            }
            let params = ModelParams::new(values).map_err(|e| CliError::Config(e.to_string()))?;
            let tc = islm_core::taylor_coefficients(&params, &params.equilibrium());
            let c = islm_core::char_coeffs(&params, &tc, common.form.into());
            let rows: Vec<String> = points
                .par_iter()
                .map(|&tau| {
                    let root = scan_rightmost(&c, tau, 5.0);
                    format!(
                        "{},{},{}",
                        report::full(tau),
                        opt(root.map(|r| r.re)),
                        opt(root.map(|r| r.im)),
                    )
                })
                .collect();
            std::iter::once("tau,re_rightmost,im_rightmost".to_string()).chain(rows).collect()
        }
    };
    let text: String = csv.iter().map(|l| format!("{l}\n")).collect();
    write_file(&common.out, "sweep.csv", &text)?;
    print!("{text}");
    Ok(())
}
