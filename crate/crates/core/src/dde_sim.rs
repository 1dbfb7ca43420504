//! Fixed-step integration of the delayed system by the method of steps.
//!
//! The delay is an exact multiple of the step, so the lagged income at the
//! start and end of every step is a stored grid value. The midpoint stages
//! read it from a cubic Hermite interpolant built on the stored values and
//! derivatives. The one derivative jump of the solution (at `t = 0`, where
//! the history meets the integrated solution) is kept one-sided.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linearization::LinearPair;
use crate::model::{vector_field, ModelParams};

/// Initial function on `[-tau, 0]`, in levels.
#[derive(Debug, Clone, PartialEq)]
pub enum HistorySpec {
    ConstantAtEquilibrium,
    /// Equilibrium plus a constant `(dY, dr, dK, dM)`.
    ConstantOffset([f64; 4]),
    /// Samples `(t, [Y, r, K, M])` with ascending `t` covering `[-tau, 0]`;
    /// linearly interpolated onto the grid.
    Table(Vec<(f64, [f64; 4])>),
}

/// A uniformly sampled solution. `center` is the point deviations are
/// measured from (the equilibrium for the full system, zero for the
/// linearization).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 4]>,
    pub dt: f64,
    pub tau: f64,
    pub center: [f64; 4],
}

impl Trajectory {
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn last(&self) -> Option<&[f64; 4]> {
        self.states.last()
    }

    /// Largest `|x_i - center_i|` over the run.
    pub fn max_deviation(&self, i: usize) -> f64 {
        self.states.iter().map(|s| (s[i] - self.center[i]).abs()).fold(0.0, f64::max)
    }

    /// Samples with `t >= t_start`.
    pub fn tail(&self, t_start: f64) -> Trajectory {
        let from = self.times.partition_point(|&t| t < t_start);
        Trajectory {
            times: self.times[from..].to_vec(),
            states: self.states[from..].to_vec(),
            ..*self
        }
    }

    pub fn envelope(&self, i: usize) -> Result<Envelope> {
        classify_envelope(&self.component(i), self.center[i])
    }

    pub fn period(&self, i: usize) -> Result<f64> {
        estimate_period(&self.times, &self.component(i), self.center[i])
    }

    /// CSV with header `t,Y,r,K,M` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,Y,r,K,M")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(out, "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s[0], s[1], s[2], s[3])?;
        }
        Ok(())
    }
}

/// Failure during integration, carrying the solution computed so far.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct SimError {
    pub error: Error,
    pub partial: Option<Trajectory>,
}

impl From<Error> for SimError {
    fn from(error: Error) -> Self {
        SimError { error, partial: None }
    }
}

/// Number of steps per delay, or a step error when `dt` does not divide
/// `tau`.
pub fn steps_per_delay(tau: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(tau > 0.0) || !dt.is_finite() || !tau.is_finite() {
        return Err(Error::Step(format!("need tau > 0 and dt > 0 (tau = {tau}, dt = {dt})")));
    }
    let n = (tau / dt).round();
    if n < 1.0 || (n * dt - tau).abs() > 1e-9 * tau {
        return Err(Error::Step(format!("dt = {dt} does not divide tau = {tau}")));
    }
    Ok(n as usize)
}

/// Largest step for which RK4 is stable on the stiffest linear mode,
/// bounded via the row-sum norm of `|A| + |B|`. The stable interval of
/// classical RK4 on the negative real axis is about 2.78; 2 leaves margin.
pub fn stable_step(pair: &LinearPair) -> f64 {
    let bound = (0..4)
        .map(|i| (0..4).map(|j| pair.a[i][j].abs() + pair.b[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if bound > 0.0 {
        2.0 / bound
    } else {
        f64::INFINITY
    }
}

/// `tau / n` with `n >= 200` the smallest count keeping the step below
/// [`stable_step`].
pub fn default_dt(pair: &LinearPair, tau: f64) -> f64 {
    let n = (tau / stable_step(pair)).ceil().max(200.0);
    tau / n
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Step(format!("t_end must be positive, got {t_end}")));
    }
    Ok((t_end / dt - 1e-9).ceil().max(1.0) as usize)
}

/// Lagged-component data on the history grid `t = -n dt, ..., 0`.
struct LagHistory {
    values: Vec<f64>,
    slopes: Vec<f64>,
    initial: [f64; 4],
}

impl LagHistory {
    fn constant(state: [f64; 4], n: usize) -> Self {
        LagHistory { values: vec![state[0]; n + 1], slopes: vec![0.0; n + 1], initial: state }
    }

    fn from_table(table: &[(f64, [f64; 4])], tau: f64, n: usize, dt: f64) -> Result<Self> {
        if table.len() < 2 || table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Parameter("history table needs at least two samples with ascending times".into()));
        }
        let (t_first, t_last) = (table[0].0, table[table.len() - 1].0);
        if t_first > -tau * (1.0 - 1e-12) || t_last.abs() > 1e-12 * tau {
            return Err(Error::Parameter(format!(
                "history table must cover [-{tau}, 0], got [{t_first}, {t_last}]"
            )));
        }
        let at = |t: f64| -> [f64; 4] {
            let j = table.partition_point(|s| s.0 <= t).clamp(1, table.len() - 1);
            let ((ta, a), (tb, b)) = (table[j - 1], table[j]);
            let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
            std::array::from_fn(|i| a[i] + w * (b[i] - a[i]))
        };
        let values: Vec<f64> = (0..=n).map(|j| at((j as f64 - n as f64) * dt)[0]).collect();
        let slopes = (0..=n)
            .map(|j| {
                let (lo, hi) = (j.saturating_sub(1), (j + 1).min(n));
                (values[hi] - values[lo]) / ((hi - lo) as f64 * dt)
            })
            .collect();
        Ok(LagHistory { values, slopes, initial: table[table.len() - 1].1 })
    }
}

/// RK4 core shared by the nonlinear and the linearized systems. The lagged
/// quantity is always component 0.
fn integrate<F, G>(
    rhs: F,
    admissible: G,
    hist: LagHistory,
    n: usize,
    steps: usize,
    dt: f64,
) -> (Vec<[f64; 4]>, Option<Error>)
where
    F: Fn(&[f64; 4], f64) -> Result<[f64; 4]>,
    G: Fn(&[f64; 4]) -> Result<()>,
{
    let total = n + 1 + steps;
    let mut lag = hist.values;
    lag.reserve(total);
    // Derivative at a node as a left end (`right`) and as a right end
    // (`left`) of an interpolation interval. They differ only at t = 0.
    let mut right = hist.slopes.clone();
    let mut left = hist.slopes;
    right.resize(total, 0.0);
    left.resize(total, 0.0);

    let mut states = Vec::with_capacity(steps + 1);
    let mut x = hist.initial;
    states.push(x);
    let add = |x: &[f64; 4], k: &[f64; 4], h: f64| -> [f64; 4] { std::array::from_fn(|i| x[i] + h * k[i]) };

    for i in 0..steps {
        let node = n + i;
        let outcome = (|| {
            let k1 = rhs(&x, lag[i])?;
            right[node] = k1[0];
            if node > n {
                left[node] = k1[0];
            }
            let mid = 0.5 * (lag[i] + lag[i + 1]) + dt * (right[i] - left[i + 1]) / 8.0;
            let k2 = rhs(&add(&x, &k1, 0.5 * dt), mid)?;
            let k3 = rhs(&add(&x, &k2, 0.5 * dt), mid)?;
            let k4 = rhs(&add(&x, &k3, dt), lag[i + 1])?;
            let next: [f64; 4] =
                std::array::from_fn(|j| x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("non-finite state at t = {}", (i + 1) as f64 * dt)));
            }
            admissible(&next)?;
            Ok(next)
        })();
        match outcome {
            Ok(next) => {
                x = next;
                lag.push(x[0]);
                states.push(x);
            }
            Err(e) => return (states, Some(e)),
        }
    }
    (states, None)
}

fn finish(
    states: Vec<[f64; 4]>,
    failure: Option<Error>,
    dt: f64,
    tau: f64,
    center: [f64; 4],
) -> std::result::Result<Trajectory, SimError> {
    let times = (0..states.len()).map(|i| i as f64 * dt).collect();
    let traj = Trajectory { times, states, dt, tau, center };
    match failure {
        None => Ok(traj),
        Some(error) => Err(SimError { error, partial: Some(traj) }),
    }
}

/// Integrates the nonlinear delayed system from `t = 0` to `t_end`.
pub fn simulate(
    params: &ModelParams,
    tau: f64,
    history: &HistorySpec,
    t_end: f64,
    dt: f64,
) -> std::result::Result<Trajectory, SimError> {
    let n = steps_per_delay(tau, dt)?;
    let steps = step_count(t_end, dt)?;
    let eq = params.equilibrium().as_array();
    let hist = match history {
        HistorySpec::ConstantAtEquilibrium => LagHistory::constant(eq, n),
        HistorySpec::ConstantOffset(off) => LagHistory::constant(std::array::from_fn(|i| eq[i] + off[i]), n),
        HistorySpec::Table(table) => LagHistory::from_table(table, tau, n, dt)?,
    };
    let r2 = params.r2;
    let check = |s: &[f64; 4]| {
        if s[0] > 0.0 && s[1] > r2 {
            Ok(())
        } else {
            Err(Error::Domain(format!("state left the admissible region: Y = {}, r = {}", s[0], s[1])))
        }
    };
    if let Some(bad) = hist.values.iter().find(|&&y| !(y > 0.0)) {
        return Err(Error::Domain(format!("history income {bad} is not positive")).into());
    }
    check(&hist.initial)?;
    let (states, failure) = integrate(|x, yd| vector_field(params, *x, yd), check, hist, n, steps, dt);
    finish(states, failure, dt, tau, eq)
}

/// Integrates `x' = A x(t) + B x(t - tau)` in deviation coordinates from a
/// constant history.
pub fn simulate_linear(
    pair: &LinearPair,
    tau: f64,
    offset: [f64; 4],
    t_end: f64,
    dt: f64,
) -> std::result::Result<Trajectory, SimError> {
    let n = steps_per_delay(tau, dt)?;
    let steps = step_count(t_end, dt)?;
    let rhs = |x: &[f64; 4], lag: f64| -> Result<[f64; 4]> {
        Ok(std::array::from_fn(|i| {
            (0..4).map(|j| pair.a[i][j] * x[j]).sum::<f64>() + pair.b[i][0] * lag
        }))
    };
    let (states, failure) = integrate(rhs, |_| Ok(()), LagHistory::constant(offset, n), n, steps, dt);
    finish(states, failure, dt, tau, [0.0; 4])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Decaying,
    Sustained,
    Growing,
}

impl Envelope {
    pub fn name(&self) -> &'static str {
        match self {
            Envelope::Decaying => "decaying",
            Envelope::Sustained => "sustained",
            Envelope::Growing => "growing",
        }
    }
}

pub const ENVELOPE_TOL: f64 = 0.02;
pub const MIN_EXTREMA: usize = 6;
pub const MIN_CROSSINGS: usize = 4;

/// Indices of strict local maxima and minima.
fn extrema(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            (b > a && b >= c) || (b < a && b <= c)
        })
        .collect()
}

/// Compares the mean extremum magnitude `|x - center|` over the last third
/// of the extrema with that over the first third.
pub fn classify_envelope(values: &[f64], center: f64) -> Result<Envelope> {
    let ext = extrema(values);
    if ext.len() < MIN_EXTREMA {
        return Err(Error::InsufficientData(format!(
            "{} extrema found, need {MIN_EXTREMA}",
            ext.len()
        )));
    }
    let mags: Vec<f64> = ext.iter().map(|&i| (values[i] - center).abs()).collect();
    let third = mags.len() / 3;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (first, last) = (mean(&mags[..third]), mean(&mags[mags.len() - third..]));
    if !(first > 0.0) {
        return Err(Error::InsufficientData("zero amplitude".into()));
    }
    let ratio = last / first;
    Ok(if ratio < 1.0 - ENVELOPE_TOL {
        Envelope::Decaying
    } else if ratio > 1.0 + ENVELOPE_TOL {
        Envelope::Growing
    } else {
        Envelope::Sustained
    })
}

/// Exponential rate of the extremum magnitudes, by least squares on
/// `ln |x - center|` against time.
pub fn envelope_rate(times: &[f64], values: &[f64], center: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = extrema(values)
        .into_iter()
        .map(|i| (times[i], (values[i] - center).abs()))
        .filter(|p| p.1 > 0.0)
        .map(|(t, m)| (t, m.ln()))
        .collect();
    if pts.len() < MIN_EXTREMA {
        return Err(Error::InsufficientData(format!("{} extrema found, need {MIN_EXTREMA}", pts.len())));
    }
    let n = pts.len() as f64;
    let (mt, ml) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Mean spacing of upward crossings of `center`, located by linear
/// interpolation.
pub fn estimate_period(times: &[f64], values: &[f64], center: f64) -> Result<f64> {
    let crossings: Vec<f64> = times
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] - center < 0.0 && v[1] - center >= 0.0)
        .map(|(t, v)| {
            let (a, b) = (v[0] - center, v[1] - center);
            t[0] + (t[1] - t[0]) * (-a) / (b - a)
        })
        .collect();
    if crossings.len() < MIN_CROSSINGS {
        return Err(Error::InsufficientData(format!(
            "{} upward crossings found, need {MIN_CROSSINGS}",
            crossings.len()
        )));
    }
    Ok((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(dt: f64, t_end: f64) -> Vec<f64> {
        (0..=(t_end / dt).round() as usize).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn equilibrium_history_stays_put() {
        let p = ModelParams::reference(0.3);
        let tc = crate::model::taylor_coefficients(&p, &p.equilibrium());
        let dt = default_dt(&crate::linearization::linearize(&p, &tc), 4.5);
        let traj = simulate(&p, 4.5, &HistorySpec::ConstantAtEquilibrium, 100.0, dt).unwrap();
        for i in 0..4 {
            assert!(traj.max_deviation(i) < 1e-9 * traj.center[i].abs().max(1.0), "component {i}");
        }
        assert!((traj.times.last().unwrap() - 100.0).abs() < 0.03);
    }

    #[test]
    fn default_step_respects_stiffness() {
        let p = ModelParams::reference(0.3);
        let tc = crate::model::taylor_coefficients(&p, &p.equilibrium());
        let pair = crate::linearization::linearize(&p, &tc);
        let dt = default_dt(&pair, 4.5);
        assert!(dt <= stable_step(&pair) && dt <= 4.5 / 200.0);
        assert!(steps_per_delay(4.5, dt).is_ok());
    }

    #[test]
    fn step_must_divide_delay() {
        let p = ModelParams::reference(0.3);
        let err = simulate(&p, 1.0, &HistorySpec::ConstantAtEquilibrium, 10.0, 0.3).unwrap_err();
        assert!(matches!(err.error, Error::Step(_)));
        assert!(steps_per_delay(1.0, 0.25).is_ok());
        assert!(steps_per_delay(1.0, 2.0).is_err());
    }

    #[test]
    fn domain_exit_keeps_partial_trajectory() {
        let p = ModelParams::reference(0.8);
        let history = HistorySpec::ConstantOffset([-499.0, 0.0, 0.0, 0.0]);
        let err = simulate(&p, 1.0, &history, 200.0, 0.01).unwrap_err();
        assert!(matches!(err.error, Error::Domain(_)));
        assert!(!err.partial.unwrap().states.is_empty());
    }

    #[test]
    fn table_history_matches_constant_offset() {
        let p = ModelParams::reference(0.3);
        let eq = p.equilibrium().as_array();
        let lifted: [f64; 4] = std::array::from_fn(|i| eq[i] + [1.0, 0.0, 0.0, 0.0][i]);
        let table = vec![(-2.0, lifted), (0.0, lifted)];
        let a = simulate(&p, 2.0, &HistorySpec::Table(table), 20.0, 0.001).unwrap();
        let b = simulate(&p, 2.0, &HistorySpec::ConstantOffset([1.0, 0.0, 0.0, 0.0]), 20.0, 0.001).unwrap();
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn table_must_cover_history() {
        let p = ModelParams::reference(0.3);
        let eq = p.equilibrium().as_array();
        let err = simulate(&p, 2.0, &HistorySpec::Table(vec![(-1.0, eq), (0.0, eq)]), 5.0, 0.01).unwrap_err();
        assert!(matches!(err.error, Error::Parameter(_)));
    }

    #[test]
    fn linear_delay_equation_with_known_solution() {
        // x' = -x(t - 1), history 1: x = 1 - t on [0, 1],
        // x = 1 - t + (t - 1)^2 / 2 on [1, 2].
        let mut pair = LinearPair { a: [[0.0; 4]; 4], b: [[0.0; 4]; 4] };
        pair.b[0][0] = -1.0;
        let traj = simulate_linear(&pair, 1.0, [1.0, 0.0, 0.0, 0.0], 2.0, 0.05).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let exact = if *t <= 1.0 { 1.0 - t } else { 1.0 - t + (t - 1.0).powi(2) / 2.0 };
            assert!((s[0] - exact).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn csv_header_and_precision() {
        let traj = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![[500.0, 0.1, 675.0, 33.0], [1.0 / 3.0, 0.0, 0.0, 0.0]],
            dt: 0.5,
            tau: 0.5,
            center: [0.0; 4],
        };
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,Y,r,K,M"));
        lines.next();
        let y: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(y, 1.0 / 3.0);
    }

    #[test]
    fn envelope_of_synthetic_signals() {
        let t = grid(0.01, 60.0);
        let damped: Vec<f64> = t.iter().map(|t| (-0.1 * t).exp() * t.sin()).collect();
        let steady: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        let growing: Vec<f64> = t.iter().map(|t| (0.05 * t).exp() * t.sin()).collect();
        assert_eq!(classify_envelope(&damped, 0.0).unwrap(), Envelope::Decaying);
        assert_eq!(classify_envelope(&steady, 0.0).unwrap(), Envelope::Sustained);
        assert_eq!(classify_envelope(&growing, 0.0).unwrap(), Envelope::Growing);
        let offset: Vec<f64> = steady.iter().map(|v| v + 500.0).collect();
        assert_eq!(classify_envelope(&offset, 500.0).unwrap(), Envelope::Sustained);
    }

    #[test]
    fn too_few_extrema() {
        let t = grid(0.01, 5.0);
        let v: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        assert!(matches!(classify_envelope(&v, 0.0), Err(Error::InsufficientData(_))));
        assert!(matches!(classify_envelope(&[1.0; 50], 0.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn period_of_synthetic_signals() {
        let t = grid(0.01, 50.0);
        let v: Vec<f64> = t.iter().map(|t| (2.0 * PI * t / 7.0).sin()).collect();
        assert!((estimate_period(&t, &v, 0.0).unwrap() - 7.0).abs() < 0.01);
        let d: Vec<f64> = t.iter().map(|t| (-0.05 * t).exp() * (2.0 * PI * t / 5.0).sin()).collect();
        assert!((estimate_period(&t, &d, 0.0).unwrap() - 5.0).abs() < 0.05);
        let short = &v[..1000];
        assert!(estimate_period(&t[..1000], short, 0.0).is_err());
    }

    #[test]
    fn rate_of_exponential_envelope() {
        let t = grid(0.01, 40.0);
        let v: Vec<f64> = t.iter().map(|t| (-0.07 * t).exp() * (1.3 * t).cos()).collect();
        assert!((envelope_rate(&t, &v, 0.0).unwrap() + 0.07).abs() < 1e-3);
    }
}
