//! Properties of the delayed-system integrator: convergence order, agreement
//! with the linear spectrum, second-order closeness to the linearization
//! and determinism.

mod common;

use common::rel;
use islm_core::dde_sim::{default_dt, envelope_rate, simulate, simulate_linear, Envelope, HistorySpec, Trajectory};
use islm_core::stability::{hopf_point, frequency_analysis, scan_rightmost};
use islm_core::{char_coeffs, linearize, taylor_coefficients, CoeffForm, LinearPair, ModelParams};

fn pair_of(p: &ModelParams) -> LinearPair {
    linearize(p, &taylor_coefficients(p, &p.equilibrium()))
}

fn final_state(p: &ModelParams, tau: f64, dt: f64, t_end: f64) -> [f64; 4] {
    let t = simulate(p, tau, &HistorySpec::ConstantOffset([5.0, 0.001, 2.0, -1.0]), t_end, dt).unwrap();
    *t.last().unwrap()
}

#[test]
fn step_halving_shows_fourth_order() {
    // A non-stiff variant so the asymptotic regime is reached at modest steps.
    let p = ModelParams::reference(0.6).with("beta", 0.01).unwrap();
    let (tau, t_end) = (1.0, 12.0);
    let steps = [tau / 10.0, tau / 20.0, tau / 40.0];
    let [x1, x2, x4] = steps.map(|dt| final_state(&p, tau, dt, t_end));
    let diff = |a: &[f64; 4], b: &[f64; 4]| (0..4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
    let order = (diff(&x1, &x2) / diff(&x2, &x4)).log2();
    assert!(order >= 3.5, "observed order {order}");
}

#[test]
fn decay_rate_matches_rightmost_root_for_small_offsets() {
    let p = ModelParams::reference(0.3);
    let pair = pair_of(&p);
    let c = char_coeffs(&p, &taylor_coefficients(&p, &p.equilibrium()), CoeffForm::Determinant);
    for tau in [4.5, 5.4] {
        let root = scan_rightmost(&c, tau, 5.0).unwrap();
        let t_end = 60.0 * 2.0 * std::f64::consts::PI / root.im;
        let traj = simulate(&p, tau, &HistorySpec::ConstantOffset([1e-6, 0.0, 0.0, 0.0]), t_end, default_dt(&pair, tau)).unwrap();
        let tail = traj.tail(t_end / 4.0);
        let rate = envelope_rate(&tail.times, &tail.component(0), tail.center[0]).unwrap();
        assert!(rel(rate, root.re) < 0.05, "tau = {tau}: simulated {rate}, rightmost root {root}");
    }
}

#[test]
fn growth_rate_matches_rightmost_root_past_the_switch() {
    let p = ModelParams::reference(0.8);
    let tc = taylor_coefficients(&p, &p.equilibrium());
    let pair = linearize(&p, &tc);
    let c = char_coeffs(&p, &tc, CoeffForm::Determinant);
    let f = frequency_analysis(&c, 0.8).unwrap();
    let h = hopf_point(f.roots[0], &c).unwrap();
    let tau = h.tau0 + 0.2;
    let root = scan_rightmost(&c, tau, 5.0).unwrap();
    assert!(root.re > 0.0);
    let t_end = 20.0 * 2.0 * std::f64::consts::PI / root.im;
    let traj = simulate(&p, tau, &HistorySpec::ConstantOffset([1e-6, 0.0, 0.0, 0.0]), t_end, default_dt(&pair, tau)).unwrap();
    let tail = traj.tail(t_end / 4.0);
    assert_eq!(tail.envelope(0).unwrap(), Envelope::Growing);
    let rate = envelope_rate(&tail.times, &tail.component(0), tail.center[0]).unwrap();
    assert!(rel(rate, root.re) < 0.05, "simulated {rate}, rightmost root {root}");
    let period = tail.period(0).unwrap();
    assert!(rel(period, 2.0 * std::f64::consts::PI / root.im) < 0.02);
}

fn gap(full: &Trajectory, linear: &Trajectory) -> f64 {
    full.states
        .iter()
        .zip(&linear.states)
        .map(|(f, l)| (0..4).map(|i| ((f[i] - full.center[i]) - l[i]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

#[test]
fn linearization_differs_at_second_order() {
    let p = ModelParams::reference(0.3);
    let pair = pair_of(&p);
    let (tau, t_end) = (4.5, 40.0);
    let dt = default_dt(&pair, tau);
    let run = |h: f64| {
        let off = [h, 0.0, 0.0, 0.0];
        let full = simulate(&p, tau, &HistorySpec::ConstantOffset(off), t_end, dt).unwrap();
        let lin = simulate_linear(&pair, tau, off, t_end, dt).unwrap();
        gap(&full, &lin)
    };
    let (g1, g2) = (run(0.05), run(0.1));
    let ratio = g2 / g1;
    assert!((3.6..4.4).contains(&ratio), "gap ratio {ratio} ({g1:e}, {g2:e})");
    assert!(g2 < 1e-2 * 0.1, "second-order gap {g2} is not small against the offset");
}

#[test]
fn repeated_runs_are_identical() {
    let p = ModelParams::reference(0.3);
    let dt = default_dt(&pair_of(&p), 5.4);
    let run = || simulate(&p, 5.4, &HistorySpec::ConstantOffset([1.0, 0.0, 0.0, 0.0]), 30.0, dt).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn offset_table_and_constant_history_agree() {
    let p = ModelParams::reference(0.8);
    let tau = 1.0;
    let dt = default_dt(&pair_of(&p), tau);
    let eq = p.equilibrium().as_array();
    let off = [2.0, 0.0, 1.0, 0.5];
    let level: [f64; 4] = std::array::from_fn(|i| eq[i] + off[i]);
    let table = vec![(-tau, level), (0.0, level)];
    let a = simulate(&p, tau, &HistorySpec::ConstantOffset(off), 10.0, dt).unwrap();
    let b = simulate(&p, tau, &HistorySpec::Table(table), 10.0, dt).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        for i in 0..4 {
            assert!((x[i] - y[i]).abs() <= 1e-12 * x[i].abs().max(1.0));
        }
    }
}
