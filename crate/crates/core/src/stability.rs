//! Delay-dependent linear stability: the zero-delay Routh-Hurwitz test,
//! candidate crossing frequencies, the critical delay with its arctangent
//! branch fixed by the full complex crossing equation, the crossing speed
//! `lambda'(tau0)` and a Newton root tracker for verification.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cubic::MonicCubic;
use crate::error::{Error, Result};
use crate::linearization::{char_coeffs, CharCoeffs, CoeffForm};
use crate::model::{taylor_coefficients, ModelParams};

/// Relative tolerance for treating a Hurwitz comparison as an equality.
pub const MARGINAL_TOL: f64 = 1e-12;
/// Relative residual accepted for a crossing `Delta(i omega, tau) = 0`.
pub const CROSSING_TOL: f64 = 1e-9;
/// Relative residual at which Newton root tracking stops.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HurwitzVerdict {
    Stable,
    Unstable,
    Marginal,
}

impl HurwitzVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            HurwitzVerdict::Stable => "stable",
            HurwitzVerdict::Unstable => "unstable",
            HurwitzVerdict::Marginal => "marginal",
        }
    }
}

fn combine(conditions: &[(f64, f64)]) -> HurwitzVerdict {
    // Each entry is (value that must be positive, magnitude scale).
    let mut marginal = false;
    for &(value, scale) in conditions {
        if value.abs() <= MARGINAL_TOL * scale.max(f64::MIN_POSITIVE) {
            marginal = true;
        } else if value < 0.0 {
            return HurwitzVerdict::Unstable;
        }
    }
    if marginal {
        HurwitzVerdict::Marginal
    } else {
        HurwitzVerdict::Stable
    }
}

/// Routh-Hurwitz test of `P(l) + Q(l)` (the factor `l + delta` is always
/// stable). All three conditions of a cubic are required.
pub fn hurwitz_zero_delay(c: &CharCoeffs) -> HurwitzVerdict {
    let (s2, s1, s0) = (c.p2 + c.q2, c.p1 + c.q1, c.p0 + c.q0);
    combine(&[
        (s2, c.p2.abs() + c.q2.abs()),
        (s1 * s2 - s0, (s1 * s2).abs() + s0.abs()),
        (s0, c.p0.abs() + c.q0.abs()),
    ])
}

/// The two-condition variant (`p2 + q2 > 0` and
/// `(p1 + q1)(p2 + q2) > p0 + q0`) without the constant-term check.
pub fn hurwitz_two_condition(c: &CharCoeffs) -> HurwitzVerdict {
    let (s2, s1, s0) = (c.p2 + c.q2, c.p1 + c.q1, c.p0 + c.q0);
    combine(&[
        (s2, c.p2.abs() + c.q2.abs()),
        (s1 * s2 - s0, (s1 * s2).abs() + s0.abs()),
    ])
}

/// Sign-table classification of the frequency polynomial by delayed tax
/// share, with the root count each case predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareCase {
    /// share > 1/2 and (a_F >= 0 or b_F <= 0): one positive root.
    HighShareSignCondition,
    /// share > 1/2, a_F < 0, b_F > 0, discriminant <= 0: one positive root.
    HighShareNonPositiveDiscriminant,
    /// share < 1/2, a_F < 0, b_F < 0, discriminant <= 0: two positive roots.
    LowShareTwoRoots,
    /// share = 1/2, a_F < 0, b_F = 0: one positive root.
    HalfShareZeroB,
    /// share = 1/2, a_F < 0, b_F > 0: two positive roots.
    HalfShareTwoRoots,
    /// share = 1/2, b_F < 0: one positive root.
    HalfShareNegativeB,
    /// None of the tabulated conditions hold.
    Unclassified,
}

impl ShareCase {
    pub fn classify(epsilon: f64, a_f: f64, b_f: f64, discriminant: f64) -> Self {
        use ShareCase::*;
        if epsilon > 0.5 {
            if a_f >= 0.0 || b_f <= 0.0 {
                HighShareSignCondition
            } else if discriminant <= 0.0 {
                HighShareNonPositiveDiscriminant
            } else {
                Unclassified
            }
        } else if epsilon < 0.5 {
            if a_f < 0.0 && b_f < 0.0 && discriminant <= 0.0 {
                LowShareTwoRoots
            } else {
                Unclassified
            }
        } else if a_f < 0.0 && b_f == 0.0 {
            HalfShareZeroB
        } else if a_f < 0.0 && b_f > 0.0 {
            HalfShareTwoRoots
        } else if b_f < 0.0 {
            HalfShareNegativeB
        } else {
            Unclassified
        }
    }

    pub fn predicted_roots(&self) -> Option<usize> {
        use ShareCase::*;
        match self {
            HighShareSignCondition | HighShareNonPositiveDiscriminant | HalfShareZeroB
            | HalfShareNegativeB => Some(1),
            LowShareTwoRoots | HalfShareTwoRoots => Some(2),
            Unclassified => None,
        }
    }

    pub fn label(&self) -> &'static str {
        use ShareCase::*;
        match self {
            HighShareSignCondition => "high-share/sign-condition",
            HighShareNonPositiveDiscriminant => "high-share/non-positive-discriminant",
            LowShareTwoRoots => "low-share/two-roots",
            HalfShareZeroB => "half-share/zero-bF",
            HalfShareTwoRoots => "half-share/two-roots",
            HalfShareNegativeB => "half-share/negative-bF",
            Unclassified => "unclassified",
        }
    }
}

/// Analysis of `f(w) = w^6 + a_F w^4 + b_F w^2 + c_F`, whose positive roots
/// are the only frequencies at which roots can cross the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAnalysis {
    pub a_f: f64,
    pub b_f: f64,
    pub c_f: f64,
    /// Shift `-a_F / 3` of the cubic in `u = w^2`.
    pub k: f64,
    /// Depressed-cubic discriminant `f(k)^2 / 4 + f'(k)^3 / 27`.
    pub discriminant: f64,
    /// The alternative expression `f(k)^4 / 4 + f'(k)^3 / 9`, kept for
    /// reporting only.
    pub printed_discriminant: f64,
    /// Positive crossing frequencies, ascending.
    pub roots: Vec<f64>,
    pub case: ShareCase,
    /// Set when the discriminant vanishes to working precision.
    pub degenerate: bool,
}

impl FrequencyAnalysis {
    pub fn cubic(&self) -> MonicCubic {
        MonicCubic { c2: self.a_f, c1: self.b_f, c0: self.c_f }
    }

    /// `f(w)` itself.
    pub fn eval(&self, omega: f64) -> f64 {
        self.cubic().eval(omega * omega)
    }
}

pub fn frequency_analysis(c: &CharCoeffs, epsilon: f64) -> Result<FrequencyAnalysis> {
    let a_f = c.p2 * c.p2 - c.q2 * c.q2 - 2.0 * c.p1;
    let b_f = 2.0 * c.q0 * c.q2 - 2.0 * c.p0 * c.p2 - c.q1 * c.q1 + c.p1 * c.p1;
    let c_f = c.p0 * c.p0 - c.q0 * c.q0;
    let scale = (c.p0 * c.p0).max(c.q0 * c.q0);
    if c_f.abs() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::Degenerate(format!(
            "c_F = {c_f:e} vanishes: zero is a crossing frequency"
        )));
    }
    let cubic = MonicCubic { c2: a_f, c1: b_f, c0: c_f };
    let k = cubic.shift();
    let (fp, fk) = cubic.depressed();
    let discriminant = cubic.discriminant();
    let disc_scale = 0.25 * fk * fk + (fp * fp * fp).abs() / 27.0;
    let printed_discriminant = 0.25 * fk.powi(4) + fp.powi(3) / 9.0;
    let roots = cubic
        .real_roots()
        .into_iter()
        .filter(|&u| u > 0.0)
        .map(f64::sqrt)
        .collect();
    Ok(FrequencyAnalysis {
        a_f,
        b_f,
        c_f,
        k,
        discriminant,
        printed_discriminant,
        roots,
        case: ShareCase::classify(epsilon, a_f, b_f, discriminant),
        degenerate: discriminant.abs() <= 1e-12 * disc_scale,
    })
}

/// Principal arctangent of the closed-form `tan(omega tau)` at a crossing.
pub fn crossing_angle(omega: f64, c: &CharCoeffs) -> f64 {
    let w2 = omega * omega;
    let w4 = w2 * w2;
    let num = omega
        * (w4 * c.q2 - w2 * (c.q0 - c.q1 * c.p2 + c.q2 * c.p1) + c.q0 * c.p1 - c.p0 * c.q1);
    let den = w4 * (c.q1 - c.q2 * c.p2) + w2 * (c.q0 * c.p2 - c.q1 * c.p1 + c.p0 * c.q2)
        - c.p0 * c.q0;
    if den == 0.0 {
        0.5 * PI * num.signum()
    } else {
        (num / den).atan()
    }
}

/// Smallest positive delay at which `i omega` is a root of `Delta`.
///
/// The principal arctangent only fixes `omega tau` modulo `pi`; candidates
/// `(theta + j pi) / omega` are tried in increasing order and the first one
/// that satisfies both real and imaginary parts of the crossing equation wins.
pub fn critical_delay(omega: f64, c: &CharCoeffs) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Degenerate(format!("crossing frequency must be positive, got {omega}")));
    }
    let theta = crossing_angle(omega, c);
    let limit = 3.0 * PI / omega;
    let lambda = Complex64::new(0.0, omega);
    (0..=4)
        .map(|j| (theta + j as f64 * PI) / omega)
        .filter(|&tau| tau > 0.0 && tau <= limit * (1.0 + 1e-12))
        .find(|&tau| c.delta(lambda, tau).norm() <= CROSSING_TOL * c.delta_scale(lambda, tau))
        .ok_or(Error::Branch { omega })
}

/// Crossing speed `d lambda / d tau` at `lambda = i omega0`, `tau = tau0`.
pub fn transversality(omega0: f64, tau0: f64, c: &CharCoeffs) -> Result<Complex64> {
    let l = Complex64::new(0.0, omega0);
    let e = (-l * tau0).exp();
    let den = c.dp(l) + e * (c.dq(l) - tau0 * c.q(l));
    if den.norm() < 1e-12 {
        return Err(Error::Degenerate(format!(
            "non-transversal crossing at omega = {omega0}, tau = {tau0}"
        )));
    }
    Ok(l * c.q(l) * e / den)
}

/// Newton iteration on `Delta(lambda, tau) = 0` from `seed`. Callers seed
/// with `i omega0` or a previous continuation value.
pub fn rightmost_root(c: &CharCoeffs, tau: f64, seed: Complex64) -> Result<Complex64> {
    let mut l = seed;
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let d = c.delta(l, tau);
        residual = d.norm();
        if residual <= NEWTON_TOL * c.delta_scale(l, tau) {
            return Ok(l);
        }
        let dd = c.delta_dlambda(l, tau);
        if dd.norm() == 0.0 {
            break;
        }
        l -= d / dd;
        if !(l.re.is_finite() && l.im.is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER, residual })
}

/// Follows a root from `(tau_from, seed)` to `tau_to` in `steps` equal
/// Newton-corrected increments.
pub fn continue_root(
    c: &CharCoeffs,
    tau_from: f64,
    tau_to: f64,
    seed: Complex64,
    steps: usize,
) -> Result<Complex64> {
    let steps = steps.max(1);
    let mut l = rightmost_root(c, tau_from, seed)?;
    for i in 1..=steps {
        let tau = tau_from + (tau_to - tau_from) * i as f64 / steps as f64;
        l = rightmost_root(c, tau, l)?;
    }
    Ok(l)
}

/// Rightmost root found from a grid of Newton seeds in the upper half
/// plane with imaginary parts up to `im_max`. Intended for verification
/// sweeps, not as a certified global search.
pub fn scan_rightmost(c: &CharCoeffs, tau: f64, im_max: f64) -> Option<Complex64> {
    let mut best: Option<Complex64> = None;
    for re in [-1.0, -0.2, 0.0, 0.2, 1.0] {
        for k in 0..=60 {
            let seed = Complex64::new(re, im_max * k as f64 / 60.0);
            if let Ok(root) = rightmost_root(c, tau, seed) {
                let root = Complex64::new(root.re, root.im.abs());
                if best.map_or(true, |b| root.re > b.re) {
                    best = Some(root);
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    /// Roots move into the right half plane as the delay increases.
    Destabilizing,
    Stabilizing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    pub omega0: f64,
    pub tau0: f64,
    pub lambda_prime: Complex64,
    pub direction: CrossingDirection,
}

pub fn hopf_point(omega0: f64, c: &CharCoeffs) -> Result<HopfPoint> {
    let tau0 = critical_delay(omega0, c)?;
    let lambda_prime = transversality(omega0, tau0, c)?;
    let direction = if lambda_prime.re > 0.0 {
        CrossingDirection::Destabilizing
    } else {
        CrossingDirection::Stabilizing
    };
    Ok(HopfPoint { omega0, tau0, lambda_prime, direction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub form: CoeffForm,
    pub coeffs: CharCoeffs,
    pub zero_delay: HurwitzVerdict,
    pub zero_delay_two_condition: HurwitzVerdict,
    /// `None` when the characteristic function has no delayed part.
    pub frequency: Option<FrequencyAnalysis>,
    /// One entry per positive crossing frequency, ascending in frequency.
    pub hopf_points: Vec<HopfPoint>,
    /// Smallest critical delay: the first loss (or gain) of stability.
    pub switch: Option<HopfPoint>,
    /// True when the zero-delay system is stable and the sign table
    /// classifies the frequency polynomial, which guarantees a single switch.
    pub single_switch: bool,
}

pub fn stability_report(params: &ModelParams, form: CoeffForm) -> Result<StabilityReport> {
    let tc = taylor_coefficients(params, &params.equilibrium());
    let c = char_coeffs(params, &tc, form);
    let zero_delay = hurwitz_zero_delay(&c);
    let zero_delay_two_condition = hurwitz_two_condition(&c);
    if c.delay_free() {
        return Ok(StabilityReport {
            form,
            coeffs: c,
            zero_delay,
            zero_delay_two_condition,
            frequency: None,
            hopf_points: Vec::new(),
            switch: None,
            single_switch: false,
        });
    }
    let freq = frequency_analysis(&c, params.epsilon)?;
    let hopf_points = freq
        .roots
        .iter()
        .map(|&w| hopf_point(w, &c))
        .collect::<Result<Vec<_>>>()?;
    let switch = hopf_points
        .iter()
        .copied()
        .min_by(|a, b| a.tau0.total_cmp(&b.tau0));
    let single_switch = zero_delay == HurwitzVerdict::Stable && freq.case != ShareCase::Unclassified;
    Ok(StabilityReport {
        form,
        coeffs: c,
        zero_delay,
        zero_delay_two_condition,
        frequency: Some(freq),
        hopf_points,
        switch,
        single_switch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(eps: f64, form: CoeffForm) -> CharCoeffs {
        let p = ModelParams::reference(eps);
        char_coeffs(&p, &taylor_coefficients(&p, &p.equilibrium()), form)
    }

    fn synthetic(p2: f64, p1: f64, p0: f64, q2: f64, q1: f64, q0: f64) -> CharCoeffs {
        CharCoeffs { p2, p1, p0, q2, q1, q0 }
    }

    #[test]
    fn reference_zero_delay_is_stable() {
        for eps in [0.3, 0.8] {
            for form in [CoeffForm::Determinant, CoeffForm::Printed] {
                assert_eq!(hurwitz_zero_delay(&coeffs(eps, form)), HurwitzVerdict::Stable);
            }
        }
    }

    #[test]
    fn hurwitz_synthetic_cases() {
        let negative_trace = synthetic(-2.0, 1.0, 1.0, 1.0, 0.0, 0.0);
        assert_eq!(hurwitz_zero_delay(&negative_trace), HurwitzVerdict::Unstable);
        // (p1 + q1)(p2 + q2) = 2 * 3 = 6 = p0 + q0
        let boundary = synthetic(2.0, 1.5, 4.0, 1.0, 0.5, 2.0);
        assert_eq!(hurwitz_zero_delay(&boundary), HurwitzVerdict::Marginal);
        // Only the constant-term condition fails.
        let negative_constant = synthetic(2.0, 1.0, -1.0, 0.0, 0.0, 0.0);
        assert_eq!(hurwitz_zero_delay(&negative_constant), HurwitzVerdict::Unstable);
        assert_eq!(hurwitz_two_condition(&negative_constant), HurwitzVerdict::Stable);
    }

    #[test]
    fn unit_frequency_root() {
        // a_F = b_F = 0, c_F = -1 with p = l^3, q = 1.
        let c = synthetic(0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let f = frequency_analysis(&c, 0.3).unwrap();
        assert_eq!((f.a_f, f.b_f, f.c_f), (0.0, 0.0, -1.0));
        assert_eq!(f.roots.len(), 1);
        assert!((f.roots[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_frequency_is_degenerate() {
        let c = synthetic(1.0, 1.0, 2.0, 1.0, 1.0, 2.0);
        assert!(matches!(frequency_analysis(&c, 0.3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn printed_form_reproduces_published_frequencies() {
        for (eps, omega) in [(0.3, 0.6685954740), (0.8, 0.8553440397)] {
            let f = frequency_analysis(&coeffs(eps, CoeffForm::Printed), eps).unwrap();
            assert!(f.roots.iter().any(|w| (w - omega).abs() < 1e-9), "{:?}", f.roots);
        }
    }

    #[test]
    fn determinant_form_has_no_crossing_at_low_share() {
        let f = frequency_analysis(&coeffs(0.3, CoeffForm::Determinant), 0.3).unwrap();
        assert!(f.roots.is_empty());
    }

    #[test]
    fn critical_delay_satisfies_crossing_equation() {
        for eps in [0.3, 0.8] {
            for form in [CoeffForm::Determinant, CoeffForm::Printed] {
                let c = coeffs(eps, form);
                let f = frequency_analysis(&c, eps).unwrap();
                for &w in &f.roots {
                    let tau = critical_delay(w, &c).unwrap();
                    let l = Complex64::new(0.0, w);
                    assert!(tau > 0.0 && tau <= 2.0 * PI / w);
                    assert!(c.delta(l, tau).norm() < 1e-9, "{}", c.delta(l, tau).norm());
                }
            }
        }
    }

    #[test]
    fn no_delay_dependence_means_zero_speed() {
        let c = synthetic(1.0, 2.0, 3.0, 0.0, 0.0, 0.0);
        assert_eq!(transversality(0.7, 1.0, &c).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn newton_returns_exact_crossing() {
        let c = coeffs(0.3, CoeffForm::Printed);
        let f = frequency_analysis(&c, 0.3).unwrap();
        let w = f.roots[0];
        let tau = critical_delay(w, &c).unwrap();
        let root = rightmost_root(&c, tau, Complex64::new(0.0, w)).unwrap();
        assert!(root.re.abs() < 1e-8 && (root.im - w).abs() < 1e-8);
    }

    #[test]
    fn zero_share_has_no_switch() {
        let p = ModelParams::reference(0.0);
        let report = stability_report(&p, CoeffForm::Determinant).unwrap();
        assert!(report.switch.is_none());
        assert!(report.hopf_points.is_empty());
    }

    #[test]
    fn case_table_enumeration() {
        use ShareCase::*;
        assert_eq!(ShareCase::classify(0.8, 1.0, 1.0, 1.0), HighShareSignCondition);
        assert_eq!(ShareCase::classify(0.8, -1.0, -1.0, 1.0), HighShareSignCondition);
        assert_eq!(ShareCase::classify(0.8, -1.0, 1.0, -1.0), HighShareNonPositiveDiscriminant);
        assert_eq!(ShareCase::classify(0.8, -1.0, 1.0, 1.0), Unclassified);
        assert_eq!(ShareCase::classify(0.3, -1.0, -1.0, 0.0), LowShareTwoRoots);
        assert_eq!(ShareCase::classify(0.3, 1.0, -1.0, -1.0), Unclassified);
        assert_eq!(ShareCase::classify(0.5, -1.0, 0.0, 5.0), HalfShareZeroB);
        assert_eq!(ShareCase::classify(0.5, -1.0, 1.0, 5.0), HalfShareTwoRoots);
        assert_eq!(ShareCase::classify(0.5, 1.0, -1.0, 5.0), HalfShareNegativeB);
        assert_eq!(LowShareTwoRoots.predicted_roots(), Some(2));
    }
}
