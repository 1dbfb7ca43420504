//! Hopf normal form at a crossing `(omega0, tau0)`: eigenfunctions of the
//! delayed linear problem and its adjoint, the center-manifold expansion to
//! second order, the reduced coefficients `g20, g11, g02, g21` and the
//! derived direction / stability / period quantities.
//!
//! Conventions: `Phi(theta) = v e^{lambda1 theta}` on `[-tau0, 0]` with
//! `v1 = 1`, and `Psi(s) = w e^{lambda1 s}` on `[0, tau0]` (adjoint
//! eigenvalue `lambda2 = -i omega0`). The reduced equation is
//! `z' = lambda1 z + g20 z^2/2 + g11 z zbar + g02 zbar^2/2 + g21 z^2 zbar/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, complexify, mat_vec, norm};
use crate::linearization::LinearPair;
use crate::model::{ModelParams, TaylorCoeffs};
use crate::stability::HopfPoint;

type C = Complex64;
type CVec = [C; 4];

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn dot_conj(w: &CVec, v: &CVec) -> C {
    w.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn conj_vec(v: &CVec) -> CVec {
    v.map(|c| c.conj())
}

fn scale_vec(v: &CVec, s: C) -> CVec {
    v.map(|c| c * s)
}

fn add_vec(a: &CVec, b: &CVec) -> CVec {
    std::array::from_fn(|i| a[i] + b[i])
}

fn near_zero(x: C, scale: f64) -> bool {
    x.norm() <= 1e-14 * scale.max(1.0)
}

/// Right eigenvector of `A + e^{-lambda1 tau0} B` for `lambda1 = i omega0`,
/// from the closed forms with `v1 = 1`.
pub fn right_eigenvector(lambda1: C, pair: &LinearPair, tau0: f64) -> Result<CVec> {
    let (a, b) = (&pair.a, &pair.b);
    let e = (-lambda1 * tau0).exp();
    // Row 4: (a4 + b4 e) v1 = lambda v4.
    if near_zero(lambda1, 1.0) {
        return Err(Error::Degenerate("eigenvalue at the origin".into()));
    }
    let v4 = (a[3][0] + b[3][0] * e) / lambda1;
    // Row 2: beta m + beta gamma0 gamma1 v2 - beta v4 = lambda v2.
    let den2 = lambda1 - a[1][1];
    if near_zero(lambda1 * den2, a[1][1].abs()) {
        return Err(Error::Degenerate("lambda (lambda - beta gamma0 gamma1) vanishes".into()));
    }
    let v2 = (a[1][0] + a[1][3] * v4) / den2;
    // Row 3: a rho10 e v1 + a rho01 v2 - delta v3 = lambda v3.
    let den3 = lambda1 - a[2][2];
    if near_zero(den3, a[2][2].abs()) {
        return Err(Error::Degenerate("lambda + delta vanishes".into()));
    }
    let v3 = (b[2][0] * e + a[2][1] * v2) / den3;
    Ok([C::new(1.0, 0.0), v2, v3, v4])
}

/// `<Psi, Phi>` for `Psi(s) = w e^{lambda_w s}` and
/// `Phi(theta) = v e^{lambda_v theta}` under the single point-delay measure:
///
/// `wbar.v + wbar.B v e^{conj(lambda_w) tau} int_{-tau}^0 e^{(conj(lambda_w) + lambda_v) xi} d xi`.
pub fn bilinear_form(
    w: &CVec,
    lambda_w: C,
    v: &CVec,
    lambda_v: C,
    pair: &LinearPair,
    tau0: f64,
) -> C {
    let bv = mat_vec(&complexify(&pair.b), v);
    let sigma = lambda_w.conj() + lambda_v;
    let integral = if (sigma * tau0).norm() < 1e-8 {
        tau0 * (1.0 - 0.5 * sigma * tau0)
    } else {
        (1.0 - (-sigma * tau0).exp()) / sigma
    };
    dot_conj(w, v) + dot_conj(w, &bv) * (lambda_w.conj() * tau0).exp() * integral
}

/// Eigenfunction data at the crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub v: CVec,
    /// Adjoint vector, normalized so `<Psi, Phi> = 1`.
    pub w: CVec,
    /// Effective normalization scalar: `w = wtilde / conj(eta)` where
    /// `wtilde` is the unnormalized closed-form adjoint vector.
    pub eta: C,
    /// The scalar from the closed-form normalization expression, before
    /// the bilinear-form correction.
    pub closed_form_eta: C,
    pub lambda1: C,
    pub lambda2: C,
}

impl EigenData {
    /// Exponent of the adjoint eigenfunction `Psi(s) = w e^{psi_exponent s}`.
    pub fn psi_exponent(&self) -> C {
        -self.lambda2
    }

    /// `||(A + e^{-lambda1 tau0} B - lambda1 I) v||`.
    pub fn right_residual(&self, pair: &LinearPair, tau0: f64) -> f64 {
        norm(&mat_vec(&pair.characteristic_matrix(self.lambda1, tau0), &self.v))
    }

    /// `||wbar^T (A + e^{-lambda1 tau0} B - lambda1 I)||`.
    pub fn left_residual(&self, pair: &LinearPair, tau0: f64) -> f64 {
        let m = pair.characteristic_matrix(self.lambda1, tau0);
        let wb = conj_vec(&self.w);
        let row: CVec = std::array::from_fn(|j| (0..4).map(|i| wb[i] * m[i][j]).sum());
        norm(&row)
    }

    /// `<Psi, Phi>` (should be one).
    pub fn normalization(&self, pair: &LinearPair, tau0: f64) -> C {
        bilinear_form(&self.w, self.psi_exponent(), &self.v, self.lambda1, pair, tau0)
    }

    /// `<Psi, conj(Phi)>` (should vanish).
    pub fn cross_normalization(&self, pair: &LinearPair, tau0: f64) -> C {
        bilinear_form(&self.w, self.psi_exponent(), &conj_vec(&self.v), self.lambda1.conj(), pair, tau0)
    }
}

/// Adjoint vector for `lambda2 = -i omega0` with `w3 = 0`, normalized
/// against `v` through the bilinear form. Returns the vector and the
/// effective normalization scalar.
pub fn left_eigenvector(lambda2: C, pair: &LinearPair, tau0: f64, v: &CVec) -> Result<(CVec, C)> {
    let (data, _) = left_eigen_inner(lambda2, pair, tau0, v)?;
    Ok((data.0, data.1))
}

fn left_eigen_inner(lambda2: C, pair: &LinearPair, tau0: f64, v: &CVec) -> Result<((CVec, C), C)> {
    let (a, b) = (&pair.a, &pair.b);
    let lambda1 = -lambda2;
    if near_zero(lambda1, 1.0) || a[0][1] == 0.0 {
        return Err(Error::Degenerate("adjoint vector denominators vanish".into()));
    }
    // wtilde = ((lambda2 - beta gamma0 gamma1) / (alpha a rho01), 1, 0, -beta / lambda2)
    let wtilde: CVec = [(lambda2 - a[1][1]) / a[0][1], C::new(1.0, 0.0), ZERO, a[1][3] / lambda2];

    let e = (-lambda1 * tau0).exp();
    let x = (lambda1 * tau0 * e - e + 1.0) / (lambda1 * lambda1);
    let beta = -a[1][3];
    let closed_form_eta = (lambda1 - a[1][1]) / a[0][1] * (1.0 + b[0][0] * x) + v[1]
        - beta / lambda1 * (v[3] + b[3][0] * x);
    if near_zero(closed_form_eta, 1.0) {
        return Err(Error::Degenerate("normalization scalar vanishes".into()));
    }
    let w0 = scale_vec(&wtilde, closed_form_eta.conj().inv());
    let pairing = bilinear_form(&w0, lambda1, v, lambda1, pair, tau0);
    if near_zero(pairing, 1.0) {
        return Err(Error::Degenerate("eigenfunctions are orthogonal under the bilinear form".into()));
    }
    let w = scale_vec(&w0, pairing.conj().inv());
    Ok(((w, closed_form_eta * pairing), closed_form_eta))
}

pub fn eigen_data(omega0: f64, pair: &LinearPair, tau0: f64) -> Result<EigenData> {
    let lambda1 = C::new(0.0, omega0);
    let lambda2 = lambda1.conj();
    let v = right_eigenvector(lambda1, pair, tau0)?;
    let ((w, eta), closed_form_eta) = left_eigen_inner(lambda2, pair, tau0, &v)?;
    Ok(EigenData { v, w, eta, closed_form_eta, lambda1, lambda2 })
}

/// Argument of the nonlinearity: the present state and the lagged income
/// deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arg {
    pub now: CVec,
    pub lag: C,
}

impl Arg {
    pub fn conj(&self) -> Self {
        Arg { now: conj_vec(&self.now), lag: self.lag.conj() }
    }
}

/// Symmetric multilinear forms of the nonlinear terms: the quadratic part
/// is `Q(x, x) / 2` and the cubic part `K(x, x, x) / 6`.
#[derive(Debug, Clone, Copy)]
pub struct Nonlinearity {
    alpha: f64,
    a: f64,
    beta: f64,
    gamma0: f64,
    tc: TaylorCoeffs,
}

impl Nonlinearity {
    pub fn new(params: &ModelParams, tc: &TaylorCoeffs) -> Self {
        Self { alpha: params.alpha, a: params.a, beta: params.beta, gamma0: params.gamma0, tc: *tc }
    }

    fn investment_q(&self, x1: C, x2: C, y1: C, y2: C) -> C {
        let t = &self.tc;
        t.rho20 * x1 * y1 + t.rho11 * (x1 * y2 + x2 * y1) + t.rho02 * x2 * y2
    }

    fn investment_k(&self, x: (C, C), y: (C, C), z: (C, C)) -> C {
        let t = &self.tc;
        t.rho30 * x.0 * y.0 * z.0
            + t.rho21 * (x.0 * y.0 * z.1 + x.0 * y.1 * z.0 + x.1 * y.0 * z.0)
            + t.rho12 * (x.0 * y.1 * z.1 + x.1 * y.0 * z.1 + x.1 * y.1 * z.0)
            + t.rho03 * x.1 * y.1 * z.1
    }

    pub fn quadratic(&self, x: &Arg, y: &Arg) -> CVec {
        let bg = self.beta * self.gamma0;
        [
            self.alpha * self.a * self.investment_q(x.now[0], x.now[1], y.now[0], y.now[1]),
            bg * self.tc.gamma2 * x.now[1] * y.now[1],
            self.a * self.investment_q(x.lag, x.now[1], y.lag, y.now[1]),
            ZERO,
        ]
    }

    pub fn cubic(&self, x: &Arg, y: &Arg, z: &Arg) -> CVec {
        let bg = self.beta * self.gamma0;
        let now = |u: &Arg| (u.now[0], u.now[1]);
        let lag = |u: &Arg| (u.lag, u.now[1]);
        [
            self.alpha * self.a * self.investment_k(now(x), now(y), now(z)),
            bg * self.tc.gamma3 * x.now[1] * y.now[1] * z.now[1],
            self.a * self.investment_k(lag(x), lag(y), lag(z)),
            ZERO,
        ]
    }
}

fn phi_arg(v: &CVec, lambda1: C, tau0: f64) -> Arg {
    Arg { now: *v, lag: v[0] * (-lambda1 * tau0).exp() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTerms {
    pub g20: C,
    pub g11: C,
    pub g02: C,
    /// Coefficient vector of `z^2 / 2` in `F`.
    pub f20: CVec,
    /// Coefficient vector of `z zbar` in `F`.
    pub f11: CVec,
}

pub fn quadratic_coefficients(
    eig: &EigenData,
    params: &ModelParams,
    tc: &TaylorCoeffs,
    tau0: f64,
) -> QuadraticTerms {
    let nl = Nonlinearity::new(params, tc);
    let phi = phi_arg(&eig.v, eig.lambda1, tau0);
    let phi_bar = phi.conj();
    let f20 = nl.quadratic(&phi, &phi);
    let f11 = nl.quadratic(&phi, &phi_bar);
    let f02 = conj_vec(&f20);
    QuadraticTerms {
        g20: dot_conj(&eig.w, &f20),
        g11: dot_conj(&eig.w, &f11),
        g02: dot_conj(&eig.w, &f02),
        f20,
        f11,
    }
}

/// Delay factor used in the `E1` solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum E1Variant {
    /// Characteristic matrix at `2 lambda1`: factor `e^{-2 lambda1 tau0}`.
    #[default]
    DoubleFrequency,
    /// Factor `e^{-lambda1 tau0}`, kept as a diagnostic alternative.
    SingleFrequency,
}

impl E1Variant {
    pub fn name(&self) -> &'static str {
        match self {
            E1Variant::DoubleFrequency => "double-frequency",
            E1Variant::SingleFrequency => "single-frequency",
        }
    }
}

/// Second-order center-manifold data `w20(theta)`, `w11(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterManifold {
    pub e1: CVec,
    pub e2: CVec,
    pub g20: C,
    pub g11: C,
    pub g02: C,
    pub v: CVec,
    pub lambda1: C,
    pub variant: E1Variant,
}

impl CenterManifold {
    pub fn w20(&self, theta: f64) -> CVec {
        let l = self.lambda1;
        let a = scale_vec(&self.v, -self.g20 / l * (l * theta).exp());
        let b = scale_vec(&conj_vec(&self.v), -self.g02.conj() / (3.0 * l) * (-l * theta).exp());
        let c = scale_vec(&self.e1, (2.0 * l * theta).exp());
        add_vec(&add_vec(&a, &b), &c)
    }

    pub fn w11(&self, theta: f64) -> CVec {
        let l = self.lambda1;
        let a = scale_vec(&self.v, self.g11 / l * (l * theta).exp());
        let b = scale_vec(&conj_vec(&self.v), -self.g11.conj() / l * (-l * theta).exp());
        add_vec(&add_vec(&a, &b), &self.e2)
    }

    pub fn w02(&self, theta: f64) -> CVec {
        conj_vec(&self.w20(theta))
    }

    /// Matrix of the `E1` solve: `A + e^{-k lambda1 tau0} B - 2 lambda1 I`.
    pub fn e1_matrix(pair: &LinearPair, lambda1: C, tau0: f64, variant: E1Variant) -> linalg::Matrix<4> {
        let k = match variant {
            E1Variant::DoubleFrequency => 2.0,
            E1Variant::SingleFrequency => 1.0,
        };
        let e = (-k * lambda1 * tau0).exp();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let diag = if i == j { 2.0 * lambda1 } else { ZERO };
                pair.a[i][j] + e * pair.b[i][j] - diag
            })
        })
    }

    pub fn e1_residual(&self, pair: &LinearPair, tau0: f64, f20: &CVec) -> f64 {
        let m = Self::e1_matrix(pair, self.lambda1, tau0, self.variant);
        norm(&add_vec(&mat_vec(&m, &self.e1), f20))
    }

    pub fn e2_residual(&self, pair: &LinearPair, f11: &CVec) -> f64 {
        let m = complexify(&pair.sum());
        norm(&add_vec(&mat_vec(&m, &self.e2), f11))
    }
}

pub fn center_manifold_vectors(
    q: &QuadraticTerms,
    pair: &LinearPair,
    eig: &EigenData,
    tau0: f64,
    variant: E1Variant,
) -> Result<CenterManifold> {
    let m1 = CenterManifold::e1_matrix(pair, eig.lambda1, tau0, variant);
    let e1 = linalg::solve(&m1, &q.f20)?.map(|c| -c);
    let m2 = complexify(&pair.sum());
    let e2 = linalg::solve(&m2, &q.f11)?.map(|c| -c);
    Ok(CenterManifold {
        e1,
        e2,
        g20: q.g20,
        g11: q.g11,
        g02: q.g02,
        v: eig.v,
        lambda1: eig.lambda1,
        variant,
    })
}

/// `g21` from the `z^2 zbar` coefficient of `F` along the center manifold.
pub fn cubic_coefficient(
    cm: &CenterManifold,
    eig: &EigenData,
    params: &ModelParams,
    tc: &TaylorCoeffs,
    tau0: f64,
) -> C {
    let nl = Nonlinearity::new(params, tc);
    let phi = phi_arg(&eig.v, eig.lambda1, tau0);
    let phi_bar = phi.conj();
    let w20 = Arg { now: cm.w20(0.0), lag: cm.w20(-tau0)[0] };
    let w11 = Arg { now: cm.w11(0.0), lag: cm.w11(-tau0)[0] };
    let quad = add_vec(
        &scale_vec(&nl.quadratic(&phi, &w11), C::new(2.0, 0.0)),
        &nl.quadratic(&phi_bar, &w20),
    );
    let f21 = add_vec(&quad, &nl.cubic(&phi, &phi, &phi_bar));
    dot_conj(&eig.w, &f21)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Supercritical,
    Subcritical,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitStability {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodTrend {
    Increasing,
    Decreasing,
    Degenerate,
}

/// Interpretation of the signs of `mu2`, `beta2` and `T2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub direction: Direction,
    pub orbit: OrbitStability,
    pub period: PeriodTrend,
}

impl Verdict {
    pub fn from_signs(mu2: f64, beta2: f64, t2: f64) -> Self {
        let direction = if mu2 > 0.0 {
            Direction::Supercritical
        } else if mu2 < 0.0 {
            Direction::Subcritical
        } else {
            Direction::Degenerate
        };
        let orbit = if beta2 < 0.0 {
            OrbitStability::Stable
        } else if beta2 > 0.0 {
            OrbitStability::Unstable
        } else {
            OrbitStability::Degenerate
        };
        let period = if t2 > 0.0 {
            PeriodTrend::Increasing
        } else if t2 < 0.0 {
            PeriodTrend::Decreasing
        } else {
            PeriodTrend::Degenerate
        };
        Verdict { direction, orbit, period }
    }

    pub fn describe(&self) -> String {
        let d = match self.direction {
            Direction::Supercritical => "supercritical (cycles for tau > tau0)",
            Direction::Subcritical => "subcritical (cycles for tau < tau0)",
            Direction::Degenerate => "degenerate direction",
        };
        let o = match self.orbit {
            OrbitStability::Stable => "orbitally stable",
            OrbitStability::Unstable => "orbitally unstable",
            OrbitStability::Degenerate => "degenerate orbital stability",
        };
        let p = match self.period {
            PeriodTrend::Increasing => "period increasing",
            PeriodTrend::Decreasing => "period decreasing",
            PeriodTrend::Degenerate => "period trend degenerate",
        };
        format!("{d}, {o}, {p}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfQuantities {
    pub c1: C,
    pub mu2: f64,
    pub beta2: f64,
    pub t2: f64,
    pub verdict: Verdict,
}

pub fn hopf_quantities(
    g20: C,
    g11: C,
    g02: C,
    g21: C,
    omega0: f64,
    lambda_prime: C,
) -> Result<HopfQuantities> {
    if lambda_prime.re.abs() < 1e-14 {
        return Err(Error::Degenerate("Re lambda'(tau0) vanishes".into()));
    }
    let c1 = I / (2.0 * omega0) * (g20 * g11 - 2.0 * g11.norm_sqr() - g02.norm_sqr() / 3.0) + g21 / 2.0;
    let mu2 = -c1.re / lambda_prime.re;
    let t2 = -(c1.im + mu2 * lambda_prime.im) / omega0;
    let beta2 = 2.0 * c1.re;
    Ok(HopfQuantities { c1, mu2, beta2, t2, verdict: Verdict::from_signs(mu2, beta2, t2) })
}

/// Everything computed at one crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub eigen: EigenData,
    pub quadratic: QuadraticTerms,
    pub manifold: CenterManifold,
    pub g21: C,
    pub w20_0: CVec,
    pub w11_0: CVec,
    pub quantities: HopfQuantities,
    pub omega0: f64,
    pub tau0: f64,
}

impl NormalForm {
    pub fn g20(&self) -> C {
        self.quadratic.g20
    }
    pub fn g11(&self) -> C {
        self.quadratic.g11
    }
    pub fn g02(&self) -> C {
        self.quadratic.g02
    }
}

pub fn normal_form(
    params: &ModelParams,
    tc: &TaylorCoeffs,
    pair: &LinearPair,
    hopf: &HopfPoint,
    variant: E1Variant,
) -> Result<NormalForm> {
    let (omega0, tau0) = (hopf.omega0, hopf.tau0);
    let eigen = eigen_data(omega0, pair, tau0)?;
    let quadratic = quadratic_coefficients(&eigen, params, tc, tau0);
    let manifold = center_manifold_vectors(&quadratic, pair, &eigen, tau0, variant)?;
    let g21 = cubic_coefficient(&manifold, &eigen, params, tc, tau0);
    let quantities =
        hopf_quantities(quadratic.g20, quadratic.g11, quadratic.g02, g21, omega0, hopf.lambda_prime)?;
    Ok(NormalForm {
        eigen,
        quadratic,
        manifold,
        g21,
        w20_0: manifold.w20(0.0),
        w11_0: manifold.w11(0.0),
        quantities,
        omega0,
        tau0,
    })
}
