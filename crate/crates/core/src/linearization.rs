//! Linear part `x' = A x(t) + B x(t - tau)` of the translated system and the
//! coefficients of its characteristic quasi-polynomial
//! `Delta(lambda, tau) = P(lambda) + exp(-lambda tau) Q(lambda)`.

use num_complex::Complex64;

use crate::linalg::Matrix;
use crate::model::{ModelParams, TaylorCoeffs};

/// Matrices of the undelayed and delayed linear terms, dense row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPair {
    pub a: [[f64; 4]; 4],
    pub b: [[f64; 4]; 4],
}

impl LinearPair {
    /// `A + exp(-lambda tau) B - lambda I`, whose determinant is the
    /// characteristic function (up to sign) and whose null vectors are the
    /// eigenvectors of the delayed problem.
    pub fn characteristic_matrix(&self, lambda: Complex64, tau: f64) -> Matrix<4> {
        let e = (-lambda * tau).exp();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let diag = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
                self.a[i][j] + e * self.b[i][j] - diag
            })
        })
    }

    /// `A + B`, the linearization with the delay collapsed.
    pub fn sum(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.a[i][j] + self.b[i][j]))
    }
}

pub fn linearize(params: &ModelParams, tc: &TaylorCoeffs) -> LinearPair {
    let p = params.values();
    let (al, be, a) = (p.alpha, p.beta, p.a);
    let a_mat = [
        [al * tc.a1, a * al * tc.rho01, 0.0, 0.0],
        [be * p.m, be * p.gamma0 * tc.gamma1, 0.0, -be],
        [0.0, a * tc.rho01, -p.delta, 0.0],
        [tc.a4, 0.0, 0.0, 0.0],
    ];
    let mut b_mat = [[0.0; 4]; 4];
    b_mat[0][0] = al * tc.b1;
    b_mat[2][0] = a * tc.rho10;
    b_mat[3][0] = tc.b4;
    LinearPair { a: a_mat, b: b_mat }
}

/// Which closed form to use for the quasi-polynomial coefficients.
///
/// `Determinant` is the expansion of `det(lambda I - A - B e^{-lambda tau})`
/// divided by `lambda + delta`. `Printed` keeps the published listing, which
/// differs in the sign of the `m a rho01` term of `p1` and lacks the factor
/// `a` in `q0`; it is the form that reproduces the published crossing
/// frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoeffForm {
    #[default]
    Determinant,
    Printed,
}

impl CoeffForm {
    pub fn name(&self) -> &'static str {
        match self {
            CoeffForm::Determinant => "determinant",
            CoeffForm::Printed => "printed",
        }
    }
}

impl std::str::FromStr for CoeffForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "determinant" => Ok(CoeffForm::Determinant),
            "printed" => Ok(CoeffForm::Printed),
            other => Err(format!("unknown coefficient form `{other}` (expected determinant|printed)")),
        }
    }
}

/// Coefficients of `P(l) = l^3 + p2 l^2 + p1 l + p0` and
/// `Q(l) = q2 l^2 + q1 l + q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoeffs {
    pub p2: f64,
    pub p1: f64,
    pub p0: f64,
    pub q2: f64,
    pub q1: f64,
    pub q0: f64,
}

pub fn char_coeffs(params: &ModelParams, tc: &TaylorCoeffs, form: CoeffForm) -> CharCoeffs {
    let p = params.values();
    let (al, be, g0, a, m) = (p.alpha, p.beta, p.gamma0, p.a, p.m);
    let (p1, q0) = match form {
        CoeffForm::Determinant => (
            al * be * (g0 * tc.a1 * tc.gamma1 - m * a * tc.rho01),
            al * a * be * tc.b4 * tc.rho01,
        ),
        CoeffForm::Printed => (
            al * be * (g0 * tc.a1 * tc.gamma1 + m * a * tc.rho01),
            al * be * tc.b4 * tc.rho01,
        ),
    };
    CharCoeffs {
        p2: -(al * tc.a1 + be * g0 * tc.gamma1),
        p1,
        p0: al * a * be * tc.a4 * tc.rho01,
        q2: -al * tc.b1,
        q1: al * be * g0 * tc.b1 * tc.gamma1,
        q0,
    }
}

impl CharCoeffs {
    pub fn p(&self, l: Complex64) -> Complex64 {
        ((l + self.p2) * l + self.p1) * l + self.p0
    }

    pub fn q(&self, l: Complex64) -> Complex64 {
        (self.q2 * l + self.q1) * l + self.q0
    }

    pub fn dp(&self, l: Complex64) -> Complex64 {
        (3.0 * l + 2.0 * self.p2) * l + self.p1
    }

    pub fn dq(&self, l: Complex64) -> Complex64 {
        2.0 * self.q2 * l + self.q1
    }

    /// `Delta(lambda, tau) = P(lambda) + exp(-lambda tau) Q(lambda)`.
    pub fn delta(&self, lambda: Complex64, tau: f64) -> Complex64 {
        self.p(lambda) + (-lambda * tau).exp() * self.q(lambda)
    }

    /// Partial derivative of `Delta` with respect to `lambda`.
    pub fn delta_dlambda(&self, lambda: Complex64, tau: f64) -> Complex64 {
        let e = (-lambda * tau).exp();
        self.dp(lambda) + e * (self.dq(lambda) - tau * self.q(lambda))
    }

    /// Magnitude scale of the terms making up `Delta`, for relative
    /// residual tests.
    pub fn delta_scale(&self, lambda: Complex64, tau: f64) -> f64 {
        1.0 + self.p(lambda).norm() + ((-lambda * tau).exp() * self.q(lambda)).norm()
    }

    /// True when the delayed part vanishes identically.
    pub fn delay_free(&self) -> bool {
        self.q2 == 0.0 && self.q1 == 0.0 && self.q0 == 0.0
    }
}

/// `Delta(lambda, tau)` for the given coefficients.
pub fn delta_eval(c: &CharCoeffs, lambda: Complex64, tau: f64) -> Complex64 {
    c.delta(lambda, tau)
}
