//! Structural parameters, equilibrium and the nonlinear vector field of the
//! delayed IS-LM system.
//!
//! State variables are income `Y`, interest rate `r`, capital `K` and money
//! supply `M`. Taxes mix current and lagged income, so only `Y(t - tau)`
//! enters the right-hand side with a delay:
//!
//! ```text
//! Y' = alpha [((s-1)(1-eps)d - s) Y + d eps (s-1) Y(t-tau) + a Y^alpha1 r^-alpha2 + g]
//! r' = beta [m Y + gamma0 / (r - r2) - M]
//! K' = a Y(t-tau)^alpha1 r^-alpha2 - delta K
//! M' = g - d(1-eps) Y - d eps Y(t-tau)
//! ```

use std::ops::Deref;

use crate::error::{Error, Result};

/// Parameter keys accepted by the key=value ingestion, in canonical order.
pub const PARAM_KEYS: [&str; 13] = [
    "a", "alpha", "beta", "alpha1", "alpha2", "gamma0", "r2", "m", "d", "s", "epsilon", "delta",
    "g",
];

/// Raw parameter values. No invariants; see [`ModelParams`] for the
/// validated form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamValues {
    /// Investment scale.
    pub a: f64,
    /// Income adjustment speed.
    pub alpha: f64,
    /// Money-market adjustment speed.
    pub beta: f64,
    /// Income elasticity of investment.
    pub alpha1: f64,
    /// Interest elasticity of investment.
    pub alpha2: f64,
    /// Liquidity scale.
    pub gamma0: f64,
    /// Interest-rate floor of the liquidity function.
    pub r2: f64,
    /// Transaction-liquidity slope.
    pub m: f64,
    /// Average tax rate.
    pub d: f64,
    /// Saving rate.
    pub s: f64,
    /// Share of taxes collected on lagged income.
    pub epsilon: f64,
    /// Capital depreciation rate.
    pub delta: f64,
    /// Government expenditure.
    pub g: f64,
}

impl ParamValues {
    /// The reference parameter set of the worked numerical example, with the
    /// given delayed tax share.
    pub fn reference(epsilon: f64) -> Self {
        Self {
            a: 0.38,
            alpha: 0.96,
            beta: 1.0,
            alpha1: 0.5,
            alpha2: 0.83,
            gamma0: 1.0,
            r2: 0.003,
            m: 0.005,
            d: 0.1,
            s: 0.3,
            epsilon,
            delta: 0.2,
            g: 50.0,
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "a" => self.a,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "alpha1" => self.alpha1,
            "alpha2" => self.alpha2,
            "gamma0" => self.gamma0,
            "r2" => self.r2,
            "m" => self.m,
            "d" => self.d,
            "s" => self.s,
            "epsilon" => self.epsilon,
            "delta" => self.delta,
            "g" => self.g,
            _ => return None,
        })
    }

    /// Sets one parameter by key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "a" => &mut self.a,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "gamma0" => &mut self.gamma0,
            "r2" => &mut self.r2,
            "m" => &mut self.m,
            "d" => &mut self.d,
            "s" => &mut self.s,
            "epsilon" => &mut self.epsilon,
            "delta" => &mut self.delta,
            "g" => &mut self.g,
            _ => return Err(Error::Parameter(format!("unknown parameter key `{key}`"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Validated parameters. Construction checks every sign and interval
/// constraint and that the equilibrium interest rate lies above `r2`, so
/// downstream code can assume an admissible model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    values: ParamValues,
    equilibrium: Equilibrium,
}

impl ModelParams {
    pub fn new(values: ParamValues) -> Result<Self> {
        let positive = [
            ("a", values.a),
            ("alpha", values.alpha),
            ("beta", values.beta),
            ("alpha1", values.alpha1),
            ("alpha2", values.alpha2),
            ("gamma0", values.gamma0),
            ("r2", values.r2),
            ("m", values.m),
            ("delta", values.delta),
            ("g", values.g),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{key} must be positive and finite, got {v}")));
            }
        }
        for (key, v) in [("d", values.d), ("s", values.s)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Parameter(format!("{key} must lie in (0, 1), got {v}")));
            }
        }
        // epsilon = 0 is admitted as the delay-free limit.
        if !(values.epsilon >= 0.0 && values.epsilon < 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in [0, 1), got {}",
                values.epsilon
            )));
        }
        let equilibrium = equilibrium_of(&values)?;
        Ok(Self { values, equilibrium })
    }

    pub fn reference(epsilon: f64) -> Self {
        Self::new(ParamValues::reference(epsilon)).expect("reference parameters are admissible")
    }

    pub fn values(&self) -> &ParamValues {
        &self.values
    }

    /// Returns a copy with one parameter replaced, re-validated.
    pub fn with(&self, key: &str, value: f64) -> Result<Self> {
        let mut values = self.values;
        values.set(key, value)?;
        Self::new(values)
    }

    pub fn equilibrium(&self) -> Equilibrium {
        self.equilibrium
    }

    /// Investment `a Y^alpha1 r^-alpha2`, evaluated through exp/log.
    pub fn investment(&self, y: f64, r: f64) -> f64 {
        self.a * (self.alpha1 * y.ln() - self.alpha2 * r.ln()).exp()
    }

    /// Liquidity demand `m Y + gamma0 / (r - r2)`.
    pub fn liquidity(&self, y: f64, r: f64) -> f64 {
        self.m * y + self.gamma0 / (r - self.r2)
    }
}

impl Deref for ModelParams {
    type Target = ParamValues;

    fn deref(&self) -> &ParamValues {
        &self.values
    }
}

/// Equilibrium levels `(Y0, r0, K0, M0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub y0: f64,
    pub r0: f64,
    pub k0: f64,
    pub m0: f64,
}

impl Equilibrium {
    pub fn as_array(&self) -> [f64; 4] {
        [self.y0, self.r0, self.k0, self.m0]
    }
}

fn equilibrium_of(p: &ParamValues) -> Result<Equilibrium> {
    let y0 = p.g / p.d;
    let base = p.s * (1.0 - p.d) / p.a * ((1.0 - p.alpha1) * y0.ln()).exp();
    let r0 = (-base.ln() / p.alpha2).exp();
    let k0 = p.s * (1.0 - p.d) * y0 / p.delta;
    if !(y0.is_finite() && r0.is_finite() && k0.is_finite()) {
        return Err(Error::Parameter(format!(
            "non-finite equilibrium (Y0 = {y0}, r0 = {r0}, K0 = {k0})"
        )));
    }
    if r0 <= p.r2 {
        return Err(Error::Parameter(format!(
            "equilibrium interest rate r0 = {r0} does not exceed the floor r2 = {}",
            p.r2
        )));
    }
    let m0 = p.m * y0 + p.gamma0 / (r0 - p.r2);
    if !m0.is_finite() {
        return Err(Error::Parameter("non-finite equilibrium money supply".into()));
    }
    Ok(Equilibrium { y0, r0, k0, m0 })
}

/// Equilibrium of the system for the given parameters.
pub fn equilibrium(params: &ModelParams) -> Equilibrium {
    params.equilibrium
}

/// Deviation from equilibrium `(x1, x2, x3, x4) = (Y - Y0, r - r0, K - K0, M - M0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl State {
    pub fn from_levels(levels: [f64; 4], eq: &Equilibrium) -> Self {
        Self {
            x1: levels[0] - eq.y0,
            x2: levels[1] - eq.r0,
            x3: levels[2] - eq.k0,
            x4: levels[3] - eq.m0,
        }
    }

    pub fn to_levels(&self, eq: &Equilibrium) -> [f64; 4] {
        [self.x1 + eq.y0, self.x2 + eq.r0, self.x3 + eq.k0, self.x4 + eq.m0]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Taylor coefficients of the two nonlinear terms at equilibrium, plus the
/// linear entries shared by the delayed and undelayed parts.
///
/// `rho_ij` is the `(i, j)` partial derivative of `Y^alpha1 r^-alpha2`
/// (without the factor `a`); `gamma_k` is the `k`-th derivative of
/// `1 / (r - r2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoeffs {
    pub rho01: f64,
    pub rho10: f64,
    pub rho20: f64,
    pub rho11: f64,
    pub rho02: f64,
    pub rho30: f64,
    pub rho21: f64,
    pub rho12: f64,
    pub rho03: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub a1: f64,
    pub b1: f64,
    pub a4: f64,
    pub b4: f64,
}

pub fn taylor_coefficients(params: &ModelParams, eq: &Equilibrium) -> TaylorCoeffs {
    let (a1e, a2e) = (params.alpha1, params.alpha2);
    let (ly, lr) = (eq.y0.ln(), eq.r0.ln());
    // Y0^(alpha1 - i) r0^-(alpha2 + j)
    let mono = |i: f64, j: f64| ((a1e - i) * ly - (a2e + j) * lr).exp();

    let rho10 = a1e * mono(1.0, 0.0);
    let rho01 = -a2e * mono(0.0, 1.0);
    let rho20 = a1e * (a1e - 1.0) * mono(2.0, 0.0);
    let rho11 = -a1e * a2e * mono(1.0, 1.0);
    let rho02 = a2e * (a2e + 1.0) * mono(0.0, 2.0);
    let rho30 = a1e * (a1e - 1.0) * (a1e - 2.0) * mono(3.0, 0.0);
    let rho21 = -a1e * a2e * (a1e - 1.0) * mono(2.0, 1.0);
    let rho12 = a1e * a2e * (a2e + 1.0) * mono(1.0, 2.0);
    let rho03 = -a2e * (a2e + 1.0) * (a2e + 2.0) * mono(0.0, 3.0);

    let gap = eq.r0 - params.r2;
    let gamma1 = -1.0 / (gap * gap);
    let gamma2 = 2.0 / (gap * gap * gap);
    let gamma3 = -6.0 / (gap * gap * gap * gap);

    let (s, d, eps) = (params.s, params.d, params.epsilon);
    TaylorCoeffs {
        rho01,
        rho10,
        rho20,
        rho11,
        rho02,
        rho30,
        rho21,
        rho12,
        rho03,
        gamma1,
        gamma2,
        gamma3,
        a1: (s - 1.0) * d * (1.0 - eps) - s + params.a * rho10,
        b1: (s - 1.0) * d * eps,
        a4: -d * (1.0 - eps),
        b4: -d * eps,
    }
}

/// Right-hand side of the delayed system at levels `(Y, r, K, M)` with
/// lagged income `delayed_y`.
pub fn vector_field(params: &ModelParams, current: [f64; 4], delayed_y: f64) -> Result<[f64; 4]> {
    let [y, r, k, m_supply] = current;
    if !(y > 0.0) || !(delayed_y > 0.0) {
        return Err(Error::Domain(format!(
            "income must be positive (Y = {y}, Y(t - tau) = {delayed_y})"
        )));
    }
    if !(r > params.r2) {
        return Err(Error::Domain(format!(
            "interest rate {r} is not above the floor {}",
            params.r2
        )));
    }
    let p = params.values();
    let own = ((p.s - 1.0) * (1.0 - p.epsilon) * p.d - p.s) * y;
    let lagged = p.d * p.epsilon * (p.s - 1.0) * delayed_y;
    Ok([
        p.alpha * (own + lagged + params.investment(y, r) + p.g),
        p.beta * (params.liquidity(y, r) - m_supply),
        params.investment(delayed_y, r) - p.delta * k,
        p.g - p.d * (1.0 - p.epsilon) * y - p.d * p.epsilon * delayed_y,
    ])
}

/// Nonlinear remainder of the translated system up to third order: the
/// quadratic and cubic Taylor terms in `x(t)` and `x1(t - tau)`.
pub fn nonlinear_terms(params: &ModelParams, tc: &TaylorCoeffs, x: &State, x1_delayed: f64) -> [f64; 4] {
    let (x1, x2, xd) = (x.x1, x.x2, x1_delayed);
    let p = params.values();
    let poly = |u: f64| {
        0.5 * tc.rho20 * u * u
            + tc.rho11 * u * x2
            + 0.5 * tc.rho02 * x2 * x2
            + (tc.rho30 * u * u * u
                + 3.0 * tc.rho21 * u * u * x2
                + 3.0 * tc.rho12 * u * x2 * x2
                + tc.rho03 * x2 * x2 * x2)
                / 6.0
    };
    [
        p.alpha * p.a * poly(x1),
        p.beta * p.gamma0 * (0.5 * tc.gamma2 * x2 * x2 + tc.gamma3 * x2 * x2 * x2 / 6.0),
        p.a * poly(xd),
        0.0,
    ]
}
