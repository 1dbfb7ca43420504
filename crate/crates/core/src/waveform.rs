//! Periodic-orbit waveform from the reduced equation on the center manifold:
//! integrate `z(t)` and map it back to `X(t + theta)`.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Equilibrium, ModelParams};
use crate::normal_form::{CenterManifold, NormalForm};

type C = Complex64;

pub const OVERFLOW_LIMIT: f64 = 1e6;
pub const DEFAULT_Z0: C = C::new(0.01, 0.0);

/// `z' = lambda1 z + g20 z^2/2 + g11 z zbar + g02 zbar^2/2 + g21 z^2 zbar/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedEquation {
    pub lambda1: C,
    pub g20: C,
    pub g11: C,
    pub g02: C,
    pub g21: C,
}

impl From<&NormalForm> for ReducedEquation {
    fn from(nf: &NormalForm) -> Self {
        ReducedEquation {
            lambda1: nf.eigen.lambda1,
            g20: nf.g20(),
            g11: nf.g11(),
            g02: nf.g02(),
            g21: nf.g21,
        }
    }
}

impl ReducedEquation {
    pub fn rhs(&self, z: C) -> C {
        let zb = z.conj();
        self.lambda1 * z
            + 0.5 * self.g20 * z * z
            + self.g11 * z * zb
            + 0.5 * self.g02 * zb * zb
            + 0.5 * self.g21 * z * z * zb
    }
}

/// RK4 samples `(t, z)` on `t = 0, dt, ..., t_end`.
pub fn integrate_reduced(eq: &ReducedEquation, z0: C, t_end: f64, dt: f64) -> Result<Vec<(f64, C)>> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Step(format!("need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut z = z0;
    out.push((0.0, z));
    for i in 1..=steps {
        let k1 = eq.rhs(z);
        let k2 = eq.rhs(z + 0.5 * dt * k1);
        let k3 = eq.rhs(z + 0.5 * dt * k2);
        let k4 = eq.rhs(z + dt * k3);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = i as f64 * dt;
        if !(z.norm() <= OVERFLOW_LIMIT) {
            return Err(Error::Overflow { t });
        }
        out.push((t, z));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub t: f64,
    /// Levels `(Y, r, K, M)`.
    pub x: [f64; 4],
    /// Largest imaginary part dropped when taking the real waveform.
    pub imag_residue: f64,
}

/// `X(t + theta) = z Phi(theta) + conj(z Phi(theta)) + w20(theta) z^2/2
/// + w11(theta) z zbar + w02(theta) zbar^2/2 + X0`.
pub fn reconstruct(zs: &[(f64, C)], theta: f64, cm: &CenterManifold, eq: &Equilibrium) -> Vec<WaveSample> {
    let phase = (cm.lambda1 * theta).exp();
    let phi: [C; 4] = cm.v.map(|c| c * phase);
    let (w20, w11, w02) = (cm.w20(theta), cm.w11(theta), cm.w02(theta));
    let x0 = eq.as_array();
    zs.iter()
        .map(|&(t, z)| {
            let zb = z.conj();
            let mut x = [0.0; 4];
            let mut imag_residue: f64 = 0.0;
            for i in 0..4 {
                let val = z * phi[i]
                    + zb * phi[i].conj()
                    + 0.5 * w20[i] * z * z
                    + w11[i] * z * zb
                    + 0.5 * w02[i] * zb * zb;
                x[i] = x0[i] + val.re;
                imag_residue = imag_residue.max(val.im.abs());
            }
            WaveSample { t: t + theta, x, imag_residue }
        })
        .collect()
}

/// CSV with header `t,Y,r,K,M,I,L`, where `I` and `L` are investment and
/// liquidity along the waveform.
pub fn write_csv<W: Write>(samples: &[WaveSample], params: &ModelParams, mut out: W) -> io::Result<()> {
    writeln!(out, "t,Y,r,K,M,I,L")?;
    for s in samples {
        let [y, r, k, m] = s.x;
        writeln!(
            out,
            "{:.16e},{y:.16e},{r:.16e},{k:.16e},{m:.16e},{:.16e},{:.16e}",
            s.t,
            params.investment(y, r),
            params.liquidity(y, r)
        )?;
    }
    Ok(())
}
