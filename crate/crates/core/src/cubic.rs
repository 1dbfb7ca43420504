//! Real roots of monic cubics by Cardano's formulas, polished with Newton.

use num_complex::Complex64;

/// Roots with `|Im u| > IMAG_CUTOFF * |u|` are treated as complex.
pub const IMAG_CUTOFF: f64 = 1e-10;

const POLISH_STEPS: usize = 2;

/// The cubic `u^3 + c2 u^2 + c1 u + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl MonicCubic {
    pub fn eval(&self, u: f64) -> f64 {
        ((u + self.c2) * u + self.c1) * u + self.c0
    }

    pub fn derivative(&self, u: f64) -> f64 {
        (3.0 * u + 2.0 * self.c2) * u + self.c1
    }

    /// Shift `k = -c2/3` that removes the quadratic term.
    pub fn shift(&self) -> f64 {
        -self.c2 / 3.0
    }

    /// Coefficients `(p, q)` of the depressed cubic `t^3 + p t + q` with
    /// `u = t + k`; `p = f'(k)` and `q = f(k)`.
    pub fn depressed(&self) -> (f64, f64) {
        let k = self.shift();
        (self.derivative(k), self.eval(k))
    }

    /// `(q/2)^2 + (p/3)^3`: negative for three distinct real roots,
    /// positive for one, zero for a repeated root.
    pub fn discriminant(&self) -> f64 {
        let (p, q) = self.depressed();
        0.25 * q * q + p * p * p / 27.0
    }

    /// Real roots in ascending order, duplicates merged.
    ///
    /// Cardano supplies the real root of largest magnitude, which it gets
    /// accurately; the other two come from the deflated quadratic so that
    /// roots many orders of magnitude smaller are not lost to cancellation.
    pub fn real_roots(&self) -> Vec<f64> {
        let k = self.shift();
        let (p, q) = self.depressed();
        let anchor = depressed_roots(p, q)
            .into_iter()
            .map(|t| t + k)
            .filter(|u| u.im.abs() <= IMAG_CUTOFF * u.norm())
            .map(|u| self.polish(u.re))
            .max_by(|a, b| a.abs().total_cmp(&b.abs()));
        let Some(r1) = anchor else {
            return Vec::new();
        };
        // u^3 + c2 u^2 + c1 u + c0 = (u - r1)(u^2 + b u + c)
        let b = self.c2 + r1;
        let c = if r1 != 0.0 { -self.c0 / r1 } else { self.c1 + b * r1 };
        let mut roots = vec![r1];
        roots.extend(quadratic_roots(b, c).into_iter().map(|u| self.polish(u)));
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
        roots
    }

    fn polish(&self, mut u: f64) -> f64 {
        for _ in 0..POLISH_STEPS {
            let d = self.derivative(u);
            if d == 0.0 {
                break;
            }
            let next = u - self.eval(u) / d;
            if !next.is_finite() {
                break;
            }
            u = next;
        }
        u
    }
}

/// Real roots of `u^2 + b u + c`, with the same imaginary-part cutoff as
/// the cubic.
fn quadratic_roots(b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        let (re, im) = (-0.5 * b, 0.5 * (-disc).sqrt());
        return if im <= IMAG_CUTOFF * re.hypot(im) { vec![re] } else { Vec::new() };
    }
    let h = -0.5 * (b + b.signum() * disc.sqrt());
    if h == 0.0 {
        return vec![0.0];
    }
    vec![h, c / h]
}

/// All three roots of `t^3 + p t + q` in complex arithmetic.
fn depressed_roots(p: f64, q: f64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    if p == 0.0 && q == 0.0 {
        return [zero; 3];
    }
    let disc = Complex64::new(0.25 * q * q + p * p * p / 27.0, 0.0);
    let sq = disc.sqrt();
    // Pick the sign that avoids cancellation in -q/2 +/- sqrt(disc).
    let half_q = Complex64::new(-0.5 * q, 0.0);
    let s = if (half_q + sq).norm() >= (half_q - sq).norm() { half_q + sq } else { half_q - sq };
    let c = s.cbrt();
    let unity = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut out = [zero; 3];
    let mut ck = c;
    for root in out.iter_mut() {
        *root = if ck.norm() == 0.0 { zero } else { ck - p / (3.0 * ck) };
        ck *= unity;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(r: [f64; 3]) -> MonicCubic {
        MonicCubic {
            c2: -(r[0] + r[1] + r[2]),
            c1: r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            c0: -r[0] * r[1] * r[2],
        }
    }

    #[test]
    fn unit_cube_root() {
        let roots = MonicCubic { c2: 0.0, c1: 0.0, c0: -1.0 }.real_roots();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_real_roots() {
        let c = from_roots([-3.0, 0.5, 7.25]);
        assert!(c.discriminant() < 0.0);
        let roots = c.real_roots();
        assert_eq!(roots.len(), 3);
        for (got, exp) in roots.iter().zip([-3.0, 0.5, 7.25]) {
            assert!((got - exp).abs() < 1e-12, "{got} vs {exp}");
        }
    }

    #[test]
    fn one_real_root_with_complex_pair() {
        // (u - 2)(u^2 + u + 1)
        let c = MonicCubic { c2: -1.0, c1: -1.0, c0: -2.0 };
        assert!(c.discriminant() > 0.0);
        assert_eq!(c.real_roots(), vec![2.0]);
    }

    #[test]
    fn triple_root_at_zero() {
        assert_eq!(MonicCubic { c2: 0.0, c1: 0.0, c0: 0.0 }.real_roots(), vec![0.0]);
    }

    #[test]
    fn widely_scaled_roots() {
        let c = from_roots([1e-3, 4.0e2, 9.0e5]);
        let roots = c.real_roots();
        assert_eq!(roots.len(), 3);
        for (got, exp) in roots.iter().zip([1e-3, 4.0e2, 9.0e5]) {
            assert!((got - exp).abs() < 1e-9 * exp, "{got} vs {exp}");
        }
    }
}
