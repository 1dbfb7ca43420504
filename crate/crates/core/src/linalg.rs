//! Small dense complex linear algebra: Gaussian elimination with partial
//! pivoting for solves and determinants, full pivoting for null vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix<const N: usize> = [[Complex64; N]; N];

/// Largest accepted ratio of max to min pivot magnitude.
pub const MAX_PIVOT_RATIO: f64 = 1e12;

/// Converts a real matrix to complex.
pub fn complexify<const N: usize>(m: &[[f64; N]; N]) -> Matrix<N> {
    let mut out = [[Complex64::new(0.0, 0.0); N]; N];
    for (row_out, row) in out.iter_mut().zip(m) {
        for (o, &v) in row_out.iter_mut().zip(row) {
            *o = Complex64::new(v, 0.0);
        }
    }
    out
}

pub fn mat_vec<const N: usize>(m: &Matrix<N>, x: &[Complex64; N]) -> [Complex64; N] {
    let mut out = [Complex64::new(0.0, 0.0); N];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn norm<const N: usize>(x: &[Complex64; N]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves `m x = rhs`. Fails when the pivot magnitudes span more than
/// [`MAX_PIVOT_RATIO`], which doubles as a cheap condition estimate.
pub fn solve<const N: usize>(m: &Matrix<N>, rhs: &[Complex64; N]) -> Result<[Complex64; N]> {
    let mut a = *m;
    let mut b = *rhs;
    let mut pivots = [0.0f64; N];
    for col in 0..N {
        let (piv_row, piv_mag) = (col..N)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_mag == 0.0 || !piv_mag.is_finite() {
            return Err(Error::SingularSystem { ratio: f64::INFINITY });
        }
        a.swap(col, piv_row);
        b.swap(col, piv_row);
        pivots[col] = piv_mag;
        let inv = a[col][col].inv();
        for r in col + 1..N {
            let factor = a[r][col] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..N {
                let upper = a[col][c];
                a[r][c] -= factor * upper;
            }
            let upper_b = b[col];
            b[r] -= factor * upper_b;
        }
    }
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = max / min;
    if ratio > MAX_PIVOT_RATIO {
        return Err(Error::SingularSystem { ratio });
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for r in (0..N).rev() {
        let tail: Complex64 = (r + 1..N).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Ok(x)
}

pub fn determinant<const N: usize>(m: &Matrix<N>) -> Complex64 {
    let mut a = *m;
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..N {
        let piv_row = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[piv_row][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv_row != col {
            a.swap(col, piv_row);
            det = -det;
        }
        det *= a[col][col];
        let inv = a[col][col].inv();
        for r in col + 1..N {
            let factor = a[r][col] * inv;
            for c in col..N {
                let upper = a[col][c];
                a[r][c] -= factor * upper;
            }
        }
    }
    det
}

/// A null vector of a (numerically) rank-deficient matrix, scaled so that
/// component `fix` equals one. Uses full pivoting; the smallest final pivot
/// is treated as zero.
pub fn null_vector<const N: usize>(m: &Matrix<N>, fix: usize) -> Result<[Complex64; N]> {
    let mut a = *m;
    let mut perm: [usize; N] = std::array::from_fn(|i| i);
    for k in 0..N - 1 {
        let mut best = (k, k, -1.0);
        for r in k..N {
            for c in k..N {
                let mag = a[r][c].norm();
                if mag > best.2 {
                    best = (r, c, mag);
                }
            }
        }
        let (pr, pc, mag) = best;
        if mag == 0.0 {
            return Err(Error::Degenerate("matrix has nullity above one".into()));
        }
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        perm.swap(k, pc);
        let inv = a[k][k].inv();
        for r in k + 1..N {
            let factor = a[r][k] * inv;
            for c in k..N {
                let upper = a[k][c];
                a[r][c] -= factor * upper;
            }
        }
    }
    // Free variable is the last permuted column.
    let mut y = [Complex64::new(0.0, 0.0); N];
    y[N - 1] = Complex64::new(1.0, 0.0);
    for r in (0..N - 1).rev() {
        let tail: Complex64 = (r + 1..N).map(|c| a[r][c] * y[c]).sum();
        y[r] = -tail / a[r][r];
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for (k, &orig) in perm.iter().enumerate() {
        x[orig] = y[k];
    }
    let scale = x[fix];
    if scale.norm() == 0.0 {
        return Err(Error::Degenerate(format!("null vector has zero component {fix}")));
    }
    Ok(x.map(|c| c / scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_recovers_known_solution() {
        let m = [
            [c(2.0, 1.0), c(0.0, 0.0), c(1.0, -1.0)],
            [c(0.0, 0.0), c(0.0, 3.0), c(1.0, 0.0)],
            [c(4.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)],
        ];
        let x = [c(1.0, 2.0), c(-1.0, 0.5), c(0.25, 0.0)];
        let b = mat_vec(&m, &x);
        let got = solve(&m, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let m = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(matches!(solve(&m, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn determinant_of_triangular_and_permuted() {
        let m = [[c(0.0, 0.0), c(2.0, 0.0)], [c(3.0, 1.0), c(5.0, 0.0)]];
        let d = determinant(&m);
        assert!((d - c(-6.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        // columns: third = first + i * second
        let m = [
            [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            [c(2.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)],
            [c(0.0, 1.0), c(3.0, 0.0), c(0.0, 4.0)],
        ];
        let m = m.map(|row| [row[0], row[1], row[0] + c(0.0, 1.0) * row[1]]);
        let v = null_vector(&m, 0).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(norm(&mat_vec(&m, &v)) < 1e-13);
    }
}
