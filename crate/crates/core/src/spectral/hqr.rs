//! Shifted QR iteration for complex upper Hessenberg matrices (eigenvalues only).

use num_complex::Complex64;

use super::dense::{cabs1, eig2x2, Dense, Givens};
use crate::error::{PadeError, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of an upper Hessenberg matrix, overwriting `h`.
///
/// Explicit single-shift QR with Wilkinson shifts and exceptional shifts every
/// tenth stalled sweep. Only the active diagonal block is updated.
pub(crate) fn hessenberg_eigenvalues(h: &mut Dense) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE;
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut total = 0usize;
    let cap = ITERATIONS_PER_EIGENVALUE * n.max(1);
    let mut rotations: Vec<Givens> = Vec::with_capacity(n);

    loop {
        if hi == 0 {
            eig[0] = h.get(0, 0);
            break;
        }
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = cabs1(h.get(k, k - 1));
            if sub <= safe_min {
                h.set(k, k - 1, Complex64::new(0.0, 0.0));
                lo = k;
                break;
            }
            let mut tst = cabs1(h.get(k - 1, k - 1)) + cabs1(h.get(k, k));
            if tst == 0.0 {
                if k >= 2 {
                    tst += cabs1(h.get(k - 1, k - 2));
                }
                if k < hi {
                    tst += cabs1(h.get(k + 1, k));
                }
            }
            if sub <= eps * tst {
                h.set(k, k - 1, Complex64::new(0.0, 0.0));
                lo = k;
                break;
            }
        }

        if lo == hi {
            eig[hi] = h.get(hi, hi);
            stalled = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if lo + 1 == hi {
            let (a, b) = eig2x2(
                h.get(lo, lo),
                h.get(lo, hi),
                h.get(hi, lo),
                h.get(hi, hi),
            );
            eig[lo] = a;
            eig[hi] = b;
            stalled = 0;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            continue;
        }

        total += 1;
        stalled += 1;
        if total > cap {
            return Err(PadeError::Convergence { lo, hi });
        }

        let shift = if stalled.is_multiple_of(10) {
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).re.abs(), 0.0)
        } else {
            let (x, y) = eig2x2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let corner = h.get(hi, hi);
            if (x - corner).norm() <= (y - corner).norm() {
                x
            } else {
                y
            }
        };

        for k in lo..=hi {
            h.set(k, k, h.get(k, k) - shift);
        }
        rotations.clear();
        for k in lo..hi {
            let g = Givens::zeroing(h.get(k, k), h.get(k + 1, k));
            h.rotate_rows(g, k, k..=hi);
            h.set(k + 1, k, Complex64::new(0.0, 0.0));
            rotations.push(g);
        }
        for (offset, &g) in rotations.iter().enumerate() {
            let k = lo + offset;
            h.rotate_cols_adjoint(g, k, lo..=(k + 1).min(hi));
        }
        for k in lo..=hi {
            h.set(k, k, h.get(k, k) + shift);
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn companion_of_cubic() {
        // (w - 1)(w - 2)(w - 3) = w^3 - 6 w^2 + 11 w - 6
        let mut h = Dense::from_fn(3, |i, j| match (i, j) {
            (0, 0) => c(6.0),
            (0, 1) => c(-11.0),
            (0, 2) => c(6.0),
            (1, 0) | (2, 1) => c(1.0),
            _ => c(0.0),
        });
        let mut eig = hessenberg_eigenvalues(&mut h).unwrap();
        eig.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, e) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(e)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn rotation_matrix_has_unit_circle_spectrum() {
        // cyclic shift: eigenvalues are 8th roots of unity
        let n = 8;
        let mut h = Dense::from_fn(n, |i, j| {
            if i == j + 1 || (i == 0 && j == n - 1) {
                c(1.0)
            } else {
                c(0.0)
            }
        });
        let eig = hessenberg_eigenvalues(&mut h).unwrap();
        for z in eig {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(8) - c(1.0)).norm() < 1e-11);
        }
    }
}
