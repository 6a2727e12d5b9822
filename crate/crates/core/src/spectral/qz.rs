//! Complex single-shift QZ iteration for the generalized problem `A x = lambda B x`.

use num_complex::Complex64;

use super::dense::{cabs1, eig2x2, Dense, Givens};
use crate::error::{PadeError, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Generalized eigenvalue as the pair `(alpha, beta)`; `lambda = alpha / beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GeneralizedEigenvalue {
    pub alpha: Complex64,
    pub beta: Complex64,
}

/// Reduces `B` to upper triangular form by Householder reflections, applying
/// the same transformations to `A` from the left.
fn triangularize(a: &mut Dense, b: &mut Dense) {
    let n = a.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    for j in 0..n.saturating_sub(1) {
        let norm: f64 = (j..n).map(|i| b.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = b.get(j, j);
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in j..n {
            v[i] = b.get(i, j);
        }
        v[j] -= alpha;
        let vnorm2: f64 = (j..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let apply = |m: &mut Dense, cols: std::ops::Range<usize>| {
            for col in cols {
                let mut w = zero;
                for i in j..n {
                    w += v[i].conj() * m.get(i, col);
                }
                let factor = w * (2.0 / vnorm2);
                for i in j..n {
                    m.set(i, col, m.get(i, col) - v[i] * factor);
                }
            }
        };
        apply(b, j..n);
        apply(a, 0..n);
        for i in (j + 1)..n {
            b.set(i, j, zero);
        }
        b.set(j, j, alpha);
    }
}

/// Hessenberg-triangular reduction: `A` upper Hessenberg, `B` stays upper triangular.
fn hessenberg_triangular(a: &mut Dense, b: &mut Dense) {
    let n = a.dim();
    let zero = Complex64::new(0.0, 0.0);
    if n < 3 {
        return;
    }
    for j in 0..n - 2 {
        for i in ((j + 2)..n).rev() {
            let g = Givens::zeroing(a.get(i - 1, j), a.get(i, j));
            a.rotate_rows(g, i - 1, j..=n - 1);
            a.set(i, j, zero);
            b.rotate_rows(g, i - 1, (i - 1)..=n - 1);
            let z = Givens::zeroing(b.get(i, i), b.get(i, i - 1));
            b.rotate_cols(z, i - 1, 0..=i);
            b.set(i, i - 1, zero);
            a.rotate_cols(z, i - 1, 0..=n - 1);
        }
    }
}

/// Generalized eigenvalues of the pencil `(A, B)`.
///
/// Fails with a near-singular-pencil error when, after triangularization,
/// some diagonal entry of `B` is below `singular_tol * ||B||_F`, and with a
/// convergence error when the iteration stalls.
pub(crate) fn generalized_eigenvalues(
    mut a: Dense,
    mut b: Dense,
    singular_tol: f64,
) -> Result<Vec<GeneralizedEigenvalue>> {
    let n = a.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![
        GeneralizedEigenvalue {
            alpha: zero,
            beta: zero,
        };
        n
    ];
    if n == 0 {
        return Ok(out);
    }
    let b_norm = b.frobenius();
    triangularize(&mut a, &mut b);
    if let Some(k) = (0..n).find(|&k| b.get(k, k).norm() <= singular_tol * b_norm) {
        return Err(PadeError::NearSingularPencil(format!(
            "|R[{k},{k}]| = {:.3e} relative to ||U1||_F = {:.3e}",
            b.get(k, k).norm(),
            b_norm
        )));
    }
    hessenberg_triangular(&mut a, &mut b);

    let eps = f64::EPSILON;
    let b_tol = eps * b_norm;
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut total = 0usize;
    let cap = ITERATIONS_PER_EIGENVALUE * n;

    loop {
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = cabs1(a.get(k, k - 1));
            let tst = cabs1(a.get(k - 1, k - 1)) + cabs1(a.get(k, k));
            if sub <= f64::MIN_POSITIVE || sub <= eps * tst {
                a.set(k, k - 1, zero);
                lo = k;
                break;
            }
        }
        if lo == hi {
            out[hi] = GeneralizedEigenvalue {
                alpha: a.get(hi, hi),
                beta: b.get(hi, hi),
            };
            stalled = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        // A vanishing diagonal entry of B inside the active block means an
        // infinite eigenvalue; the iteration cannot make progress on it.
        if (lo..=hi).any(|k| b.get(k, k).norm() <= b_tol) {
            for k in lo..=hi {
                out[k] = GeneralizedEigenvalue {
                    alpha: a.get(k, k),
                    beta: b.get(k, k),
                };
            }
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
            let corner = a.get(hi, hi) / b.get(hi, hi);
            corner + Complex64::new(0.75 * (a.get(hi, hi - 1) / b.get(hi - 1, hi - 1)).norm(), 0.0)
        } else {
            // eigenvalues of B22^{-1} A22 for the trailing 2 x 2 block
            let (b11, b12, b22) = (
                b.get(hi - 1, hi - 1),
                b.get(hi - 1, hi),
                b.get(hi, hi),
            );
            let (a11, a12, a21, a22) = (
                a.get(hi - 1, hi - 1),
                a.get(hi - 1, hi),
                a.get(hi, hi - 1),
                a.get(hi, hi),
            );
            let m21 = a21 / b22;
            let m22 = a22 / b22;
            let m11 = (a11 - b12 * m21) / b11;
            let m12 = (a12 - b12 * m22) / b11;
            let (x, y) = eig2x2(m11, m12, m21, m22);
            let corner = a22 / b22;
            if (x - corner).norm() <= (y - corner).norm() {
                x
            } else {
                y
            }
        };

        let g = Givens::zeroing(
            a.get(lo, lo) - shift * b.get(lo, lo),
            a.get(lo + 1, lo),
        );
        a.rotate_rows(g, lo, lo..=hi);
        b.rotate_rows(g, lo, lo..=hi);
        for k in lo..hi {
            let z = Givens::zeroing(b.get(k + 1, k + 1), b.get(k + 1, k));
            b.rotate_cols(z, k, lo..=k + 1);
            b.set(k + 1, k, zero);
            a.rotate_cols(z, k, lo..=(k + 2).min(hi));
            if k + 2 <= hi {
                let g = Givens::zeroing(a.get(k + 1, k), a.get(k + 2, k));
                a.rotate_rows(g, k + 1, k..=hi);
                a.set(k + 2, k, zero);
                b.rotate_rows(g, k + 1, (k + 1)..=hi);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonalizable_pencil() {
        // A = B M with M upper triangular, so the pencil spectrum is diag(M).
        let m = Dense::from_fn(3, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (1, 1) => c(2.0, 0.0),
            (2, 2) => c(3.0, 0.0),
            (0, 1) => c(0.5, -1.0),
            (1, 2) => c(4.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let b = Dense::from_fn(3, |i, j| {
            let diag = if i == j { 4.0 } else { 0.0 };
            c((i * 3 + j) as f64 * 0.3 + 1.0 + diag, (i as f64 - j as f64) * 0.7)
        });
        let a = Dense::from_fn(3, |i, j| (0..3).map(|k| b.get(i, k) * m.get(k, j)).sum());
        let mut lambdas: Vec<Complex64> = generalized_eigenvalues(a, b, 1e-14)
            .unwrap()
            .into_iter()
            .map(|e| e.alpha / e.beta)
            .collect();
        lambdas.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (z, e) in lambdas.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(e, 0.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn rank_one_pencil_is_rejected() {
        let u = [c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)];
        let a = Dense::from_fn(3, |i, j| u[i] * u[j] * 0.5);
        let b = Dense::from_fn(3, |i, j| u[i] * u[j]);
        assert!(matches!(
            generalized_eigenvalues(a, b, 1e-12),
            Err(PadeError::NearSingularPencil(_))
        ));
    }

    #[test]
    fn identity_b_matches_standard_problem() {
        let n = 6;
        let a = Dense::from_fn(n, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let b = Dense::from_fn(n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let eig = generalized_eigenvalues(a.clone(), b, 1e-14).unwrap();
        // trace is preserved
        let trace: Complex64 = (0..n).map(|i| a.get(i, i)).sum();
        let sum: Complex64 = eig.iter().map(|e| e.alpha / e.beta).sum();
        assert!((trace - sum).norm() < 1e-11, "{trace} vs {sum}");
    }
}
