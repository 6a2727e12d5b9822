//! Poles as generalized eigenvalues of the Hankel pencil `U0 - z U1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::Dense;
use super::{canonical_sort, qz};
use crate::error::{PadeError, Result};
use crate::signal::Signal;

/// Relative rank threshold for `U1`, per unit of dimension.
const SINGULAR_TOL_PER_DIM: f64 = 100.0 * f64::EPSILON;

/// `U0[i, j] = s_{i+j+1}`, `U1[i, j] = s_{i+j}`, both `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelPencil {
    pub u0: DMatrix<Complex64>,
    pub u1: DMatrix<Complex64>,
}

impl HankelPencil {
    pub fn new(signal: &Signal, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(PadeError::InvalidParameter("order must be at least 1".into()));
        }
        let s = signal.samples();
        if s.len() < 2 * n {
            return Err(PadeError::InvalidLength(format!(
                "pencil of order {n} needs {} samples, got {}",
                2 * n,
                s.len()
            )));
        }
        Ok(Self {
            u0: DMatrix::from_fn(n, n, |i, j| s[i + j + 1]),
            u1: DMatrix::from_fn(n, n, |i, j| s[i + j]),
        })
    }

    pub fn dim(&self) -> usize {
        self.u0.nrows()
    }

    /// Generalized eigenvalues in canonical order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let a = Dense::from_fn(n, |i, j| self.u0[(i, j)]);
        let b = Dense::from_fn(n, |i, j| self.u1[(i, j)]);
        let tol = SINGULAR_TOL_PER_DIM * n as f64;
        let b_norm = b.frobenius();
        let pairs = qz::generalized_eigenvalues(a, b, tol)?;
        let mut out = Vec::with_capacity(n);
        for (k, e) in pairs.into_iter().enumerate() {
            if e.beta.norm() <= tol * b_norm {
                return Err(PadeError::NearSingularPencil(format!(
                    "infinite generalized eigenvalue at position {k}"
                )));
            }
            let z = e.alpha / e.beta;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(PadeError::NearSingularPencil(format!(
                    "non-finite generalized eigenvalue at position {k}"
                )));
            }
            out.push(z);
        }
        canonical_sort(&mut out);
        Ok(out)
    }
}

/// The `n` poles of the `[n-1/n]` approximant from `s_0 .. s_{2n-1}`.
pub fn poles_via_pencil(signal: &Signal, n: usize) -> Result<Vec<Complex64>> {
    HankelPencil::new(signal, n)?.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0]).unwrap();
        let p = HankelPencil::new(&s, 2).unwrap();
        assert_eq!(p.u0[(1, 1)], Complex64::new(23.0, 0.0));
        assert_eq!(p.u1[(0, 1)], Complex64::new(5.0, 0.0));
        let z = poles_via_pencil(&s, 2).unwrap();
        assert!((z[0] + 1.0).norm() < 1e-13);
        assert!((z[1] - 2.0).norm() < 1e-13);
    }

    #[test]
    fn impulse_pair_gives_roots_of_unity() {
        let n = 5;
        let mut v = vec![0.0; 2 * n];
        v[0] = 1.0;
        v[n] = 1.0;
        let z = poles_via_pencil(&Signal::from_real(&v).unwrap(), n).unwrap();
        for w in z {
            assert!((w.powu(n as u32) - 1.0).norm() < 1e-12, "{w}");
        }
    }

    #[test]
    fn single_exponential_is_near_singular() {
        let v: Vec<f64> = (0..8).map(|k| 0.9f64.powi(k)).collect();
        let s = Signal::from_real(&v).unwrap();
        assert!(matches!(
            poles_via_pencil(&s, 4),
            Err(PadeError::NearSingularPencil(_))
        ));
    }

    #[test]
    fn short_signal_rejected() {
        let s = Signal::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            HankelPencil::new(&s, 2),
            Err(PadeError::InvalidLength(_))
        ));
    }
}
