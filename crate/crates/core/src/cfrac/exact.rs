//! Exact Gaussian-rational `f_l^k` table.
//!
//! ```text
//! f_{-2}^k = f_{-1}^k = delta_{0,k},   f_0^k = s_k
//! f_{l+1}^k = (-1)^l / f_{l-2}^0 * (f_l^0 f_{l-1}^{k+1} - f_{l-1}^0 f_l^{k+1})
//! ```
//!
//! Entries grow combinatorially, so this is a reference for small orders only.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{PadeError, Result};

pub type GaussianRational = Complex<BigRational>;

/// Largest `r` index the exact table is meant for (order 32).
pub const MAX_EXACT_INDEX: usize = 64;

pub fn gaussian_from_ints(re: i64, im: i64) -> GaussianRational {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

/// Exact conversion of a finite complex double.
pub fn gaussian_from_f64(z: Complex64) -> Option<GaussianRational> {
    Some(Complex::new(
        BigRational::from_float(z.re)?,
        BigRational::from_float(z.im)?,
    ))
}

pub fn gaussian_to_f64(z: &GaussianRational) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Rows `f_{-2} ... f_L`, row `l` holding `f_l^0 ... f_l^{K-l}`.
#[derive(Debug, Clone)]
pub struct ExactFTable {
    rows: Vec<Vec<GaussianRational>>,
}

impl ExactFTable {
    /// Builds rows up to `f_max_level` from `samples = s_0..s_K`.
    pub fn compute(samples: &[GaussianRational], max_level: usize) -> Result<Self> {
        let k_max = samples.len().checked_sub(1).ok_or_else(|| {
            PadeError::InvalidLength("exact table needs at least one sample".into())
        })?;
        if max_level > k_max {
            return Err(PadeError::InvalidLength(format!(
                "f_{max_level} needs {} samples, got {}",
                max_level + 1,
                samples.len()
            )));
        }
        if max_level > MAX_EXACT_INDEX {
            return Err(PadeError::InvalidParameter(format!(
                "exact table is capped at level {MAX_EXACT_INDEX}"
            )));
        }
        let delta: Vec<GaussianRational> = (0..=k_max)
            .map(|k| {
                if k == 0 {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                }
            })
            .collect();
        let mut rows = vec![delta.clone(), delta, samples.to_vec()];
        for l in 0..max_level {
            // rows[l + 2] is f_l
            let fl = &rows[l + 2];
            let flm1 = &rows[l + 1];
            let flm2_0 = &rows[l][0];
            if flm2_0.is_zero() {
                return Err(PadeError::ExactBreakdown {
                    level: l as isize + 1,
                });
            }
            let width = fl.len().min(flm1.len()) - 1;
            let mut next = Vec::with_capacity(width);
            for k in 0..width {
                let mut v = &fl[0] * &flm1[k + 1] - &flm1[0] * &fl[k + 1];
                v /= flm2_0;
                if l % 2 == 1 {
                    v = -v;
                }
                next.push(v);
            }
            rows.push(next);
        }
        Ok(Self { rows })
    }

    /// Highest level held.
    pub fn max_level(&self) -> isize {
        self.rows.len() as isize - 3
    }

    /// `f_l^k` if held.
    pub fn f(&self, l: isize, k: usize) -> Option<&GaussianRational> {
        let idx = usize::try_from(l + 2).ok()?;
        self.rows.get(idx)?.get(k)
    }

    fn f0(&self, l: isize) -> &GaussianRational {
        self.f(l, 0).expect("level within table")
    }

    /// `r_l = (-1)^{l-1} f_l^0 f_{l-3}^0 / (f_{l-2}^0 f_{l-1}^0)` for `1 <= l <= max_level`.
    pub fn r(&self, l: usize) -> Result<GaussianRational> {
        let li = l as isize;
        if l == 0 {
            return Ok(GaussianRational::zero());
        }
        if li > self.max_level() {
            return Err(PadeError::OrderTooLarge {
                needed: l,
                available: self.max_level().max(0) as usize,
            });
        }
        let den = self.f0(li - 2) * self.f0(li - 1);
        if den.is_zero() {
            return Err(PadeError::ExactBreakdown { level: li });
        }
        let v = self.f0(li) * self.f0(li - 3) / den;
        Ok(if l % 2 == 1 { v } else { -v })
    }

    /// `a_l = (-1)^l f_l^0 / f_{l-2}^0` for `0 <= l <= max_level`.
    pub fn a(&self, l: usize) -> Result<GaussianRational> {
        let li = l as isize;
        self.check_level(li)?;
        let den = self.f0(li - 2);
        if den.is_zero() {
            return Err(PadeError::ExactBreakdown { level: li });
        }
        let v = self.f0(li) / den;
        Ok(if l.is_multiple_of(2) { v } else { -v })
    }

    /// `b_{l+1} = (-1)^l f_{l-1}^0 / f_{l-2}^0`; takes the subscript `l + 1 >= 1`.
    pub fn b(&self, index: usize) -> Result<GaussianRational> {
        let l = index
            .checked_sub(1)
            .ok_or_else(|| PadeError::InvalidParameter("b is indexed from 1".into()))?
            as isize;
        self.check_level(l)?;
        let den = self.f0(l - 2);
        if den.is_zero() {
            return Err(PadeError::ExactBreakdown { level: l });
        }
        let v = self.f0(l - 1) / den;
        Ok(if l % 2 == 0 { v } else { -v })
    }

    fn check_level(&self, l: isize) -> Result<()> {
        if l > self.max_level() {
            Err(PadeError::OrderTooLarge {
                needed: l.max(0) as usize,
                available: self.max_level().max(0) as usize,
            })
        } else {
            Ok(())
        }
    }
}

/// Exact table from `s_0..s_K`, built up to level `max_level`.
pub fn exact_f_table(samples: &[GaussianRational], max_level: usize) -> Result<ExactFTable> {
    ExactFTable::compute(samples, max_level)
}

/// Exact `r_1 ..= r_m`.
pub fn exact_r(samples: &[GaussianRational], m: usize) -> Result<Vec<GaussianRational>> {
    let table = ExactFTable::compute(samples, m)?;
    (1..=m).map(|l| table.r(l)).collect()
}
