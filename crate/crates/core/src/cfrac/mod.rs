//! Continued-fraction coefficients of a data sequence.
//!
//! The floating path runs the `h_l^k` recurrence
//!
//! ```text
//! h_{-1}^k = -s_k / s_0
//! h_0^k    = s_k / s_0 - s_{k+1} / s_1
//! h_l^k    = h_{l-2}^{k+1} / h_{l-2}^1 - h_{l-1}^{k+1} / h_{l-1}^1     (l >= 1)
//! ```
//!
//! and keeps only `r_l = h_{l-2}^1`. From the `r_l` come the entries of the
//! tridiagonal matrices whose spectra are the poles and zeros of the
//! sub-diagonal and diagonal approximants. [`exact`] holds an exact rational
//! reference used to check this path.

pub mod exact;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};
use crate::signal::Signal;

/// Which approximant is being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `[n-1/n]`
    SubDiagonal,
    /// `[n/n]`
    Diagonal,
}

impl Variant {
    /// Highest `r_l` index needed at order `n`.
    pub fn r_needed(self, n: usize) -> usize {
        match self {
            Variant::SubDiagonal => 2 * n - 1,
            Variant::Diagonal => 2 * n,
        }
    }

    /// Minimum number of samples needed at order `n`.
    pub fn min_len(self, n: usize) -> usize {
        self.r_needed(n) + 1
    }

    /// Largest order the data supports.
    pub fn auto_order(self, len: usize) -> usize {
        match self {
            Variant::SubDiagonal => len / 2,
            Variant::Diagonal => len.saturating_sub(1) / 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SubDiagonal => "sub_diagonal",
            Variant::Diagonal => "diagonal",
        }
    }
}

/// Relative threshold below which `|h_l^1|` counts as a structural zero.
pub fn breakdown_tolerance() -> f64 {
    f64::EPSILON.powf(0.75)
}

/// The coefficients `r_1, r_2, ...` (with `r_0 = 0` implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct CfracTable {
    r: Vec<Complex64>,
    breakdown_level: Option<isize>,
}

impl CfracTable {
    /// Runs the recurrence until `r_max` is produced or a denominator
    /// `h_L^1` vanishes. In the second case `r` stops at `r_{L+2}` and the
    /// breakdown level `L` is recorded.
    pub fn compute(samples: &[Complex64], r_max: usize) -> Result<Self> {
        if r_max == 0 {
            return Ok(Self {
                r: Vec::new(),
                breakdown_level: None,
            });
        }
        if samples.len() < r_max + 1 {
            return Err(PadeError::InvalidLength(format!(
                "r_{} needs {} samples, got {}",
                r_max,
                r_max + 1,
                samples.len()
            )));
        }
        let scale = samples[..=r_max]
            .iter()
            .map(|s| s.norm())
            .fold(0.0, f64::max);
        for index in 0..2.min(r_max) {
            if samples[index].norm() <= f64::EPSILON * scale || samples[index].norm() == 0.0 {
                return Err(PadeError::LeadingSampleZero { index });
            }
        }
        let tol = breakdown_tolerance();
        let mut r = Vec::with_capacity(r_max);
        let mut hmax: f64 = 1.0;

        // Rows are indexed by k - 1: row[0] = h_l^1.
        let mut older = first_row(samples, r_max);
        for h in &older {
            hmax = hmax.max(h.norm());
        }
        r.push(older[0]);
        if r_max == 1 {
            return Ok(Self {
                r,
                breakdown_level: None,
            });
        }

        if older[0].norm() < tol * hmax {
            return Ok(Self {
                r,
                breakdown_level: Some(-1),
            });
        }
        let mut newer = second_row(samples, r_max - 1);
        for h in &newer {
            hmax = hmax.max(h.norm());
        }
        r.push(newer[0]);

        let mut level: isize = 1;
        while r.len() < r_max {
            // Denominator h_{l-1}^1; h_{l-2}^1 was vetted one level earlier.
            if newer[0].norm() < tol * hmax {
                return Ok(Self {
                    r,
                    breakdown_level: Some(level - 1),
                });
            }
            let width = newer.len() - 1;
            let next: Vec<Complex64> = (0..width)
                .map(|i| older[i + 1] / older[0] - newer[i + 1] / newer[0])
                .collect();
            for h in &next {
                hmax = hmax.max(h.norm());
            }
            r.push(next[0]);
            older = std::mem::replace(&mut newer, next);
            level += 1;
        }
        Ok(Self {
            r,
            breakdown_level: None,
        })
    }

    /// `r_l` for `l >= 1`; `r_0 = 0`.
    pub fn r(&self, l: usize) -> Option<Complex64> {
        if l == 0 {
            Some(Complex64::new(0.0, 0.0))
        } else {
            self.r.get(l - 1).copied()
        }
    }

    /// `r_1, r_2, ...` as stored.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.r
    }

    /// Highest stored index.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn breakdown_level(&self) -> Option<isize> {
        self.breakdown_level
    }
}

/// `h_{-1}^k` for `k = 1..=width`.
fn first_row(samples: &[Complex64], width: usize) -> Vec<Complex64> {
    (1..=width).map(|k| -samples[k] / samples[0]).collect()
}

/// `h_0^k` for `k = 1..=width`, in the direct form `s_k/s_0 - s_{k+1}/s_1`.
fn second_row(samples: &[Complex64], width: usize) -> Vec<Complex64> {
    (1..=width)
        .map(|k| samples[k] / samples[0] - samples[k + 1] / samples[1])
        .collect()
}

/// Continued-fraction table for the approximant of order `n`.
pub fn h_table(signal: &Signal, n: usize, variant: Variant) -> Result<CfracTable> {
    if n == 0 {
        return Err(PadeError::InvalidParameter("order must be >= 1".into()));
    }
    let needed = variant.r_needed(n);
    if signal.len() < needed + 1 {
        return Err(PadeError::InvalidLength(format!(
            "{} analysis at order {} needs {} samples, got {}",
            variant.as_str(),
            n,
            needed + 1,
            signal.len()
        )));
    }
    let table = CfracTable::compute(signal.samples(), needed)?;
    if table.len() < needed {
        return Err(PadeError::OrderBreakdown {
            level: table.breakdown_level.unwrap_or(-1),
        });
    }
    Ok(table)
}

/// Diagonal and sub-diagonal entries of a tridiagonal matrix with unit
/// superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    /// `c_0, ..., c_{n-1}`
    pub c: Vec<Complex64>,
    /// `d_1, ..., d_{n-1}`
    pub d: Vec<Complex64>,
    pub variant: Variant,
    /// First diagonal entry of the numerator matrix in the diagonal case
    /// (`-r_2`); `None` for the sub-diagonal variant.
    pub alt_first: Option<Complex64>,
}

impl JacobiCoefficients {
    pub fn order(&self) -> usize {
        self.c.len()
    }
}

/// Maps `r_l` onto the tridiagonal entries for order `n`.
///
/// Sub-diagonal: `c_0 = -r_1`, `c_l = -(r_{2l} + r_{2l+1})`, `d_l = r_{2l-1} r_{2l}`.
/// Diagonal: `c_0 = -r_1 - r_2`, `c_l = -(r_{2l+2} + r_{2l+1})`, `d_l = r_{2l+1} r_{2l}`,
/// with `-r_2` as the alternate first entry.
pub fn jacobi_coefficients(
    table: &CfracTable,
    n: usize,
    variant: Variant,
) -> Result<JacobiCoefficients> {
    if n == 0 {
        return Err(PadeError::InvalidParameter("order must be >= 1".into()));
    }
    let needed = variant.r_needed(n);
    if table.len() < needed {
        return Err(PadeError::OrderTooLarge {
            needed,
            available: table.len(),
        });
    }
    let r = |l: usize| table.r(l).expect("bounds checked above");
    let (c, d, alt_first) = match variant {
        Variant::SubDiagonal => {
            let mut c = vec![-r(1)];
            c.extend((1..n).map(|l| -(r(2 * l) + r(2 * l + 1))));
            let d = (1..n).map(|l| r(2 * l - 1) * r(2 * l)).collect();
            (c, d, None)
        }
        Variant::Diagonal => {
            let mut c = vec![-r(1) - r(2)];
            c.extend((1..n).map(|l| -(r(2 * l + 2) + r(2 * l + 1))));
            let d = (1..n).map(|l| r(2 * l + 1) * r(2 * l)).collect();
            (c, d, Some(-r(2)))
        }
    };
    Ok(JacobiCoefficients {
        c,
        d,
        variant,
        alt_first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Complex64, b: f64) -> bool {
        (a - c(b)).norm() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn constant_signal_order_one() {
        let s = Signal::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let t = h_table(&s, 1, Variant::SubDiagonal).unwrap();
        assert_eq!(t.len(), 1);
        assert!(close(t.r(1).unwrap(), -1.0));
        let j = jacobi_coefficients(&t, 1, Variant::SubDiagonal).unwrap();
        assert!(close(j.c[0], 1.0));
        assert!(j.d.is_empty());
    }

    #[test]
    fn ramp_signal_hand_values() {
        let s = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = h_table(&s, 2, Variant::SubDiagonal).unwrap();
        assert!(close(t.r(1).unwrap(), -2.0));
        assert!(close(t.r(2).unwrap(), 0.5));
        assert!(close(t.r(3).unwrap(), -0.5));
    }

    #[test]
    fn geometric_pair_hand_values() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0]).unwrap();
        let t = h_table(&s, 2, Variant::SubDiagonal).unwrap();
        assert!(close(t.r(1).unwrap(), -1.25));
        assert!(close(t.r(2).unwrap(), -27.0 / 20.0));
        assert!(close(t.r(3).unwrap(), 1.6));
        let j = jacobi_coefficients(&t, 2, Variant::SubDiagonal).unwrap();
        assert!(close(j.c[0], 1.25));
        assert!(close(j.c[1], -0.25));
        assert!(close(j.d[0], 27.0 / 16.0));
    }

    #[test]
    fn diagonal_coefficients() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0, 49.0]).unwrap();
        let t = h_table(&s, 2, Variant::Diagonal).unwrap();
        // The sequence is exactly of order one lower, so r_4 vanishes
        // without ever being used as a denominator.
        assert!(t.r(4).unwrap().norm() < 1e-13);
        let j = jacobi_coefficients(&t, 2, Variant::Diagonal).unwrap();
        assert!(close(j.c[0], 1.25 + 27.0 / 20.0));
        assert!(close(j.alt_first.unwrap(), 27.0 / 20.0));
        assert!(close(j.d[0], 1.6 * -27.0 / 20.0));
    }

    #[test]
    fn truncated_table_is_order_too_large() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0]).unwrap();
        let t = CfracTable::compute(s.samples(), 2).unwrap();
        assert!(matches!(
            jacobi_coefficients(&t, 2, Variant::SubDiagonal),
            Err(PadeError::OrderTooLarge {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn leading_zero_rejected() {
        let s = Signal::from_real(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            h_table(&s, 2, Variant::SubDiagonal),
            Err(PadeError::LeadingSampleZero { index: 0 })
        ));
        let s = Signal::from_real(&[1.0, 0.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            h_table(&s, 2, Variant::SubDiagonal),
            Err(PadeError::LeadingSampleZero { index: 1 })
        ));
    }

    #[test]
    fn geometric_sequence_breaks_down() {
        // s_k = 2^-k is exactly order one: h_0^1 = 0 is needed as a divisor for r_3.
        let s = Signal::from_real(&[1.0, 0.5, 0.25, 0.125]).unwrap();
        let t = CfracTable::compute(s.samples(), 3).unwrap();
        assert_eq!(t.breakdown_level(), Some(0));
        assert_eq!(t.len(), 2);
        assert!(matches!(
            h_table(&s, 2, Variant::SubDiagonal),
            Err(PadeError::OrderBreakdown { level: 0 })
        ));
        // Order one only needs r_1 and is fine.
        assert!(h_table(&s, 1, Variant::SubDiagonal).is_ok());
    }

    #[test]
    fn second_row_matches_recursive_form() {
        let s = crate::signal::white_noise(8, 11).unwrap();
        let width = 10;
        let first = first_row(s.samples(), width + 1);
        let direct = second_row(s.samples(), width);
        for k in 0..width {
            let recursive = -(first[k] + first[k + 1] / first[0]);
            assert!((recursive - direct[k]).norm() <= 1e-13 * (1.0 + direct[k].norm()));
        }
    }

    #[test]
    fn short_signal_rejected() {
        let s = Signal::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            h_table(&s, 2, Variant::SubDiagonal),
            Err(PadeError::InvalidLength(_))
        ));
        let s = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            h_table(&s, 2, Variant::Diagonal),
            Err(PadeError::InvalidLength(_))
        ));
    }
}
