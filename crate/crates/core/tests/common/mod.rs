#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use padez::cfrac::exact::{gaussian_from_f64, gaussian_to_f64, GaussianRational};
use padez::signal::Signal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer-valued complex signal with parts in `[-9, 9]` and `s_0, s_1 != 0`.
pub fn integer_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<(i64, i64)> {
    loop {
        let v: Vec<(i64, i64)> = (0..len)
            .map(|_| (rng.random_range(-9..=9), rng.random_range(-9..=9)))
            .collect();
        if v[0] != (0, 0) && v[1] != (0, 0) {
            return v;
        }
    }
}

pub fn to_signal(v: &[(i64, i64)]) -> Signal {
    Signal::new(v.iter().map(|&(a, b)| Complex64::new(a as f64, b as f64)).collect()).unwrap()
}

pub fn exact_samples(samples: &[Complex64]) -> Vec<GaussianRational> {
    samples.iter().map(|&z| gaussian_from_f64(z).unwrap()).collect()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let scale = b.norm();
    if scale == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / scale
    }
}

/// Determinant by cofactor expansion along rows, memoized on the set of
/// remaining columns.
pub fn exact_det(m: &[Vec<GaussianRational>]) -> GaussianRational {
    fn rec(
        m: &[Vec<GaussianRational>],
        row: usize,
        cols: u32,
        memo: &mut HashMap<u32, GaussianRational>,
    ) -> GaussianRational {
        if row == m.len() {
            return GaussianRational::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = GaussianRational::zero();
        let mut sign_pos = true;
        for j in 0..m.len() {
            if cols & (1 << j) == 0 {
                continue;
            }
            if !m[row][j].is_zero() {
                let minor = rec(m, row + 1, cols & !(1 << j), memo);
                let term = &m[row][j] * minor;
                acc = if sign_pos { acc + term } else { acc - term };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    rec(m, 0, (1u32 << m.len()) - 1, &mut memo)
}

/// Monic `Q_n(w)` from the Hankel determinant with last row `[w^n, ..., w, 1]`.
pub fn jacobi_q(samples: &[GaussianRational], n: usize, w: &GaussianRational) -> GaussianRational {
    let mut rows: Vec<Vec<GaussianRational>> = (0..n)
        .map(|i| (0..=n).map(|j| samples[n + i - j].clone()).collect())
        .collect();
    let mut powers = vec![GaussianRational::one()];
    for _ in 0..n {
        let next = powers.last().unwrap() * w;
        powers.push(next);
    }
    powers.reverse();
    rows.push(powers);
    let full = exact_det(&rows);
    // coefficient of w^n: cofactor of the first entry of the last row
    let minor: Vec<Vec<GaussianRational>> =
        rows[..n].iter().map(|r| r[1..].to_vec()).collect();
    let mut lead = exact_det(&minor);
    if n % 2 == 1 {
        lead = -lead;
    }
    full / lead
}

pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> GaussianRational {
    Complex::new(
        BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
        BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
    )
}

pub fn to_f64(z: &GaussianRational) -> Complex64 {
    gaussian_to_f64(z)
}

/// Relative residual of the least-squares fit `s_k ~ sum_j rho_j z_j^(first_exp + k)`,
/// solved by SVD with unit-norm columns.
pub fn ls_residual(samples: &[Complex64], poles: &[Complex64], first_exp: i32) -> f64 {
    let m = samples.len();
    let mut v = DMatrix::from_fn(m, poles.len(), |k, j| {
        let z = poles[j];
        // z^e / max_k |z^k|, evaluated in logs to stay in range
        let e = first_exp + k as i32;
        let top = if z.norm() > 1.0 { first_exp + m as i32 - 1 } else { first_exp };
        Complex64::from_polar(((e - top) as f64 * z.norm().ln()).exp(), e as f64 * z.arg())
    });
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
    }
    let b = DVector::from_column_slice(samples);
    let x = v.clone().svd(true, true).solve(&b, 0.0).unwrap();
    (b.clone() - v * x).norm() / b.norm()
}
