//! Row-major complex storage and plane rotations shared by the eigensolvers.

use num_complex::Complex64;

pub(crate) fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

#[derive(Debug, Clone)]
pub(crate) struct Dense {
    n: usize,
    data: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies `G` to rows `r` and `r + 1` over columns `cols`.
    pub fn rotate_rows(&mut self, g: Givens, r: usize, cols: std::ops::RangeInclusive<usize>) {
        let n = self.n;
        let (top, bottom) = self.data.split_at_mut((r + 1) * n);
        let top = &mut top[r * n..];
        for j in cols {
            let x = top[j];
            let y = bottom[j];
            top[j] = x * g.c + g.s * y;
            bottom[j] = -g.s.conj() * x + y * g.c;
        }
    }

    /// Applies `G^H` from the right to columns `c` and `c + 1` over `rows`.
    pub fn rotate_cols_adjoint(
        &mut self,
        g: Givens,
        c: usize,
        rows: std::ops::RangeInclusive<usize>,
    ) {
        let n = self.n;
        for i in rows {
            let base = i * n + c;
            let x = self.data[base];
            let y = self.data[base + 1];
            self.data[base] = x * g.c + y * g.s.conj();
            self.data[base + 1] = -x * g.s + y * g.c;
        }
    }

    /// Applies `M = [[c, s], [-conj(s), c]]` from the right to columns `c`
    /// and `c + 1` over `rows`: `(x, y) -> (c x - conj(s) y, s x + c y)`.
    pub fn rotate_cols(&mut self, g: Givens, c: usize, rows: std::ops::RangeInclusive<usize>) {
        let n = self.n;
        for i in rows {
            let base = i * n + c;
            let x = self.data[base];
            let y = self.data[base + 1];
            self.data[base] = x * g.c - g.s.conj() * y;
            self.data[base + 1] = g.s * x + y * g.c;
        }
    }
}

/// Unitary plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Givens {
    pub c: f64,
    pub s: Complex64,
}

impl Givens {
    /// Rotation mapping `(a, b)` onto `(r, 0)`.
    pub fn zeroing(a: Complex64, b: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        if b == zero {
            return Self { c: 1.0, s: zero };
        }
        let abs_b = b.norm();
        if a == zero {
            return Self {
                c: 0.0,
                s: b.conj() / abs_b,
            };
        }
        let abs_a = a.norm();
        let norm = abs_a.hypot(abs_b);
        let phase = a / abs_a;
        Self {
            c: abs_a / norm,
            s: phase * b.conj() / norm,
        }
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`, larger-magnitude root first.
pub(crate) fn eig2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let plus = mean + disc;
    let minus = mean - disc;
    let (big, small) = if plus.norm() >= minus.norm() {
        (plus, minus)
    } else {
        (minus, plus)
    };
    if big.norm() > 0.0 {
        return (big, (a * d - b * c) / big);
    }
    (big, small)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn givens_zeroes_second_entry() {
        for (a, b) in [
            (c(3.0, 1.0), c(-2.0, 5.0)),
            (c(0.0, 0.0), c(1.0, 1.0)),
            (c(2.0, 0.0), c(0.0, 0.0)),
        ] {
            let g = Givens::zeroing(a, b);
            let top = a * g.c + g.s * b;
            let bottom = -g.s.conj() * a + b * g.c;
            assert!(bottom.norm() < 1e-15 * (a.norm() + b.norm()));
            assert!((top.norm() - a.norm().hypot(b.norm())).abs() < 1e-14);
            assert!((g.c * g.c + g.s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_roots() {
        let (x, y) = eig2x2(c(1.25, 0.0), c(1.0, 0.0), c(27.0 / 16.0, 0.0), c(-0.25, 0.0));
        assert!((x - c(2.0, 0.0)).norm() < 1e-14);
        assert!((y - c(-1.0, 0.0)).norm() < 1e-14);
        let (x, y) = eig2x2(c(2.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
        assert_eq!((x, y), (c(1.0, 0.0), c(1.0, 0.0)));
    }
}
