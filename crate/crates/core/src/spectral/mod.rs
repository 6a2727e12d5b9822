//! Poles and zeros as eigenvalues.
//!
//! The poles of the approximant are the eigenvalues of a tridiagonal matrix
//! `J_n` (unit superdiagonal, diagonal `c_l`, subdiagonal `d_l`), the zeros
//! those of its trailing submatrix `J'_{n-1}` (diagonal variant: `J~'_n`).
//! The Hankel pencil in [`pencil`] gives the same poles by an independent
//! route.

mod dense;
mod hqr;
pub mod pencil;
mod qz;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use self::dense::Dense;
use crate::cfrac::{h_table, jacobi_coefficients, JacobiCoefficients, Variant};
use crate::error::{PadeError, Result};
use crate::signal::Signal;

pub use pencil::{poles_via_pencil, HankelPencil};

/// Default relative tolerance for declaring two poles coincident. A computed
/// double root splits by about `sqrt(eps)`, so the threshold sits above that.
pub const SIMPLICITY_TOL: f64 = 1e-7;

/// Complex tridiagonal matrix with unit superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<Complex64>,
    sub: Vec<Complex64>,
}

impl TridiagonalOperator {
    /// `diag` has length `m`, `sub` length `m - 1` (both empty for `m = 0`).
    pub fn new(diag: Vec<Complex64>, sub: Vec<Complex64>) -> Result<Self> {
        if sub.len() + 1 != diag.len() && !(diag.is_empty() && sub.is_empty()) {
            return Err(PadeError::InvalidLength(format!(
                "tridiagonal of size {} needs {} subdiagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                sub.len()
            )));
        }
        if diag.iter().chain(&sub).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(PadeError::Numeric("non-finite tridiagonal entry".into()));
        }
        Ok(Self { diag, sub })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn sub(&self) -> &[Complex64] {
        &self.sub
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let m = self.dim();
        let mut out = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
        for i in 0..m {
            out[(i, i)] = self.diag[i];
            if i + 1 < m {
                out[(i, i + 1)] = Complex64::new(1.0, 0.0);
                out[(i + 1, i)] = self.sub[i];
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let m = self.dim();
        (self.diag.iter().chain(&self.sub).map(|z| z.norm_sqr()).sum::<f64>()
            + m.saturating_sub(1) as f64)
            .sqrt()
    }

    /// Diagonally balanced dense copy: super- and subdiagonal entries of
    /// equal magnitude `sqrt|d_l|`.
    fn balanced(&self) -> Dense {
        let m = self.dim();
        let mut h = Dense::zeros(m);
        for i in 0..m {
            h.set(i, i, self.diag[i]);
        }
        for (i, &d) in self.sub.iter().enumerate() {
            let t = if d.norm() == 0.0 { 1.0 } else { d.norm().sqrt() };
            h.set(i, i + 1, Complex64::new(t, 0.0));
            h.set(i + 1, i, d / t);
        }
        h
    }

    /// All eigenvalues in canonical order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut h = self.balanced();
        let mut eig = hqr::hessenberg_eigenvalues(&mut h)?;
        canonical_sort(&mut eig);
        Ok(eig)
    }

    /// Copy with `tau` added to the leading diagonal entry.
    pub fn perturbed(&self, tau: f64) -> Result<Self> {
        perturbed_j(self, tau)
    }
}

/// Eigenvalues of `t`, canonical order.
pub fn eigenvalues(t: &TridiagonalOperator) -> Result<Vec<Complex64>> {
    t.eigenvalues()
}

/// The pole matrix and the zero matrix of one approximant.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    /// `J_n` or `J~_n`; eigenvalues are the poles.
    pub poles: TridiagonalOperator,
    /// `J'_{n-1}` or `J~'_n`; eigenvalues are the zeros.
    pub zeros: TridiagonalOperator,
}

pub fn build_matrices(coeffs: &JacobiCoefficients) -> Result<MatrixPair> {
    let main = TridiagonalOperator::new(coeffs.c.clone(), coeffs.d.clone())?;
    let zeros = match coeffs.variant {
        Variant::SubDiagonal => {
            if coeffs.c.len() <= 1 {
                TridiagonalOperator::new(Vec::new(), Vec::new())?
            } else {
                TridiagonalOperator::new(coeffs.c[1..].to_vec(), coeffs.d[1..].to_vec())?
            }
        }
        Variant::Diagonal => {
            let mut diag = coeffs.c.clone();
            diag[0] = coeffs.alt_first.ok_or_else(|| {
                PadeError::InvalidParameter("diagonal coefficients lack the alternate first entry".into())
            })?;
            TridiagonalOperator::new(diag, coeffs.d.clone())?
        }
    };
    Ok(MatrixPair { poles: main, zeros })
}

/// `J + tau e_0 e_0^T`.
pub fn perturbed_j(j: &TridiagonalOperator, tau: f64) -> Result<TridiagonalOperator> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(PadeError::InvalidParameter(format!(
            "perturbation must be finite and >= 0, got {tau}"
        )));
    }
    let mut out = j.clone();
    if let Some(first) = out.diag.first_mut() {
        *first += tau;
    }
    Ok(out)
}

/// Values of the numerator `P_n`, denominator `Q_n` and `Q_n'` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqValues {
    pub p: Complex64,
    pub q: Complex64,
    pub dq: Complex64,
}

/// Same values with a common power-of-e factor pulled out of each family:
/// `P = p * exp(log_scale_p)`, `Q = q * exp(log_scale_q)`, `Q' = dq * exp(log_scale_q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPq {
    pub p: Complex64,
    pub q: Complex64,
    pub dq: Complex64,
    pub log_scale_p: f64,
    pub log_scale_q: f64,
}

const RESCALE_ABOVE: f64 = 1e150;

/// Three-term recurrences for `P`, `Q` and `Q'`, rescaled to stay in range.
pub fn eval_pq_scaled(coeffs: &JacobiCoefficients, w: Complex64) -> ScaledPq {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let n = coeffs.order();
    let (mut p_prev, mut p) = match coeffs.variant {
        Variant::SubDiagonal => (zero, one),
        Variant::Diagonal => (one, w - coeffs.alt_first.unwrap_or(zero)),
    };
    let (mut q_prev, mut q) = (one, w - coeffs.c[0]);
    let (mut dq_prev, mut dq) = (zero, one);
    let mut log_p = 0.0;
    let mut log_q = 0.0;
    for l in 1..n {
        let a = w - coeffs.c[l];
        let dl = coeffs.d[l - 1];
        let p_next = a * p - dl * p_prev;
        let q_next = a * q - dl * q_prev;
        let dq_next = a * dq + q - dl * dq_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
        dq_prev = dq;
        dq = dq_next;
        let pm = p.norm().max(p_prev.norm());
        if pm > RESCALE_ABOVE {
            p /= pm;
            p_prev /= pm;
            log_p += pm.ln();
        }
        let qm = q.norm().max(q_prev.norm()).max(dq.norm()).max(dq_prev.norm());
        if qm > RESCALE_ABOVE {
            q /= qm;
            q_prev /= qm;
            dq /= qm;
            dq_prev /= qm;
            log_q += qm.ln();
        }
    }
    ScaledPq {
        p,
        q,
        dq,
        log_scale_p: log_p,
        log_scale_q: log_q,
    }
}

/// `P_n(w)`, `Q_n(w)` and `Q_n'(w)` by the three-term recurrences.
pub fn eval_pq(coeffs: &JacobiCoefficients, w: Complex64) -> PqValues {
    let s = eval_pq_scaled(coeffs, w);
    let fp = s.log_scale_p.exp();
    let fq = s.log_scale_q.exp();
    PqValues {
        p: s.p * fp,
        q: s.q * fq,
        dq: s.dq * fq,
    }
}

/// `Q_0(w), ..., Q_{m-1}(w)`.
pub fn q_sequence(coeffs: &JacobiCoefficients, w: Complex64, m: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    let one = Complex64::new(1.0, 0.0);
    out.push(one);
    if m == 1 {
        return out;
    }
    out.push(w - coeffs.c[0]);
    for l in 1..m - 1 {
        let next = (w - coeffs.c[l]) * out[l] - coeffs.d[l - 1] * out[l - 1];
        out.push(next);
    }
    out
}

/// Pole-separation summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simplicity {
    pub simple: bool,
    /// Smallest pairwise distance; `+inf` for fewer than two poles.
    pub min_gap: f64,
}

/// Flags the spectrum degenerate when `min_gap < tol * max|z|`.
pub fn simplicity_check(poles: &[Complex64], tol: f64) -> Simplicity {
    let mut min_gap = f64::INFINITY;
    for i in 0..poles.len() {
        for j in (i + 1)..poles.len() {
            min_gap = min_gap.min((poles[i] - poles[j]).norm());
        }
    }
    let radius = poles.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Simplicity {
        simple: !(min_gap < tol * radius) && !(poles.len() > 1 && min_gap == 0.0),
        min_gap,
    }
}

pub(crate) fn require_simple(poles: &[Complex64]) -> Result<Simplicity> {
    let s = simplicity_check(poles, SIMPLICITY_TOL);
    if s.simple {
        Ok(s)
    } else {
        Err(PadeError::DegenerateSpectrum(format!(
            "minimum pole gap {:.3e} below tolerance",
            s.min_gap
        )))
    }
}

/// `T[i, j] = Q_i(z_j)`; columns are eigenvectors of `J_n`.
pub fn diagonalization_t(
    coeffs: &JacobiCoefficients,
    poles: &[Complex64],
) -> Result<DMatrix<Complex64>> {
    let n = coeffs.order();
    if poles.len() != n {
        return Err(PadeError::InvalidLength(format!(
            "need {n} poles, got {}",
            poles.len()
        )));
    }
    require_simple(poles)?;
    let mut t = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (j, &z) in poles.iter().enumerate() {
        for (i, v) in q_sequence(coeffs, z, n).into_iter().enumerate() {
            t[(i, j)] = v;
        }
    }
    Ok(t)
}

/// Lexicographic order by `(Re, Im)`.
pub fn canonical_sort(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Greedy bipartite matching by distance: all pairs are sorted by
/// `(distance, i, j)` and taken while both ends are free.
pub fn greedy_match(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j, d));
            if out.len() == a.len().min(b.len()) {
                break;
            }
        }
    }
    out.sort_by_key(|&(i, _, _)| i);
    out
}

/// `perm[i]` is the index in `b` matched to `a[i]`.
pub fn matching_permutation(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    greedy_match(a, b).into_iter().map(|(_, j, _)| j).collect()
}

/// `||b_matched - a|| / ||a||` after greedy matching (equal lengths).
pub fn matched_relative_error(reference: &[Complex64], computed: &[Complex64]) -> f64 {
    let perm = matching_permutation(reference, computed);
    let num: f64 = reference
        .iter()
        .zip(&perm)
        .map(|(r, &j)| (computed[j] - r).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = reference.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// A pole and the zero paired with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Doublet {
    pub pole: Complex64,
    pub zero: Complex64,
    pub elongation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FroissartPairs {
    pub pairs: Vec<Doublet>,
    pub unmatched_poles: Vec<Complex64>,
}

/// Pairs every zero with its closest free pole.
pub fn froissart_pairs(poles: &[Complex64], zeros: &[Complex64]) -> FroissartPairs {
    let matches = greedy_match(zeros, poles);
    let mut used = vec![false; poles.len()];
    let pairs = matches
        .iter()
        .map(|&(i, j, d)| {
            used[j] = true;
            Doublet {
                pole: poles[j],
                zero: zeros[i],
                elongation: d,
            }
        })
        .collect();
    let unmatched_poles = poles
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(&z, _)| z)
        .collect();
    FroissartPairs {
        pairs,
        unmatched_poles,
    }
}

/// Route used to compute the poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleMethod {
    #[serde(rename = "jmatrix")]
    JMatrix,
    Pencil,
}

impl PoleMethod {
    pub const ALL: [PoleMethod; 2] = [PoleMethod::JMatrix, PoleMethod::Pencil];

    pub fn as_str(self) -> &'static str {
        match self {
            PoleMethod::JMatrix => "jmatrix",
            PoleMethod::Pencil => "pencil",
        }
    }
}

impl std::fmt::Display for PoleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PoleMethod {
    type Err = PadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jmatrix" | "j_matrix" | "j" => Ok(PoleMethod::JMatrix),
            "pencil" => Ok(PoleMethod::Pencil),
            other => Err(PadeError::InvalidParameter(format!(
                "unknown pole method `{other}`"
            ))),
        }
    }
}

/// Poles at order `n` by either route. The diagonal pencil uses the shifted
/// window `s_1 .. s_{2n}`.
pub fn compute_poles(
    signal: &Signal,
    n: usize,
    variant: Variant,
    method: PoleMethod,
) -> Result<Vec<Complex64>> {
    match method {
        PoleMethod::JMatrix => {
            let table = h_table(signal, n, variant)?;
            let coeffs = jacobi_coefficients(&table, n, variant)?;
            build_matrices(&coeffs)?.poles.eigenvalues()
        }
        PoleMethod::Pencil => match variant {
            Variant::SubDiagonal => poles_via_pencil(signal, n),
            Variant::Diagonal => {
                if signal.len() < 2 * n + 1 {
                    return Err(PadeError::InvalidLength(format!(
                        "diagonal order {n} needs {} samples, got {}",
                        2 * n + 1,
                        signal.len()
                    )));
                }
                let shifted = Signal::new(signal.samples()[1..].to_vec())?;
                poles_via_pencil(&shifted, n)
            }
        },
    }
}

/// Poles, zeros and (optionally) residues of one approximant.
///
/// Sub-diagonal: `s_0 w P_n(w) / Q_n(w)`; diagonal: `s_0 P~_n(w) / Q~_n(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeModel {
    pub variant: Variant,
    pub n: usize,
    pub s0: Complex64,
    pub poles: Vec<Complex64>,
    /// `None` when only the pencil route was available.
    pub zeros: Option<Vec<Complex64>>,
    pub residues: Option<Vec<Complex64>>,
    pub min_pole_gap: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn worked() -> JacobiCoefficients {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0]).unwrap();
        let t = h_table(&s, 2, Variant::SubDiagonal).unwrap();
        jacobi_coefficients(&t, 2, Variant::SubDiagonal).unwrap()
    }

    #[test]
    fn worked_matrices() {
        let m = build_matrices(&worked()).unwrap();
        let j = m.poles.to_dense();
        assert!((j[(0, 0)] - c(1.25)).norm() < 1e-14);
        assert!((j[(0, 1)] - c(1.0)).norm() < 1e-14);
        assert!((j[(1, 0)] - c(27.0 / 16.0)).norm() < 1e-14);
        assert!((j[(1, 1)] - c(-0.25)).norm() < 1e-14);
        assert_eq!(m.zeros.dim(), 1);
        assert!((m.zeros.diag()[0] - c(-0.25)).norm() < 1e-14);
    }

    #[test]
    fn worked_eigenvalues() {
        let m = build_matrices(&worked()).unwrap();
        let eig = m.poles.eigenvalues().unwrap();
        assert!((eig[0] - c(-1.0)).norm() < 1e-13);
        assert!((eig[1] - c(2.0)).norm() < 1e-13);
    }

    #[test]
    fn order_one_has_empty_zero_matrix() {
        let s = Signal::from_real(&[1.0, 1.0]).unwrap();
        let t = h_table(&s, 1, Variant::SubDiagonal).unwrap();
        let coeffs = jacobi_coefficients(&t, 1, Variant::SubDiagonal).unwrap();
        let m = build_matrices(&coeffs).unwrap();
        assert_eq!(m.poles.dim(), 1);
        assert_eq!(m.zeros.dim(), 0);
        assert!(m.zeros.eigenvalues().unwrap().is_empty());
        assert_eq!(m.poles.eigenvalues().unwrap(), vec![c(1.0)]);
        let v = eval_pq(&coeffs, c(3.0));
        assert_eq!(v.p, c(1.0));
        assert_eq!(v.q, c(3.0) + t.r(1).unwrap());
    }

    #[test]
    fn diagonal_matrices_differ_in_corner() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0, 49.0]).unwrap();
        let t = h_table(&s, 2, Variant::Diagonal).unwrap();
        let coeffs = jacobi_coefficients(&t, 2, Variant::Diagonal).unwrap();
        let m = build_matrices(&coeffs).unwrap();
        let a = m.poles.to_dense();
        let b = m.zeros.to_dense();
        let diff = &a - &b;
        assert!((diff[(0, 0)] + t.r(1).unwrap()).norm() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                if (i, j) != (0, 0) {
                    assert_eq!(diff[(i, j)], c(0.0));
                }
            }
        }
        let poles = m.poles.eigenvalues().unwrap();
        assert!((poles[0] - c(-1.0)).norm() < 1e-12 && (poles[1] - c(2.0)).norm() < 1e-12);
        let zeros = m.zeros.eigenvalues().unwrap();
        assert!((zeros[0] - c(-0.25)).norm() < 1e-12 && zeros[1].norm() < 1e-12);
    }

    #[test]
    fn worked_pq_values() {
        let v = eval_pq(&worked(), c(2.0));
        assert!(v.q.norm() < 1e-13);
        assert!((v.p - c(2.25)).norm() < 1e-13);
        assert!((v.dq - c(3.0)).norm() < 1e-13);
    }

    #[test]
    fn worked_diagonalization() {
        let t = diagonalization_t(&worked(), &[c(2.0), c(-1.0)]).unwrap();
        assert!((t[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!((t[(0, 1)] - c(1.0)).norm() < 1e-14);
        assert!((t[(1, 0)] - c(0.75)).norm() < 1e-14);
        assert!((t[(1, 1)] - c(-2.25)).norm() < 1e-14);
    }

    #[test]
    fn ramp_is_degenerate() {
        let s = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = h_table(&s, 2, Variant::SubDiagonal).unwrap();
        let coeffs = jacobi_coefficients(&t, 2, Variant::SubDiagonal).unwrap();
        let poles = build_matrices(&coeffs).unwrap().poles.eigenvalues().unwrap();
        let s = simplicity_check(&poles, SIMPLICITY_TOL);
        assert!(!s.simple, "{poles:?}");
        assert!(matches!(
            diagonalization_t(&coeffs, &poles),
            Err(PadeError::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn single_pole_is_simple() {
        let s = simplicity_check(&[c(0.5)], SIMPLICITY_TOL);
        assert!(s.simple);
        assert_eq!(s.min_gap, f64::INFINITY);
    }

    #[test]
    fn perturbation_touches_corner_only() {
        let j = build_matrices(&worked()).unwrap().poles;
        assert_eq!(perturbed_j(&j, 0.0).unwrap(), j);
        let p = perturbed_j(&j, 1.0).unwrap().to_dense();
        assert!((p[(0, 0)] - c(2.25)).norm() < 1e-15);
        assert_eq!(p[(1, 0)], c(27.0 / 16.0));
        assert!(perturbed_j(&j, -1.0).is_err());
    }

    #[test]
    fn worked_froissart() {
        let f = froissart_pairs(&[c(2.0), c(-1.0)], &[c(-0.25)]);
        assert_eq!(f.pairs.len(), 1);
        assert_eq!(f.pairs[0].pole, c(-1.0));
        assert!((f.pairs[0].elongation - 0.75).abs() < 1e-15);
        assert_eq!(f.unmatched_poles, vec![c(2.0)]);
        let f = froissart_pairs(&[c(1.0)], &[]);
        assert!(f.pairs.is_empty());
        assert_eq!(f.unmatched_poles.len(), 1);
    }

    #[test]
    fn diagonal_pencil_uses_shifted_window() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0, 49.0]).unwrap();
        for method in PoleMethod::ALL {
            let z = compute_poles(&s, 2, Variant::Diagonal, method).unwrap();
            assert!((z[0] + 1.0).norm() < 1e-12 && (z[1] - 2.0).norm() < 1e-12, "{method}");
        }
    }

    #[test]
    fn matching_breaks_ties_by_index() {
        let m = greedy_match(&[c(0.0), c(0.0)], &[c(1.0), c(-1.0)]);
        assert_eq!(m.iter().map(|p| p.1).collect::<Vec<_>>(), vec![0, 1]);
    }
}
