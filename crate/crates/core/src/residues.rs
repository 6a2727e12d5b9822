//! Residues of the approximant by six interchangeable methods.
//!
//! `[n-1/n]`: `s_0 w P_n / Q_n = sum_j rho_j / (w - z_j)` up to the polynomial
//! part, so `s_k = sum_j rho_j z_j^{k-1}`. `[n/n]`: `s_0 P~_n / Q~_n` and
//! `s_k = sum_j rho_j z_j^{k-1}` for `k >= 1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cfrac::{h_table, jacobi_coefficients, JacobiCoefficients, Variant};
use crate::error::{PadeError, Result};
use crate::signal::Signal;
use crate::spectral::{
    build_matrices, diagonalization_t, eval_pq_scaled, greedy_match, perturbed_j, require_simple,
    TridiagonalOperator,
};

/// Forward-difference step relative to `1 + max|z|`.
pub const DEFAULT_TAU_SCALE: f64 = 1e-7;

/// A nearest perturbed eigenvalue at least this fraction of the distance to
/// the second nearest is considered ambiguous.
pub const MATCH_AMBIGUITY_RATIO: f64 = 0.5;

/// Serialized as its tag; `perturbation:<tau>` carries an explicit step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ResidueMethod {
    Product,
    Derivative,
    Eigenvector,
    VandermondeFull,
    VandermondeSquare,
    /// `tau = None` picks `1e-7 * (1 + max|z|)`.
    Perturbation { tau: Option<f64> },
}

impl ResidueMethod {
    pub const ALL: [ResidueMethod; 6] = [
        ResidueMethod::Product,
        ResidueMethod::Derivative,
        ResidueMethod::Eigenvector,
        ResidueMethod::VandermondeFull,
        ResidueMethod::VandermondeSquare,
        ResidueMethod::Perturbation { tau: None },
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResidueMethod::Product => "product",
            ResidueMethod::Derivative => "derivative",
            ResidueMethod::Eigenvector => "eigenvector",
            ResidueMethod::VandermondeFull => "vandermonde_full",
            ResidueMethod::VandermondeSquare => "vandermonde_square",
            ResidueMethod::Perturbation { .. } => "perturbation",
        }
    }

    pub fn validate(self) -> Result<()> {
        if let ResidueMethod::Perturbation { tau: Some(tau) } = self {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(PadeError::InvalidParameter(format!(
                    "perturbation step must be finite and > 0, got {tau}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ResidueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueMethod::Perturbation { tau: Some(tau) } => write!(f, "perturbation:{tau:e}"),
            other => f.write_str(other.as_str()),
        }
    }
}

impl From<ResidueMethod> for String {
    fn from(m: ResidueMethod) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for ResidueMethod {
    type Error = PadeError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for ResidueMethod {
    type Err = PadeError;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(tau) = s.strip_prefix("perturbation:") {
            let tau: f64 = tau.parse().map_err(|_| {
                PadeError::InvalidParameter(format!("bad perturbation step `{tau}`"))
            })?;
            let m = ResidueMethod::Perturbation { tau: Some(tau) };
            m.validate()?;
            return Ok(m);
        }
        Ok(match s {
            "product" => ResidueMethod::Product,
            "derivative" => ResidueMethod::Derivative,
            "eigenvector" | "eigvec" => ResidueMethod::Eigenvector,
            "vandermonde_full" | "vandermonde" => ResidueMethod::VandermondeFull,
            "vandermonde_square" => ResidueMethod::VandermondeSquare,
            "perturbation" => ResidueMethod::Perturbation { tau: None },
            other => {
                return Err(PadeError::InvalidParameter(format!(
                    "unknown residue method `{other}`"
                )))
            }
        })
    }
}

/// Least-squares backend for the overdetermined Vandermonde system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeastSquares {
    #[default]
    Qr,
    NormalEquations,
}

/// Number of residues that underflowed to exact zero.
pub fn count_hard_zeros(residues: &[Complex64]) -> usize {
    residues.iter().filter(|r| r.re == 0.0 && r.im == 0.0).count()
}

fn from_log_polar(log_mag: f64, arg: f64) -> Complex64 {
    Complex64::from_polar(log_mag.exp(), arg)
}

fn check_nonzero_poles(poles: &[Complex64]) -> Result<()> {
    match poles.iter().position(|z| z.norm() == 0.0) {
        Some(index) => Err(PadeError::ZeroPole { index }),
        None => Ok(()),
    }
}

/// Residues from the factored form.
///
/// `[n-1/n]` (`n - 1` zeros): `rho_j = s_0 z_j prod(z_j - lambda_i) / prod_{i != j}(z_j - z_i)`.
/// `[n/n]` (`n` zeros): the same without the factor `z_j`.
/// Magnitudes and arguments are accumulated separately in the log domain.
pub fn residues_product(
    s0: Complex64,
    poles: &[Complex64],
    zeros: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = poles.len();
    let with_z = if zeros.len() + 1 == n {
        true
    } else if zeros.len() == n {
        false
    } else {
        return Err(PadeError::InvalidLength(format!(
            "{n} poles need {} or {n} zeros, got {}",
            n.saturating_sub(1),
            zeros.len()
        )));
    };
    require_simple(poles)?;
    let mut out = Vec::with_capacity(n);
    for (j, &z) in poles.iter().enumerate() {
        let mut log_mag = s0.norm().ln();
        let mut arg = s0.arg();
        if with_z {
            log_mag += z.norm().ln();
            arg += z.arg();
        }
        for &lam in zeros {
            let f = z - lam;
            log_mag += f.norm().ln();
            arg += f.arg();
        }
        for (i, &zi) in poles.iter().enumerate() {
            if i != j {
                let f = z - zi;
                log_mag -= f.norm().ln();
                arg -= f.arg();
            }
        }
        out.push(from_log_polar(log_mag, arg));
    }
    Ok(out)
}

/// `rho_j = s_0 z_j P_n(z_j) / Q_n'(z_j)`; diagonal: `s_0 P~_n(z_j) / Q~_n'(z_j)`.
pub fn residues_derivative(
    s0: Complex64,
    poles: &[Complex64],
    coeffs: &JacobiCoefficients,
) -> Result<Vec<Complex64>> {
    require_simple(poles)?;
    let mut out = Vec::with_capacity(poles.len());
    for (j, &z) in poles.iter().enumerate() {
        let v = eval_pq_scaled(coeffs, z);
        if v.dq.norm() == 0.0 || !v.dq.norm().is_finite() {
            return Err(PadeError::DegenerateSpectrum(format!(
                "Q'(z_{j}) vanishes"
            )));
        }
        let ratio = v.p / v.dq;
        let mut log_mag = s0.norm().ln() + ratio.norm().ln() + v.log_scale_p - v.log_scale_q;
        let mut arg = s0.arg() + ratio.arg();
        if coeffs.variant == Variant::SubDiagonal {
            log_mag += z.norm().ln();
            arg += z.arg();
        }
        out.push(from_log_polar(log_mag, arg));
    }
    Ok(out)
}

/// `rho_j = s_0 z_j (T^{-1} e_0)_j` from one linear solve.
pub fn residues_eigvec(
    s0: Complex64,
    poles: &[Complex64],
    t: &DMatrix<Complex64>,
) -> Result<Vec<Complex64>> {
    let n = poles.len();
    if t.nrows() != n || t.ncols() != n {
        return Err(PadeError::InvalidLength(format!(
            "T must be {n} x {n}, got {} x {}",
            t.nrows(),
            t.ncols()
        )));
    }
    require_simple(poles)?;
    if let Some(j) = (0..n).find(|&j| t[(0, j)] != Complex64::new(1.0, 0.0)) {
        return Err(PadeError::InvalidParameter(format!(
            "row 0 of T must be all ones (column {j})"
        )));
    }
    let mut e0 = DVector::from_element(n, Complex64::new(0.0, 0.0));
    e0[0] = Complex64::new(1.0, 0.0);
    let x = t
        .clone()
        .lu()
        .solve(&e0)
        .ok_or_else(|| PadeError::DegenerateSpectrum("T is singular".into()))?;
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(PadeError::DegenerateSpectrum("T is numerically singular".into()));
    }
    Ok(poles.iter().zip(x.iter()).map(|(z, v)| s0 * z * v).collect())
}

/// Scaled Vandermonde column for exponents `first_exp .. first_exp + rows`.
///
/// For `|z| > 1` the last entry is 1 and the rest are filled backward
/// (`shift = first_exp + rows - 1`); otherwise the column starts at
/// `z^first_exp` and is filled forward (`shift = 0`). Entry `k` equals
/// `z^(first_exp + k - shift)`.
pub(crate) fn scaled_column(z: Complex64, first_exp: i32, rows: usize) -> (Vec<Complex64>, i32) {
    let mut col = vec![Complex64::new(0.0, 0.0); rows];
    if rows == 0 {
        return (col, 0);
    }
    if z.norm() > 1.0 {
        let inv = 1.0 / z;
        col[rows - 1] = Complex64::new(1.0, 0.0);
        for k in (0..rows - 1).rev() {
            col[k] = col[k + 1] * inv;
        }
        (col, first_exp + rows as i32 - 1)
    } else {
        col[0] = z.powi(first_exp);
        for k in 1..rows {
            col[k] = col[k - 1] * z;
        }
        (col, 0)
    }
}

/// `rho = z^(-shift) rho~` evaluated in the log domain.
pub(crate) fn unscale(rho_tilde: Complex64, z: Complex64, shift: i32) -> Complex64 {
    if shift == 0 {
        return rho_tilde;
    }
    if rho_tilde.norm() == 0.0 {
        return rho_tilde;
    }
    let e = shift as f64;
    from_log_polar(
        rho_tilde.norm().ln() - e * z.norm().ln(),
        rho_tilde.arg() - e * z.arg(),
    )
}

/// Scaled Vandermonde matrix with exponents starting at `first_exp`, and the
/// per-column shifts.
pub(crate) fn scaled_vandermonde(
    poles: &[Complex64],
    first_exp: i32,
    rows: usize,
) -> (DMatrix<Complex64>, Vec<i32>) {
    let mut v = DMatrix::from_element(rows, poles.len(), Complex64::new(0.0, 0.0));
    let mut shifts = Vec::with_capacity(poles.len());
    for (j, &z) in poles.iter().enumerate() {
        let (col, shift) = scaled_column(z, first_exp, rows);
        for (k, x) in col.into_iter().enumerate() {
            v[(k, j)] = x;
        }
        shifts.push(shift);
    }
    (v, shifts)
}

fn solve_least_squares(
    v: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    solver: LeastSquares,
) -> Result<DVector<Complex64>> {
    let x = match solver {
        LeastSquares::Qr => {
            let qr = v.qr();
            let q = qr.q();
            let r = qr.r();
            let qtb = q.adjoint() * rhs;
            r.solve_upper_triangular(&qtb)
                .ok_or_else(|| PadeError::Numeric("Vandermonde factor is singular".into()))?
        }
        LeastSquares::NormalEquations => {
            let vh = v.adjoint();
            let gram = &vh * &v;
            let b = vh * rhs;
            match gram.clone().cholesky() {
                Some(ch) => ch.solve(&b),
                None => gram
                    .lu()
                    .solve(&b)
                    .ok_or_else(|| PadeError::Numeric("normal equations are singular".into()))?,
            }
        }
    };
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(PadeError::Numeric("non-finite Vandermonde solution".into()));
    }
    Ok(x)
}

fn vandermonde_residues(
    samples: &[Complex64],
    poles: &[Complex64],
    first_exp: i32,
    solver: LeastSquares,
) -> Result<Vec<Complex64>> {
    require_simple(poles)?;
    check_nonzero_poles(poles)?;
    let (v, shifts) = scaled_vandermonde(poles, first_exp, samples.len());
    let rhs = DVector::from_column_slice(samples);
    let x = solve_least_squares(v, rhs, solver)?;
    Ok(poles
        .iter()
        .zip(shifts)
        .zip(x.iter())
        .map(|((&z, shift), &r)| unscale(r, z, shift))
        .collect())
}

fn require_len(signal: &Signal, needed: usize) -> Result<()> {
    if signal.len() < needed {
        Err(PadeError::InvalidLength(format!(
            "need {needed} samples, got {}",
            signal.len()
        )))
    } else {
        Ok(())
    }
}

/// Least-squares solution of `s_k = sum_j rho_j z_j^{k-1}`, `k = 0 .. 2n-1`.
pub fn residues_vandermonde_full(signal: &Signal, poles: &[Complex64]) -> Result<Vec<Complex64>> {
    residues_vandermonde_full_with(signal, poles, LeastSquares::Qr)
}

pub fn residues_vandermonde_full_with(
    signal: &Signal,
    poles: &[Complex64],
    solver: LeastSquares,
) -> Result<Vec<Complex64>> {
    let n = poles.len();
    require_len(signal, 2 * n)?;
    vandermonde_residues(&signal.samples()[..2 * n], poles, -1, solver)
}

/// Square solve of the first `n` equations.
pub fn residues_vandermonde_square(signal: &Signal, poles: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = poles.len();
    require_len(signal, 2 * n)?;
    vandermonde_residues(&signal.samples()[..n], poles, -1, LeastSquares::Qr)
}

/// `[n/n]` version: `s_1 .. s_{2n}` against exponents `0 .. 2n-1`.
pub fn residues_nn_variant(signal: &Signal, poles: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = poles.len();
    require_len(signal, 2 * n + 1)?;
    vandermonde_residues(&signal.samples()[1..=2 * n], poles, 0, LeastSquares::Qr)
}

/// `[n/n]` square version: `s_1 .. s_n`.
pub fn residues_nn_square(signal: &Signal, poles: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = poles.len();
    require_len(signal, 2 * n + 1)?;
    vandermonde_residues(&signal.samples()[1..=n], poles, 0, LeastSquares::Qr)
}

pub fn default_tau(poles: &[Complex64]) -> f64 {
    DEFAULT_TAU_SCALE * (1.0 + poles.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `rho_j = s_0 z_j lambda_j'(0)`, with the derivative of the eigenvalues of
/// `J + tau e_0 e_0^T` taken by a forward difference.
pub fn residues_perturbation(
    s0: Complex64,
    poles: &[Complex64],
    j: &TridiagonalOperator,
    tau: f64,
) -> Result<Vec<Complex64>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(PadeError::InvalidParameter(format!(
            "perturbation step must be finite and > 0, got {tau}"
        )));
    }
    require_simple(poles)?;
    check_nonzero_poles(poles)?;
    let moved = perturbed_j(j, tau)?.eigenvalues()?;
    if moved.len() != poles.len() {
        return Err(PadeError::InvalidLength(format!(
            "J has dimension {}, expected {}",
            moved.len(),
            poles.len()
        )));
    }
    for (index, &z) in poles.iter().enumerate() {
        let mut d: Vec<f64> = moved.iter().map(|m| (m - z).norm()).collect();
        d.sort_by(f64::total_cmp);
        if d.len() > 1 && d[0] >= MATCH_AMBIGUITY_RATIO * d[1] {
            return Err(PadeError::Matching { index });
        }
    }
    let matches = greedy_match(poles, &moved);
    Ok(matches
        .into_iter()
        .map(|(i, k, _)| {
            let z = poles[i];
            s0 * z * (moved[k] - z) / tau
        })
        .collect())
}

/// What a residue method may draw on. Missing coefficients and zeros are
/// recomputed from the signal.
#[derive(Debug, Clone, Copy)]
pub struct ResidueContext<'a> {
    pub signal: &'a Signal,
    pub variant: Variant,
    pub poles: &'a [Complex64],
    pub coeffs: Option<&'a JacobiCoefficients>,
    pub zeros: Option<&'a [Complex64]>,
}

/// Dispatches to the method. Eigenvector and perturbation exist for the
/// `[n-1/n]` case only.
pub fn compute_residues(method: ResidueMethod, ctx: &ResidueContext<'_>) -> Result<Vec<Complex64>> {
    method.validate()?;
    let n = ctx.poles.len();
    if n == 0 {
        return Err(PadeError::InvalidParameter("no poles".into()));
    }
    require_simple(ctx.poles)?;
    let s0 = ctx.signal.samples()[0];
    let owned;
    let coeffs: &JacobiCoefficients = match ctx.coeffs {
        Some(c) => c,
        None if matches!(
            method,
            ResidueMethod::VandermondeFull | ResidueMethod::VandermondeSquare
        ) =>
        {
            return vandermonde_dispatch(method, ctx);
        }
        None => {
            let table = h_table(ctx.signal, n, ctx.variant)?;
            owned = jacobi_coefficients(&table, n, ctx.variant)?;
            &owned
        }
    };
    match method {
        ResidueMethod::Product => {
            let computed;
            let zeros = match ctx.zeros {
                Some(z) => z,
                None => {
                    computed = build_matrices(coeffs)?.zeros.eigenvalues()?;
                    &computed
                }
            };
            residues_product(s0, ctx.poles, zeros)
        }
        ResidueMethod::Derivative => residues_derivative(s0, ctx.poles, coeffs),
        ResidueMethod::Eigenvector => {
            sub_diagonal_only(ctx.variant, method)?;
            let t = diagonalization_t(coeffs, ctx.poles)?;
            residues_eigvec(s0, ctx.poles, &t)
        }
        ResidueMethod::Perturbation { tau } => {
            sub_diagonal_only(ctx.variant, method)?;
            let j = build_matrices(coeffs)?.poles;
            let tau = tau.unwrap_or_else(|| default_tau(ctx.poles));
            residues_perturbation(s0, ctx.poles, &j, tau)
        }
        ResidueMethod::VandermondeFull | ResidueMethod::VandermondeSquare => {
            vandermonde_dispatch(method, ctx)
        }
    }
}

fn vandermonde_dispatch(method: ResidueMethod, ctx: &ResidueContext<'_>) -> Result<Vec<Complex64>> {
    match (method, ctx.variant) {
        (ResidueMethod::VandermondeFull, Variant::SubDiagonal) => {
            residues_vandermonde_full(ctx.signal, ctx.poles)
        }
        (ResidueMethod::VandermondeFull, Variant::Diagonal) => {
            residues_nn_variant(ctx.signal, ctx.poles)
        }
        (ResidueMethod::VandermondeSquare, Variant::SubDiagonal) => {
            residues_vandermonde_square(ctx.signal, ctx.poles)
        }
        (ResidueMethod::VandermondeSquare, Variant::Diagonal) => {
            residues_nn_square(ctx.signal, ctx.poles)
        }
        _ => unreachable!("not a Vandermonde method"),
    }
}

fn sub_diagonal_only(variant: Variant, method: ResidueMethod) -> Result<()> {
    if variant == Variant::Diagonal {
        Err(PadeError::Unsupported(format!(
            "{method} residues are defined for the sub-diagonal approximant only"
        )))
    } else {
        Ok(())
    }
}
