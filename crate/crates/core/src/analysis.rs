//! One-shot pipeline: signal to poles, zeros and residues.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cfrac::{h_table, jacobi_coefficients, JacobiCoefficients, Variant};
use crate::error::{PadeError, Result};
use crate::residues::{compute_residues, count_hard_zeros, ResidueContext, ResidueMethod};
use crate::signal::Signal;
use crate::spectral::{
    build_matrices, compute_poles, simplicity_check, PadeModel, PoleMethod, SIMPLICITY_TOL,
};

pub const FLAG_DEGENERATE: &str = "degenerate_spectrum";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// `None` uses every sample.
    pub order: Option<usize>,
    pub variant: Variant,
    pub pole_method: PoleMethod,
    /// `None` skips residues.
    pub residue_method: Option<ResidueMethod>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            order: None,
            variant: Variant::SubDiagonal,
            pole_method: PoleMethod::JMatrix,
            residue_method: Some(ResidueMethod::VandermondeFull),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub model: PadeModel,
    pub coeffs: Option<JacobiCoefficients>,
    /// Poles coincide; residues were not computed.
    pub degenerate: bool,
    pub flags: Vec<String>,
    /// Wall-clock seconds spent on the poles.
    pub pole_seconds: f64,
}

/// Order to use for a signal of `len` samples.
pub fn resolve_order(order: Option<usize>, variant: Variant, len: usize) -> Result<usize> {
    let n = order.unwrap_or_else(|| variant.auto_order(len));
    if n == 0 {
        return Err(PadeError::InvalidParameter("order must be at least 1".into()));
    }
    if len < variant.min_len(n) {
        return Err(PadeError::InvalidLength(format!(
            "{} order {n} needs {} samples, got {len}",
            variant.as_str(),
            variant.min_len(n)
        )));
    }
    Ok(n)
}

/// Runs the pipeline. A degenerate spectrum is reported through
/// `Analysis::degenerate` and the flags; other failures are errors.
pub fn analyze(signal: &Signal, opts: &AnalysisOptions) -> Result<Analysis> {
    let variant = opts.variant;
    let n = resolve_order(opts.order, variant, signal.len())?;
    let mut flags = Vec::new();

    let coeffs = match h_table(signal, n, variant).and_then(|t| jacobi_coefficients(&t, n, variant)) {
        Ok(c) => Some(c),
        Err(e) if opts.pole_method == PoleMethod::Pencil => {
            flags.push(format!("cfrac_unavailable:{}", e.kind()));
            None
        }
        Err(e) => return Err(e),
    };

    let start = Instant::now();
    let poles = match (opts.pole_method, &coeffs) {
        (PoleMethod::JMatrix, Some(c)) => build_matrices(c)?.poles.eigenvalues()?,
        _ => compute_poles(signal, n, variant, opts.pole_method)?,
    };
    let pole_seconds = start.elapsed().as_secs_f64();

    let zeros = match &coeffs {
        Some(c) => Some(build_matrices(c)?.zeros.eigenvalues()?),
        None => None,
    };

    let simplicity = simplicity_check(&poles, SIMPLICITY_TOL);
    let degenerate = !simplicity.simple;
    let mut residues = None;
    if degenerate {
        flags.push(FLAG_DEGENERATE.to_string());
    } else if let Some(method) = opts.residue_method {
        let ctx = ResidueContext {
            signal,
            variant,
            poles: &poles,
            coeffs: coeffs.as_ref(),
            zeros: zeros.as_deref(),
        };
        let rho = compute_residues(method, &ctx)?;
        let hard = count_hard_zeros(&rho);
        if hard > 0 {
            flags.push(format!("hard_zero_residues:{hard}"));
        }
        residues = Some(rho);
    }

    Ok(Analysis {
        model: PadeModel {
            variant,
            n,
            s0: signal.samples()[0],
            poles,
            zeros,
            residues,
            min_pole_gap: simplicity.min_gap,
        },
        coeffs,
        degenerate,
        flags,
        pole_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_end_to_end() {
        let s = Signal::from_real(&[4.0, 5.0, 13.0, 23.0]).unwrap();
        let a = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.model.n, 2);
        assert!(!a.degenerate);
        let rho = a.model.residues.unwrap();
        assert!((rho[0] + 1.0).norm() < 1e-12 && (rho[1] - 6.0).norm() < 1e-12);
        assert!((a.model.zeros.unwrap()[0] + 0.25).norm() < 1e-12);
        assert!((a.model.min_pole_gap - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ramp_is_flagged() {
        let s = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let a = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert!(a.degenerate);
        assert!(a.model.residues.is_none());
        assert_eq!(a.flags, vec![FLAG_DEGENERATE.to_string()]);
    }

    #[test]
    fn pencil_survives_zero_leading_sample() {
        let s = Signal::from_real(&[0.0, 1.0, 3.0, 7.0]).unwrap();
        let opts = AnalysisOptions {
            pole_method: PoleMethod::Pencil,
            ..AnalysisOptions::default()
        };
        let a = analyze(&s, &opts).unwrap();
        assert!(a.model.zeros.is_none());
        assert!(a.flags[0].starts_with("cfrac_unavailable"));
        let z = &a.model.poles;
        assert!((z[0] - 1.0).norm() < 1e-12 && (z[1] - 2.0).norm() < 1e-12, "{z:?}");
        let jm = AnalysisOptions::default();
        assert!(matches!(analyze(&s, &jm), Err(PadeError::LeadingSampleZero { index: 0 })));
    }

    #[test]
    fn order_resolution() {
        assert_eq!(resolve_order(None, Variant::SubDiagonal, 9).unwrap(), 4);
        assert_eq!(resolve_order(None, Variant::Diagonal, 9).unwrap(), 4);
        assert_eq!(resolve_order(None, Variant::Diagonal, 8).unwrap(), 3);
        assert!(resolve_order(Some(5), Variant::SubDiagonal, 9).is_err());
        assert!(resolve_order(Some(0), Variant::SubDiagonal, 9).is_err());
    }
}
