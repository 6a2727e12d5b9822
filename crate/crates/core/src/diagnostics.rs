//! Forward, backward and global error measures, the residue-radius profile,
//! and Monte-Carlo sweeps.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisOptions, FLAG_DEGENERATE};
use crate::cfrac::Variant;
use crate::error::{PadeError, Result};
use crate::residues::{scaled_column, ResidueMethod};
use crate::signal::{white_noise, Signal, RNG_ALGORITHM};
use crate::spectral::{compute_poles, greedy_match, matched_relative_error, PadeModel, PoleMethod};

/// `sum_j rho_j z_j^(first_exp + k)` for `k = 0 .. len`, with columns for
/// `|z| > 1` built backward from the last row.
pub fn reconstruct_window(
    poles: &[Complex64],
    residues: &[Complex64],
    first_exp: i32,
    len: usize,
) -> Result<Vec<Complex64>> {
    if poles.len() != residues.len() {
        return Err(PadeError::InvalidLength(format!(
            "{} poles but {} residues",
            poles.len(),
            residues.len()
        )));
    }
    if let Some(index) = poles.iter().position(|z| z.norm() == 0.0) {
        return Err(PadeError::ZeroPole { index });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (index, (&z, &rho)) in poles.iter().zip(residues).enumerate() {
        if rho.norm() == 0.0 {
            continue;
        }
        let (col, shift) = scaled_column(z, first_exp, len);
        let weight = if shift == 0 {
            rho
        } else {
            let e = shift as f64;
            Complex64::from_polar(
                (rho.norm().ln() + e * z.norm().ln()).exp(),
                rho.arg() + e * z.arg(),
            )
        };
        if !(weight.re.is_finite() && weight.im.is_finite()) {
            return Err(PadeError::Overflow { index });
        }
        for (acc, c) in out.iter_mut().zip(col) {
            *acc += weight * c;
        }
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(PadeError::Overflow { index });
        }
    }
    Ok(out)
}

/// `s_k = sum_j rho_j z_j^(k-1)`, `k = 0 .. length`.
pub fn reconstruct_signal(poles: &[Complex64], residues: &[Complex64], length: usize) -> Result<Signal> {
    Signal::new(reconstruct_window(poles, residues, -1, length)?)
}

fn relative_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn require_residues(model: &PadeModel) -> Result<&[Complex64]> {
    model
        .residues
        .as_deref()
        .ok_or_else(|| PadeError::InvalidParameter("model has no residues".into()))
}

/// Poles recomputed from the exactly consistent signal of `(poles, residues)`,
/// as a relative error after matching.
pub fn forward_pole_error(
    poles: &[Complex64],
    residues: &[Complex64],
    pole_method: PoleMethod,
) -> Result<f64> {
    let n = poles.len();
    let s = reconstruct_signal(poles, residues, 2 * n)?;
    let again = compute_poles(&s, n, Variant::SubDiagonal, pole_method)?;
    Ok(matched_relative_error(poles, &again))
}

/// Residues recomputed from the consistent signal, matched through the poles.
pub fn forward_residue_error(
    poles: &[Complex64],
    residues: &[Complex64],
    residue_method: ResidueMethod,
    pole_method: PoleMethod,
) -> Result<f64> {
    let n = poles.len();
    let s = reconstruct_signal(poles, residues, 2 * n)?;
    let opts = AnalysisOptions {
        order: Some(n),
        variant: Variant::SubDiagonal,
        pole_method,
        residue_method: Some(residue_method),
    };
    let a = analyze(&s, &opts)?;
    if a.degenerate {
        return Err(PadeError::DegenerateSpectrum(
            "recomputed spectrum is degenerate".into(),
        ));
    }
    let rho = a.model.residues.expect("residues requested");
    let matches = greedy_match(poles, &a.model.poles);
    let num: f64 = matches
        .iter()
        .map(|&(i, j, _)| (rho[j] - residues[i]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = residues.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt();
    Ok(if den == 0.0 { num } else { num / den })
}

/// `|sum rho_j / (s_0 z_j) - 1|`, or `|sum rho_j / s_0 - sum (z_j - lambda_j)|`
/// for the diagonal approximant.
pub fn euler_jacobi_defect(model: &PadeModel) -> Result<f64> {
    let rho = require_residues(model)?;
    match model.variant {
        Variant::SubDiagonal => {
            if let Some(index) = model.poles.iter().position(|z| z.norm() == 0.0) {
                return Err(PadeError::ZeroPole { index });
            }
            let sum: Complex64 = rho
                .iter()
                .zip(&model.poles)
                .map(|(r, z)| r / (model.s0 * z))
                .sum();
            Ok((sum - 1.0).norm())
        }
        Variant::Diagonal => {
            let zeros = model.zeros.as_deref().ok_or_else(|| {
                PadeError::InvalidParameter("diagonal defect needs the zeros".into())
            })?;
            let sum: Complex64 = rho.iter().map(|r| r / model.s0).sum();
            let trace: Complex64 =
                model.poles.iter().sum::<Complex64>() - zeros.iter().sum::<Complex64>();
            Ok((sum - trace).norm())
        }
    }
}

/// `||s - s~|| / ||s||` over the samples the model was fitted to.
pub fn backward_error(signal: &Signal, model: &PadeModel) -> Result<f64> {
    let rho = require_residues(model)?;
    let n = model.n;
    let (start, first_exp) = match model.variant {
        Variant::SubDiagonal => (0, -1),
        Variant::Diagonal => (1, 0),
    };
    let end = start + 2 * n;
    if signal.len() < end {
        return Err(PadeError::InvalidLength(format!(
            "model needs {end} samples, signal has {}",
            signal.len()
        )));
    }
    let rebuilt = reconstruct_window(&model.poles, rho, first_exp, 2 * n)?;
    Ok(relative_norm(&signal.samples()[start..end], &rebuilt))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub radius: f64,
    pub residue_abs: f64,
    /// `ln sigma - 2 (n - 1) (|z| - 1)`; meaningful for `|z| > 1`.
    pub bound_rhs: f64,
}

/// Residue magnitudes against pole radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueRadiusProfile {
    pub n: usize,
    pub sigma: f64,
    pub rows: Vec<ProfileRow>,
    pub outside: usize,
    /// Robust upper envelope of `ln|rho| + 2 (n - 1) (|z| - 1)` over poles
    /// outside the unit circle: median plus three scaled MADs.
    pub fitted_intercept: f64,
    /// Fraction of outside poles below the line with the fitted intercept.
    pub fraction_fitted: f64,
    /// Same with intercept `ln sigma`.
    pub fraction_sigma: f64,
    pub hard_zeros: usize,
    /// `log10(max|rho| / min nonzero |rho|)`.
    pub log10_span: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// Robust envelope `median + 3 * 1.4826 * MAD`.
pub fn robust_envelope(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    let med = median(&v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    med + 3.0 * 1.4826 * median(&dev)
}

/// `sigma = None` uses the RMS of `signal`.
pub fn residue_radius_profile(
    model: &PadeModel,
    signal: &Signal,
    sigma: Option<f64>,
) -> Result<ResidueRadiusProfile> {
    let rho = require_residues(model)?;
    let sigma = sigma.unwrap_or_else(|| signal.rms());
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(PadeError::InvalidParameter(format!(
            "noise amplitude must be positive, got {sigma}"
        )));
    }
    let slope = 2.0 * (model.n as f64 - 1.0);
    let ln_sigma = sigma.ln();
    let rows: Vec<ProfileRow> = model
        .poles
        .iter()
        .zip(rho)
        .map(|(z, r)| ProfileRow {
            radius: z.norm(),
            residue_abs: r.norm(),
            bound_rhs: ln_sigma - slope * (z.norm() - 1.0),
        })
        .collect();
    let outside: Vec<&ProfileRow> = rows.iter().filter(|r| r.radius > 1.0).collect();
    let excess: Vec<f64> = outside
        .iter()
        .map(|r| r.residue_abs.ln() + slope * (r.radius - 1.0))
        .collect();
    let fitted_intercept = if excess.iter().any(|e| e.is_finite()) {
        robust_envelope(&excess)
    } else {
        ln_sigma
    };
    let fraction = |c: f64| {
        if excess.is_empty() {
            1.0
        } else {
            excess.iter().filter(|&&e| e <= c).count() as f64 / excess.len() as f64
        }
    };
    let nonzero: Vec<f64> = rows.iter().map(|r| r.residue_abs).filter(|&a| a > 0.0).collect();
    let log10_span = match (
        nonzero.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        nonzero.iter().copied().fold(f64::INFINITY, f64::min),
    ) {
        (hi, lo) if hi.is_finite() && lo.is_finite() => hi.log10() - lo.log10(),
        _ => 0.0,
    };
    Ok(ResidueRadiusProfile {
        n: model.n,
        sigma,
        outside: outside.len(),
        fitted_intercept,
        fraction_fitted: fraction(fitted_intercept),
        fraction_sigma: fraction(ln_sigma),
        hard_zeros: rows.len() - nonzero.len(),
        log10_span,
        rows,
    })
}

/// Metrics of one analysis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n: usize,
    pub variant: Variant,
    pub pole_method: PoleMethod,
    pub residue_method: ResidueMethod,
    pub forward_pole_err: Option<f64>,
    pub forward_residue_err: Option<f64>,
    pub euler_jacobi_defect: Option<f64>,
    pub backward_err: Option<f64>,
    pub min_pole_gap: Option<f64>,
    pub timing_poles: Option<f64>,
    pub flags: Vec<String>,
    pub source: String,
    pub seed: Option<u64>,
    pub rng: String,
}

pub const CSV_HEADER: [&str; 14] = [
    "n",
    "variant",
    "pole_method",
    "residue_method",
    "forward_pole_err",
    "forward_residue_err",
    "euler_jacobi_defect",
    "backward_err",
    "min_pole_gap",
    "timing_poles",
    "flags",
    "source",
    "seed",
    "rng",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl ErrorReport {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.variant.as_str().to_string(),
            self.pole_method.as_str().to_string(),
            self.residue_method.to_string(),
            opt(self.forward_pole_err),
            opt(self.forward_residue_err),
            opt(self.euler_jacobi_defect),
            opt(self.backward_err),
            opt(self.min_pole_gap),
            opt(self.timing_poles),
            self.flags.join(";"),
            self.source.clone(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.rng.clone(),
        ]
    }

    pub fn has_flag_prefix(&self, prefix: &str) -> bool {
        self.flags.iter().any(|f| f.starts_with(prefix))
    }
}

pub fn write_reports_jsonl(reports: &[ErrorReport], mut out: impl Write) -> Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).map_err(|e| PadeError::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_reports_csv(reports: &[ErrorReport], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| PadeError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// A named signal swept alongside the white-noise trials, at automatic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSignal {
    pub name: String,
    pub signal: Signal,
}

fn default_pole_methods() -> Vec<PoleMethod> {
    PoleMethod::ALL.to_vec()
}

fn default_residue_methods() -> Vec<ResidueMethod> {
    vec![ResidueMethod::VandermondeFull]
}

fn default_repetitions() -> usize {
    5
}

fn default_variant() -> Variant {
    Variant::SubDiagonal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_pole_methods")]
    pub pole_methods: Vec<PoleMethod>,
    #[serde(default = "default_residue_methods")]
    pub residue_methods: Vec<ResidueMethod>,
    /// Timed pole computations per trial; the median is reported.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(skip)]
    pub corpus: Vec<CorpusSignal>,
}

impl SweepConfig {
    pub fn new(n_list: Vec<usize>, seeds: Vec<u64>) -> Self {
        Self {
            n_list,
            seeds,
            variant: default_variant(),
            pole_methods: default_pole_methods(),
            residue_methods: default_residue_methods(),
            repetitions: default_repetitions(),
            jobs: None,
            corpus: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() && self.corpus.is_empty() {
            return Err(PadeError::InvalidParameter("n_list is empty".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0) {
            return Err(PadeError::InvalidParameter(format!("order {n} in n_list")));
        }
        if !self.n_list.is_empty() && self.seeds.is_empty() {
            return Err(PadeError::InvalidParameter("seeds is empty".into()));
        }
        if self.pole_methods.is_empty() || self.residue_methods.is_empty() {
            return Err(PadeError::InvalidParameter("no methods selected".into()));
        }
        if self.repetitions == 0 {
            return Err(PadeError::InvalidParameter("repetitions must be >= 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(PadeError::InvalidParameter("jobs must be >= 1".into()));
        }
        for m in &self.residue_methods {
            m.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Source {
    White { n: usize, seed: u64 },
    Corpus(usize),
}

#[derive(Debug, Clone)]
struct Job {
    source: Source,
    pole_method: PoleMethod,
    residue_method: ResidueMethod,
}

fn jobs(config: &SweepConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &n in &config.n_list {
        for &seed in &config.seeds {
            for &pole_method in &config.pole_methods {
                for &residue_method in &config.residue_methods {
                    out.push(Job {
                        source: Source::White { n, seed },
                        pole_method,
                        residue_method,
                    });
                }
            }
        }
    }
    for i in 0..config.corpus.len() {
        for &pole_method in &config.pole_methods {
            for &residue_method in &config.residue_methods {
                out.push(Job {
                    source: Source::Corpus(i),
                    pole_method,
                    residue_method,
                });
            }
        }
    }
    out
}

/// Median wall-clock seconds of `repetitions` pole computations.
pub fn time_poles(
    signal: &Signal,
    n: usize,
    variant: Variant,
    method: PoleMethod,
    repetitions: usize,
) -> Result<f64> {
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions.max(1) {
        let start = Instant::now();
        compute_poles(signal, n, variant, method)?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok(median(&times))
}

fn failed(flags: &mut Vec<String>, what: &str, e: &PadeError) {
    flags.push(format!("{what}_failed:{}", e.kind()));
}

fn run_job(config: &SweepConfig, job: &Job) -> ErrorReport {
    let (order, source, seed) = match job.source {
        Source::White { n, seed } => (Some(n), format!("white:{seed}"), Some(seed)),
        Source::Corpus(i) => (None, format!("corpus:{}", config.corpus[i].name), None),
    };
    let mut report = ErrorReport {
        n: order.unwrap_or(0),
        variant: config.variant,
        pole_method: job.pole_method,
        residue_method: job.residue_method,
        forward_pole_err: None,
        forward_residue_err: None,
        euler_jacobi_defect: None,
        backward_err: None,
        min_pole_gap: None,
        timing_poles: None,
        flags: Vec::new(),
        source,
        seed,
        rng: RNG_ALGORITHM.to_string(),
    };
    let signal = match job.source {
        Source::White { n, seed } => match white_noise(n, seed) {
            Ok(s) => s,
            Err(e) => {
                failed(&mut report.flags, "signal", &e);
                return report;
            }
        },
        Source::Corpus(i) => config.corpus[i].signal.clone(),
    };
    let opts = AnalysisOptions {
        order,
        variant: config.variant,
        pole_method: job.pole_method,
        residue_method: Some(job.residue_method),
    };
    let analysis = match analyze(&signal, &opts) {
        Ok(a) => a,
        Err(e) => {
            failed(&mut report.flags, "analysis", &e);
            return report;
        }
    };
    let model = &analysis.model;
    report.n = model.n;
    report.flags.extend(analysis.flags.iter().cloned());
    report.min_pole_gap = Some(model.min_pole_gap).filter(|g| g.is_finite());
    match time_poles(&signal, model.n, config.variant, job.pole_method, config.repetitions) {
        Ok(t) => report.timing_poles = Some(t),
        Err(e) => failed(&mut report.flags, "timing", &e),
    }
    if analysis.degenerate {
        return report;
    }
    match euler_jacobi_defect(model) {
        Ok(v) => report.euler_jacobi_defect = Some(v),
        Err(e) => failed(&mut report.flags, "euler_jacobi", &e),
    }
    match backward_error(&signal, model) {
        Ok(v) => report.backward_err = Some(v),
        Err(e) => failed(&mut report.flags, "backward", &e),
    }
    if config.variant == Variant::SubDiagonal {
        let rho = model.residues.as_deref().expect("residues requested");
        match forward_pole_error(&model.poles, rho, job.pole_method) {
            Ok(v) => report.forward_pole_err = Some(v),
            Err(e) => failed(&mut report.flags, "forward_pole", &e),
        }
        match forward_residue_error(&model.poles, rho, job.residue_method, job.pole_method) {
            Ok(v) => report.forward_residue_err = Some(v),
            Err(e) => failed(&mut report.flags, "forward_residue", &e),
        }
    } else {
        report.flags.push("forward_errors_sub_diagonal_only".into());
    }
    report
}

/// Runs every `(n, seed, pole method, residue method)` trial and every
/// corpus signal. Failures become flags; the output order follows the config.
pub fn sweep(config: &SweepConfig) -> Result<Vec<ErrorReport>> {
    config.validate()?;
    let list = jobs(config);
    let run = || list.par_iter().map(|j| run_job(config, j)).collect::<Vec<_>>();
    match config.jobs {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| PadeError::InvalidParameter(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Median pole timing per order and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub pole_method: PoleMethod,
    pub timing_poles: Option<f64>,
    pub failures: usize,
    pub rng: String,
}

/// Timing only, run sequentially; the median is taken over all seeds and
/// repetitions.
pub fn bench(config: &SweepConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        for &method in &config.pole_methods {
            let mut times = Vec::new();
            let mut failures = 0;
            for &seed in &config.seeds {
                let signal = white_noise(n, seed)?;
                for _ in 0..config.repetitions {
                    let start = Instant::now();
                    match compute_poles(&signal, n, config.variant, method) {
                        Ok(_) => times.push(start.elapsed().as_secs_f64()),
                        Err(_) => failures += 1,
                    }
                }
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                n,
                pole_method: method,
                timing_poles: (!times.is_empty()).then(|| median(&times)),
                failures,
                rng: RNG_ALGORITHM.to_string(),
            });
        }
    }
    Ok(rows)
}

/// Whether a report came from a degenerate spectrum.
pub fn is_degenerate(report: &ErrorReport) -> bool {
    report.flags.iter().any(|f| f == FLAG_DEGENERATE)
}
