use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use padez::analysis::{analyze, AnalysisOptions};
use padez::cfrac::Variant;
use padez::diagnostics::{
    backward_error, bench, euler_jacobi_defect, forward_pole_error, forward_residue_error,
    residue_radius_profile, sweep, write_reports_csv, write_reports_jsonl, CorpusSignal,
    ErrorReport, SweepConfig,
};
use padez::residues::ResidueMethod;
use padez::signal::{
    damped_signal, geometric_signal, read_signal_any, white_noise, write_signal_to,
    OscillationParams, Signal, RNG_ALGORITHM,
};
use padez::spectral::PoleMethod;
use padez::PadeError;
use serde_json::{json, Value};

use crate::args::{
    AnalyzeArgs, BenchArgs, Cli, Command, Components, ReportFormat, SweepArgs, SynthKind,
    ValidateArgs,
};

pub const SCHEMA: u32 = 1;

pub enum Status {
    Ok,
    Degenerate,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl From<PadeError> for CliError {
    fn from(e: PadeError) -> Self {
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        PadeError::from(e).into()
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Synth { kind } => synth(kind),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_input(path: &Path) -> Result<Signal> {
    read_signal_any(path).map_err(|e| match e {
        PadeError::Io(m) => PadeError::Io(format!("{}: {m}", path.display())).into(),
        other => other.into(),
    })
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn pairs(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(pair).collect())
}

fn synth(kind: SynthKind) -> Result<Status> {
    let (signal, out) = match kind {
        SynthKind::White { n, seed, out } => (white_noise(n, seed)?, out),
        SynthKind::Damped { components, out } => (components_signal(&components)?, out),
        SynthKind::Mixed {
            components,
            sigma,
            seed,
            out,
        } => {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(PadeError::InvalidParameter(format!(
                    "sigma must be finite and >= 0, got {sigma}"
                ))
                .into());
            }
            let clean = components_signal(&components)?;
            let noise = white_noise(clean.len().div_ceil(2), seed)?;
            let noise = Signal::new(noise.samples()[..clean.len()].to_vec())?;
            (clean.add(&noise.scaled(Complex64::new(sigma, 0.0))?)?, out)
        }
    };
    let mut w = output(out.as_deref())?;
    write_signal_to(&signal, &mut w)?;
    Ok(Status::Ok)
}

fn components_signal(c: &Components) -> Result<Signal> {
    for (index, &value) in c.dampings.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(PadeError::InvalidDamping { index, value }.into());
        }
    }
    let len = c
        .len
        .ok_or_else(|| PadeError::InvalidParameter("--len is required".into()))?;
    if !c.poles.is_empty() {
        if !c.freqs.is_empty() || !c.dampings.is_empty() {
            return Err(PadeError::InvalidParameter(
                "--pole cannot be combined with --freq or --damping".into(),
            )
            .into());
        }
        return Ok(geometric_signal(&c.amps, &c.poles, len)?);
    }
    let params = OscillationParams {
        amplitudes: c.amps.clone(),
        frequencies: c.freqs.clone(),
        dampings: c.dampings.clone(),
        total_time: c.time,
        len,
    };
    Ok(damped_signal(&params)?)
}

fn metric<T>(flags: &mut Vec<String>, what: &str, r: padez::Result<T>) -> Option<T> {
    r.map_err(|e| flags.push(format!("{what}_failed:{}", e.kind()))).ok()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<Status> {
    let signal = read_input(&a.input)?;
    let opts = AnalysisOptions {
        order: a.order.order.0,
        variant: a.order.variant.into(),
        pole_method: a.pole_method,
        residue_method: a.residue_method.0,
    };
    let analysis = analyze(&signal, &opts)?;
    let model = &analysis.model;
    let mut flags = analysis.flags.clone();
    let (mut defect, mut backward) = (None, None);
    if model.residues.is_some() {
        defect = metric(&mut flags, "euler_jacobi", euler_jacobi_defect(model));
        backward = metric(&mut flags, "backward", backward_error(&signal, model));
    }
    if let Some(path) = &a.profile {
        match residue_radius_profile(model, &signal, a.sigma) {
            Ok(p) => {
                let text = serde_json::to_string_pretty(&p).map_err(io::Error::other)?;
                fs::write(path, text)?;
            }
            Err(e) => flags.push(format!("profile_failed:{}", e.kind())),
        }
    }

    let mut w = output(a.out.as_deref())?;
    match a.format {
        ReportFormat::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "variant": model.variant.as_str(),
                "n": model.n,
                "pole_method": a.pole_method.as_str(),
                "residue_method": a.residue_method.0.map(|m| m.to_string()),
                "s0": pair(model.s0),
                "poles": pairs(&model.poles),
                "zeros": model.zeros.as_deref().map(pairs),
                "residues": model.residues.as_deref().map(pairs),
                "metrics": {
                    "min_pole_gap": finite(model.min_pole_gap),
                    "euler_jacobi_defect": defect,
                    "backward_err": backward,
                    "timing_poles": analysis.pole_seconds,
                },
                "flags": flags,
            });
            let text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
            writeln!(w, "{text}")?;
        }
        ReportFormat::Csv => {
            writeln!(w, "index,pole_re,pole_im,radius,residue_re,residue_im,residue_abs")?;
            for (k, z) in model.poles.iter().enumerate() {
                let rho = model.residues.as_ref().map(|r| r[k]);
                let cell = |f: fn(Complex64) -> f64| rho.map(|r| format!("{:e}", f(r))).unwrap_or_default();
                writeln!(
                    w,
                    "{k},{:e},{:e},{:e},{},{},{}",
                    z.re,
                    z.im,
                    z.norm(),
                    cell(|r| r.re),
                    cell(|r| r.im),
                    cell(|r| r.norm())
                )?;
            }
        }
    }
    w.flush()?;
    Ok(if analysis.degenerate {
        Status::Degenerate
    } else {
        Status::Ok
    })
}

const DEFAULT_COMBOS: [(PoleMethod, ResidueMethod); 3] = [
    (PoleMethod::JMatrix, ResidueMethod::VandermondeFull),
    (PoleMethod::JMatrix, ResidueMethod::Product),
    (PoleMethod::Pencil, ResidueMethod::VandermondeFull),
];

fn cmd_validate(a: ValidateArgs) -> Result<Status> {
    let signal = read_input(&a.input)?;
    let combos = if a.combos.is_empty() {
        DEFAULT_COMBOS.to_vec()
    } else {
        a.combos.clone()
    };
    let variant: Variant = a.order.variant.into();
    let mut reports = Vec::new();
    let mut degenerate = false;
    for (pole_method, residue_method) in combos {
        let opts = AnalysisOptions {
            order: a.order.order.0,
            variant,
            pole_method,
            residue_method: Some(residue_method),
        };
        let analysis = analyze(&signal, &opts)?;
        let model = &analysis.model;
        let mut flags = analysis.flags.clone();
        let mut report = ErrorReport {
            n: model.n,
            variant,
            pole_method,
            residue_method,
            forward_pole_err: None,
            forward_residue_err: None,
            euler_jacobi_defect: None,
            backward_err: None,
            min_pole_gap: finite(model.min_pole_gap),
            timing_poles: Some(analysis.pole_seconds),
            flags: Vec::new(),
            source: a.input.display().to_string(),
            seed: None,
            rng: RNG_ALGORITHM.to_string(),
        };
        degenerate |= analysis.degenerate;
        if let Some(rho) = model.residues.as_deref() {
            report.euler_jacobi_defect = metric(&mut flags, "euler_jacobi", euler_jacobi_defect(model));
            report.backward_err = metric(&mut flags, "backward", backward_error(&signal, model));
            if variant == Variant::SubDiagonal {
                report.forward_pole_err =
                    metric(&mut flags, "forward_pole", forward_pole_error(&model.poles, rho, pole_method));
                report.forward_residue_err = metric(
                    &mut flags,
                    "forward_residue",
                    forward_residue_error(&model.poles, rho, residue_method, pole_method),
                );
            } else {
                flags.push("forward_errors_sub_diagonal_only".into());
            }
        }
        report.flags = flags;
        reports.push(report);
    }
    write_reports(&reports, a.format, a.out.as_deref())?;
    Ok(if degenerate {
        Status::Degenerate
    } else {
        Status::Ok
    })
}

fn write_reports(reports: &[ErrorReport], format: ReportFormat, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    match format {
        ReportFormat::Json => write_reports_jsonl(reports, &mut w)?,
        ReportFormat::Csv => write_reports_csv(reports, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn read_config(path: &Path) -> Result<SweepConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| PadeError::Io(format!("{}: {e}", path.display())))?;
    let config: SweepConfig = serde_json::from_str(&text).map_err(|e| PadeError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    Ok(config)
}

fn corpus_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_sweep(a: SweepArgs) -> Result<Status> {
    let mut config = read_config(&a.config)?;
    if a.jobs.is_some() {
        config.jobs = a.jobs;
    }
    for path in &a.corpus {
        config.corpus.push(CorpusSignal {
            name: corpus_name(path),
            signal: read_input(path)?,
        });
    }
    let reports = sweep(&config)?;
    write_reports(&reports, a.format, a.out.as_deref())?;
    Ok(Status::Ok)
}

fn cmd_bench(a: BenchArgs) -> Result<Status> {
    let config = read_config(&a.config)?;
    let rows = bench(&config)?;
    let mut w = output(a.out.as_deref())?;
    for row in rows {
        let line = serde_json::to_string(&row).map_err(io::Error::other)?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(Status::Ok)
}
