use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use padez::cfrac::Variant;
use padez::residues::ResidueMethod;
use padez::spectral::PoleMethod;

#[derive(Debug, Parser)]
#[command(name = "padez", version, about = "Pade approximants of the Z-transform of finite sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic signal as CSV.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Poles, zeros, residues and metrics of one signal.
    Analyze(AnalyzeArgs),
    /// Error diagnostics for several method combinations on one signal.
    Validate(ValidateArgs),
    /// Monte Carlo error sweep driven by a JSON config.
    Sweep(SweepArgs),
    /// Pole timing driven by a JSON config.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Complex Gaussian white noise of length 2n.
    White {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum of geometric or damped oscillatory components.
    Damped {
        #[command(flatten)]
        components: Components,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Damped components plus scaled white noise.
    Mixed {
        #[command(flatten)]
        components: Components,
        /// Noise amplitude.
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Components {
    /// Complex amplitude per component, e.g. `3` or `1-2i`.
    #[arg(long = "amp", value_parser = parse_complex, allow_hyphen_values = true)]
    pub amps: Vec<Complex64>,
    /// Per-sample ratio per component; replaces --freq and --damping.
    #[arg(long = "pole", value_parser = parse_complex, allow_hyphen_values = true)]
    pub poles: Vec<Complex64>,
    #[arg(long = "freq", allow_hyphen_values = true)]
    pub freqs: Vec<f64>,
    #[arg(long = "damping", allow_hyphen_values = true)]
    pub dampings: Vec<f64>,
    /// Total observation time.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long)]
    pub len: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    SubDiagonal,
    Diagonal,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::SubDiagonal => Variant::SubDiagonal,
            VariantArg::Diagonal => Variant::Diagonal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    /// Approximant order or `auto` to use every sample.
    #[arg(long, default_value = "auto", value_parser = parse_order)]
    pub order: Order,
    #[arg(long, value_enum, default_value_t = VariantArg::SubDiagonal)]
    pub variant: VariantArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Order(pub Option<usize>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueChoice(pub Option<ResidueMethod>);

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long = "poles", default_value = "jmatrix", value_parser = parse_pole_method)]
    pub pole_method: PoleMethod,
    /// Residue method, or `none` to skip residues.
    #[arg(long = "residues", default_value = "vandermonde_full", value_parser = parse_residue_method)]
    pub residue_method: ResidueChoice,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the residue-radius profile as JSON.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Noise amplitude for the profile; defaults to the signal RMS.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub order: OrderArgs,
    /// `pole_method:residue_method`; repeatable.
    #[arg(long = "combo", value_parser = parse_combo)]
    pub combos: Vec<(PoleMethod, ResidueMethod)>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Extra signal files analyzed at automatic order.
    #[arg(long)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| format!("`{s}` is not a complex number"))
}

fn parse_order(s: &str) -> Result<Order, String> {
    if s == "auto" {
        return Ok(Order(None));
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Order(Some(n))),
        _ => Err(format!("order must be `auto` or a positive integer, got `{s}`")),
    }
}

fn parse_pole_method(s: &str) -> Result<PoleMethod, String> {
    s.parse().map_err(|e: padez::PadeError| e.to_string())
}

fn parse_residue_method(s: &str) -> Result<ResidueChoice, String> {
    if s == "none" {
        return Ok(ResidueChoice(None));
    }
    s.parse()
        .map(|m| ResidueChoice(Some(m)))
        .map_err(|e: padez::PadeError| e.to_string())
}

fn parse_combo(s: &str) -> Result<(PoleMethod, ResidueMethod), String> {
    let (p, r) = s
        .split_once(':')
        .ok_or_else(|| format!("combo `{s}` must look like `jmatrix:product`"))?;
    let r = parse_residue_method(r)?.0.ok_or("combo needs a residue method")?;
    Ok((parse_pole_method(p)?, r))
}
