//! Finite complex data sequences: construction, synthetic generators and file I/O.
//!
//! Two on-disk formats are supported. The CSV format holds one sample per
//! line as `re,im` in scientific notation with 17 significant digits, and
//! lines starting with `#` are comments. The JSON mirror is
//! `{"samples": [[re, im], ...]}`.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};

/// Name of the generator behind [`white_noise`], recorded in sweep reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/StandardNormal-ziggurat";

/// A finite complex sequence `s_0, ..., s_{N-1}` with `N >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(PadeError::InvalidLength(format!(
                "signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(index) = samples
            .iter()
            .position(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(PadeError::NonFinite { index });
        }
        Ok(Self { samples })
    }

    /// Builds a signal from real values (imaginary parts zero).
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Root-mean-square amplitude.
    pub fn rms(&self) -> f64 {
        let ss: f64 = self.samples.iter().map(|s| s.norm_sqr()).sum();
        (ss / self.samples.len() as f64).sqrt()
    }

    /// Multiplies every sample by `alpha`.
    pub fn scaled(&self, alpha: Complex64) -> Result<Self> {
        Self::new(self.samples.iter().map(|s| s * alpha).collect())
    }

    /// Sample-wise sum of two signals of equal length.
    pub fn add(&self, other: &Signal) -> Result<Self> {
        if self.len() != other.len() {
            return Err(PadeError::InvalidLength(format!(
                "cannot add signals of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Self::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Parameters of a finite sum of damped oscillations
/// `s_k = sum_p A_p exp(i gamma_p k)`, `gamma_p = (2 pi f_p + i b_p) T / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationParams {
    pub amplitudes: Vec<Complex64>,
    pub frequencies: Vec<f64>,
    pub dampings: Vec<f64>,
    pub total_time: f64,
    pub len: usize,
}

impl OscillationParams {
    pub fn validate(&self) -> Result<()> {
        let p = self.amplitudes.len();
        if p == 0 {
            return Err(PadeError::InvalidParameter(
                "at least one oscillation component is required".into(),
            ));
        }
        if self.frequencies.len() != p || self.dampings.len() != p {
            return Err(PadeError::InvalidParameter(format!(
                "component count mismatch: {} amplitudes, {} frequencies, {} dampings",
                p,
                self.frequencies.len(),
                self.dampings.len()
            )));
        }
        for (index, &b) in self.dampings.iter().enumerate() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(PadeError::InvalidDamping { index, value: b });
            }
        }
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(PadeError::InvalidParameter(format!(
                "total time must be positive, got {}",
                self.total_time
            )));
        }
        if self.len < 2 {
            return Err(PadeError::InvalidLength(format!(
                "signal needs at least 2 samples, got {}",
                self.len
            )));
        }
        Ok(())
    }

    /// Per-sample ratios `exp(i gamma_p)` of each component.
    pub fn poles(&self) -> Vec<Complex64> {
        let step = self.total_time / self.len as f64;
        self.frequencies
            .iter()
            .zip(&self.dampings)
            .map(|(&f, &b)| {
                let gamma = Complex64::new(2.0 * PI * f, b) * step;
                (Complex64::i() * gamma).exp()
            })
            .collect()
    }
}

/// Complex Gaussian white noise of length `2n`; real and imaginary parts are
/// independent N(0, 1) draws.
pub fn white_noise(n: usize, seed: u64) -> Result<Signal> {
    if n == 0 {
        return Err(PadeError::InvalidLength("white noise order must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..2 * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    Signal::new(samples)
}

/// Sum of damped oscillations described by `params`.
pub fn damped_signal(params: &OscillationParams) -> Result<Signal> {
    params.validate()?;
    geometric_signal(&params.amplitudes, &params.poles(), params.len)
}

/// `s_k = sum_p A_p z_p^k` for `k = 0..len`, with no restriction on `|z_p|`.
pub fn geometric_signal(
    amplitudes: &[Complex64],
    poles: &[Complex64],
    len: usize,
) -> Result<Signal> {
    if amplitudes.is_empty() || amplitudes.len() != poles.len() {
        return Err(PadeError::InvalidParameter(format!(
            "need matching non-empty amplitude and pole lists, got {} and {}",
            amplitudes.len(),
            poles.len()
        )));
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); len];
    for (&a, &z) in amplitudes.iter().zip(poles) {
        let mut term = a;
        for s in samples.iter_mut() {
            *s += term;
            term *= z;
        }
    }
    Signal::new(samples)
}

/// Writes `signal` as CSV, one `re,im` pair per line.
pub fn write_signal(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    write_signal_to(signal, fs::File::create(path)?)
}

/// [`write_signal`] into any writer.
pub fn write_signal_to(signal: &Signal, out: impl Write) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    for s in signal.samples() {
        writeln!(out, "{:.16e},{:.16e}", s.re, s.im)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV signal written by [`write_signal`] (or by hand).
pub fn read_signal(path: impl AsRef<Path>) -> Result<Signal> {
    let text = fs::read_to_string(path)?;
    parse_signal_csv(&text)
}

pub fn parse_signal_csv(text: &str) -> Result<Signal> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PadeError::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(PadeError::Parse {
                line,
                message: format!("expected 2 fields `re,im`, got {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| PadeError::Parse {
                line,
                message: format!("field {} `{}`: {}", i + 1, &record[i], e),
            })
        };
        let value = Complex64::new(field(0)?, field(1)?);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(PadeError::NonFinite {
                index: samples.len(),
            });
        }
        samples.push(value);
    }
    Signal::new(samples)
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    samples: Vec<[f64; 2]>,
}

pub fn signal_to_json(signal: &Signal) -> String {
    let doc = SignalJson {
        samples: signal.samples().iter().map(|s| [s.re, s.im]).collect(),
    };
    serde_json::to_string(&doc).expect("finite samples always serialize")
}

pub fn signal_from_json(text: &str) -> Result<Signal> {
    let doc: SignalJson = serde_json::from_str(text).map_err(|e| PadeError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    Signal::new(
        doc.samples
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

/// Reads a signal, choosing the JSON mirror format for `.json` paths.
pub fn read_signal_any(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        signal_from_json(&fs::read_to_string(path)?)
    } else {
        read_signal(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn white_noise_is_deterministic() {
        let a = white_noise(4, 7).unwrap();
        let b = white_noise(4, 7).unwrap();
        assert_eq!(a.len(), 8);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        assert_ne!(a, white_noise(4, 8).unwrap());
    }

    #[test]
    fn white_noise_rejects_zero_order() {
        assert!(matches!(white_noise(0, 1), Err(PadeError::InvalidLength(_))));
    }

    #[test]
    fn white_noise_real_mean_is_small() {
        let n = 1000;
        let bound = 5.0 / ((2 * n) as f64).sqrt();
        for seed in 0..100 {
            let s = white_noise(n, seed).unwrap();
            let mean: f64 = s.samples().iter().map(|v| v.re).sum::<f64>() / (2 * n) as f64;
            assert!(mean.abs() < bound, "seed {seed}: mean {mean}");
        }
    }

    #[test]
    fn white_noise_has_unit_variance_per_component() {
        let s = white_noise(20_000, 3).unwrap();
        let m = s.len() as f64;
        let var_re: f64 = s.samples().iter().map(|v| v.re * v.re).sum::<f64>() / m;
        let var_im: f64 = s.samples().iter().map(|v| v.im * v.im).sum::<f64>() / m;
        assert!((var_re - 1.0).abs() < 0.05, "{var_re}");
        assert!((var_im - 1.0).abs() < 0.05, "{var_im}");
    }

    #[test]
    fn zero_damping_rejected() {
        let p = OscillationParams {
            amplitudes: vec![c(1.0, 0.0)],
            frequencies: vec![0.0],
            dampings: vec![0.0],
            total_time: 1.0,
            len: 8,
        };
        assert!(matches!(
            damped_signal(&p),
            Err(PadeError::InvalidDamping { index: 0, .. })
        ));
    }

    #[test]
    fn single_damped_component_decays() {
        let p = OscillationParams {
            amplitudes: vec![c(2.0, 1.0)],
            frequencies: vec![0.3],
            dampings: vec![0.5],
            total_time: 10.0,
            len: 32,
        };
        let s = damped_signal(&p).unwrap();
        let a = c(2.0, 1.0).norm();
        for (k, v) in s.samples().iter().enumerate() {
            let expected = a * (-0.5 * 10.0 * k as f64 / 32.0).exp();
            assert!((v.norm() - expected).abs() < 1e-12 * a);
        }
        assert!(s.samples().windows(2).all(|w| w[1].norm() < w[0].norm()));
    }

    #[test]
    fn damped_signal_halving_ratio() {
        // exp(i gamma) = 1/2 with f = 0 requires b T / N = ln 2.
        let p = OscillationParams {
            amplitudes: vec![c(2.0, 0.0)],
            frequencies: vec![0.0],
            dampings: vec![std::f64::consts::LN_2],
            total_time: 6.0,
            len: 6,
        };
        let s = damped_signal(&p).unwrap();
        for (k, v) in s.samples().iter().enumerate() {
            let expected = 2.0 * 0.5f64.powi(k as i32);
            assert!((v - c(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn two_term_geometric() {
        let s = geometric_signal(&[c(3.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0), c(-1.0, 0.0)], 6)
            .unwrap();
        // 3 * 2^k + (-1)^k
        let expected = [4.0, 5.0, 13.0, 23.0, 49.0, 95.0];
        for (v, e) in s.samples().iter().zip(expected) {
            assert_eq!(*v, c(e, 0.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = Signal::new(vec![c(1.0, 2.0), c(0.0, -3.0), c(0.1, -1e-300), c(-0.0, 1.0 / 3.0)])
            .unwrap();
        write_signal(&s, &path).unwrap();
        let back = read_signal(&path).unwrap();
        for (x, y) in s.samples().iter().zip(back.samples()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn csv_malformed_line_reports_line_number() {
        let err = parse_signal_csv("abc,1\n1,2\n").unwrap_err();
        assert!(matches!(err, PadeError::Parse { line: 1, .. }), "{err:?}");
        let err = parse_signal_csv("# header\n1,2\n3\n").unwrap_err();
        assert!(matches!(err, PadeError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn csv_skips_comments() {
        let s = parse_signal_csv("# n=2\n1,0\n2,0\n3,0\n4,0\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.samples()[3], c(4.0, 0.0));
    }

    #[test]
    fn csv_rejects_non_finite() {
        let err = parse_signal_csv("1,0\nNaN,0\n").unwrap_err();
        assert!(matches!(err, PadeError::NonFinite { index: 1 }), "{err:?}");
    }

    #[test]
    fn json_mirror_round_trip() {
        let s = Signal::new(vec![c(1.0, 2.0), c(0.0, -3.0)]).unwrap();
        let text = signal_to_json(&s);
        assert_eq!(text, r#"{"samples":[[1.0,2.0],[0.0,-3.0]]}"#);
        assert_eq!(signal_from_json(&text).unwrap(), s);
    }

    #[test]
    fn short_signal_rejected() {
        assert!(matches!(
            Signal::new(vec![c(1.0, 0.0)]),
            Err(PadeError::InvalidLength(_))
        ));
    }
}
