use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use holodisco::{circ_conv_fft, circ_conv_naive, random_unit, HyperVector, SeededRng};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{check_common, check_dims, check_positive, default_format_version, Overrides};
use crate::error::{CliError, CliResult};
use crate::report::{to_json, Envelope, Output, OutputFormat, Timing};

pub const CSV_HEADER: &str = "dim,max_abs_diff,naive_median_us,fft_median_us";

pub type Kernel = fn(&HyperVector, &HyperVector) -> holodisco::Result<HyperVector>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchRunConfig {
    pub format_version: String,
    pub dims: Vec<usize>,
    /// Timing repeats per kernel; the median is reported.
    pub repeats: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for BenchRunConfig {
    fn default() -> Self {
        Self {
            format_version: default_format_version(),
            dims: vec![64, 128, 256, 512, 1024, 2048, 4096],
            repeats: 5,
            tolerance: 1e-9,
            seed: 0,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl BenchRunConfig {
    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        o.only("bench", &["seed", "out", "dims", "trials", "format"])?;
        o.apply_common(&mut self.out, &mut self.format);
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.dims {
            self.dims = d.clone();
        }
        if let Some(t) = o.trials {
            self.repeats = t;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        check_common(&self.format_version, self.out.as_deref(), self.format)?;
        check_dims(&self.dims, 1)?;
        check_positive("repeats", self.repeats)?;
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(CliError::Config(format!("tolerance {} must be positive", self.tolerance)));
        }
        Ok(())
    }

    /// Requested dims with repeats dropped, first occurrence kept.
    pub fn sweep(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for d in &self.dims {
            if !out.contains(d) {
                out.push(*d);
            }
        }
        out
    }
}

/// Deterministic part of a sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub dim: usize,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTiming {
    pub dim: usize,
    pub naive_median_us: f64,
    pub fft_median_us: f64,
}

fn median_us(kernel: Kernel, a: &HyperVector, b: &HyperVector, repeats: usize) -> CliResult<f64> {
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        std::hint::black_box(kernel(std::hint::black_box(a), std::hint::black_box(b))?);
        times.push(t.elapsed().as_secs_f64() * 1e6);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    Ok(if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    })
}

/// Check agreement for every dim before timing anything.
pub fn run_with(cfg: &BenchRunConfig, naive: Kernel, fft: Kernel) -> CliResult<(Vec<Agreement>, Vec<BenchTiming>)> {
    let dims = cfg.sweep();
    let mut inputs = Vec::with_capacity(dims.len());
    let mut agreement = Vec::with_capacity(dims.len());
    for (i, &dim) in dims.iter().enumerate() {
        let mut rng = SeededRng::for_trial(cfg.seed, i as u64);
        let a = random_unit(dim, &mut rng)?;
        let b = random_unit(dim, &mut rng)?;
        let diff = naive(&a, &b)?.max_abs_diff(&fft(&a, &b)?)?;
        if !(diff <= cfg.tolerance) {
            return Err(CliError::Numeric(format!(
                "naive and FFT convolution differ by {diff:e} at dim {dim} (tolerance {:e})",
                cfg.tolerance
            )));
        }
        agreement.push(Agreement { dim, max_abs_diff: diff });
        inputs.push((a, b));
    }
    let mut timings = Vec::with_capacity(dims.len());
    for (&dim, (a, b)) in dims.iter().zip(&inputs) {
        timings.push(BenchTiming {
            dim,
            naive_median_us: median_us(naive, a, b, cfg.repeats)?,
            fft_median_us: median_us(fft, a, b, cfg.repeats)?,
        });
    }
    Ok((agreement, timings))
}

pub fn run(cfg: &BenchRunConfig) -> CliResult<Output> {
    let start = Instant::now();
    let (agreement, timings) = run_with(cfg, circ_conv_naive, circ_conv_fft)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut table = String::from("dim     naive_us     fft_us   max_abs_diff\n");
    for (a, t) in agreement.iter().zip(&timings) {
        let _ = writeln!(csv, "{},{},{},{}", a.dim, a.max_abs_diff, t.naive_median_us, t.fft_median_us);
        let _ = writeln!(
            table,
            "{:<7} {:>10.1} {:>10.1}   {:.1e}",
            a.dim, t.naive_median_us, t.fft_median_us, a.max_abs_diff
        );
    }
    // Timings vary run to run, so they live in the envelope timing block.
    let timing = Timing {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        detail: json!({ "kernels": to_json(&timings)? }),
    };
    Ok(Output {
        envelope: Envelope::new("bench", to_json(cfg)?, timing, json!({ "agreement": to_json(&agreement)? })),
        csv,
        table,
    })
}
