use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use holodisco::binding::{encode, unbind};
use holodisco::petfish::BackendKind;
use holodisco::{cosine, random_unit, BindingBackend, CleanupMemory, RoleFillerStructure, SeededRng};
use serde::{Deserialize, Serialize};

use crate::config::{check_common, check_dims, check_positive, default_format_version, Overrides};
use crate::error::{CliError, CliResult};
use crate::report::{to_json, Envelope, Output, OutputFormat, Timing};

pub const CSV_HEADER: &str = "dim,m,mean_cosine,std_cosine,cleanup_accuracy";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityRunConfig {
    pub format_version: String,
    pub backend: BackendKind,
    pub dims: Vec<usize>,
    /// Bound-pair counts.
    pub pairs: Vec<usize>,
    pub trials: usize,
    /// Random vectors added to the cleanup vocabulary besides the fillers.
    pub distractors: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for CapacityRunConfig {
    fn default() -> Self {
        Self {
            format_version: default_format_version(),
            backend: BackendKind::Hrr,
            dims: vec![128, 512, 2048],
            pairs: vec![1, 2, 4, 8],
            trials: 100,
            distractors: 100,
            seed: 0,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl CapacityRunConfig {
    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        o.only("capacity", &["seed", "out", "dims", "trials", "format"])?;
        o.apply_common(&mut self.out, &mut self.format);
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.dims {
            self.dims = d.clone();
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        check_common(&self.format_version, self.out.as_deref(), self.format)?;
        check_dims(&self.dims, 2)?;
        check_positive("trials", self.trials)?;
        if self.pairs.is_empty() {
            return Err(CliError::Config("no pair counts given".into()));
        }
        for m in &self.pairs {
            check_positive("pair count", *m)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub dim: usize,
    pub m: usize,
    pub mean_cosine: f64,
    pub std_cosine: f64,
    pub cleanup_accuracy: f64,
}

/// Bind `m` random (role, filler) pairs, unbind every role, and score the
/// recovered filler by cosine and by cleanup against fillers plus distractors.
pub fn measure(
    backend: BindingBackend,
    dim: usize,
    m: usize,
    trials: usize,
    distractors: usize,
    rng: &mut SeededRng,
) -> CliResult<CapacityRow> {
    let mut cosines = Vec::with_capacity(trials * m);
    let mut hits = 0usize;
    for _ in 0..trials {
        let roles = (0..m).map(|_| random_unit(dim, rng)).collect::<Result<Vec<_>, _>>()?;
        let fillers = (0..m).map(|_| random_unit(dim, rng)).collect::<Result<Vec<_>, _>>()?;
        let encoded = encode(
            &RoleFillerStructure::new(roles.iter().cloned().zip(fillers.iter().cloned()).collect())?,
            backend,
        )?;
        let mut vocab: Vec<(String, _)> =
            fillers.iter().enumerate().map(|(i, f)| (format!("f{i}"), f.clone())).collect();
        for j in 0..distractors {
            vocab.push((format!("d{j}"), random_unit(dim, rng)?));
        }
        let memory = CleanupMemory::new(vocab, -1.0)?;
        for (i, (role, filler)) in roles.iter().zip(&fillers).enumerate() {
            let got = unbind(&encoded, role, backend)?;
            cosines.push(cosine(&got, filler)?);
            if memory.cleanup(&got)?.is_some_and(|hit| hit.name == format!("f{i}")) {
                hits += 1;
            }
        }
    }
    let n = cosines.len() as f64;
    let mean = cosines.iter().sum::<f64>() / n;
    let var = cosines.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
    Ok(CapacityRow {
        dim,
        m,
        mean_cosine: mean,
        std_cosine: var.sqrt(),
        cleanup_accuracy: hits as f64 / n,
    })
}

pub fn to_csv(rows: &[CapacityRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.dim, r.m, r.mean_cosine, r.std_cosine, r.cleanup_accuracy
        );
    }
    out
}

pub fn run(cfg: &CapacityRunConfig) -> CliResult<Output> {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &dim in &cfg.dims {
        let backend = match cfg.backend {
            BackendKind::Tensor => BindingBackend::Tensor,
            BackendKind::Hrr => BindingBackend::hrr(dim)?,
        };
        for &m in &cfg.pairs {
            let mut rng = SeededRng::for_trial(cfg.seed, cell);
            cell += 1;
            rows.push(measure(backend, dim, m, cfg.trials, cfg.distractors, &mut rng)?);
        }
    }
    if let Some(r) = rows.iter().find(|r| !(0.0..=1.0).contains(&r.cleanup_accuracy)) {
        return Err(CliError::Numeric(format!("accuracy {} outside [0, 1]", r.cleanup_accuracy)));
    }
    let mut table = String::from("dim    m   mean_cos  std_cos  accuracy\n");
    for r in &rows {
        let _ = writeln!(
            table,
            "{:<6} {:<3} {:.4}    {:.4}   {:.3}",
            r.dim, r.m, r.mean_cosine, r.std_cosine, r.cleanup_accuracy
        );
    }
    let timing = Timing {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        detail: serde_json::Value::Null,
    };
    Ok(Output {
        csv: to_csv(&rows),
        envelope: Envelope::new("capacity", to_json(cfg)?, timing, to_json(&rows)?),
        table,
    })
}
