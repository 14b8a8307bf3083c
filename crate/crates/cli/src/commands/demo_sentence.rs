use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use holodisco::binding::{encode, unbind};
use holodisco::{random_unit, BindingBackend, CleanupMemory, HyperVector, RoleFillerStructure, SeededRng};
use serde::{Deserialize, Serialize};

use crate::config::{check_common, check_dims, check_positive, default_format_version, Overrides};
use crate::error::{CliError, CliResult};
use crate::report::{to_json, Envelope, Output, OutputFormat, Timing};

/// Junpa loves Jen.
pub const SENTENCE: [(&str, &str); 3] = [("agent", "Junpa"), ("patient", "Jen"), ("verb", "loves")];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoRunConfig {
    pub format_version: String,
    /// Roles to extract.
    pub roles: Vec<String>,
    pub filler_dim: usize,
    pub hrr_dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for DemoRunConfig {
    fn default() -> Self {
        Self {
            format_version: default_format_version(),
            roles: SENTENCE.iter().map(|(r, _)| r.to_string()).collect(),
            filler_dim: 64,
            hrr_dim: 1024,
            trials: 100,
            seed: 0,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl DemoRunConfig {
    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        o.only("demo-sentence", &["seed", "out", "dims", "trials", "format"])?;
        o.apply_common(&mut self.out, &mut self.format);
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = o.single_dim()? {
            self.hrr_dim = d;
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        check_common(&self.format_version, self.out.as_deref(), self.format)?;
        check_dims(&[self.hrr_dim, self.filler_dim], 2)?;
        check_positive("trials", self.trials)?;
        if self.roles.is_empty() {
            return Err(CliError::Config("no roles given".into()));
        }
        for (i, r) in self.roles.iter().enumerate() {
            if !SENTENCE.iter().any(|(name, _)| name == r) {
                return Err(CliError::Config(format!(
                    "unknown role `{r}` (expected agent, patient or verb)"
                )));
            }
            if self.roles[..i].contains(r) {
                return Err(CliError::Config(format!("role `{r}` listed twice")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub role: String,
    pub expected: String,
    pub retrieved: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HrrRoleSummary {
    pub role: String,
    pub correct: usize,
    pub fraction_correct: f64,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoPayload {
    pub tensor: Vec<Extraction>,
    pub hrr_dim: usize,
    pub hrr_trials: usize,
    pub hrr: Vec<HrrRoleSummary>,
}

fn extract(
    roles: &[HyperVector],
    fillers: &[HyperVector],
    backend: BindingBackend,
    wanted: &[String],
) -> CliResult<Vec<Extraction>> {
    let encoded = encode(
        &RoleFillerStructure::new(roles.iter().cloned().zip(fillers.iter().cloned()).collect())?,
        backend,
    )?;
    let memory = CleanupMemory::new(
        SENTENCE.iter().zip(fillers).map(|((_, f), v)| (*f, v.clone())),
        -1.0,
    )?;
    wanted
        .iter()
        .map(|w| {
            let i = SENTENCE.iter().position(|(r, _)| r == w).expect("validated role");
            let got = unbind(&encoded, &roles[i], backend)?;
            let hit = memory
                .cleanup(&got)?
                .ok_or_else(|| CliError::Numeric(format!("cleanup returned nothing for {w}")))?;
            Ok(Extraction {
                role: w.clone(),
                expected: SENTENCE[i].1.into(),
                retrieved: hit.name,
                score: hit.score,
            })
        })
        .collect()
}

pub fn run(cfg: &DemoRunConfig) -> CliResult<Output> {
    let start = Instant::now();
    let mut rng = SeededRng::for_trial(cfg.seed, 0);
    let roles = (0..SENTENCE.len())
        .map(|i| HyperVector::basis(SENTENCE.len(), i))
        .collect::<Result<Vec<_>, _>>()?;
    let fillers = (0..SENTENCE.len())
        .map(|_| random_unit(cfg.filler_dim, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let tensor = extract(&roles, &fillers, BindingBackend::Tensor, &cfg.roles)?;

    let backend = BindingBackend::hrr(cfg.hrr_dim)?;
    let mut correct = vec![0usize; cfg.roles.len()];
    let mut scores = vec![0.0; cfg.roles.len()];
    for t in 0..cfg.trials {
        let mut rng = SeededRng::for_trial(cfg.seed, t as u64 + 1);
        let vs = (0..2 * SENTENCE.len())
            .map(|_| random_unit(cfg.hrr_dim, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let (roles, fillers) = vs.split_at(SENTENCE.len());
        for (k, e) in extract(roles, fillers, backend, &cfg.roles)?.into_iter().enumerate() {
            if e.retrieved == e.expected {
                correct[k] += 1;
            }
            scores[k] += e.score;
        }
    }
    let hrr: Vec<HrrRoleSummary> = cfg
        .roles
        .iter()
        .enumerate()
        .map(|(k, r)| HrrRoleSummary {
            role: r.clone(),
            correct: correct[k],
            fraction_correct: correct[k] as f64 / cfg.trials as f64,
            mean_score: scores[k] / cfg.trials as f64,
        })
        .collect();

    let mut table = String::from("backend   role      retrieved  score\n");
    let mut csv = String::from("backend,dim,role,expected,retrieved,score,fraction_correct\n");
    for e in &tensor {
        let _ = writeln!(table, "tensor    {:<9} {:<10} {:.4}", e.role, e.retrieved, e.score);
        let _ = writeln!(csv, "tensor,{},{},{},{},{},", cfg.filler_dim, e.role, e.expected, e.retrieved, e.score);
    }
    for h in &hrr {
        let _ = writeln!(
            table,
            "hrr-{:<5} {:<9} {}/{} correct, mean score {:.4}",
            cfg.hrr_dim, h.role, h.correct, cfg.trials, h.mean_score
        );
        let _ = writeln!(csv, "hrr,{},{},,,{},{}", cfg.hrr_dim, h.role, h.mean_score, h.fraction_correct);
    }
    let payload = DemoPayload {
        tensor,
        hrr_dim: cfg.hrr_dim,
        hrr_trials: cfg.trials,
        hrr,
    };
    let timing = Timing {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        detail: serde_json::Value::Null,
    };
    Ok(Output {
        envelope: Envelope::new("demo-sentence", to_json(cfg)?, timing, to_json(&payload)?),
        csv,
        table,
    })
}
