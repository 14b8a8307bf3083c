use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use holodisco::learning::{
    train, GroundTruthWorld, LearnerConfig, LearnerState, LearningCurve, Phrase, TrainConfig,
    ACCURACY,
};
use holodisco::petfish::BackendKind;
use holodisco::{BindingBackend, SeededRng};
use serde::{Deserialize, Serialize};

use crate::config::{check_common, check_dims, default_format_version, Overrides};
use crate::error::{CliError, CliResult};
use crate::report::{to_json, write_atomic, Envelope, Output, OutputFormat, Timing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedPhrase {
    pub phrase: Phrase,
    pub weight: f64,
}

/// The 2×2 grid {red, blue} × {car, apple}, uniform.
pub fn default_phrases() -> Vec<WeightedPhrase> {
    let mut out = Vec::new();
    for adj in ["red", "blue"] {
        for noun in ["car", "apple"] {
            out.push(WeightedPhrase {
                phrase: Phrase::adj_noun(adj, noun),
                weight: 0.25,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnRunConfig {
    pub format_version: String,
    pub backend: BackendKind,
    pub dim: usize,
    pub phrases: Vec<WeightedPhrase>,
    pub noise_sigma: f64,
    pub learner: LearnerConfig,
    pub training: TrainConfig,
    pub seed: u64,
    /// Learned lexicon is saved here after training.
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for LearnRunConfig {
    fn default() -> Self {
        Self {
            format_version: default_format_version(),
            backend: BackendKind::Tensor,
            dim: 512,
            phrases: default_phrases(),
            noise_sigma: 0.05,
            learner: LearnerConfig::default(),
            training: TrainConfig::default(),
            seed: 0,
            checkpoint: None,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl LearnRunConfig {
    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        o.only("learn", &["seed", "out", "dims", "h", "noise", "format"])?;
        o.apply_common(&mut self.out, &mut self.format);
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = o.single_dim()? {
            self.dim = d;
        }
        if let Some(h) = o.h {
            self.learner.h = h;
        }
        if let Some(n) = o.noise {
            self.noise_sigma = n;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        check_common(&self.format_version, self.out.as_deref(), self.format)?;
        check_dims(&[self.dim], 2)?;
        self.learner.validate()?;
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(CliError::Config(format!("noise_sigma {} must be ≥ 0", self.noise_sigma)));
        }
        if !(-1.0..=1.0).contains(&self.training.retrieval_threshold) {
            return Err(CliError::Config(format!(
                "retrieval_threshold {} outside [-1, 1]",
                self.training.retrieval_threshold
            )));
        }
        if self.phrases.is_empty() {
            return Err(CliError::Config("no phrases given".into()));
        }
        let total: f64 = self.phrases.iter().map(|p| p.weight).sum();
        if self.phrases.iter().any(|p| !(p.weight.is_finite() && p.weight >= 0.0))
            || (total - 1.0).abs() > 1e-9
        {
            return Err(CliError::Config(format!(
                "phrase weights must be non-negative and sum to 1 (sum {total})"
            )));
        }
        Ok(())
    }

    pub fn binding_backend(&self) -> CliResult<BindingBackend> {
        Ok(match self.backend {
            BackendKind::Tensor => BindingBackend::Tensor,
            BackendKind::Hrr => BindingBackend::hrr(self.dim)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnPayload {
    pub final_accuracy: f64,
    pub presentations: u64,
    pub curve: LearningCurve,
}

pub fn run(cfg: &LearnRunConfig) -> CliResult<Output> {
    let start = Instant::now();
    let backend = cfg.binding_backend()?;
    let phrases = cfg.phrases.iter().map(|p| (p.phrase.clone(), p.weight)).collect();
    let mut world_rng = SeededRng::for_trial(cfg.seed, 1);
    let world = GroundTruthWorld::random(backend, cfg.dim, phrases, cfg.noise_sigma, &mut world_rng)?;
    let mut state = LearnerState::new(backend, cfg.dim, cfg.learner.clone())?;
    let mut stream = SeededRng::for_trial(cfg.seed, 2);
    let curve = train(&world, &mut state, &cfg.training, &mut stream)?;
    let final_accuracy = curve
        .final_accuracy()
        .ok_or_else(|| CliError::Numeric("learning curve has no accuracy row".into()))?;
    if let Some(path) = &cfg.checkpoint {
        let doc = state.checkpoint(cfg.seed);
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Numeric(format!("checkpoint: {e}")))?;
        write_atomic(path, &(text + "\n"))?;
    }
    let mut table = String::from("epoch  accuracy\n");
    for (epoch, acc) in curve.metric("*", ACCURACY) {
        let _ = writeln!(table, "{epoch:<6} {acc:.3}");
    }
    let payload = LearnPayload {
        final_accuracy,
        presentations: state.presentations(),
        curve,
    };
    let timing = Timing {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        detail: serde_json::Value::Null,
    };
    Ok(Output {
        csv: payload.curve.to_csv(),
        envelope: Envelope::new("learn", to_json(cfg)?, timing, to_json(&payload)?),
        table,
    })
}
