use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use holodisco::petfish::{run_petfish, BackendKind, PetfishConfig, RankingReport};
use serde::{Deserialize, Serialize};

use crate::config::{check_common, check_dims, check_positive, default_format_version, Overrides};
use crate::error::CliResult;
use crate::report::{to_json, Envelope, Output, OutputFormat, Timing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PetfishRunConfig {
    pub format_version: String,
    pub backends: Vec<BackendKind>,
    pub hrr_dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub normalize_outputs: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for PetfishRunConfig {
    fn default() -> Self {
        let p = PetfishConfig::default();
        Self {
            format_version: default_format_version(),
            backends: p.backends,
            hrr_dims: p.hrr_dims,
            trials: p.trials,
            seed: p.seed,
            normalize_outputs: p.normalize_outputs,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl PetfishRunConfig {
    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        o.only("petfish", &["seed", "out", "dims", "trials", "format"])?;
        o.apply_common(&mut self.out, &mut self.format);
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.dims {
            self.hrr_dims = d.clone();
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        check_common(&self.format_version, self.out.as_deref(), self.format)?;
        check_positive("trials", self.trials)?;
        if self.backends.contains(&BackendKind::Hrr) {
            check_dims(&self.hrr_dims, 2)?;
        }
        self.experiment().validate()?;
        Ok(())
    }

    pub fn experiment(&self) -> PetfishConfig {
        PetfishConfig {
            backends: self.backends.clone(),
            hrr_dims: self.hrr_dims.clone(),
            trials: self.trials,
            seed: self.seed,
            normalize_outputs: self.normalize_outputs,
        }
    }
}

pub fn winner_table(report: &RankingReport) -> String {
    let mut t = String::from("group        animal    winner     frequency\n");
    for (group, animal, winner, f) in report.winners() {
        let _ = writeln!(t, "{group:<12} {animal:<9} {winner:<10} {f:.3}");
    }
    for w in &report.aggregates.wishes {
        let _ = writeln!(
            t,
            "wish {}: pet {} -> {} (observed {}, {:.3})",
            w.group, w.animal, w.wished, w.observed, w.wished_frequency
        );
    }
    t
}

pub fn run(cfg: &PetfishRunConfig) -> CliResult<Output> {
    let start = Instant::now();
    let report = run_petfish(&cfg.experiment())?;
    report.validate()?;
    let timing = Timing {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        detail: serde_json::Value::Null,
    };
    Ok(Output {
        envelope: Envelope::new("petfish", to_json(cfg)?, timing, to_json(&report)?),
        csv: report.to_csv(),
        table: winner_table(&report),
    })
}
