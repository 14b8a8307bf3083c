//! Config file loading and flag overrides.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};
use crate::report::{OutputFormat, FORMAT_VERSION};

/// Command-line flags that may override config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub h: Option<f64>,
    pub noise: Option<f64>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    /// Fail if a flag outside `allowed` was given.
    pub fn only(&self, command: &str, allowed: &[&str]) -> CliResult<()> {
        let given = [
            ("seed", self.seed.is_some()),
            ("out", self.out.is_some()),
            ("dims", self.dims.is_some()),
            ("trials", self.trials.is_some()),
            ("h", self.h.is_some()),
            ("noise", self.noise.is_some()),
            ("format", self.format.is_some()),
        ];
        for (name, set) in given {
            if set && !allowed.contains(&name) {
                return Err(CliError::Config(format!("--{name} does not apply to `{command}`")));
            }
        }
        Ok(())
    }

    /// Common keys every command accepts.
    pub fn apply_common(&self, out: &mut Option<PathBuf>, format: &mut OutputFormat) {
        if let Some(o) = &self.out {
            *out = Some(o.clone());
        }
        if let Some(f) = self.format {
            *format = f;
        }
    }

    pub fn single_dim(&self) -> CliResult<Option<usize>> {
        match self.dims.as_deref() {
            None => Ok(None),
            Some([d]) => Ok(Some(*d)),
            Some(ds) => Err(CliError::Config(format!(
                "expected a single dimension, got {ds:?}"
            ))),
        }
    }
}

/// Parse a JSON config file, or use defaults when no path is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn check_common(format_version: &str, out: Option<&Path>, format: OutputFormat) -> CliResult<()> {
    if format_version != FORMAT_VERSION {
        return Err(CliError::Config(format!(
            "unsupported format_version `{format_version}`"
        )));
    }
    if let (Some(p), OutputFormat::Both) = (out, format) {
        if p.extension().is_some_and(|e| e == "csv") {
            return Err(CliError::Config(
                "--format both needs a non-.csv output path".into(),
            ));
        }
    }
    Ok(())
}

pub fn default_format_version() -> String {
    FORMAT_VERSION.to_string()
}

pub fn check_dims(dims: &[usize], min: usize) -> CliResult<()> {
    if dims.is_empty() {
        return Err(CliError::Config("no dimensions given".into()));
    }
    if let Some(d) = dims.iter().find(|d| **d < min) {
        return Err(CliError::Config(format!("dimension {d} is below {min}")));
    }
    Ok(())
}

pub fn check_positive(name: &str, v: usize) -> CliResult<()> {
    if v == 0 {
        return Err(CliError::Config(format!("{name} must be at least 1")));
    }
    Ok(())
}
