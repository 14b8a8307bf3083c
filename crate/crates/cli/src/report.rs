//! Report envelope and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: &str = "1";
pub const TOOL: &str = "holodisco";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: f64,
    /// Command-specific measurements (benchmark medians).
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope {
    pub format_version: String,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub timing: Timing,
    pub payload: Value,
}

impl Envelope {
    pub fn new(command: &str, config: Value, timing: Timing, payload: Value) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            tool: TOOL.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            timing,
            payload,
        }
    }
}

/// Everything a command produced, before it is written anywhere.
pub struct Output {
    pub envelope: Envelope,
    pub csv: String,
    /// Human-readable summary for standard output.
    pub table: String,
}

pub fn to_json<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Numeric(format!("serialization: {e}")))
}

/// Write via a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// Write files per `format`, or print to standard output when `out` is absent.
pub fn emit(output: &Output, out: Option<&Path>, format: OutputFormat) -> CliResult<()> {
    let json = serde_json::to_string_pretty(&output.envelope)
        .map_err(|e| CliError::Numeric(format!("serialization: {e}")))?;
    match out {
        None => match format {
            OutputFormat::Csv => print!("{}", output.csv),
            _ => println!("{json}"),
        },
        Some(path) => {
            match format {
                OutputFormat::Json => write_atomic(path, &(json + "\n"))?,
                OutputFormat::Csv => write_atomic(path, &output.csv)?,
                OutputFormat::Both => {
                    write_atomic(path, &(json + "\n"))?;
                    write_atomic(&csv_path(path), &output.csv)?;
                }
            }
            print!("{}", output.table);
        }
    }
    Ok(())
}
