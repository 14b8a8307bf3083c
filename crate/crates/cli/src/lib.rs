//! Command-line experiment harness for `holodisco`.
//!
//! Every command reads an optional JSON config, applies flag overrides,
//! validates, runs, and emits a versioned report envelope whose `config`
//! field is the fully resolved configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::Path;

use serde::de::DeserializeOwned;

use commands::{bench, capacity, demo_sentence, learn, petfish};
use config::{load, Overrides};
use error::CliResult;
use report::{emit, Output, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Petfish,
    Learn,
    Capacity,
    Bench,
    DemoSentence,
}

trait RunConfig: DeserializeOwned + Default {
    fn apply(&mut self, o: &Overrides) -> CliResult<()>;
    fn validate(&self) -> CliResult<()>;
    fn run(&self) -> CliResult<Output>;
    fn out(&self) -> Option<&Path>;
    fn format(&self) -> OutputFormat;
}

macro_rules! run_config {
    ($ty:ty, $module:ident) => {
        impl RunConfig for $ty {
            fn apply(&mut self, o: &Overrides) -> CliResult<()> {
                <$ty>::apply(self, o)
            }
            fn validate(&self) -> CliResult<()> {
                <$ty>::validate(self)
            }
            fn run(&self) -> CliResult<Output> {
                $module::run(self)
            }
            fn out(&self) -> Option<&Path> {
                self.out.as_deref()
            }
            fn format(&self) -> OutputFormat {
                self.format
            }
        }
    };
}

run_config!(petfish::PetfishRunConfig, petfish);
run_config!(learn::LearnRunConfig, learn);
run_config!(capacity::CapacityRunConfig, capacity);
run_config!(bench::BenchRunConfig, bench);
run_config!(demo_sentence::DemoRunConfig, demo_sentence);

fn resolve<C: RunConfig>(path: Option<&Path>, o: &Overrides) -> CliResult<C> {
    let mut cfg: C = load(path)?;
    cfg.apply(o)?;
    cfg.validate()?;
    Ok(cfg)
}

fn go<C: RunConfig>(path: Option<&Path>, o: &Overrides) -> CliResult<()> {
    let cfg: C = resolve(path, o)?;
    let output = cfg.run()?;
    emit(&output, cfg.out(), cfg.format())
}

/// Run one command end to end.
pub fn execute(command: Command, config: Option<&Path>, overrides: &Overrides) -> CliResult<()> {
    match command {
        Command::Petfish => go::<petfish::PetfishRunConfig>(config, overrides),
        Command::Learn => go::<learn::LearnRunConfig>(config, overrides),
        Command::Capacity => go::<capacity::CapacityRunConfig>(config, overrides),
        Command::Bench => go::<bench::BenchRunConfig>(config, overrides),
        Command::DemoSentence => go::<demo_sentence::DemoRunConfig>(config, overrides),
    }
}
