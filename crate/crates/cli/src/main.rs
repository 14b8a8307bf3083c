use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holodisco_cli::config::Overrides;
use holodisco_cli::report::OutputFormat;
use holodisco_cli::{execute, Command};

#[derive(Parser)]
#[command(name = "holodisco", version, about = "Compositional VSA semantics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pet-fish concept combination across backends and dims.
    Petfish(Common),
    /// Online learning of word representations from percepts.
    Learn(Common),
    /// Recovered-filler fidelity and cleanup accuracy vs bound-pair count.
    Capacity(Common),
    /// Naive vs FFT circular convolution timings.
    Bench(Common),
    /// Role extraction from "Junpa loves Jen".
    DemoSentence(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; without it the report goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, c) = match cli.command {
        Cmd::Petfish(c) => (Command::Petfish, c),
        Cmd::Learn(c) => (Command::Learn, c),
        Cmd::Capacity(c) => (Command::Capacity, c),
        Cmd::Bench(c) => (Command::Bench, c),
        Cmd::DemoSentence(c) => (Command::DemoSentence, c),
    };
    let overrides = Overrides {
        seed: c.seed,
        out: c.out,
        dims: c.dims,
        trials: c.trials,
        h: c.h,
        noise: c.noise,
        format: c.format,
    };
    match execute(command, c.config.as_deref(), &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("holodisco: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
