mod bench;
mod compute;
mod serve;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const COMPUTE: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "gwcorr", version, about = "Geographically weighted correlation and partial correlation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a local (partial) correlation surface and write it as GeoJSON.
    Compute(compute::ComputeArgs),
    /// Serve the HTTP API and the web UI.
    Serve(serve::ServeArgs),
    /// Time the engine on synthetic data of increasing size.
    Bench(bench::BenchArgs),
    /// Write a synthetic point dataset as GeoJSON.
    Synth(SynthArgs),
}

#[derive(Debug, clap::Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

pub(crate) fn parse_with<T>(s: &str) -> Result<T, String>
where
    T: FromStr<Err = gwcorr_core::Error>,
{
    T::from_str(s).map_err(|e| e.to_string())
}

/// Prints a one-line diagnostic and returns `code`.
pub(crate) fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("gwcorr: {msg}");
    ExitCode::from(code)
}

fn synth(args: SynthArgs) -> ExitCode {
    let d = match gwcorr_core::synth_dataset(args.n, args.vars, args.seed) {
        Ok(d) => d,
        Err(e) => return fail(exit::USAGE, e),
    };
    let bytes = serde_json::to_vec(&gwcorr_core::geodata::dataset_to_geojson(&d))
        .expect("JSON values always serialise");
    let written = match &args.output {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::Write::write_all(&mut std::io::stdout(), &bytes),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(exit::DATA, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute(args) => compute::run(args),
        Command::Serve(args) => serve::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Synth(args) => synth(args),
    }
}
