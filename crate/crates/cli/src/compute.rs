use std::path::{Path, PathBuf};
use std::process::ExitCode;

use gwcorr_core::geodata::{parse_geojson, parse_point_csv};
use gwcorr_core::{run_analysis, Alpha, AnalysisRequest, CoordMode, Dataset, Error, Kernel, Method, Mode};

use crate::{exit, fail, parse_with};

#[derive(Debug, clap::Args)]
pub struct ComputeArgs {
    /// GeoJSON FeatureCollection, or a CSV of points when the name ends in `.csv`.
    #[arg(long)]
    input: PathBuf,
    /// Variable pair to correlate, as `A,B`.
    #[arg(long, value_parser = parse_pair)]
    pair: (String, String),
    /// Control variable; repeat for several.
    #[arg(long = "control")]
    controls: Vec<String>,
    #[arg(long, value_parser = parse_with::<Mode>, default_value = "corr")]
    mode: Mode,
    #[arg(long, value_parser = parse_with::<Method>, default_value = "pearson")]
    method: Method,
    #[arg(long, value_parser = parse_with::<Kernel>, default_value = "bisquare")]
    kernel: Kernel,
    /// Adaptive bandwidth as a proportion of observations, in (0, 1].
    #[arg(long)]
    bandwidth: f64,
    /// Significance level reported in the summary.
    #[arg(long, value_parser = parse_with::<Alpha>, default_value = "0.05")]
    alpha: Alpha,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "x")]
    x_col: String,
    #[arg(long, default_value = "y")]
    y_col: String,
    /// Treat coordinates as planar even when they look like lon/lat.
    #[arg(long)]
    assume_planar: bool,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected A,B, got {s:?}"))?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(format!("expected A,B, got {s:?}"));
    }
    if a == b {
        return Err(format!("pair needs two different variables, got {a} twice"));
    }
    Ok((a.to_string(), b.to_string()))
}

pub fn load_dataset(
    path: &Path,
    x_col: &str,
    y_col: &str,
    assume_planar: bool,
) -> Result<Dataset, Error> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    let mode = if assume_planar {
        CoordMode::Planar
    } else {
        CoordMode::Auto
    };
    let is_csv = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_point_csv(&bytes, x_col, y_col, mode)
    } else {
        parse_geojson(&bytes, mode)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::InvalidProportion(_) | Error::PairNotInSurface(..) => exit::USAGE,
        Error::SpecMismatch(_) => exit::DATA,
        e if e.is_data_error() => exit::DATA,
        _ => exit::COMPUTE,
    }
}

pub fn run(args: ComputeArgs) -> ExitCode {
    let request = AnalysisRequest {
        mode: args.mode,
        method: args.method,
        var_a: args.pair.0.clone(),
        var_b: args.pair.1.clone(),
        controls: args.controls.clone(),
        kernel: args.kernel,
        bandwidth_proportion: args.bandwidth,
        displayed_pair: None,
    };
    if let Err(e) = request.to_spec() {
        return fail(exit::USAGE, e);
    }
    let dataset = match load_dataset(&args.input, &args.x_col, &args.y_col, args.assume_planar) {
        Ok(d) => d,
        Err(e) => return fail(exit::DATA, format!("{}: {e}", e.kind())),
    };
    let analysis = match run_analysis(&dataset, &request) {
        Ok(a) => a,
        Err(e) => return fail(exit_code(&e), format!("{}: {e}", e.kind())),
    };
    let bytes = match analysis.document_bytes(&dataset, (&args.pair.0, &args.pair.1)) {
        Ok(b) => b,
        Err(e) => return fail(exit::COMPUTE, e),
    };
    if let Err(e) = std::fs::write(&args.output, bytes) {
        return fail(exit::DATA, format!("{}: {e}", args.output.display()));
    }

    let summary = analysis.summary("cli");
    let chosen = match args.alpha {
        Alpha::P01 => summary.n_significant_001,
        Alpha::P05 => summary.n_significant_005,
    };
    println!("{summary}");
    println!("alpha         {} ({chosen} of {} significant)", args.alpha.value(), summary.n_used);
    println!("output        {}", args.output.display());
    ExitCode::SUCCESS
}
