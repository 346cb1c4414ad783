use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use gwcorr_core::geodata::listwise_complete;
use gwcorr_core::{compute_surface, synth_dataset, AnalysisSpec, Bandwidth, Kernel, Method, Mode};

use crate::{exit, fail, parse_with};

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    /// Comma-separated, strictly increasing dataset sizes, each at least 10.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, value_parser = parse_with::<Kernel>, default_value = "bisquare")]
    kernel: Kernel,
    #[arg(long, default_value_t = 0.2)]
    bandwidth: f64,
    #[arg(long, value_parser = parse_with::<Method>, default_value = "pearson")]
    method: Method,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Timed runs per size; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Also write the report as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct Row {
    n: usize,
    wall_s: f64,
    peak_mb: f64,
}

/// Peak resident set size since the last reset, in MiB. Linux only.
fn peak_rss_mb() -> f64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find_map(|l| l.strip_prefix("VmHWM:"))
                .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<f64>().ok())
        })
        .map_or(f64::NAN, |kb| kb / 1024.0)
}

fn reset_peak_rss() {
    let _ = std::fs::write("/proc/self/clear_refs", "5");
}

fn validate(args: &BenchArgs) -> Result<(), String> {
    if args.sizes.is_empty() {
        return Err("no sizes given".into());
    }
    if let Some(&n) = args.sizes.iter().find(|&&n| n < 10) {
        return Err(format!("sizes must be at least 10, got {n}"));
    }
    if args.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err("sizes must be strictly increasing".into());
    }
    if args.vars < 2 {
        return Err(format!("--vars must be at least 2, got {}", args.vars));
    }
    if args.repeat == 0 || args.threads == Some(0) {
        return Err("--repeat and --threads must be positive".into());
    }
    Bandwidth::new(args.bandwidth).map_err(|e| e.to_string())?;
    Ok(())
}

fn measure(args: &BenchArgs, n: usize) -> Result<Row, gwcorr_core::Error> {
    let d = synth_dataset(n, args.vars, args.seed)?;
    let names = gwcorr_core::synth::variable_names(args.vars);
    let spec = AnalysisSpec {
        mode: Mode::Correlation,
        method: args.method,
        var_a: names[0].clone(),
        var_b: names[1].clone(),
        controls: vec![],
        kernel: args.kernel,
        bandwidth: Bandwidth::new(args.bandwidth)?,
    };
    let (data, coords, _) = listwise_complete(&d, &names)?;
    let mut best = f64::INFINITY;
    reset_peak_rss();
    for _ in 0..args.repeat {
        let start = Instant::now();
        let surface = compute_surface(&data, &coords, &spec)?;
        best = best.min(start.elapsed().as_secs_f64());
        drop(surface);
    }
    Ok(Row {
        n,
        wall_s: best,
        peak_mb: peak_rss_mb(),
    })
}

fn report_csv(rows: &[Row]) -> String {
    let mut out = String::from("n,wall_s,peak_mb\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6},{:.1}", r.n, r.wall_s, r.peak_mb);
    }
    out
}

pub fn run(args: BenchArgs) -> ExitCode {
    if let Err(msg) = validate(&args) {
        return fail(exit::USAGE, msg);
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(exit::COMPUTE, e),
    };
    println!(
        "kernel {} bandwidth {} method {} vars {} seed {} threads {}",
        args.kernel,
        args.bandwidth,
        args.method,
        args.vars,
        args.seed,
        pool.current_num_threads()
    );
    println!("{:>8} {:>12} {:>10}", "n", "wall_s", "peak_mb");
    let mut rows = Vec::with_capacity(args.sizes.len());
    for &n in &args.sizes {
        let row = match pool.install(|| measure(&args, n)) {
            Ok(r) => r,
            Err(e) => return fail(exit::COMPUTE, format!("n={n}: {e}")),
        };
        println!("{:>8} {:>12.4} {:>10.1}", row.n, row.wall_s, row.peak_mb);
        rows.push(row);
    }
    if let Some(path) = &args.output {
        if let Err(e) = std::fs::write(path, report_csv(&rows)) {
            return fail(exit::DATA, format!("{}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}
