use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use gwcorr_service::{AppState, Config};

use crate::{exit, fail};

#[derive(Debug, clap::Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8000)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Base-map tile URL template handed to the browser.
    #[arg(long, env = "GWCORR_TILES_URL")]
    tiles_url: Option<String>,
    /// Directory holding the built web UI.
    #[arg(long, env = "GWCORR_STATIC_DIR")]
    static_dir: Option<PathBuf>,
    /// Upload size limit in MiB.
    #[arg(long, default_value_t = 64)]
    max_upload_mb: usize,
    /// Per-analysis timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout_secs: u64,
    /// Datasets held in memory before eviction.
    #[arg(long, default_value_t = 8)]
    max_datasets: usize,
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    eprintln!("gwcorr: shutting down");
}

pub fn run(args: ServeArgs) -> ExitCode {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .try_init();

    if args.max_datasets == 0 || args.max_upload_mb == 0 || args.timeout_secs == 0 {
        return fail(exit::USAGE, "limits must be positive");
    }
    let config = Config {
        size_limit: args.max_upload_mb * 1024 * 1024,
        timeout: Duration::from_secs(args.timeout_secs),
        dataset_capacity: args.max_datasets,
        tiles_url: args.tiles_url,
        static_dir: args.static_dir,
        ..Config::default()
    };
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => return fail(exit::COMPUTE, e),
    };
    let addr = SocketAddr::new(args.host, args.port);
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => return fail(exit::DATA, format!("cannot bind {addr}: {e}")),
        };
        if let Ok(local) = listener.local_addr() {
            println!("listening on http://{local}");
        }
        match gwcorr_service::serve(listener, AppState::new(config), shutdown_signal()).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(exit::COMPUTE, e),
        }
    })
}
