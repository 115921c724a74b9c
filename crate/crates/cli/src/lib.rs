//! Command line front end: `analyze` writes an analysis bundle, `serve`
//! hosts one read-only over HTTP.

pub mod args;
pub mod server;

use std::fs;
use std::io::Write;

use axisdecomp_core::pipeline::{export_bundle, run_analysis};
use axisdecomp_core::Error;

pub use args::{AnalyzeArgs, Cli, Command, ServeArgs};

/// Runs `analyze`. Without `--output` the bundle goes to stdout.
pub fn analyze(args: &AnalyzeArgs) -> Result<(), Error> {
    let cfg = args.to_config()?;
    let bundle = run_analysis(&cfg)?;
    for w in &bundle.warnings {
        log::warn!("{w}");
    }
    match &cfg.output {
        Some(path) => {
            export_bundle(&bundle, path)?;
            log::info!(
                "wrote {} linear and {} axis-aligned projections to {}",
                bundle.linear_nodes.len(),
                bundle.axis_nodes.len(),
                path.display()
            );
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bundle.to_json()?.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Runs `serve` until the process is stopped.
pub fn serve(args: &ServeArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.bundle)?;
    let state = server::ServerState::new(text, args.assets.clone())?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Error::Config(format!("cannot listen on {addr}: {e}")))?;
        log::info!("serving {} on http://{addr}", args.bundle.display());
        server::run(listener, state).await
    })
}
