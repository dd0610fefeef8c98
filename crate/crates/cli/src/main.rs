use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gnslab_cli::{run_file, thread_cap, Command, ItemStatus, Overrides, EXIT_USAGE, THREADS_ENV};

/// Evaluate GN/Sobolev deficits, distances and lemma checks from a TOML run spec.
#[derive(Parser)]
#[command(name = "gnslab", version)]
struct Cli {
    /// constants, deficit, identity, distance, probe, lemmas or alpha
    command: Command,
    /// Run-spec file (TOML)
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, overriding `[output] path`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature nodes per panel, overriding `resolution`
    #[arg(long)]
    resolution: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        out_dir: cli.out,
        resolution: cli.resolution,
    };
    let threads = match thread_cap(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("gnslab: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let summary = match run_file(cli.command, &cli.spec, &overrides, threads) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("gnslab: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    for item in &summary.items {
        let label = format!("n={} t={} m={}", item.params.n(), item.params.t(), item.params.m());
        match &item.status {
            ItemStatus::Ok { failed_checks: 0 } => {}
            ItemStatus::Ok { failed_checks } => eprintln!("gnslab: {label}: {failed_checks} failed check(s)"),
            ItemStatus::Error(msg) => eprintln!("gnslab: {label}: {msg}"),
        }
    }
    println!("{}", summary.manifest.display());
    ExitCode::from(summary.exit_code() as u8)
}
