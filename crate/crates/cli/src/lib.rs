//! Batch front end for `gnslab-core`: validated run specs in, labeled CSV/JSON out.
//!
//! A run evaluates one item per ParamSet, writes each item's file atomically
//! and finishes with `<command>_manifest.json`, which records every item
//! including those that failed.

pub mod commands;
pub mod report;
pub mod spec;

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use gnslab_core::ParamSet;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{params_json, pretty, write_atomic, SCHEMA_VERSION};
pub use crate::spec::{Command, Format, Overrides, RunSpec, SpecError};

/// Exit status when every item ran and every check held.
pub const EXIT_OK: i32 = 0;
/// Exit status for an unusable spec, environment or output directory.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when some item errored or some check failed; all files are still written.
pub const EXIT_CHECKS: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "GNSLAB_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum ItemStatus {
    Ok { failed_checks: usize },
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemOutcome {
    pub index: usize,
    pub params: ParamSet,
    /// Data file, absent when the item errored before producing a table.
    pub file: Option<PathBuf>,
    pub status: ItemStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub items: Vec<ItemOutcome>,
    pub manifest: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        let clean = self
            .items
            .iter()
            .all(|i| matches!(i.status, ItemStatus::Ok { failed_checks: 0 }));
        if clean {
            EXIT_OK
        } else {
            EXIT_CHECKS
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Spec(SpecError),
    Io(PathBuf, io::Error),
    Threads(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Spec(e) => write!(f, "{e}"),
            RunError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            RunError::Threads(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for RunError {}

impl From<SpecError> for RunError {
    fn from(e: SpecError) -> Self {
        RunError::Spec(e)
    }
}

/// Parses a thread cap; `None` leaves rayon's default.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, RunError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Threads(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn item_file(spec: &RunSpec, index: usize, p: &ParamSet) -> PathBuf {
    let name = format!(
        "{}_{index:03}_n{}_t{}.{}",
        spec.command,
        p.n(),
        p.t(),
        spec.format.extension()
    );
    spec.out_dir.join(name)
}

fn run_item(spec: &RunSpec, index: usize, p: &ParamSet) -> Result<ItemOutcome, RunError> {
    let outcome = match commands::evaluate(spec, p) {
        Ok(report) => {
            let path = item_file(spec, index, p);
            let bytes = report.render(spec.format).map_err(|e| RunError::Io(path.clone(), e))?;
            write_atomic(&path, &bytes).map_err(|e| RunError::Io(path.clone(), e))?;
            ItemOutcome {
                index,
                params: *p,
                file: Some(path),
                status: ItemStatus::Ok {
                    failed_checks: report.failed_checks,
                },
            }
        }
        Err(e) => ItemOutcome {
            index,
            params: *p,
            file: None,
            status: ItemStatus::Error(e.to_string()),
        },
    };
    Ok(outcome)
}

fn manifest_json(spec: &RunSpec, items: &[ItemOutcome]) -> Value {
    let items: Vec<Value> = items
        .iter()
        .map(|i| {
            let file = i
                .file
                .as_ref()
                .and_then(|f| f.file_name())
                .map(|f| f.to_string_lossy().into_owned());
            let (status, failed, error) = match &i.status {
                ItemStatus::Ok { failed_checks } => ("ok", *failed_checks, None),
                ItemStatus::Error(msg) => ("error", 0, Some(msg.clone())),
            };
            json!({
                "index": i.index,
                "params": params_json(&i.params),
                "resolution": spec.resolution,
                "file": file,
                "status": status,
                "failed_checks": failed,
                "error": error,
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": spec.command.name(),
        "resolution": spec.resolution,
        "format": spec.format.extension(),
        "items": items,
    })
}

/// Runs every item of `spec` on the current rayon pool.
pub fn run(spec: &RunSpec) -> Result<RunSummary, RunError> {
    std::fs::create_dir_all(&spec.out_dir).map_err(|e| RunError::Io(spec.out_dir.clone(), e))?;
    let items = spec
        .params
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_item(spec, i, p))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = spec.out_dir.join(format!("{}_manifest.json", spec.command));
    write_atomic(&manifest, &pretty(&manifest_json(spec, &items))).map_err(|e| RunError::Io(manifest.clone(), e))?;
    Ok(RunSummary { items, manifest })
}

/// Loads `spec_path`, runs it with at most `threads` workers and reports the exit status.
pub fn run_file(
    command: Command,
    spec_path: &Path,
    overrides: &Overrides,
    threads: Option<usize>,
) -> Result<RunSummary, RunError> {
    let spec = spec::load(spec_path, command, overrides)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Threads(e.to_string()))?;
    pool.install(|| run(&spec))
}
