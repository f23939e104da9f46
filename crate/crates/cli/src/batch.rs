//! Running a whole experiment grid to disk.
//!
//! Output layout under the output root:
//!
//! ```text
//! manifest.json              experiment echo + completed runs
//! <layout>/<size>/<run>/     one run log (run.toml and three CSVs)
//! reports/size_<n>.json      pooled metrics per swarm size
//! ```
//!
//! Reports are always recomputed from the logs on disk, so a resumed batch
//! and a fresh one produce the same bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use swarmtrack_core::engine::ConfigError;
use swarmtrack_core::log_io::{read_run_log, write_run_log, LogIoError};
use swarmtrack_core::metrics::{aggregate, Metric, MetricsError};
use swarmtrack_core::{run, MetricsReport, SizeReport, SCHEMA_VERSION};
use thiserror::Error;

use crate::experiment::{ExperimentConfig, PlannedRun, RunKey};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORTS_DIR: &str = "reports";

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("run log {path}: {source}")]
    Log { path: PathBuf, source: LogIoError },
    #[error("run {key}: {source}")]
    Sim { key: RunKey, source: ConfigError },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0} belongs to a different experiment; pass --force to start over")]
    ManifestMismatch(PathBuf),
    #[error("{dir} has no {MANIFEST_FILE}; not a batch output directory")]
    NoManifest { dir: PathBuf },
    #[error("batch in {dir} is incomplete: {done} of {total} runs finished")]
    Incomplete { dir: PathBuf, done: usize, total: usize },
    #[error("no reports found in {0}")]
    NoReports(PathBuf),
    #[error("{0} already exists; pass --force to overwrite")]
    Exists(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BatchError + '_ {
    move |source| BatchError::Io { path: path.to_path_buf(), source }
}

/// Which runs of which experiment are done.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub experiment: ExperimentConfig,
    pub completed: BTreeSet<RunKey>,
}

impl Manifest {
    fn fresh(config: &ExperimentConfig) -> Self {
        Self { schema_version: SCHEMA_VERSION, experiment: echo(config), completed: BTreeSet::new() }
    }

    pub fn load(dir: &Path) -> Result<Option<Self>, BatchError> {
        let path = dir.join(MANIFEST_FILE);
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|source| BatchError::Json { path, source }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    /// Written to a temporary file and renamed so an interrupted batch never
    /// leaves a truncated manifest behind.
    fn save(&self, dir: &Path) -> Result<(), BatchError> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }
}

/// The experiment as recorded in a manifest; where it is written is not
/// part of its identity.
fn echo(config: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig { output_dir: None, ..config.clone() }
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Ignore any previous manifest and rerun everything.
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub executed: usize,
    pub skipped: usize,
    pub report: MetricsReport,
}

/// Runs every planned run not yet recorded in the manifest, then writes the
/// per-size reports.
pub fn run_batch(config: &ExperimentConfig, opts: &BatchOptions) -> Result<BatchSummary, BatchError> {
    let out = &opts.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let manifest = match Manifest::load(out)? {
        Some(m) if !opts.force && m.experiment != echo(config) => {
            return Err(BatchError::ManifestMismatch(out.join(MANIFEST_FILE)))
        }
        Some(m) if !opts.force => m,
        _ => Manifest::fresh(config),
    };
    manifest.save(out)?;

    let plan = config.plan();
    let pending: Vec<&PlannedRun> = plan.iter().filter(|r| !manifest.completed.contains(&r.key)).collect();
    let skipped = plan.len() - pending.len();
    let manifest = Mutex::new(manifest);

    let work = || {
        pending.par_iter().try_for_each(|planned| -> Result<(), BatchError> {
            let log = run(planned.config.clone()).map_err(|source| BatchError::Sim { key: planned.key, source })?;
            let dir = out.join(&planned.rel_dir);
            write_run_log(&log, &dir).map_err(|source| BatchError::Log { path: dir, source })?;
            let mut m = manifest.lock().expect("manifest lock");
            m.completed.insert(planned.key);
            m.save(out)
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    pool.install(work)?;

    let report = reports_from_logs(config, out)?;
    write_reports(&report, out)?;
    Ok(BatchSummary { executed: pending.len(), skipped, report })
}

/// Reads every run log of the grid back and pools them per swarm size.
pub fn reports_from_logs(config: &ExperimentConfig, out: &Path) -> Result<MetricsReport, BatchError> {
    let plan = config.plan();
    let mut sizes = Vec::new();
    for (si, _) in config.swarm_sizes.iter().enumerate() {
        let logs = plan
            .iter()
            .filter(|r| r.key.size == si)
            .map(|r| {
                let dir = out.join(&r.rel_dir);
                read_run_log(&dir).map_err(|source| BatchError::Log { path: dir, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        sizes.push(aggregate(&logs)?);
    }
    Ok(MetricsReport::new(sizes))
}

pub fn report_path(out: &Path, n_robots: usize) -> PathBuf {
    out.join(REPORTS_DIR).join(format!("size_{n_robots}.json"))
}

/// One file per swarm size, each a single-size [`MetricsReport`].
pub fn write_reports(report: &MetricsReport, out: &Path) -> Result<Vec<PathBuf>, BatchError> {
    let dir = out.join(REPORTS_DIR);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    report
        .sizes
        .iter()
        .map(|size| {
            let path = report_path(out, size.n_robots);
            let single = MetricsReport::new(vec![size.clone()]);
            fs::write(&path, single.to_json() + "\n").map_err(io_err(&path))?;
            Ok(path)
        })
        .collect()
}

/// Merges every `reports/size_*.json` under `out`.
pub fn load_reports(out: &Path) -> Result<MetricsReport, BatchError> {
    let dir = out.join(REPORTS_DIR);
    let entries = fs::read_dir(&dir).map_err(io_err(&dir))?;
    let mut sizes: Vec<SizeReport> = Vec::new();
    for entry in entries {
        let path = entry.map_err(io_err(&dir))?.path();
        let is_report = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("size_") && n.ends_with(".json"));
        if !is_report {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let report = MetricsReport::from_json(&text).map_err(|source| BatchError::Json { path, source })?;
        sizes.extend(report.sizes);
    }
    if sizes.is_empty() {
        return Err(BatchError::NoReports(dir));
    }
    Ok(MetricsReport::new(sizes))
}

/// Recomputes the reports of a finished batch from its logs.
pub fn recompute(out: &Path) -> Result<MetricsReport, BatchError> {
    let manifest = Manifest::load(out)?.ok_or_else(|| BatchError::NoManifest { dir: out.to_path_buf() })?;
    let total = manifest.experiment.plan().len();
    if manifest.completed.len() != total {
        return Err(BatchError::Incomplete { dir: out.to_path_buf(), done: manifest.completed.len(), total });
    }
    reports_from_logs(&manifest.experiment, out)
}

/// Plain-text table, one line per swarm size.
pub struct SummaryTable<'a>(pub &'a MetricsReport);

impl fmt::Display for SummaryTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>5} {:>5} {:>7}", "size", "runs", "events")?;
        for m in Metric::ALL {
            write!(f, " {:>13} {:>7} {:>5}", format!("{}_rate", m.name()), "med_s", "cens")?;
        }
        writeln!(f)?;
        for s in &self.0.sizes {
            write!(f, "{:>5} {:>5} {:>7}", s.n_robots, s.n_runs, s.n_events)?;
            for m in Metric::ALL {
                let r = s.metric(m);
                let med = r.median_s.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
                write!(f, " {:>13.3} {:>7} {:>5}", r.rate, med, r.censored)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
