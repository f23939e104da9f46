//! ECDF plot data.
//!
//! One CSV per metric. Each swarm size gets a `(delay, fraction)` column
//! pair holding the steps of its curve; shorter columns are padded with
//! empty cells.
//!
//! ```text
//! # schema_version=1
//! n4_delay_s,n4_fraction,n8_delay_s,n8_fraction
//! 0,0.1,0,0.25
//! 3.5,0.2,1,0.5
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use swarmtrack_core::metrics::{Ecdf, Metric};
use swarmtrack_core::{MetricsReport, SCHEMA_VERSION};

use crate::batch::BatchError;

pub fn ecdf_file_name(metric: Metric) -> String {
    format!("ecdf_{}.csv", metric.name())
}

/// Steps of a curve; a curve that never rises is a single `(0, 0)` row.
fn steps(curve: &Ecdf) -> Vec<(f64, f64)> {
    if curve.points.is_empty() {
        vec![(0.0, 0.0)]
    } else {
        curve.points.clone()
    }
}

pub fn render_ecdf_csv(report: &MetricsReport, metric: Metric) -> String {
    let columns: Vec<Vec<(f64, f64)>> = report.sizes.iter().map(|s| steps(&s.metric(metric).curve)).collect();
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
    let header: Vec<String> = report
        .sizes
        .iter()
        .map(|s| format!("n{0}_delay_s,n{0}_fraction", s.n_robots))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.get(i).map_or_else(|| ",".to_string(), |(d, p)| format!("{d},{p}")))
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Writes the four metric files into `dir`. Nothing is written if any of
/// them exists and `force` is off.
pub fn emit_ecdf_csv(report: &MetricsReport, dir: &Path, force: bool) -> Result<Vec<PathBuf>, BatchError> {
    let targets: Vec<(Metric, PathBuf)> = Metric::ALL.iter().map(|&m| (m, dir.join(ecdf_file_name(m)))).collect();
    if !force {
        if let Some((_, p)) = targets.iter().find(|(_, p)| p.exists()) {
            return Err(BatchError::Exists(p.clone()));
        }
    }
    fs::create_dir_all(dir).map_err(|source| BatchError::Io { path: dir.to_path_buf(), source })?;
    for (m, path) in &targets {
        fs::write(path, render_ecdf_csv(report, *m))
            .map_err(|source| BatchError::Io { path: path.clone(), source })?;
    }
    Ok(targets.into_iter().map(|(_, p)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use swarmtrack_core::metrics::{ecdf, MetricSummary};
    use swarmtrack_core::SizeReport;

    fn summary(delays: &[Option<f64>]) -> MetricSummary {
        let curve = ecdf(delays).unwrap();
        let reached = delays.iter().flatten().count();
        MetricSummary {
            reached,
            censored: delays.len() - reached,
            rate: reached as f64 / delays.len() as f64,
            median_s: curve.median(),
            curve,
        }
    }

    fn size(n: usize, detect: &[Option<f64>]) -> SizeReport {
        let none = vec![None; detect.len()];
        SizeReport {
            n_robots: n,
            n_runs: 1,
            n_events: detect.len(),
            detect: summary(detect),
            prop25: summary(&none),
            prop50: summary(&none),
            prop75: summary(&none),
        }
    }

    #[test]
    fn column_pairs_and_padding() {
        let report = MetricsReport::new(vec![
            size(8, &[Some(1.0), Some(2.5), None, Some(2.5)]),
            size(4, &[Some(3.0), None]),
        ]);
        let csv = render_ecdf_csv(&report, Metric::Detect);
        assert_eq!(
            csv,
            "# schema_version=1\n\
             n4_delay_s,n4_fraction,n8_delay_s,n8_fraction\n\
             3,0.5,1,0.25\n\
             ,,2.5,0.75\n"
        );
    }

    #[test]
    fn all_censored_is_plateau_zero() {
        let report = MetricsReport::new(vec![size(4, &[Some(1.0)])]);
        let csv = render_ecdf_csv(&report, Metric::Prop75);
        assert_eq!(csv.lines().nth(2), Some("0,0"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let report = MetricsReport::new(vec![size(4, &[Some(1.0)])]);
        let files = emit_ecdf_csv(&report, dir.path(), false).unwrap();
        assert_eq!(files.len(), 4);
        fs::write(&files[2], "keep").unwrap();
        assert!(matches!(emit_ecdf_csv(&report, dir.path(), false), Err(BatchError::Exists(_))));
        assert_eq!(fs::read_to_string(&files[2]).unwrap(), "keep");
        emit_ecdf_csv(&report, dir.path(), true).unwrap();
        assert!(fs::read_to_string(&files[2]).unwrap().starts_with("# schema_version=1"));
    }
}
