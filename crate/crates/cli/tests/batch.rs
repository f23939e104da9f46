use std::fs;
use std::path::Path;

use swarmtrack_cli::batch::{load_reports, recompute, report_path, Manifest, MANIFEST_FILE};
use swarmtrack_cli::*;

fn small(text: &str) -> ExperimentConfig {
    parse_config(&format!("duration = 120.0\nbase_seed = 3\n{text}")).unwrap()
}

fn opts(dir: &Path) -> BatchOptions {
    BatchOptions { output_dir: dir.to_path_buf(), jobs: 2, force: false }
}

fn read_reports(dir: &Path, sizes: &[usize]) -> Vec<String> {
    sizes.iter().map(|&n| fs::read_to_string(report_path(dir, n)).unwrap()).collect()
}

#[test]
fn single_run_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small("layouts = [\"Env3\"]\nswarm_sizes = [3]\nruns_per_config = 1");
    let summary = run_batch(&config, &opts(tmp.path())).unwrap();
    assert_eq!((summary.executed, summary.skipped), (1, 0));
    assert!(tmp.path().join("Env3/3/0/run.toml").is_file());
    let reports: Vec<_> = fs::read_dir(tmp.path().join("reports")).unwrap().collect();
    assert_eq!(reports.len(), 1);
    assert_eq!(summary.report.sizes.len(), 1);
}

#[test]
fn rerun_and_resume_give_identical_reports() {
    let config = small("layouts = [\"Env1\", \"Env4\"]\nswarm_sizes = [2, 5]\nruns_per_config = 2");
    let fresh = tempfile::tempdir().unwrap();
    let first = run_batch(&config, &opts(fresh.path())).unwrap();
    assert_eq!(first.executed, 8);
    let bytes = read_reports(fresh.path(), &[2, 5]);

    // Rerunning with everything done executes nothing and rewrites the same bytes.
    let again = run_batch(&config, &opts(fresh.path())).unwrap();
    assert_eq!((again.executed, again.skipped), (0, 8));
    assert_eq!(read_reports(fresh.path(), &[2, 5]), bytes);

    // A batch interrupted before the second Env1 run of each size.
    let resumed = tempfile::tempdir().unwrap();
    run_batch(&config, &opts(resumed.path())).unwrap();
    let mut manifest = Manifest::load(resumed.path()).unwrap().unwrap();
    manifest.completed.retain(|k| k.layout == 1 || k.run == 0);
    fs::write(resumed.path().join(MANIFEST_FILE), serde_json::to_string(&manifest).unwrap()).unwrap();
    for size in ["2", "5"] {
        fs::remove_dir_all(resumed.path().join("Env1").join(size).join("1")).unwrap();
    }
    fs::remove_dir_all(resumed.path().join("reports")).unwrap();

    let summary = run_batch(&config, &opts(resumed.path())).unwrap();
    assert_eq!((summary.executed, summary.skipped), (2, 6));
    assert_eq!(read_reports(resumed.path(), &[2, 5]), bytes);
    assert_eq!(summary.report, first.report);
}

#[test]
fn persisted_reports_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small("layouts = [\"Env2\"]\nswarm_sizes = [4, 8]\nruns_per_config = 2");
    let summary = run_batch(&config, &opts(tmp.path())).unwrap();
    assert_eq!(load_reports(tmp.path()).unwrap(), summary.report);
    assert_eq!(recompute(tmp.path()).unwrap(), summary.report);
}

#[test]
fn other_experiment_in_same_dir_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let a = small("layouts = [\"Env1\"]\nswarm_sizes = [2]\nruns_per_config = 1");
    let b = small("layouts = [\"Env1\"]\nswarm_sizes = [2]\nruns_per_config = 1\nrobot_speed = 0.3");
    run_batch(&a, &opts(tmp.path())).unwrap();
    assert!(matches!(run_batch(&b, &opts(tmp.path())), Err(BatchError::ManifestMismatch(_))));
    let forced = run_batch(&b, &BatchOptions { force: true, ..opts(tmp.path()) }).unwrap();
    assert_eq!(forced.executed, 1);
    assert_eq!(Manifest::load(tmp.path()).unwrap().unwrap().experiment.robot_speed, 0.3);
}

#[test]
fn recompute_refuses_incomplete_batch() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small("layouts = [\"Env1\"]\nswarm_sizes = [2]\nruns_per_config = 2");
    run_batch(&config, &opts(tmp.path())).unwrap();
    let mut manifest = Manifest::load(tmp.path()).unwrap().unwrap();
    manifest.completed.pop_first();
    fs::write(tmp.path().join(MANIFEST_FILE), serde_json::to_string(&manifest).unwrap()).unwrap();
    assert!(matches!(recompute(tmp.path()), Err(BatchError::Incomplete { done: 1, total: 2, .. })));
    assert!(matches!(recompute(&tmp.path().join("nope")), Err(BatchError::NoManifest { .. })));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let grid = load_config(&dir.join("paper_grid.toml")).unwrap();
    assert_eq!(grid.plan().len(), 60);
    let lab = load_config(&dir.join("lab_sweep.toml")).unwrap();
    assert_eq!(lab.plan().len(), 18);
    assert_eq!(lab.plan()[0].rel_dir, Path::new("lab/2/0"));
}
