use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swarmtrack(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmtrack"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SWARMTRACK_OUT")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn batch_metrics_ecdf_flow() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "layouts = [\"Env1\"]\nswarm_sizes = [2, 4]\nruns_per_config = 1\nduration = 200.0\noutput_dir = \"grid\"\n",
    );
    let out = swarmtrack(&["batch", "--config", &cfg, "--jobs", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("2 runs executed"), "{stdout}");
    assert!(stdout.contains("detect_rate"));
    let grid = tmp.path().join("grid");
    assert!(grid.join("Env1/4/0/beliefs.csv").is_file());

    let out = swarmtrack(&["metrics", "--out", "grid"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let out = swarmtrack(&["ecdf", "--out", "grid"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(grid.join("ecdf/ecdf_detect.csv")).unwrap();
    assert!(csv.starts_with("# schema_version=1\nn2_delay_s,n2_fraction,n4_delay_s,n4_fraction\n"));

    // Second emission without --force is refused as a runtime error.
    let out = swarmtrack(&["ecdf", "--out", "grid"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    let out = swarmtrack(&["ecdf", "--out", "grid", "--force"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "layouts = [\"Env1\"]\nrobot_sped = 0.3\n");
    let out = swarmtrack(&["batch", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("robot_sped"));

    let cfg = write_config(tmp.path(), "layouts = [\"Env1\"]\nruns_per_config = 0\n");
    assert_eq!(swarmtrack(&["batch", "--config", &cfg], tmp.path()).status.code(), Some(1));
    assert_eq!(swarmtrack(&["batch", "--config", "missing.toml"], tmp.path()).status.code(), Some(1));
    assert_eq!(swarmtrack(&["bogus"], tmp.path()).status.code(), Some(1));
    assert_eq!(swarmtrack(&["run", "--robots", "0"], tmp.path()).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = swarmtrack(&["metrics", "--out", "nothing_here"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_uses_env_output_dir_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["run", "--layout", "env2", "--robots", "3", "--seed", "42"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_swarmtrack"))
            .args(&args)
            .current_dir(tmp.path())
            .env("SWARMTRACK_OUT", "from_env")
            .output()
            .unwrap()
    };
    assert_eq!(run(&[]).status.code(), Some(0));
    let dir = tmp.path().join("from_env/run_42");
    let first = fs::read(dir.join("beliefs.csv")).unwrap();
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--force"]).status.code(), Some(0));
    assert_eq!(fs::read(dir.join("beliefs.csv")).unwrap(), first);
}
