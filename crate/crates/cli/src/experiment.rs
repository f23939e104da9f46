//! Experiment grids: which layouts, swarm sizes and seeds to run, plus
//! overrides for every simulation parameter.
//!
//! ```toml
//! layouts = ["Env1", "Env2"]
//! swarm_sizes = [4, 8, 12]
//! runs_per_config = 5
//! base_seed = 7
//! robot_speed = 0.4
//!
//! [sensing]
//! p_detect = 0.9
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swarmtrack_core::engine::ConfigError;
use swarmtrack_core::environment::LayoutFileError;
use swarmtrack_core::rng::mix64;
use swarmtrack_core::{CommParams, CrowdParams, LayoutRef, SensingParams, SimConfig, SCHEMA_VERSION};
use thiserror::Error;

/// Fallback output directory when neither the command line, the config nor
/// the environment names one.
pub const DEFAULT_OUTPUT_DIR: &str = "swarmtrack-out";
pub const OUTPUT_DIR_ENV: &str = "SWARMTRACK_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub layouts: Vec<LayoutRef>,
    #[serde(default = "default_sizes")]
    pub swarm_sizes: Vec<usize>,
    #[serde(default = "default_runs")]
    pub runs_per_config: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,

    #[serde(default = "defaults::n_persons")]
    pub n_persons: usize,
    #[serde(default = "defaults::duration")]
    pub duration: f64,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::robot_speed")]
    pub robot_speed: f64,
    #[serde(default = "defaults::snapshot_period")]
    pub snapshot_period: f64,
    #[serde(default)]
    pub crowd: CrowdParams,
    #[serde(default)]
    pub sensing: SensingParams,
    #[serde(default)]
    pub comm: CommParams,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}
fn default_sizes() -> Vec<usize> {
    vec![4, 8, 12]
}
fn default_runs() -> usize {
    5
}

/// Single-run defaults, read off a default [`SimConfig`].
mod defaults {
    use super::*;

    fn base() -> SimConfig {
        SimConfig::new(swarmtrack_core::LayoutId::Env1, 1, 0)
    }
    pub fn n_persons() -> usize {
        base().n_persons
    }
    pub fn duration() -> f64 {
        base().duration
    }
    pub fn dt() -> f64 {
        base().dt
    }
    pub fn robot_speed() -> f64 {
        base().robot_speed
    }
    pub fn snapshot_period() -> f64 {
        base().snapshot_period
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid experiment config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("layouts must not be empty")]
    NoLayouts,
    #[error("swarm_sizes must not be empty")]
    NoSizes,
    #[error("runs_per_config must be at least 1")]
    NoRuns,
    #[error("{what} {value} is listed twice")]
    Duplicate { what: &'static str, value: String },
    #[error("layout {layout}: {source}")]
    Layout { layout: String, source: LayoutFileError },
    #[error("layout {layout} with {n_robots} robots: {source}")]
    Sim { layout: String, n_robots: usize, source: ConfigError },
    #[error("runs {a} and {b} derive the same seed {seed}")]
    SeedCollision { a: RunKey, b: RunKey, seed: u64 },
}

/// Position of one run in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RunKey {
    pub layout: usize,
    pub size: usize,
    pub run: usize,
}

impl std::fmt::Display for RunKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(layout #{}, size #{}, run #{})", self.layout, self.size, self.run)
    }
}

/// Seed of one run: SplitMix64's finalizer folded over the base seed and
/// the three grid indices,
/// `h = mix64(base); h = mix64(h ^ layout); h = mix64(h ^ size); mix64(h ^ run)`.
/// Any run can be reproduced from `base_seed` and its indices alone.
pub fn derive_seed(base_seed: u64, key: RunKey) -> u64 {
    [key.layout, key.size, key.run]
        .into_iter()
        .fold(mix64(base_seed), |h, i| mix64(h ^ i as u64))
}

/// One fully specified run of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedRun {
    pub key: RunKey,
    pub config: SimConfig,
    /// Directory relative to the output root: `<layout>/<size>/<run>`.
    pub rel_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for everything but the layouts.
    pub fn new(layouts: Vec<LayoutRef>) -> Self {
        toml::from_str::<Self>("layouts = []")
            .map(|c| Self { layouts, ..c })
            .expect("empty config parses")
    }

    pub fn sim_config(&self, layout: &LayoutRef, n_robots: usize, seed: u64) -> SimConfig {
        SimConfig {
            n_persons: self.n_persons,
            duration: self.duration,
            dt: self.dt,
            robot_speed: self.robot_speed,
            snapshot_period: self.snapshot_period,
            crowd: self.crowd,
            sensing: self.sensing,
            comm: self.comm,
            ..SimConfig::new(layout.clone(), n_robots, seed)
        }
    }

    /// Every run in layout, size, run order.
    pub fn plan(&self) -> Vec<PlannedRun> {
        let mut out = Vec::new();
        for (li, layout) in self.layouts.iter().enumerate() {
            for (si, &n) in self.swarm_sizes.iter().enumerate() {
                for run in 0..self.runs_per_config {
                    let key = RunKey { layout: li, size: si, run };
                    out.push(PlannedRun {
                        key,
                        config: self.sim_config(layout, n, derive_seed(self.base_seed, key)),
                        rel_dir: [layout_dir_name(layout), n.to_string(), run.to_string()].iter().collect(),
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ExperimentError::SchemaVersion(self.schema_version));
        }
        if self.layouts.is_empty() {
            return Err(ExperimentError::NoLayouts);
        }
        if self.swarm_sizes.is_empty() {
            return Err(ExperimentError::NoSizes);
        }
        if self.runs_per_config == 0 {
            return Err(ExperimentError::NoRuns);
        }
        let mut names = BTreeSet::new();
        for l in &self.layouts {
            if !names.insert(layout_dir_name(l)) {
                return Err(ExperimentError::Duplicate { what: "layout", value: l.to_string() });
            }
        }
        let mut sizes = self.swarm_sizes.clone();
        sizes.sort_unstable();
        if let Some(w) = sizes.windows(2).find(|w| w[0] == w[1]) {
            return Err(ExperimentError::Duplicate { what: "swarm size", value: w[0].to_string() });
        }
        for layout in &self.layouts {
            let map = layout
                .resolve()
                .map_err(|source| ExperimentError::Layout { layout: layout.to_string(), source })?;
            for &n in &self.swarm_sizes {
                let config = self.sim_config(layout, n, 0);
                config.validate().map_err(|source| ExperimentError::Sim {
                    layout: layout.to_string(),
                    n_robots: n,
                    source,
                })?;
                if config.n_persons > map.rooms().len() {
                    return Err(ExperimentError::Sim {
                        layout: layout.to_string(),
                        n_robots: n,
                        source: ConfigError::TooManyPersons { n_persons: config.n_persons, rooms: map.rooms().len() },
                    });
                }
            }
        }
        let mut seen: BTreeMap<u64, RunKey> = BTreeMap::new();
        for run in self.plan() {
            if let Some(prev) = seen.insert(run.config.seed, run.key) {
                return Err(ExperimentError::SeedCollision { a: prev, b: run.key, seed: run.config.seed });
            }
        }
        Ok(())
    }

    /// Output root: explicit override, then the config, then the
    /// environment, then [`DEFAULT_OUTPUT_DIR`].
    pub fn output_root(&self, cli_override: Option<&Path>) -> PathBuf {
        cli_override
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(default_output_dir)
    }

    fn rebase_paths(&mut self, dir: &Path) {
        for l in &mut self.layouts {
            if let LayoutRef::File(p) = l {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        if let Some(out) = &mut self.output_dir {
            if out.is_relative() {
                *out = dir.join(&*out);
            }
        }
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Directory name of a layout: its built-in name or the layout file's stem.
pub fn layout_dir_name(layout: &LayoutRef) -> String {
    match layout {
        LayoutRef::Builtin(id) => id.to_string(),
        LayoutRef::File(p) => p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string()),
    }
}

/// Parses and validates an experiment config. Relative paths stay relative
/// to the working directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let config: ExperimentConfig = toml::from_str(text)?;
    config.validate()?;
    Ok(config)
}

/// Reads a config file; relative layout paths and `output_dir` are taken
/// relative to the file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ExperimentError::Read { path: path.to_path_buf(), source })?;
    let mut config: ExperimentConfig = toml::from_str(&text)?;
    if let Some(dir) = path.parent() {
        config.rebase_paths(dir);
    }
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use swarmtrack_core::LayoutId;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config("layouts = [\"Env1\"]").unwrap();
        assert_eq!(c.layouts, vec![LayoutRef::Builtin(LayoutId::Env1)]);
        assert_eq!(c.swarm_sizes, vec![4, 8, 12]);
        assert_eq!(c.runs_per_config, 5);
        assert_eq!(c.duration, 600.0);
        assert_eq!(c.sensing, SensingParams::default());
        assert_eq!(c.plan().len(), 15);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("layouts = [\"Env1\"]\nrobot_sped = 0.3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("robot_sped"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        let err = parse_config("layouts = [\"Env1\"]\n[sensing]\np_detec = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("p_detec"));
    }

    #[test]
    fn invariants_rejected() {
        assert!(matches!(parse_config("layouts = [\"Env1\"]\nruns_per_config = 0"), Err(ExperimentError::NoRuns)));
        assert!(matches!(parse_config("layouts = []"), Err(ExperimentError::NoLayouts)));
        assert!(matches!(parse_config("layouts = [\"Env1\"]\nswarm_sizes = []"), Err(ExperimentError::NoSizes)));
        assert!(matches!(
            parse_config("layouts = [\"Env1\"]\nswarm_sizes = [0]"),
            Err(ExperimentError::Sim { .. })
        ));
        assert!(matches!(
            parse_config("layouts = [\"Env1\", \"env1\"]"),
            Err(ExperimentError::Duplicate { .. })
        ));
        assert!(matches!(
            parse_config("layouts = [\"Env1\"]\nschema_version = 9"),
            Err(ExperimentError::SchemaVersion(9))
        ));
        assert!(matches!(
            parse_config("layouts = [\"no/such/layout.toml\"]"),
            Err(ExperimentError::Layout { .. })
        ));
    }

    #[test]
    fn seeds_distinct_and_stable() {
        let mut c = ExperimentConfig::new(LayoutId::ALL.map(LayoutRef::from).to_vec());
        c.base_seed = 11;
        let plan = c.plan();
        let seeds: std::collections::BTreeSet<_> = plan.iter().map(|r| r.config.seed).collect();
        assert_eq!(seeds.len(), 60);
        assert_eq!(plan[7].rel_dir, Path::new("Env1/8/2"));
        assert_eq!(derive_seed(11, plan[7].key), plan[7].config.seed);
        // Indices are not interchangeable.
        let a = derive_seed(0, RunKey { layout: 1, size: 0, run: 0 });
        let b = derive_seed(0, RunKey { layout: 0, size: 1, run: 0 });
        assert_ne!(a, b);
    }

    #[test]
    fn overrides_reach_sim_config() {
        let c = parse_config("layouts = [\"Env2\"]\nrobot_speed = 0.5\n[crowd]\np_leave_room = 0.2\n").unwrap();
        let run = &c.plan()[0];
        assert_eq!(run.config.robot_speed, 0.5);
        assert_eq!(run.config.crowd.p_leave_room, 0.2);
        assert_eq!(run.config.crowd.p_leave_corridor, CrowdParams::default().p_leave_corridor);
        assert_eq!(run.config.n_robots, 4);
    }
}
