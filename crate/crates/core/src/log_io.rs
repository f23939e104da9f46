//! On-disk form of a [`RunLog`].
//!
//! A run directory holds four files:
//!
//! | file               | columns                                                                 |
//! |--------------------|-------------------------------------------------------------------------|
//! | `run.toml`         | `schema_version` plus the full `[config]` table                         |
//! | `transitions.csv`  | `time_s, person_id, from_location, to_location, to_kind`                |
//! | `observations.csv` | `robot_id, person_id, location, timestamp_s, observer`                  |
//! | `beliefs.csv`      | `tick, time_s, robot_id, person_id, location, timestamp_s, observer`    |
//!
//! Times are seconds of simulation time. Every CSV starts with a
//! `# schema_version=N` line before the header row. Floats are written in
//! shortest round-trip form, so reading a log back reproduces it exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crowd::Transition;
use crate::engine::{BeliefRow, Observation, RunLog, SimConfig};
use crate::environment::LocationKind;
use crate::gossip::TrackRecord;
use crate::ids::{LocationId, PersonId, RobotId};
use crate::SCHEMA_VERSION;

pub const RUN_CONFIG_FILE: &str = "run.toml";
pub const TRANSITIONS_FILE: &str = "transitions.csv";
pub const OBSERVATIONS_FILE: &str = "observations.csv";
pub const BELIEFS_FILE: &str = "beliefs.csv";

#[derive(Debug, Error)]
pub enum LogIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunEcho {
    schema_version: u32,
    config: SimConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionRow {
    time_s: f64,
    person_id: u32,
    from_location: u32,
    to_location: u32,
    to_kind: LocationKind,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObservationRow {
    robot_id: u32,
    person_id: u32,
    location: u32,
    timestamp_s: f64,
    observer: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct BeliefCsvRow {
    tick: u64,
    time_s: f64,
    robot_id: u32,
    person_id: u32,
    location: u32,
    timestamp_s: f64,
    observer: u32,
}

/// File contents of one run directory, keyed by file name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTables {
    pub run_toml: String,
    pub transitions: String,
    pub observations: String,
    pub beliefs: String,
}

impl RunTables {
    pub fn files(&self) -> [(&'static str, &str); 4] {
        [
            (RUN_CONFIG_FILE, &self.run_toml),
            (TRANSITIONS_FILE, &self.transitions),
            (OBSERVATIONS_FILE, &self.observations),
            (BELIEFS_FILE, &self.beliefs),
        ]
    }
}

const TRANSITION_HEADER: [&str; 5] = ["time_s", "person_id", "from_location", "to_location", "to_kind"];
const OBSERVATION_HEADER: [&str; 5] = ["robot_id", "person_id", "location", "timestamp_s", "observer"];
const BELIEF_HEADER: [&str; 7] = ["tick", "time_s", "robot_id", "person_id", "location", "timestamp_s", "observer"];

fn csv_text<T: Serialize>(name: &str, header: &[&str], rows: impl Iterator<Item = T>) -> Result<String, LogIoError> {
    let wrap = |source| LogIoError::Csv { path: name.to_string(), source };
    let mut buf = format!("# schema_version={SCHEMA_VERSION}\n").into_bytes();
    {
        // Header written by hand so that empty tables still carry it.
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.serialize(row).map_err(wrap)?;
        }
        w.flush().map_err(|e| wrap(e.into()))?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Renders a log into its file contents without touching the disk.
pub fn render_tables(log: &RunLog) -> Result<RunTables, LogIoError> {
    let echo = RunEcho { schema_version: SCHEMA_VERSION, config: log.config.clone() };
    let run_toml = toml::to_string(&echo).map_err(|e| LogIoError::Format {
        path: RUN_CONFIG_FILE.into(),
        message: e.to_string(),
    })?;
    let transitions = csv_text(
        TRANSITIONS_FILE,
        &TRANSITION_HEADER,
        log.transitions.iter().map(|t| TransitionRow {
            time_s: t.time,
            person_id: t.person_id.0,
            from_location: t.from.0,
            to_location: t.to.0,
            to_kind: t.to_kind,
        }),
    )?;
    let observations = csv_text(
        OBSERVATIONS_FILE,
        &OBSERVATION_HEADER,
        log.observations.iter().map(|o| ObservationRow {
            robot_id: o.robot.0,
            person_id: o.record.person_id.0,
            location: o.record.location.0,
            timestamp_s: o.record.timestamp,
            observer: o.record.observer.0,
        }),
    )?;
    let beliefs = csv_text(
        BELIEFS_FILE,
        &BELIEF_HEADER,
        log.beliefs.iter().map(|b| BeliefCsvRow {
            tick: b.tick,
            time_s: b.time,
            robot_id: b.robot.0,
            person_id: b.record.person_id.0,
            location: b.record.location.0,
            timestamp_s: b.record.timestamp,
            observer: b.record.observer.0,
        }),
    )?;
    Ok(RunTables { run_toml, transitions, observations, beliefs })
}

/// Writes the four run files into `dir`, creating it if needed.
pub fn write_run_log(log: &RunLog, dir: &Path) -> Result<(), LogIoError> {
    let tables = render_tables(log)?;
    fs::create_dir_all(dir).map_err(|source| LogIoError::Io { path: dir.display().to_string(), source })?;
    for (name, text) in tables.files() {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| LogIoError::Io { path: path.display().to_string(), source })?;
    }
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, LogIoError> {
    let p = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| LogIoError::Io { path: p.clone(), source })?;
    let expected = format!("# schema_version={SCHEMA_VERSION}");
    match text.lines().next() {
        Some(first) if first.trim() == expected => {}
        other => {
            return Err(LogIoError::Format {
                path: p,
                message: format!("expected `{expected}` as first line, found {other:?}"),
            })
        }
    }
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| LogIoError::Csv { path: p, source })
}

/// Reads a run directory written by [`write_run_log`].
pub fn read_run_log(dir: &Path) -> Result<RunLog, LogIoError> {
    let cfg_path = dir.join(RUN_CONFIG_FILE);
    let p = cfg_path.display().to_string();
    let text = fs::read_to_string(&cfg_path).map_err(|source| LogIoError::Io { path: p.clone(), source })?;
    let echo: RunEcho =
        toml::from_str(&text).map_err(|e| LogIoError::Format { path: p.clone(), message: e.to_string() })?;
    if echo.schema_version != SCHEMA_VERSION {
        return Err(LogIoError::Format {
            path: p,
            message: format!("unsupported schema_version {}", echo.schema_version),
        });
    }
    let transitions = read_csv::<TransitionRow>(&dir.join(TRANSITIONS_FILE))?
        .into_iter()
        .map(|r| Transition {
            person_id: PersonId(r.person_id),
            from: LocationId(r.from_location),
            to: LocationId(r.to_location),
            to_kind: r.to_kind,
            time: r.time_s,
        })
        .collect();
    let record = |person: u32, loc: u32, ts: f64, observer: u32| TrackRecord {
        person_id: PersonId(person),
        location: LocationId(loc),
        timestamp: ts,
        observer: RobotId(observer),
    };
    let observations = read_csv::<ObservationRow>(&dir.join(OBSERVATIONS_FILE))?
        .into_iter()
        .map(|r| Observation {
            robot: RobotId(r.robot_id),
            record: record(r.person_id, r.location, r.timestamp_s, r.observer),
        })
        .collect();
    let beliefs = read_csv::<BeliefCsvRow>(&dir.join(BELIEFS_FILE))?
        .into_iter()
        .map(|r| BeliefRow {
            tick: r.tick,
            time: r.time_s,
            robot: RobotId(r.robot_id),
            record: record(r.person_id, r.location, r.timestamp_s, r.observer),
        })
        .collect();
    Ok(RunLog { config: echo.config, transitions, observations, beliefs })
}
