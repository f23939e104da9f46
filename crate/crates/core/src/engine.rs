//! Time-stepped simulation of one run.
//!
//! Each tick first advances the clock by `dt`, then applies, in order:
//! 1. person move checks on `check_interval` boundaries (person-id order),
//! 2. robot motion (robot-id order),
//! 3. sensing on `sense_period` boundaries, merged into the observer's store,
//! 4. one gossip round among robots in range,
//! 5. a belief snapshot on `snapshot_period` boundaries.
//!
//! Randomness comes from four independent streams derived from the seed
//! (placement, crowd, mobility, sensing), so the log is a pure function of
//! the [`SimConfig`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crowd::{step_person, CrowdParams, CrowdParamsError, PersonState, Transition};
use crate::environment::{build_layout, load_layout_file, EnvironmentMap, LayoutFileError, LayoutId};
use crate::gossip::{exchange, BeliefStore, CommParams, TrackRecord};
use crate::ids::{PersonId, RobotId};
use crate::mobility::{step_robot, RobotPose, DEFAULT_SPEED};
use crate::rng::{SimRng, Stream};
use crate::sensing::{sense, SensingParams, SensingParamsError};

/// Which map a run uses: a built-in id or a layout file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum LayoutRef {
    Builtin(LayoutId),
    File(PathBuf),
}

impl LayoutRef {
    pub fn resolve(&self) -> Result<EnvironmentMap, LayoutFileError> {
        match self {
            LayoutRef::Builtin(id) => Ok(build_layout(*id)),
            LayoutRef::File(path) => load_layout_file(path),
        }
    }
}

impl fmt::Display for LayoutRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutRef::Builtin(id) => write!(f, "{id}"),
            LayoutRef::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for LayoutRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<LayoutId>() {
            Ok(id) => LayoutRef::Builtin(id),
            Err(_) => LayoutRef::File(PathBuf::from(s)),
        })
    }
}

impl From<String> for LayoutRef {
    fn from(s: String) -> Self {
        match s.parse() {
            Ok(l) => l,
            Err(never) => match never {},
        }
    }
}

impl From<LayoutRef> for String {
    fn from(l: LayoutRef) -> String {
        l.to_string()
    }
}

impl From<LayoutId> for LayoutRef {
    fn from(id: LayoutId) -> Self {
        LayoutRef::Builtin(id)
    }
}

fn default_n_persons() -> usize {
    4
}
fn default_duration() -> f64 {
    600.0
}
fn default_dt() -> f64 {
    0.1
}
fn default_speed() -> f64 {
    DEFAULT_SPEED
}
fn default_snapshot_period() -> f64 {
    1.0
}

/// Seeds above `i64::MAX` do not fit a TOML integer and are written as strings.
mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub layout: LayoutRef,
    pub n_robots: usize,
    #[serde(default = "default_n_persons")]
    pub n_persons: usize,
    /// Seconds.
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// Seconds per tick.
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(with = "seed_repr")]
    pub seed: u64,
    /// Meters per second.
    #[serde(default = "default_speed")]
    pub robot_speed: f64,
    /// Seconds between belief snapshots.
    #[serde(default = "default_snapshot_period")]
    pub snapshot_period: f64,
    #[serde(default)]
    pub crowd: CrowdParams,
    #[serde(default)]
    pub sensing: SensingParams,
    #[serde(default)]
    pub comm: CommParams,
}

impl SimConfig {
    /// Default parameters for the given layout, swarm size and seed.
    pub fn new(layout: impl Into<LayoutRef>, n_robots: usize, seed: u64) -> Self {
        Self {
            layout: layout.into(),
            n_robots,
            n_persons: default_n_persons(),
            duration: default_duration(),
            dt: default_dt(),
            seed,
            robot_speed: default_speed(),
            snapshot_period: default_snapshot_period(),
            crowd: CrowdParams::default(),
            sensing: SensingParams::default(),
            comm: CommParams::default(),
        }
    }

    /// Number of ticks in a run.
    pub fn total_ticks(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    /// Simulation time after `tick` ticks, rounded to the nanosecond so
    /// logged times print as their decimal values.
    pub fn time_at(&self, tick: u64) -> f64 {
        ((tick as f64 * self.dt) * 1e9).round() / 1e9
    }

    /// Checks every invariant that does not need the map.
    pub fn validate(&self) -> Result<Schedule, ConfigError> {
        if self.n_robots == 0 {
            return Err(ConfigError::NoRobots);
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(ConfigError::Duration(self.duration));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::Dt(self.dt));
        }
        if !(self.robot_speed > 0.0 && self.robot_speed.is_finite()) {
            return Err(ConfigError::Speed(self.robot_speed));
        }
        if !(self.comm.comm_radius > 0.0 && self.comm.comm_radius.is_finite()) {
            return Err(ConfigError::CommRadius(self.comm.comm_radius));
        }
        self.crowd.validate()?;
        self.sensing.validate()?;
        if self.snapshot_period.is_nan() || self.snapshot_period <= 0.0 {
            return Err(ConfigError::Schedule { name: "snapshot_period", period: self.snapshot_period, dt: self.dt });
        }
        let ticks_for = |name: &'static str, period: f64| -> Result<u64, ConfigError> {
            let ratio = period / self.dt;
            let n = ratio.round();
            if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio {
                return Err(ConfigError::Schedule { name, period, dt: self.dt });
            }
            Ok(n as u64)
        };
        Ok(Schedule {
            check: ticks_for("check_interval", self.crowd.check_interval)?,
            sense: ticks_for("sense_period", self.sensing.sense_period)?,
            snapshot: ticks_for("snapshot_period", self.snapshot_period)?,
            total: ticks_for("duration", self.duration)?,
        })
    }
}

/// Tick counts between scheduled actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub check: u64,
    pub sense: u64,
    pub snapshot: u64,
    pub total: u64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("layout: {0}")]
    Layout(#[from] LayoutFileError),
    #[error("n_robots must be at least 1")]
    NoRobots,
    #[error("duration must be positive, got {0}")]
    Duration(f64),
    #[error("dt must be positive, got {0}")]
    Dt(f64),
    #[error("robot_speed must be positive, got {0}")]
    Speed(f64),
    #[error("comm_radius must be positive, got {0}")]
    CommRadius(f64),
    #[error("{name} = {period} s is not a positive multiple of dt = {dt} s")]
    Schedule { name: &'static str, period: f64, dt: f64 },
    #[error("n_persons = {n_persons} exceeds the {rooms} rooms of the layout")]
    TooManyPersons { n_persons: usize, rooms: usize },
    #[error(transparent)]
    Crowd(#[from] CrowdParamsError),
    #[error(transparent)]
    Sensing(#[from] SensingParamsError),
}

/// A direct sighting made by `robot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub robot: RobotId,
    pub record: TrackRecord,
}

/// One belief entry of one robot at a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefRow {
    pub tick: u64,
    pub time: f64,
    pub robot: RobotId,
    pub record: TrackRecord,
}

/// Everything a run produced, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub config: SimConfig,
    pub transitions: Vec<Transition>,
    pub observations: Vec<Observation>,
    pub beliefs: Vec<BeliefRow>,
}

/// Mutable state of a run in progress.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    schedule: Schedule,
    map: EnvironmentMap,
    tick: u64,
    persons: Vec<PersonState>,
    robots: Vec<RobotPose>,
    stores: Vec<BeliefStore>,
    crowd_rng: SimRng,
    mobility_rng: SimRng,
    sensing_rng: SimRng,
    log: RunLog,
}

impl Simulation {
    /// Resolves the layout and places persons and robots.
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        let map = config.layout.resolve()?;
        Self::with_map(config, map)
    }

    /// Like [`Simulation::new`] with an already built map.
    pub fn with_map(config: SimConfig, map: EnvironmentMap) -> Result<Self, ConfigError> {
        let schedule = config.validate()?;
        let rooms = map.rooms();
        if config.n_persons > rooms.len() {
            return Err(ConfigError::TooManyPersons { n_persons: config.n_persons, rooms: rooms.len() });
        }
        let mut placement = SimRng::stream(config.seed, Stream::Placement);
        let persons = rooms
            .iter()
            .take(config.n_persons)
            .enumerate()
            .map(|(i, &room)| PersonState {
                person_id: PersonId(i as u32),
                location: room,
                position: map.sample_free_point(&mut placement, Some(room)).expect("room admits inset"),
                entered_at: 0.0,
            })
            .collect();
        let robots = (0..config.n_robots)
            .map(|i| RobotPose {
                robot_id: RobotId(i as u32),
                position: map.sample_free_point(&mut placement, None).expect("map admits inset"),
                heading: placement.heading(),
                speed: config.robot_speed,
            })
            .collect();
        Ok(Self {
            schedule,
            tick: 0,
            persons,
            robots,
            stores: vec![BeliefStore::new(); config.n_robots],
            crowd_rng: SimRng::stream(config.seed, Stream::Crowd),
            mobility_rng: SimRng::stream(config.seed, Stream::Mobility),
            sensing_rng: SimRng::stream(config.seed, Stream::Sensing),
            log: RunLog {
                config: config.clone(),
                transitions: Vec::new(),
                observations: Vec::new(),
                beliefs: Vec::new(),
            },
            map,
            config,
        })
    }

    pub fn time(&self) -> f64 {
        self.config.time_at(self.tick)
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.schedule.total
    }

    pub fn map(&self) -> &EnvironmentMap {
        &self.map
    }

    pub fn persons(&self) -> &[PersonState] {
        &self.persons
    }

    pub fn robots(&self) -> &[RobotPose] {
        &self.robots
    }

    pub fn stores(&self) -> &[BeliefStore] {
        &self.stores
    }

    pub fn log(&self) -> &RunLog {
        &self.log
    }

    /// Advances one tick. Does nothing once the run is finished.
    pub fn tick(&mut self) {
        if self.is_finished() {
            return;
        }
        self.tick += 1;
        let tick = self.tick;
        let t = self.config.time_at(tick);

        if tick.is_multiple_of(self.schedule.check) {
            for person in &mut self.persons {
                let (next, transition) =
                    step_person(&self.map, person, t, &self.config.crowd, &mut self.crowd_rng);
                *person = next;
                self.log.transitions.extend(transition);
            }
        }

        for robot in &mut self.robots {
            *robot = step_robot(&self.map, robot, self.config.dt, &mut self.mobility_rng);
        }

        if tick.is_multiple_of(self.schedule.sense) {
            for (robot, store) in self.robots.iter().zip(&mut self.stores) {
                for record in sense(&self.map, robot, &self.persons, t, &self.config.sensing, &mut self.sensing_rng) {
                    store.merge_record(record);
                    self.log.observations.push(Observation { robot: robot.robot_id, record });
                }
            }
        }

        self.stores = exchange(&self.robots, &self.stores, &self.config.comm);

        if tick.is_multiple_of(self.schedule.snapshot) {
            for (robot, store) in self.robots.iter().zip(&self.stores) {
                self.log.beliefs.extend(store.records().map(|&record| BeliefRow {
                    tick,
                    time: t,
                    robot: robot.robot_id,
                    record,
                }));
            }
        }
    }

    /// Ticks until the configured duration and returns the log.
    pub fn run_to_end(mut self) -> RunLog {
        while !self.is_finished() {
            self.tick();
        }
        self.log
    }

    pub fn into_log(self) -> RunLog {
        self.log
    }
}

/// Runs a whole simulation.
pub fn run(config: SimConfig) -> Result<RunLog, ConfigError> {
    Ok(Simulation::new(config)?.run_to_end())
}
