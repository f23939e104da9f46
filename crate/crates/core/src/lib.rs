//! Deterministic 2D swarm simulator for collective people tracking.
//!
//! Robots random-walk an office layout, detect persons that move between
//! rooms, and share timestamped track records with peers in radio range.
//! The [`metrics`] module turns run logs into detection and propagation
//! delay distributions.

pub mod crowd;
pub mod engine;
pub mod environment;
pub mod gossip;
pub mod ids;
pub mod log_io;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod sensing;

pub use crowd::{expected_dwell, step_person, CrowdParams, PersonState, Transition};
pub use engine::{run, BeliefRow, ConfigError, LayoutRef, Observation, RunLog, SimConfig, Simulation};
pub use environment::{build_layout, EnvironmentMap, LayoutId, LocationKind, Point};
pub use gossip::{exchange, merge_stores, record_order, BeliefStore, CommParams, TrackRecord};
pub use ids::{LocationId, PersonId, RobotId};
pub use metrics::{aggregate, Ecdf, MetricsReport, SizeReport};
pub use mobility::{resample_heading, step_robot, RobotPose};
pub use rng::SimRng;
pub use sensing::{sense, SensingParams};

/// Version of every file schema this crate reads or writes.
pub const SCHEMA_VERSION: u32 = 1;
