//! Fixtures shared by the criterion benchmarks in `benches/`.

use swarmtrack_core::environment::Point;
use swarmtrack_core::{BeliefStore, LocationId, PersonId, RobotId, RobotPose, SimRng, TrackRecord};

/// A store knowing `persons` persons, with random rooms and timestamps.
pub fn random_store(rng: &mut SimRng, persons: u32, observer: u32) -> BeliefStore {
    (0..persons)
        .map(|p| TrackRecord {
            person_id: PersonId(p),
            location: LocationId(rng.index(6) as u32),
            timestamp: (rng.uniform(0.0, 600.0) * 10.0).round() / 10.0,
            observer: RobotId(observer),
        })
        .collect()
}

/// `n` robots scattered over a `side` x `side` square.
pub fn scattered_poses(rng: &mut SimRng, n: usize, side: f64) -> Vec<RobotPose> {
    (0..n)
        .map(|i| RobotPose {
            robot_id: RobotId(i as u32),
            position: Point::new(rng.uniform(0.0, side), rng.uniform(0.0, side)),
            heading: rng.heading(),
            speed: 0.5,
        })
        .collect()
}
