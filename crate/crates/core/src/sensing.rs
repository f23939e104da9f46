//! Range-limited detection of persons.
//!
//! Stands in for camera-based face identification: a robot sees a person
//! when both are in the same location and within `detect_radius`, and then
//! identifies them correctly with probability `p_detect`. There are no false
//! identifications.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crowd::PersonState;
use crate::environment::EnvironmentMap;
use crate::gossip::TrackRecord;
use crate::mobility::RobotPose;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingParams {
    /// Meters.
    pub detect_radius: f64,
    /// Seconds between sensing attempts.
    pub sense_period: f64,
    pub p_detect: f64,
}

impl Default for SensingParams {
    fn default() -> Self {
        Self {
            detect_radius: 2.0,
            sense_period: 1.0,
            p_detect: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensingParamsError {
    #[error("detect_radius must be positive, got {0}")]
    Radius(f64),
    #[error("sense_period must be positive, got {0}")]
    Period(f64),
    #[error("p_detect must be in (0, 1], got {0}")]
    Probability(f64),
}

impl SensingParams {
    pub fn validate(&self) -> Result<(), SensingParamsError> {
        if !(self.detect_radius > 0.0 && self.detect_radius.is_finite()) {
            return Err(SensingParamsError::Radius(self.detect_radius));
        }
        if !(self.sense_period > 0.0 && self.sense_period.is_finite()) {
            return Err(SensingParamsError::Period(self.sense_period));
        }
        if !(self.p_detect > 0.0 && self.p_detect <= 1.0) {
            return Err(SensingParamsError::Probability(self.p_detect));
        }
        Ok(())
    }
}

/// Sightings made by `robot` at time `t`, in the order of `persons`.
/// One Bernoulli draw is consumed per person in range.
pub fn sense(
    map: &EnvironmentMap,
    robot: &RobotPose,
    persons: &[PersonState],
    t: f64,
    params: &SensingParams,
    rng: &mut SimRng,
) -> Vec<TrackRecord> {
    let Some(here) = map.location_at(robot.position) else {
        return Vec::new();
    };
    persons
        .iter()
        .filter(|p| p.location == here && p.position.distance(robot.position) <= params.detect_radius)
        .filter(|_| rng.bernoulli(params.p_detect))
        .map(|p| TrackRecord {
            person_id: p.person_id,
            location: p.location,
            timestamp: t,
            observer: robot.robot_id,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{build_layout, LayoutId, Point};
    use crate::ids::{LocationId, PersonId, RobotId};

    fn robot_at(p: Point) -> RobotPose {
        RobotPose { robot_id: RobotId(3), position: p, heading: 0.0, speed: 0.25 }
    }

    fn person_at(loc: u32, p: Point) -> PersonState {
        PersonState { person_id: PersonId(1), location: LocationId(loc), position: p, entered_at: 0.0 }
    }

    #[test]
    fn certain_detection_in_range() {
        let map = build_layout(LayoutId::Env1);
        let params = SensingParams { p_detect: 1.0, ..Default::default() };
        let mut rng = SimRng::seed_from_u64(0);
        let recs = sense(
            &map,
            &robot_at(Point::new(2.0, 2.0)),
            &[person_at(0, Point::new(3.5, 2.0))],
            42.0,
            &params,
            &mut rng,
        );
        assert_eq!(
            recs,
            vec![TrackRecord {
                person_id: PersonId(1),
                location: LocationId(0),
                timestamp: 42.0,
                observer: RobotId(3)
            }]
        );
    }

    #[test]
    fn walls_block_sensing() {
        // Robot in the corridor (y = 5.5), person just south of the wall in room 0.
        let map = build_layout(LayoutId::Env1);
        let params = SensingParams { p_detect: 1.0, ..Default::default() };
        let mut rng = SimRng::seed_from_u64(0);
        let recs = sense(
            &map,
            &robot_at(Point::new(1.0, 5.5)),
            &[person_at(0, Point::new(1.0, 4.5))],
            1.0,
            &params,
            &mut rng,
        );
        assert!(recs.is_empty());
    }

    #[test]
    fn out_of_radius_never_detected() {
        let map = build_layout(LayoutId::Env1);
        let params = SensingParams { p_detect: 1.0, ..Default::default() };
        let mut rng = SimRng::seed_from_u64(0);
        let recs = sense(
            &map,
            &robot_at(Point::new(0.5, 0.5)),
            &[person_at(0, Point::new(5.0, 4.0))],
            1.0,
            &params,
            &mut rng,
        );
        assert!(recs.is_empty());
    }

    #[test]
    fn detection_frequency_matches_p_detect() {
        // Binomial(10^4, 0.9) has sd 0.003; the tolerance 0.01 is > 3 sd.
        let map = build_layout(LayoutId::Env1);
        let params = SensingParams::default();
        let mut rng = SimRng::seed_from_u64(12);
        let robot = robot_at(Point::new(2.0, 2.0));
        let person = [person_at(0, Point::new(3.5, 2.0))];
        let n = 10_000;
        let hits = (0..n)
            .filter(|_| !sense(&map, &robot, &person, 1.0, &params, &mut rng).is_empty())
            .count();
        assert!((hits as f64 / n as f64 - 0.9).abs() <= 0.01);
    }
}
