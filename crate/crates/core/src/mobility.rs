//! Ballistic random walk.
//!
//! A robot drives straight until its body would touch a wall, stops at the
//! standoff point and draws a fresh heading among those with room to move.
//! Robots pass through each other and through persons.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::environment::{EnvironmentMap, Point, AGENT_RADIUS};
use crate::ids::RobotId;
use crate::rng::SimRng;

pub const DEFAULT_SPEED: f64 = 0.5;

const HEADING_RETRIES: usize = 64;
const FALLBACK_PROBES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotPose {
    pub robot_id: RobotId,
    pub position: Point,
    /// Radians in `[0, 2π)`.
    pub heading: f64,
    /// Meters per second.
    pub speed: f64,
}

/// Advances `pose` by one time step of `dt` seconds.
pub fn step_robot(map: &EnvironmentMap, pose: &RobotPose, dt: f64, rng: &mut SimRng) -> RobotPose {
    let travel = pose.speed * dt;
    let free = map.clearance(pose.position, pose.heading, AGENT_RADIUS);
    if free > travel {
        RobotPose {
            position: pose.position.advance(pose.heading, travel),
            ..*pose
        }
    } else {
        let position = pose.position.advance(pose.heading, free.max(0.0));
        RobotPose {
            position,
            heading: resample_heading(map, position, rng),
            ..*pose
        }
    }
}

/// Uniform heading among those leaving at least one agent radius of free
/// travel; falls back to the most open of 16 evenly spaced probes.
pub fn resample_heading(map: &EnvironmentMap, position: Point, rng: &mut SimRng) -> f64 {
    for _ in 0..HEADING_RETRIES {
        let h = rng.heading();
        if map.clearance(position, h, AGENT_RADIUS) > AGENT_RADIUS {
            return h;
        }
    }
    (0..FALLBACK_PROBES)
        .map(|k| TAU * k as f64 / FALLBACK_PROBES as f64)
        .map(|h| (h, map.clearance(position, h, AGENT_RADIUS)))
        .fold((0.0, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{build_layout, LayoutId, Location, LocationKind, Rect};
    use crate::ids::LocationId;

    fn closed_room() -> EnvironmentMap {
        EnvironmentMap::new(
            "box",
            vec![Location {
                id: LocationId(0),
                kind: LocationKind::Room,
                bounds: Rect::new(0.0, 0.0, 10.0, 6.0),
            }],
            vec![],
        )
        .unwrap()
    }

    fn pose(x: f64, y: f64, heading: f64) -> RobotPose {
        RobotPose { robot_id: RobotId(0), position: Point::new(x, y), heading, speed: 0.25 }
    }

    #[test]
    fn free_step_advances_without_turning() {
        let map = closed_room();
        let mut rng = SimRng::seed_from_u64(1);
        // 5 m from the east wall.
        let p = pose(5.0, 3.0, 0.0);
        let next = step_robot(&map, &p, 0.1, &mut rng);
        assert!((next.position.x - 5.025).abs() < 1e-12);
        assert_eq!(next.position.y, 3.0);
        assert_eq!(next.heading, 0.0);
    }

    #[test]
    fn collision_stops_at_standoff_and_turns() {
        let map = closed_room();
        let mut rng = SimRng::seed_from_u64(1);
        // 0.01 m short of the standoff line x = 9.8.
        let p = pose(9.79, 3.0, 0.0);
        let next = step_robot(&map, &p, 0.1, &mut rng);
        assert!(next.position.distance(p.position) <= 0.01 + 1e-12);
        assert_ne!(next.heading, 0.0);
        assert!(map.clearance(next.position, next.heading, AGENT_RADIUS) > AGENT_RADIUS);
    }

    #[test]
    fn corridor_wall_heading_has_room() {
        // 1.2 m wide corridor, robot hugging the south standoff line.
        let map = EnvironmentMap::new(
            "corr",
            vec![Location {
                id: LocationId(0),
                kind: LocationKind::Corridor,
                bounds: Rect::new(0.0, 0.0, 12.0, 1.2),
            }],
            vec![],
        )
        .unwrap();
        let mut rng = SimRng::seed_from_u64(5);
        let at = Point::new(6.0, 0.2);
        for _ in 0..200 {
            let h = resample_heading(&map, at, &mut rng);
            assert!(map.raycast_wall(at, h).unwrap() > 2.0 * AGENT_RADIUS);
        }
    }

    #[test]
    fn degenerate_corner_falls_back() {
        // Pinned into a corner of a box too small to leave any heading open.
        let map = EnvironmentMap::new(
            "tight",
            vec![Location {
                id: LocationId(0),
                kind: LocationKind::Corridor,
                bounds: Rect::new(0.0, 0.0, 1.2, 0.55 + 0.65),
            }],
            vec![],
        )
        .unwrap();
        let mut rng = SimRng::seed_from_u64(9);
        let h = resample_heading(&map, Point::new(0.6, 0.6), &mut rng);
        assert!((0.0..TAU).contains(&h));
    }

    #[test]
    fn heading_uniform_at_room_center() {
        // Chi-square over 16 bins; critical value for 15 dof at p = 0.001 is 37.70.
        let map = closed_room();
        let mut rng = SimRng::seed_from_u64(2024);
        let mut bins = [0usize; 16];
        let n = 10_000;
        for _ in 0..n {
            let h = resample_heading(&map, Point::new(5.0, 3.0), &mut rng);
            bins[((h / TAU) * 16.0) as usize] += 1;
        }
        let expected = n as f64 / 16.0;
        let chi2: f64 = bins.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 37.70, "chi2 = {chi2}");
    }

    #[test]
    fn long_walk_stays_in_closed_room() {
        let map = closed_room();
        let mut rng = SimRng::seed_from_u64(77);
        let mut p = pose(5.0, 3.0, 1.0);
        let inner = Rect::new(0.2 - 1e-9, 0.2 - 1e-9, 9.8 + 1e-9, 5.8 + 1e-9);
        for _ in 0..100_000 {
            p = step_robot(&map, &p, 0.1, &mut rng);
            assert!(inner.contains_closed(p.position), "{p:?}");
        }
    }

    #[test]
    fn deterministic_for_same_rng_state() {
        let map = build_layout(LayoutId::Env2);
        let start = pose(2.0, 6.0, 0.3);
        let run = |seed| {
            let mut rng = SimRng::seed_from_u64(seed);
            let mut p = start;
            for _ in 0..5000 {
                p = step_robot(&map, &p, 0.1, &mut rng);
            }
            p
        };
        assert_eq!(run(11), run(11));
    }
}
