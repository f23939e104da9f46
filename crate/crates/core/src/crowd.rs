//! Persons as Markov automatons hopping between adjacent locations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{EnvironmentMap, LocationKind, Point};
use crate::ids::{LocationId, PersonId};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonState {
    pub person_id: PersonId,
    pub location: LocationId,
    pub position: Point,
    pub entered_at: f64,
}

/// A person moving from one location to another at a check boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub person_id: PersonId,
    pub from: LocationId,
    pub to: LocationId,
    /// Kind of the destination, kept so logs are self-describing.
    pub to_kind: LocationKind,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrowdParams {
    /// Seconds between move checks.
    pub check_interval: f64,
    pub p_leave_room: f64,
    pub p_leave_corridor: f64,
}

impl Default for CrowdParams {
    fn default() -> Self {
        Self {
            check_interval: 20.0,
            p_leave_room: 0.1,
            p_leave_corridor: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrowdParamsError {
    #[error("check_interval must be positive, got {0}")]
    CheckInterval(f64),
    #[error("leave probabilities must satisfy 0 < p_leave_room < p_leave_corridor <= 1, got {0} and {1}")]
    Probabilities(f64, f64),
}

impl CrowdParams {
    pub fn validate(&self) -> Result<(), CrowdParamsError> {
        if !(self.check_interval > 0.0 && self.check_interval.is_finite()) {
            return Err(CrowdParamsError::CheckInterval(self.check_interval));
        }
        let (r, c) = (self.p_leave_room, self.p_leave_corridor);
        if !(0.0 < r && r < c && c <= 1.0) {
            return Err(CrowdParamsError::Probabilities(r, c));
        }
        Ok(())
    }

    pub fn p_leave(&self, kind: LocationKind) -> f64 {
        match kind {
            LocationKind::Room => self.p_leave_room,
            LocationKind::Corridor => self.p_leave_corridor,
        }
    }
}

/// Mean dwell time in a location of `kind`: the check interval times the
/// mean of a geometric number of checks.
pub fn expected_dwell(kind: LocationKind, params: &CrowdParams) -> f64 {
    params.check_interval / params.p_leave(kind)
}

/// One move check for `person` at check time `t`.
///
/// The leave draw is always made; the destination and position draws only
/// when the person actually moves.
pub fn step_person(
    map: &EnvironmentMap,
    person: &PersonState,
    t: f64,
    params: &CrowdParams,
    rng: &mut SimRng,
) -> (PersonState, Option<Transition>) {
    let kind = map
        .location(person.location)
        .map(|l| l.kind)
        .unwrap_or(LocationKind::Room);
    if !rng.bernoulli(params.p_leave(kind)) {
        return (*person, None);
    }
    let neighbors: Vec<LocationId> = map.neighbors(person.location).collect();
    if neighbors.is_empty() {
        return (*person, None);
    }
    let to = neighbors[rng.index(neighbors.len())];
    let position = map
        .sample_free_point(rng, Some(to))
        .expect("validated locations admit the agent inset");
    let to_kind = map.location(to).map(|l| l.kind).expect("neighbor exists");
    let next = PersonState { location: to, position, entered_at: t, ..*person };
    let transition = Transition {
        person_id: person.person_id,
        from: person.location,
        to,
        to_kind,
        time: t,
    };
    (next, Some(transition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{build_layout, LayoutId, Location, Rect};

    const CORRIDOR: LocationId = LocationId(5);

    fn person_in(map: &EnvironmentMap, loc: LocationId) -> PersonState {
        let pos = map.location(loc).unwrap().bounds.centroid();
        PersonState { person_id: PersonId(0), location: loc, position: pos, entered_at: 0.0 }
    }

    #[test]
    fn expected_dwell_defaults() {
        let p = CrowdParams::default();
        assert_eq!(expected_dwell(LocationKind::Room, &p), 200.0);
        assert!((expected_dwell(LocationKind::Corridor, &p) - 22.222_222_222_222_22).abs() < 1e-9);
        let always = CrowdParams { p_leave_room: 0.5, p_leave_corridor: 1.0, ..p };
        assert_eq!(expected_dwell(LocationKind::Corridor, &always), 20.0);
    }

    #[test]
    fn forced_stay_is_unchanged() {
        let map = build_layout(LayoutId::Env1);
        let params = CrowdParams { p_leave_room: 1e-300, ..Default::default() };
        let person = person_in(&map, LocationId(0));
        let mut rng = SimRng::seed_from_u64(1);
        let (next, tr) = step_person(&map, &person, 20.0, &params, &mut rng);
        assert_eq!(next, person);
        assert!(tr.is_none());
    }

    #[test]
    fn forced_leave_single_neighbor() {
        let map = build_layout(LayoutId::Env1);
        let params = CrowdParams { p_leave_room: 0.99, p_leave_corridor: 1.0, ..Default::default() };
        let mut rng = SimRng::seed_from_u64(4);
        let person = person_in(&map, LocationId(2));
        loop {
            let (next, tr) = step_person(&map, &person, 40.0, &params, &mut rng);
            if let Some(tr) = tr {
                assert_eq!((tr.from, tr.to, tr.time), (LocationId(2), CORRIDOR, 40.0));
                assert_eq!(tr.to_kind, LocationKind::Corridor);
                assert_eq!(next.location, CORRIDOR);
                assert_eq!(next.entered_at, 40.0);
                assert!(map.location(CORRIDOR).unwrap().bounds.contains_half_open(next.position));
                break;
            }
        }
    }

    #[test]
    fn corridor_exit_uniform_over_neighbors() {
        // Env2's corridor has 5 neighbors; frequencies within 0.02 of 1/5
        // over 10^4 forced leaves (about 5 standard errors).
        let map = build_layout(LayoutId::Env2);
        let params = CrowdParams { p_leave_room: 0.5, p_leave_corridor: 1.0, ..Default::default() };
        let person = person_in(&map, CORRIDOR);
        let mut rng = SimRng::seed_from_u64(8);
        let mut counts = std::collections::BTreeMap::new();
        let n = 10_000;
        for _ in 0..n {
            let (_, tr) = step_person(&map, &person, 20.0, &params, &mut rng);
            *counts.entry(tr.unwrap().to).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 5);
        for (_, c) in counts {
            assert!((c as f64 / n as f64 - 0.2).abs() < 0.02);
        }
    }

    #[test]
    fn isolated_location_stays() {
        let map = EnvironmentMap::new(
            "solo",
            vec![Location {
                id: LocationId(0),
                kind: LocationKind::Room,
                bounds: Rect::new(0.0, 0.0, 4.0, 4.0),
            }],
            vec![],
        )
        .unwrap();
        let params = CrowdParams { p_leave_room: 0.99, p_leave_corridor: 1.0, ..Default::default() };
        let person = person_in(&map, LocationId(0));
        let mut rng = SimRng::seed_from_u64(4);
        for _ in 0..20 {
            let (next, tr) = step_person(&map, &person, 20.0, &params, &mut rng);
            assert_eq!(next, person);
            assert!(tr.is_none());
        }
    }

    #[test]
    fn params_validation() {
        assert!(CrowdParams::default().validate().is_ok());
        let bad = CrowdParams { p_leave_room: 0.9, p_leave_corridor: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = CrowdParams { check_interval: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
