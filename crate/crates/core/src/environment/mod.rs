//! The office world: rectangular rooms and corridors joined by doorways.
//!
//! Every location boundary is a wall except where a doorway cuts an open
//! hole in it. Containment uses half-open rectangles so that a point on a
//! shared boundary belongs to exactly one location.

mod geometry;
mod layouts;
mod spec;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geometry::{Axis, Point, Rect, Segment};
pub use layouts::build_layout;
pub use spec::{load_layout_file, parse_layout, DoorwaySpec, LayoutFileError, LayoutSpec, LocationSpec};

use crate::ids::LocationId;
use crate::rng::SimRng;

/// Radius of robots and persons; walls are kept at least this far from agent centers.
pub const AGENT_RADIUS: f64 = 0.2;
pub const MIN_ROOM_AREA: f64 = 4.0;
pub const MIN_CORRIDOR_WIDTH: f64 = 1.2;
pub const MIN_DOORWAY_WIDTH: f64 = 0.8;

const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocationKind {
    Room,
    Corridor,
}

impl fmt::Display for LocationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocationKind::Room => "room",
            LocationKind::Corridor => "corridor",
        })
    }
}

impl FromStr for LocationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "room" => Ok(LocationKind::Room),
            "corridor" => Ok(LocationKind::Corridor),
            other => Err(format!("unknown location kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: LocationId,
    pub kind: LocationKind,
    pub bounds: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Doorway {
    pub loc_a: LocationId,
    pub loc_b: LocationId,
    pub segment: Segment,
}

impl Doorway {
    pub fn width(&self) -> f64 {
        self.segment.length()
    }
}

/// Built-in layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LayoutId {
    Env1,
    Env2,
    Env3,
    Env4,
}

impl LayoutId {
    pub const ALL: [LayoutId; 4] = [LayoutId::Env1, LayoutId::Env2, LayoutId::Env3, LayoutId::Env4];
}

impl fmt::Display for LayoutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LayoutId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "env1" => Ok(LayoutId::Env1),
            "env2" => Ok(LayoutId::Env2),
            "env3" => Ok(LayoutId::Env3),
            "env4" => Ok(LayoutId::Env4),
            _ => Err(format!("unknown layout `{s}` (expected Env1..Env4)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("layout has no locations")]
    Empty,
    #[error("location {id}: {reason}")]
    InvalidLocation { id: LocationId, reason: String },
    #[error("location {a} overlaps location {b}")]
    Overlap { a: LocationId, b: LocationId },
    #[error("doorway #{index} ({a}-{b}): {reason}")]
    InvalidDoorway {
        index: usize,
        a: LocationId,
        b: LocationId,
        reason: String,
    },
    #[error("location {0} is not reachable from location {1} through doorways")]
    Disconnected(LocationId, LocationId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("point ({}, {}) is outside every location", .0.x, .0.y)]
    OutsideWorld(Point),
    #[error("unknown location {0}")]
    UnknownLocation(LocationId),
    #[error("location {0} is too small for the agent inset")]
    TooSmall(LocationId),
}

/// A validated, immutable office map.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    name: String,
    locations: Vec<Location>,
    doorways: Vec<Doorway>,
    walls: Vec<Segment>,
    adjacency: BTreeMap<LocationId, BTreeSet<LocationId>>,
}

impl EnvironmentMap {
    /// Validates the parts and assembles a map. Locations are stored sorted by id.
    pub fn new(
        name: impl Into<String>,
        mut locations: Vec<Location>,
        doorways: Vec<Doorway>,
    ) -> Result<Self, LayoutError> {
        if locations.is_empty() {
            return Err(LayoutError::Empty);
        }
        locations.sort_by_key(|l| l.id);
        for pair in locations.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(LayoutError::InvalidLocation {
                    id: pair[0].id,
                    reason: "duplicate id".into(),
                });
            }
        }
        for loc in &locations {
            validate_location(loc)?;
        }
        for (i, a) in locations.iter().enumerate() {
            for b in &locations[i + 1..] {
                if a.bounds.interiors_overlap(&b.bounds) {
                    return Err(LayoutError::Overlap { a: a.id, b: b.id });
                }
            }
        }

        let mut adjacency: BTreeMap<LocationId, BTreeSet<LocationId>> =
            locations.iter().map(|l| (l.id, BTreeSet::new())).collect();
        for (index, door) in doorways.iter().enumerate() {
            let invalid = |reason: &str| LayoutError::InvalidDoorway {
                index,
                a: door.loc_a,
                b: door.loc_b,
                reason: reason.to_string(),
            };
            if door.loc_a == door.loc_b {
                return Err(invalid("joins a location to itself"));
            }
            let find = |id| locations.iter().find(|l| l.id == id);
            let (Some(a), Some(b)) = (find(door.loc_a), find(door.loc_b)) else {
                return Err(invalid("references an unknown location"));
            };
            if door.width().is_nan() || door.width() < MIN_DOORWAY_WIDTH {
                return Err(invalid(&format!(
                    "width {} m is below {MIN_DOORWAY_WIDTH} m",
                    door.width()
                )));
            }
            if !on_shared_boundary(&door.segment, &a.bounds, &b.bounds) {
                return Err(invalid("segment does not lie on the shared boundary"));
            }
            adjacency.entry(a.id).or_default().insert(b.id);
            adjacency.entry(b.id).or_default().insert(a.id);
        }

        let root = locations[0].id;
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(id) = queue.pop_front() {
            for &n in &adjacency[&id] {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        if let Some(lost) = locations.iter().find(|l| !seen.contains(&l.id)) {
            return Err(LayoutError::Disconnected(lost.id, root));
        }

        let holes: Vec<Segment> = doorways.iter().map(|d| d.segment).collect();
        let walls = locations
            .iter()
            .flat_map(|l| l.bounds.edges())
            .flat_map(|edge| edge.subtract(&holes))
            .collect();

        Ok(Self {
            name: name.into(),
            locations,
            doorways,
            walls,
            adjacency,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn doorways(&self) -> &[Doorway] {
        &self.doorways
    }

    /// Solid wall segments: every location edge minus doorway holes.
    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn location(&self, id: LocationId) -> Option<&Location> {
        self.locations
            .binary_search_by_key(&id, |l| l.id)
            .ok()
            .map(|i| &self.locations[i])
    }

    /// Room ids in ascending order.
    pub fn rooms(&self) -> Vec<LocationId> {
        self.locations
            .iter()
            .filter(|l| l.kind == LocationKind::Room)
            .map(|l| l.id)
            .collect()
    }

    /// Location whose half-open rectangle contains `p`.
    pub fn location_at(&self, p: Point) -> Option<LocationId> {
        self.locations
            .iter()
            .find(|l| l.bounds.contains_half_open(p))
            .map(|l| l.id)
    }

    pub fn adjacency(&self) -> &BTreeMap<LocationId, BTreeSet<LocationId>> {
        &self.adjacency
    }

    pub fn neighbors(&self, id: LocationId) -> impl Iterator<Item = LocationId> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    /// Distance from `origin` along `heading` to the first solid wall.
    /// Doorways are holes, so the ray continues into adjacent locations.
    pub fn raycast_wall(&self, origin: Point, heading: f64) -> Result<f64, QueryError> {
        if self.location_at(origin).is_none() {
            return Err(QueryError::OutsideWorld(origin));
        }
        Ok(self
            .walls
            .iter()
            .filter_map(|w| w.ray_hit(origin, heading))
            .fold(f64::INFINITY, f64::min))
    }

    /// Distance a disc of `radius` centred at `origin` can travel along
    /// `heading` before touching a solid wall. Zero when it already touches
    /// a wall it is moving into.
    pub fn clearance(&self, origin: Point, heading: f64, radius: f64) -> f64 {
        let dir = (libm::cos(heading), libm::sin(heading));
        self.walls
            .iter()
            .filter_map(|w| w.capsule_interval(origin, dir, radius))
            .filter(|&(_, t_out)| t_out > BOUNDARY_EPS)
            .map(|(t_in, _)| t_in.max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the nearest solid wall.
    pub fn wall_distance(&self, p: Point) -> f64 {
        self.walls
            .iter()
            .map(|w| w.distance_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniform point inside a location (or anywhere in the world when
    /// `location` is `None`), kept [`AGENT_RADIUS`] away from its edges.
    pub fn sample_free_point(
        &self,
        rng: &mut SimRng,
        location: Option<LocationId>,
    ) -> Result<Point, QueryError> {
        let area = match location {
            Some(id) => {
                let loc = self.location(id).ok_or(QueryError::UnknownLocation(id))?;
                loc.bounds.inset(AGENT_RADIUS).ok_or(QueryError::TooSmall(id))?
            }
            None => {
                let insets: Vec<Rect> = self
                    .locations
                    .iter()
                    .filter_map(|l| l.bounds.inset(AGENT_RADIUS))
                    .collect();
                let total: f64 = insets.iter().map(Rect::area).sum();
                let mut pick = rng.uniform(0.0, total);
                let mut chosen = *insets.last().ok_or(QueryError::TooSmall(self.locations[0].id))?;
                for r in &insets {
                    if pick < r.area() {
                        chosen = *r;
                        break;
                    }
                    pick -= r.area();
                }
                chosen
            }
        };
        let x = rng.uniform(area.x_min, area.x_max);
        let y = rng.uniform(area.y_min, area.y_max);
        Ok(Point::new(x, y))
    }
}

fn validate_location(loc: &Location) -> Result<(), LayoutError> {
    let invalid = |reason: String| LayoutError::InvalidLocation { id: loc.id, reason };
    let b = &loc.bounds;
    if !b.is_well_formed() {
        return Err(invalid(format!(
            "malformed rectangle ({}, {}, {}, {})",
            b.x_min, b.y_min, b.x_max, b.y_max
        )));
    }
    match loc.kind {
        LocationKind::Room if b.area() < MIN_ROOM_AREA => Err(invalid(format!(
            "room area {} m² is below {MIN_ROOM_AREA} m²",
            b.area()
        ))),
        LocationKind::Corridor if b.width().min(b.height()) < MIN_CORRIDOR_WIDTH => {
            Err(invalid(format!(
                "corridor width {} m is below {MIN_CORRIDOR_WIDTH} m",
                b.width().min(b.height())
            )))
        }
        _ => Ok(()),
    }
}

fn on_shared_boundary(seg: &Segment, a: &Rect, b: &Rect) -> bool {
    let close = |u: f64, v: f64| (u - v).abs() <= BOUNDARY_EPS;
    let within = |lo: f64, hi: f64, r_lo: f64, r_hi: f64| lo >= r_lo - BOUNDARY_EPS && hi <= r_hi + BOUNDARY_EPS;
    match seg.span() {
        Some((Axis::Vertical, x, lo, hi)) => {
            ((close(a.x_max, x) && close(b.x_min, x)) || (close(b.x_max, x) && close(a.x_min, x)))
                && within(lo, hi, a.y_min, a.y_max)
                && within(lo, hi, b.y_min, b.y_max)
        }
        Some((Axis::Horizontal, y, lo, hi)) => {
            ((close(a.y_max, y) && close(b.y_min, y)) || (close(b.y_max, y) && close(a.y_min, y)))
                && within(lo, hi, a.x_min, a.x_max)
                && within(lo, hi, b.x_min, b.x_max)
        }
        None => false,
    }
}
