//! Layout description files.
//!
//! A layout file is TOML:
//!
//! ```toml
//! name = "two-rooms"
//!
//! [[locations]]
//! id = 0
//! kind = "room"              # or "corridor"
//! rect = [0.0, 0.0, 4.0, 4.0]  # x_min, y_min, x_max, y_max (meters)
//!
//! [[doorways]]
//! between = [0, 1]
//! segment = [[4.0, 1.5], [4.0, 2.5]]
//! ```
//!
//! Validation failures are reported with the line of the offending entry.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use super::{Doorway, EnvironmentMap, LayoutError, Location, LocationKind, Point, Rect, Segment};
use crate::ids::LocationId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationSpec {
    pub id: u32,
    pub kind: LocationKind,
    pub rect: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoorwaySpec {
    pub between: [u32; 2],
    pub segment: [[f64; 2]; 2],
}

/// Declarative layout, as read from a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub name: String,
    pub locations: Vec<LocationSpec>,
    #[serde(default)]
    pub doorways: Vec<DoorwaySpec>,
}

impl LayoutSpec {
    pub fn build(&self) -> Result<EnvironmentMap, LayoutError> {
        let locations = self
            .locations
            .iter()
            .map(|l| Location {
                id: LocationId(l.id),
                kind: l.kind,
                bounds: Rect::new(l.rect[0], l.rect[1], l.rect[2], l.rect[3]),
            })
            .collect();
        let doorways = self
            .doorways
            .iter()
            .map(|d| Doorway {
                loc_a: LocationId(d.between[0]),
                loc_b: LocationId(d.between[1]),
                segment: Segment::new(
                    Point::new(d.segment[0][0], d.segment[0][1]),
                    Point::new(d.segment[1][0], d.segment[1][1]),
                ),
            })
            .collect();
        EnvironmentMap::new(self.name.clone(), locations, doorways)
    }
}

#[derive(Debug, Error)]
pub enum LayoutFileError {
    #[error("cannot read layout file: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Parse(String),
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: LayoutError,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpannedLayout {
    name: String,
    locations: Vec<Spanned<LocationSpec>>,
    #[serde(default)]
    doorways: Vec<Spanned<DoorwaySpec>>,
}

/// Parses and validates layout text.
pub fn parse_layout(text: &str) -> Result<EnvironmentMap, LayoutFileError> {
    let raw: SpannedLayout =
        toml::from_str(text).map_err(|e| LayoutFileError::Parse(e.to_string()))?;
    let spec = LayoutSpec {
        name: raw.name.clone(),
        locations: raw.locations.iter().map(|s| s.get_ref().clone()).collect(),
        doorways: raw.doorways.iter().map(|s| s.get_ref().clone()).collect(),
    };
    spec.build().map_err(|source| {
        let line_of = |offset: usize| text[..offset.min(text.len())].matches('\n').count() + 1;
        let location_line = |id: LocationId| {
            raw.locations
                .iter()
                .find(|s| s.get_ref().id == id.0)
                .map(|s| line_of(s.span().start))
        };
        let line = match &source {
            LayoutError::InvalidLocation { id, .. } => location_line(*id),
            LayoutError::Overlap { b, .. } => location_line(*b),
            LayoutError::Disconnected(id, _) => location_line(*id),
            LayoutError::InvalidDoorway { index, .. } => {
                raw.doorways.get(*index).map(|s| line_of(s.span().start))
            }
            LayoutError::Empty => None,
        };
        LayoutFileError::Invalid { line: line.unwrap_or(1), source }
    })
}

pub fn load_layout_file(path: &Path) -> Result<EnvironmentMap, LayoutFileError> {
    parse_layout(&std::fs::read_to_string(path)?)
}
