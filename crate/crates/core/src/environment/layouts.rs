//! Four built-in office layouts: five rooms around one 2 m wide corridor.
//!
//! Rooms have ids 0..=4 and the corridor is id 5. Doorways are 1.4 m wide.

use super::{EnvironmentMap, LayoutId, LayoutSpec, LocationKind};
use super::spec::{DoorwaySpec, LocationSpec};

const CORRIDOR: u32 = 5;

/// Clear doorway width. Narrower openings leave a 0.4 m robot only a few
/// centimetres of admissible headings and it rarely leaves a room.
pub const DOOR_WIDTH: f64 = 1.4;

fn loc(id: u32, kind: LocationKind, rect: [f64; 4]) -> LocationSpec {
    LocationSpec { id, kind, rect }
}

fn room(id: u32, rect: [f64; 4]) -> LocationSpec {
    loc(id, LocationKind::Room, rect)
}

/// Doorway on the horizontal wall `y`, centred on `x`.
fn door_h(a: u32, b: u32, y: f64, x: f64) -> DoorwaySpec {
    let h = DOOR_WIDTH / 2.0;
    DoorwaySpec { between: [a, b], segment: [[x - h, y], [x + h, y]] }
}

/// Doorway on the vertical wall `x`, centred on `y`.
fn door_v(a: u32, b: u32, x: f64, y: f64) -> DoorwaySpec {
    let h = DOOR_WIDTH / 2.0;
    DoorwaySpec { between: [a, b], segment: [[x, y - h], [x, y + h]] }
}

pub fn layout_spec(id: LayoutId) -> LayoutSpec {
    let (locations, doorways) = match id {
        // 14 m corridor; two rooms below, three above.
        LayoutId::Env1 => (
            vec![
                room(0, [0.0, 0.0, 6.0, 5.0]),
                room(1, [6.0, 0.0, 11.0, 5.0]),
                room(2, [0.0, 7.0, 5.0, 11.0]),
                room(3, [5.0, 7.0, 10.0, 11.0]),
                room(4, [10.0, 7.0, 14.0, 11.0]),
                loc(CORRIDOR, LocationKind::Corridor, [0.0, 5.0, 14.0, 7.0]),
            ],
            vec![
                door_h(0, CORRIDOR, 5.0, 3.0),
                door_h(1, CORRIDOR, 5.0, 8.5),
                door_h(2, CORRIDOR, 7.0, 2.5),
                door_h(3, CORRIDOR, 7.0, 7.5),
                door_h(4, CORRIDOR, 7.0, 12.0),
            ],
        ),
        // 10 m corridor capped by a room at its east end; the two south
        // rooms also connect to each other.
        LayoutId::Env2 => (
            vec![
                room(0, [0.0, 0.0, 5.0, 5.0]),
                room(1, [5.0, 0.0, 10.0, 5.0]),
                room(2, [0.0, 7.0, 5.0, 12.0]),
                room(3, [5.0, 7.0, 10.0, 12.0]),
                room(4, [10.0, 4.0, 14.0, 8.0]),
                loc(CORRIDOR, LocationKind::Corridor, [0.0, 5.0, 10.0, 7.0]),
            ],
            vec![
                door_h(0, CORRIDOR, 5.0, 2.5),
                door_h(1, CORRIDOR, 5.0, 7.5),
                door_h(2, CORRIDOR, 7.0, 2.5),
                door_h(3, CORRIDOR, 7.0, 7.5),
                door_v(4, CORRIDOR, 10.0, 6.0),
                door_v(0, 1, 5.0, 2.0),
            ],
        ),
        // 16 m vertical corridor; three rooms west, two east, with
        // room-to-room doors on both sides.
        LayoutId::Env3 => (
            vec![
                room(0, [0.0, 0.0, 5.0, 5.0]),
                room(1, [0.0, 5.0, 5.0, 10.0]),
                room(2, [0.0, 10.0, 5.0, 16.0]),
                room(3, [7.0, 0.0, 12.0, 6.0]),
                room(4, [7.0, 6.0, 11.0, 10.0]),
                loc(CORRIDOR, LocationKind::Corridor, [5.0, 0.0, 7.0, 16.0]),
            ],
            vec![
                door_v(0, CORRIDOR, 5.0, 2.5),
                door_v(1, CORRIDOR, 5.0, 7.5),
                door_v(2, CORRIDOR, 5.0, 13.0),
                door_v(3, CORRIDOR, 7.0, 3.0),
                door_v(4, CORRIDOR, 7.0, 8.0),
                door_h(0, 1, 5.0, 2.5),
                door_h(3, 4, 6.0, 9.0),
            ],
        ),
        // 16 m corridor with rooms spread along it and gaps in between.
        LayoutId::Env4 => (
            vec![
                room(0, [0.0, 0.0, 5.0, 5.0]),
                room(1, [11.0, 0.0, 16.0, 5.0]),
                room(2, [0.0, 7.0, 4.0, 11.0]),
                room(3, [6.0, 7.0, 10.0, 11.0]),
                room(4, [12.0, 7.0, 16.0, 11.0]),
                loc(CORRIDOR, LocationKind::Corridor, [0.0, 5.0, 16.0, 7.0]),
            ],
            vec![
                door_h(0, CORRIDOR, 5.0, 2.5),
                door_h(1, CORRIDOR, 5.0, 13.5),
                door_h(2, CORRIDOR, 7.0, 2.0),
                door_h(3, CORRIDOR, 7.0, 8.0),
                door_h(4, CORRIDOR, 7.0, 14.0),
            ],
        ),
    };
    LayoutSpec { name: id.to_string(), locations, doorways }
}

/// Builds a built-in layout.
pub fn build_layout(id: LayoutId) -> EnvironmentMap {
    layout_spec(id)
        .build()
        .unwrap_or_else(|e| panic!("built-in layout {id} is invalid: {e}"))
}
