//! Planar primitives in meters.
//!
//! Trigonometry goes through `libm` so that positions come out bit-identical
//! on every platform.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    /// Point reached by travelling `dist` along `heading` (radians, CCW from +x).
    pub fn advance(self, heading: f64, dist: f64) -> Point {
        Point::new(self.x + dist * libm::cos(heading), self.y + dist * libm::sin(heading))
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self { x_min, y_min, x_max, y_max }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn centroid(&self) -> Point {
        Point::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn is_well_formed(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    /// Half-open containment `[x_min, x_max) × [y_min, y_max)`.
    pub fn contains_half_open(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x < self.x_max && p.y >= self.y_min && p.y < self.y_max
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &Rect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    /// Rectangle shrunk by `margin` on every side, if anything is left.
    pub fn inset(&self, margin: f64) -> Option<Rect> {
        let r = Rect::new(
            self.x_min + margin,
            self.y_min + margin,
            self.x_max - margin,
            self.y_max - margin,
        );
        r.is_well_formed().then_some(r)
    }

    /// The four boundary edges, counter-clockwise from the south edge.
    pub fn edges(&self) -> [Segment; 4] {
        let (a, b, c, d) = (
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        );
        [Segment::new(a, b), Segment::new(b, c), Segment::new(d, c), Segment::new(a, d)]
    }
}

/// Orientation of an axis-aligned segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Constant y.
    Horizontal,
    /// Constant x.
    Vertical,
}

/// Closed line segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn axis(&self) -> Option<Axis> {
        if self.a.y == self.b.y && self.a.x != self.b.x {
            Some(Axis::Horizontal)
        } else if self.a.x == self.b.x && self.a.y != self.b.y {
            Some(Axis::Vertical)
        } else {
            None
        }
    }

    /// For an axis-aligned segment: (axis, fixed coordinate, lo, hi) along the free axis.
    pub fn span(&self) -> Option<(Axis, f64, f64, f64)> {
        let axis = self.axis()?;
        Some(match axis {
            Axis::Horizontal => (axis, self.a.y, self.a.x.min(self.b.x), self.a.x.max(self.b.x)),
            Axis::Vertical => (axis, self.a.x, self.a.y.min(self.b.y), self.a.y.max(self.b.y)),
        })
    }

    fn from_span(axis: Axis, fixed: f64, lo: f64, hi: f64) -> Segment {
        match axis {
            Axis::Horizontal => Segment::new(Point::new(lo, fixed), Point::new(hi, fixed)),
            Axis::Vertical => Segment::new(Point::new(fixed, lo), Point::new(fixed, hi)),
        }
    }

    /// Pieces of this axis-aligned segment left after removing the open `holes`.
    pub(crate) fn subtract(&self, holes: &[Segment]) -> Vec<Segment> {
        let Some((axis, fixed, lo, hi)) = self.span() else {
            return vec![*self];
        };
        let mut cuts: Vec<(f64, f64)> = holes
            .iter()
            .filter_map(|h| h.span())
            .filter(|&(ax, f, hlo, hhi)| ax == axis && (f - fixed).abs() < 1e-9 && hlo < hi && hhi > lo)
            .map(|(_, _, hlo, hhi)| (hlo.max(lo), hhi.min(hi)))
            .collect();
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out = Vec::new();
        let mut cursor = lo;
        for (clo, chi) in cuts {
            if clo > cursor {
                out.push(Segment::from_span(axis, fixed, cursor, clo));
            }
            cursor = cursor.max(chi);
        }
        if hi > cursor {
            out.push(Segment::from_span(axis, fixed, cursor, hi));
        }
        out
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2).clamp(0.0, 1.0)
        };
        p.distance(Point::new(self.a.x + t * dx, self.a.y + t * dy))
    }

    /// Ray parameter `t >= 0` at which `origin + t·(cos h, sin h)` meets this segment.
    pub fn ray_hit(&self, origin: Point, heading: f64) -> Option<f64> {
        let (dx, dy) = (libm::cos(heading), libm::sin(heading));
        let (ex, ey) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let denom = dx * ey - dy * ex;
        if denom.abs() < 1e-15 {
            return None;
        }
        let (wx, wy) = (self.a.x - origin.x, self.a.y - origin.y);
        let t = (wx * ey - wy * ex) / denom;
        let s = (wx * dy - wy * dx) / denom;
        const EPS: f64 = 1e-12;
        (t >= 0.0 && (-EPS..=1.0 + EPS).contains(&s)).then_some(t)
    }

    /// Parameter interval of the ray `origin + t·dir` (unit `dir`) inside the
    /// closed capsule of radius `radius` around this segment.
    pub(crate) fn capsule_interval(&self, origin: Point, dir: (f64, f64), radius: f64) -> Option<(f64, f64)> {
        let mut acc: Option<(f64, f64)> = None;
        let mut join = |iv: Option<(f64, f64)>| {
            if let Some((lo, hi)) = iv {
                acc = Some(match acc {
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                    None => (lo, hi),
                });
            }
        };
        join(disc_interval(self.a, origin, dir, radius));
        join(disc_interval(self.b, origin, dir, radius));
        if let Some((axis, fixed, lo, hi)) = self.span() {
            let slab = match axis {
                Axis::Horizontal => Rect::new(lo, fixed - radius, hi, fixed + radius),
                Axis::Vertical => Rect::new(fixed - radius, lo, fixed + radius, hi),
            };
            join(rect_interval(&slab, origin, dir));
        }
        acc
    }
}

fn disc_interval(center: Point, origin: Point, dir: (f64, f64), radius: f64) -> Option<(f64, f64)> {
    let (fx, fy) = (origin.x - center.x, origin.y - center.y);
    let b = fx * dir.0 + fy * dir.1;
    let c = fx * fx + fy * fy - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some((-b - sq, -b + sq))
}

fn rect_interval(r: &Rect, origin: Point, dir: (f64, f64)) -> Option<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for (o, d, lo, hi) in [(origin.x, dir.0, r.x_min, r.x_max), (origin.y, dir.1, r.y_min, r.y_max)] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - o) / d, (hi - o) / d);
            t_lo = t_lo.max(a.min(b));
            t_hi = t_hi.min(a.max(b));
        }
    }
    (t_lo <= t_hi).then_some((t_lo, t_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtract_cuts_holes() {
        let wall = Segment::new(Point::new(5.0, 0.0), Point::new(5.0, 4.0));
        let hole = Segment::new(Point::new(5.0, 2.5), Point::new(5.0, 1.5));
        let parts = wall.subtract(&[hole]);
        assert_eq!(
            parts,
            vec![
                Segment::new(Point::new(5.0, 0.0), Point::new(5.0, 1.5)),
                Segment::new(Point::new(5.0, 2.5), Point::new(5.0, 4.0)),
            ]
        );
    }

    #[test]
    fn subtract_ignores_parallel_offset_hole() {
        let wall = Segment::new(Point::new(0.0, 0.0), Point::new(4.0, 0.0));
        let hole = Segment::new(Point::new(1.0, 0.5), Point::new(2.0, 0.5));
        assert_eq!(wall.subtract(&[hole]), vec![wall]);
    }

    #[test]
    fn ray_hit_axis_aligned() {
        let wall = Segment::new(Point::new(5.0, 0.0), Point::new(5.0, 4.0));
        assert_eq!(wall.ray_hit(Point::new(1.0, 1.0), 0.0), Some(4.0));
        assert_eq!(wall.ray_hit(Point::new(1.0, 1.0), std::f64::consts::PI), None);
    }

    #[test]
    fn capsule_interval_head_on() {
        let wall = Segment::new(Point::new(5.0, 0.0), Point::new(5.0, 4.0));
        let (lo, hi) = wall
            .capsule_interval(Point::new(1.0, 2.0), (1.0, 0.0), 0.2)
            .unwrap();
        assert!((lo - 3.8).abs() < 1e-12);
        assert!((hi - 4.2).abs() < 1e-12);
    }

    #[test]
    fn capsule_interval_misses_past_endpoint() {
        let wall = Segment::new(Point::new(5.0, 0.0), Point::new(5.0, 4.0));
        assert!(wall
            .capsule_interval(Point::new(1.0, 4.5), (1.0, 0.0), 0.2)
            .is_none());
    }

    #[test]
    fn point_segment_distance() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(4.0, 0.0));
        assert_eq!(s.distance_to_point(Point::new(2.0, 3.0)), 3.0);
        assert_eq!(s.distance_to_point(Point::new(7.0, 4.0)), 5.0);
    }
}
