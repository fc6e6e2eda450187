//! Planar primitives: points, annular sectors and axis-aligned rectangles,
//! with the line-intersection routines used for the `W′` target width.
//!
//! Coordinates are normalized to the keyboard square `[-1, 1]²`, `y` up,
//! angles in radians counter-clockwise from `+x`.

use std::f64::consts::TAU;

use serde::ser::{Serialize, SerializeTuple, Serializer};
use thiserror::Error;

/// Touching intervals closer than this are treated as one.
const JOIN_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid ring radii {0:?}: need 0 < r1 < r2 < r3 <= 1")]
    InvalidRadii((f64, f64, f64)),
    #[error("invalid sector r=[{r_in}, {r_out}) a=[{a_start}, {a_end})")]
    InvalidSector {
        r_in: f64,
        r_out: f64,
        a_start: f64,
        a_end: f64,
    },
    #[error("movement origin coincides with the target center; direction undefined")]
    DegenerateDirection,
    #[error("target center is not inside the target shape")]
    CenterOutside,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        Point::new(r * angle.cos(), r * angle.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The line `origin + s·dir`, `dir` of unit length.
#[derive(Debug, Clone, Copy)]
pub struct Line {
    pub origin: Point,
    pub dir: Point,
}

impl Line {
    /// Line through `from` and `to`, parameterized so that `to` sits at
    /// `s = |to - from|`.
    pub fn through(from: Point, to: Point) -> Result<Line, GeometryError> {
        let d = to - from;
        let len = d.norm();
        if len < 1e-12 {
            return Err(GeometryError::DegenerateDirection);
        }
        Ok(Line {
            origin: from,
            dir: d.scale(1.0 / len),
        })
    }

    pub fn at(&self, s: f64) -> Point {
        self.origin + self.dir.scale(s)
    }

    /// Parameters where the line meets the circle of radius `r` about (0,0).
    fn circle_hits(&self, r: f64) -> Option<(f64, f64)> {
        let b = self.origin.dot(self.dir);
        let c = self.origin.dot(self.origin) - r * r;
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        Some((-b - root, -b + root))
    }

    /// Parameter where the line crosses the full line through (0,0) at `angle`.
    fn radial_hit(&self, angle: f64) -> Option<f64> {
        let v = Point::polar(1.0, angle);
        let denom = self.dir.cross(v);
        (denom.abs() > 1e-15).then(|| -self.origin.cross(v) / denom)
    }
}

/// Ring segment `r_in <= r < r_out`, `a_start <= θ < a_end` (angles taken
/// modulo 2π). A half disc has `r_in = 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AnnularSector {
    pub r_in: f64,
    pub r_out: f64,
    pub a_start: f64,
    pub a_end: f64,
}

impl AnnularSector {
    pub fn new(r_in: f64, r_out: f64, a_start: f64, a_end: f64) -> Result<Self, GeometryError> {
        let ok = r_in >= 0.0
            && r_in < r_out
            && r_out <= 1.0
            && a_start < a_end
            && a_end <= a_start + TAU + 1e-12
            && [r_in, r_out, a_start, a_end].iter().all(|v| v.is_finite());
        if !ok {
            return Err(GeometryError::InvalidSector {
                r_in,
                r_out,
                a_start,
                a_end,
            });
        }
        Ok(AnnularSector {
            r_in,
            r_out,
            a_start,
            a_end,
        })
    }

    pub fn angular_width(&self) -> f64 {
        self.a_end - self.a_start
    }

    pub fn area(&self) -> f64 {
        0.5 * self.angular_width() * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    /// Offset of `angle` past `a_start`, in `[0, 2π)`.
    fn angular_offset(&self, angle: f64) -> f64 {
        let mut d = normalize_angle(angle) - normalize_angle(self.a_start);
        if d < 0.0 {
            d += TAU;
        }
        d
    }

    /// Half-open membership test.
    pub fn contains(&self, p: Point) -> bool {
        let r = p.norm();
        r >= self.r_in && r < self.r_out && self.angular_offset(p.angle()) < self.angular_width()
    }

    /// Closed membership with a small tolerance, for testing interval
    /// midpoints that never sit on a boundary.
    fn contains_closed(&self, p: Point) -> bool {
        let r = p.norm();
        if r < self.r_in - 1e-12 || r > self.r_out + 1e-12 {
            return false;
        }
        if r < 1e-12 {
            return self.r_in == 0.0;
        }
        let off = self.angular_offset(p.angle());
        off <= self.angular_width() + 1e-12 || off >= TAU - 1e-12
    }

    /// Point on the angular bisector halfway between the two arcs.
    pub fn target_center(&self) -> Point {
        Point::polar(
            0.5 * (self.r_in + self.r_out),
            0.5 * (self.a_start + self.a_end),
        )
    }

    /// Parameter intervals where `line` lies inside the sector.
    pub fn line_intervals(&self, line: &Line) -> Vec<(f64, f64)> {
        let Some((lo, hi)) = line.circle_hits(self.r_out) else {
            return Vec::new();
        };
        let mut cuts = vec![lo, hi];
        if self.r_in > 0.0 {
            if let Some((a, b)) = line.circle_hits(self.r_in) {
                cuts.extend([a, b]);
            }
        }
        for angle in [self.a_start, self.a_end] {
            cuts.extend(line.radial_hit(angle));
        }
        cuts.retain(|s| *s >= lo && *s <= hi);
        cuts.sort_by(f64::total_cmp);
        let inside = |a: f64, b: f64| b - a > 0.0 && self.contains_closed(line.at(0.5 * (a + b)));
        join_intervals(cuts.windows(2).filter(|w| inside(w[0], w[1])).map(|w| (w[0], w[1])))
    }

    /// Whether two sectors share a boundary segment of positive length.
    pub fn shares_edge(&self, other: &AnnularSector) -> bool {
        let angular_overlap = angular_overlap(self, other) > 1e-9;
        let radial_overlap = self.r_out.min(other.r_out) - self.r_in.max(other.r_in) > 1e-9;
        let arc_touch = (self.r_out - other.r_in).abs() < 1e-12 || (other.r_out - self.r_in).abs() < 1e-12;
        let ray_touch = angles_equal(self.a_end, other.a_start) || angles_equal(other.a_end, self.a_start);
        (arc_touch && angular_overlap) || (ray_touch && radial_overlap)
    }

    /// Whether the interiors intersect.
    pub fn overlaps(&self, other: &AnnularSector) -> bool {
        let radial = self.r_out.min(other.r_out) - self.r_in.max(other.r_in) > 1e-9;
        radial && angular_overlap(self, other) > 1e-9
    }
}

pub(crate) fn angles_equal(a: f64, b: f64) -> bool {
    let d = normalize_angle(a - b);
    d < 1e-9 || d > TAU - 1e-9
}

/// Length of the overlap of two angular intervals on the circle.
fn angular_overlap(a: &AnnularSector, b: &AnnularSector) -> f64 {
    let a0 = normalize_angle(a.a_start);
    let b0 = normalize_angle(b.a_start);
    let mut total = 0.0;
    for shift in [-TAU, 0.0, TAU] {
        let lo = a0.max(b0 + shift);
        let hi = (a0 + a.angular_width()).min(b0 + shift + b.angular_width());
        if hi > lo {
            total += hi - lo;
        }
    }
    total
}

/// Half-open rectangle `[min.x, max.x) × [min.y, max.y)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x < self.max.x && p.y >= self.min.y && p.y < self.max.y
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    /// Chord of `line` through the rectangle (slab method).
    pub fn line_interval(&self, line: &Line) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (o, d, min, max) in [
            (line.origin.x, line.dir.x, self.min.x, self.max.x),
            (line.origin.y, line.dir.y, self.min.y, self.max.y),
        ] {
            if d.abs() < 1e-15 {
                if o < min || o > max {
                    return None;
                }
            } else {
                let (t0, t1) = ((min - o) / d, (max - o) / d);
                lo = lo.max(t0.min(t1));
                hi = hi.min(t0.max(t1));
            }
        }
        (hi > lo).then_some((lo, hi))
    }
}

/// Sorts and merges intervals that overlap or touch.
pub fn join_intervals<I: IntoIterator<Item = (f64, f64)>>(intervals: I) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = intervals.into_iter().collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 + JOIN_EPS => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Length of the interval in `intervals` containing parameter `s`.
pub fn run_containing(intervals: &[(f64, f64)], s: f64) -> Option<f64> {
    intervals
        .iter()
        .find(|(a, b)| *a - JOIN_EPS <= s && s <= *b + JOIN_EPS)
        .map(|(a, b)| b - a)
}
