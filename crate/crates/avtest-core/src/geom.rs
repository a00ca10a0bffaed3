//! Planar geometry primitives: points, poses, polylines, and oriented boxes
//! with separating-axis overlap tests.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn add(self, other: Point) -> Point {
        pt(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        pt(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        pt(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Z component of the cross product, positive when `other` is to the left.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        self.sub(other).norm()
    }

    pub fn unit(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            pt(1.0, 0.0)
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Rotated 90 degrees counter-clockwise.
    pub fn perp(self) -> Point {
        pt(-self.y, self.x)
    }
}

/// Position plus heading (radians, counter-clockwise from +x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Pose {
        Pose { x, y, heading }
    }

    pub fn point(&self) -> Point {
        pt(self.x, self.y)
    }

    pub fn forward(&self) -> Point {
        pt(self.heading.cos(), self.heading.sin())
    }

    /// Velocity vector for a given scalar speed along the heading.
    pub fn velocity(&self, speed: f64) -> Point {
        self.forward().scale(speed)
    }
}

/// Absolute heading difference folded into [0, pi].
pub fn heading_diff(a: f64, b: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut d = (a - b) % two_pi;
    if d < 0.0 {
        d += two_pi;
    }
    if d > std::f64::consts::PI {
        two_pi - d
    } else {
        d
    }
}

/// Rectangle with arbitrary heading, described by its center pose and full
/// length (along heading) and width (across).
#[derive(Debug, Clone, Copy)]
pub struct OrientedBox {
    pub center: Point,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl OrientedBox {
    pub fn new(pose: Pose, length: f64, width: f64) -> OrientedBox {
        OrientedBox {
            center: pose.point(),
            heading: pose.heading,
            half_length: length / 2.0,
            half_width: width / 2.0,
        }
    }

    pub fn axes(&self) -> [Point; 2] {
        let fwd = pt(self.heading.cos(), self.heading.sin());
        [fwd, fwd.perp()]
    }

    pub fn corners(&self) -> [Point; 4] {
        let [fwd, left] = self.axes();
        let l = fwd.scale(self.half_length);
        let w = left.scale(self.half_width);
        [
            self.center.add(l).add(w),
            self.center.add(l).sub(w),
            self.center.sub(l).sub(w),
            self.center.sub(l).add(w),
        ]
    }

    fn project(&self, axis: Point) -> (f64, f64) {
        let c = self.center.dot(axis);
        let r = self.half_length * self.axes()[0].dot(axis).abs()
            + self.half_width * self.axes()[1].dot(axis).abs();
        (c - r, c + r)
    }

    /// Separating-axis overlap test. Touching boxes (zero gap) count as
    /// overlapping.
    pub fn overlaps(&self, other: &OrientedBox) -> bool {
        self.penetration(other) >= 0.0
    }

    /// Signed penetration depth: the smallest overlap across the four
    /// candidate axes, negative when a separating axis exists (then its
    /// magnitude is the widest separation certified by any axis).
    pub fn penetration(&self, other: &OrientedBox) -> f64 {
        let mut depth = f64::INFINITY;
        for axis in self.axes().iter().chain(other.axes().iter()) {
            let (a_min, a_max) = self.project(*axis);
            let (b_min, b_max) = other.project(*axis);
            let overlap = a_max.min(b_max) - a_min.max(b_min);
            depth = depth.min(overlap);
        }
        depth
    }

    /// True when the point lies inside or on the boundary.
    pub fn contains(&self, p: Point) -> bool {
        let d = p.sub(self.center);
        let [fwd, left] = self.axes();
        d.dot(fwd).abs() <= self.half_length && d.dot(left).abs() <= self.half_width
    }

    /// Minimum distance between the boundaries of two boxes; 0 when they
    /// overlap.
    pub fn distance(&self, other: &OrientedBox) -> f64 {
        if self.overlaps(other) {
            return 0.0;
        }
        let ca = self.corners();
        let cb = other.corners();
        let mut best = f64::INFINITY;
        for i in 0..4 {
            let ea = (ca[i], ca[(i + 1) % 4]);
            for j in 0..4 {
                let eb = (cb[j], cb[(j + 1) % 4]);
                best = best.min(segment_distance(ea.0, ea.1, eb.0, eb.1));
            }
        }
        best
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = b.sub(a).cross(c.sub(a));
    let d2 = b.sub(a).cross(d.sub(a));
    let d3 = d.sub(c).cross(a.sub(c));
    let d4 = d.sub(c).cross(b.sub(c));
    (d1 * d2 < 0.0 && d3 * d4 < 0.0)
        || (d1 == 0.0 && on_segment(a, b, c))
        || (d2 == 0.0 && on_segment(a, b, d))
        || (d3 == 0.0 && on_segment(c, d, a))
        || (d4 == 0.0 && on_segment(c, d, b))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Polyline with precomputed cumulative arc lengths, supporting projection
/// and arc-parameterised sampling.
#[derive(Debug, Clone)]
pub struct Polyline {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Polyline {
        assert!(points.len() >= 2, "polyline needs at least two points");
        let mut cumulative = Vec::with_capacity(points.len());
        let mut total = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            total += w[0].dist(w[1]);
            cumulative.push(total);
        }
        Polyline { points, cumulative }
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Point, tangent heading at a clamped arc position.
    pub fn sample(&self, arc: f64) -> (Point, f64) {
        let arc = arc.clamp(0.0, self.length());
        // Find the segment containing arc.
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&arc).unwrap())
        {
            Ok(i) => i.min(self.points.len() - 2),
            Err(i) => i - 1,
        };
        let idx = idx.min(self.points.len() - 2);
        let a = self.points[idx];
        let b = self.points[idx + 1];
        let seg_len = self.cumulative[idx + 1] - self.cumulative[idx];
        let t = if seg_len > 0.0 {
            (arc - self.cumulative[idx]) / seg_len
        } else {
            0.0
        };
        let p = a.add(b.sub(a).scale(t));
        let dir = b.sub(a);
        (p, dir.y.atan2(dir.x))
    }

    /// Project a point: returns (arc position, lateral offset), offset
    /// positive to the left of travel. Arc is clamped to [0, length].
    pub fn project(&self, p: Point) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY, 0.0);
        for i in 0..self.points.len() - 1 {
            let a = self.points[i];
            let b = self.points[i + 1];
            let ab = b.sub(a);
            let len2 = ab.dot(ab);
            if len2 == 0.0 {
                continue;
            }
            let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
            let q = a.add(ab.scale(t));
            let d = p.dist(q);
            if d < best.1 {
                let arc = self.cumulative[i] + t * len2.sqrt();
                // Signed offset: positive when p is left of segment direction.
                let sign = if ab.cross(p.sub(a)) >= 0.0 { 1.0 } else { -1.0 };
                best = (arc, d, sign * d);
            }
        }
        (best.0, best.2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_sample_and_project_roundtrip() {
        let line = Polyline::new(vec![pt(0.0, 0.0), pt(100.0, 0.0)]);
        assert_eq!(line.length(), 100.0);
        let (p, h) = line.sample(50.0);
        assert!((p.x - 50.0).abs() < 1e-12 && p.y.abs() < 1e-12);
        assert!(h.abs() < 1e-12);
        let (arc, off) = line.project(pt(50.0, 2.0));
        assert!((arc - 50.0).abs() < 1e-9);
        assert!((off - 2.0).abs() < 1e-9);
        // Beyond the end clamps.
        let (arc, _) = line.project(pt(130.0, 0.0));
        assert_eq!(arc, 100.0);
    }

    #[test]
    fn box_overlap_basic() {
        let a = OrientedBox::new(Pose::new(0.0, 0.0, 0.0), 5.0, 2.0);
        let b = OrientedBox::new(Pose::new(10.0, 0.0, 0.0), 5.0, 2.0);
        assert!(!a.overlaps(&b));
        let c = OrientedBox::new(Pose::new(4.0, 0.0, 0.0), 5.0, 2.0);
        assert!(a.overlaps(&c));
        // Identical poses overlap.
        assert!(a.overlaps(&a));
    }

    #[test]
    fn box_distance_matches_gap() {
        let a = OrientedBox::new(Pose::new(0.0, 0.0, 0.0), 4.0, 2.0);
        let b = OrientedBox::new(Pose::new(10.0, 0.0, 0.0), 4.0, 2.0);
        assert!((a.distance(&b) - 6.0).abs() < 1e-9);
        let c = OrientedBox::new(Pose::new(3.0, 0.0, 0.0), 4.0, 2.0);
        assert_eq!(a.distance(&c), 0.0);
    }

    #[test]
    fn heading_diff_folds() {
        assert!((heading_diff(0.0, std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!(heading_diff(0.1, -0.1) - 0.2 < 1e-12);
        assert!((heading_diff(3.0, -3.0) - (std::f64::consts::TAU - 6.0)).abs() < 1e-12);
    }
}
