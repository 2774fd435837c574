//! Small planar geometry helpers: points, polygons, polylines.

use std::ops::{Add, Mul, Sub};

/// A point (or vector) in ℝ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product self × o.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Signed area of a polygon (positive for counterclockwise orientation).
/// The polygon may be given open (last vertex ≠ first) or closed.
pub fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a.cross(b);
    }
    0.5 * acc
}

/// Winding-number point-in-polygon test. Boundary points are unspecified
/// (callers needing a guard band must test distances separately).
pub fn point_in_polygon(p: Point, pts: &[Point]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    let mut winding = 0i32;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                winding += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// Distance from a point to the segment [a, b].
pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let l2 = ab.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Do the open segments (a,b) and (c,d) properly intersect?
/// Shared endpoints do not count (so consecutive polyline edges pass).
pub fn segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
}

/// First proper self-intersection of a closed polyline, if any.
/// Quadratic scan with a bounding-box prefilter; adequate for audit-sized
/// boundaries (a few thousand segments).
pub fn first_self_intersection(pts: &[Point]) -> Option<Point> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    // Treat as closed: segments i = (pts[i], pts[i+1 mod n]), skipping the
    // duplicate closing vertex if present.
    let m = if pts[0] == pts[n - 1] { n - 1 } else { n };
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    for i in 0..m {
        let (a, b) = seg(i);
        let (ilo, ihi) = (a.x.min(b.x), a.x.max(b.x));
        for j in (i + 2)..m {
            // Adjacent segments share a vertex; the wrap-around pair (0, m−1) too.
            if i == 0 && j == m - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if c.x.max(d.x) < ilo || c.x.min(d.x) > ihi {
                continue;
            }
            if segments_properly_intersect(a, b, c, d) {
                // Intersection point of the two segment lines.
                let r = b - a;
                let s = d - c;
                let denom = r.cross(s);
                let t = (c - a).cross(s) / denom;
                return Some(a + r * t);
            }
        }
    }
    None
}

/// Clip a polygon against the half-plane { x : (x − p)·n ≤ 0 }
/// (Sutherland–Hodgman, one plane). Returns the clipped polygon, open form.
pub fn clip_polygon_halfplane(pts: &[Point], p: Point, n: Point) -> Vec<Point> {
    let len = pts.len();
    if len == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(len + 2);
    let side = |q: Point| (q - p).dot(n);
    for i in 0..len {
        let a = pts[i];
        let b = pts[(i + 1) % len];
        let sa = side(a);
        let sb = side(b);
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}
