//! The conical weight |x−c|^{2α} and its area/length measures.
//!
//! Area integrals use the divergence identity
//!
//! ```text
//!   ∫_Ω |x−c|^{2α} dx = (2+2α)^{-1} ∮_{∂Ω} |x−c|^{2α} (x−c)·n dl,
//! ```
//!
//! valid for every bounded Ω and α > −1 (the flux of the radial field through
//! a shrinking circle around c vanishes). The radial direction is integrated
//! exactly — the boundary integrand is the exact antiderivative
//! r^{2α+1} ↦ r^{2α+2}/(2α+2) read along ∂Ω — and only the boundary parameter
//! is quadratured, adaptively. Straight edges whose supporting line passes
//! through c contribute exactly zero ((x−c) ⟂ n there), which makes grid cells
//! touching the singularity exact rather than delicate.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::quad;

/// Relative tolerance for area (flux) quadrature.
pub const AREA_REL_TOL: f64 = 1e-10;
/// Relative tolerance for arclength quadrature.
pub const LENGTH_REL_TOL: f64 = 1e-8;

/// The weight |x − center|^{2α} with α ∈ (−1, 0].
#[derive(Debug, Clone, Copy)]
pub struct ConicalWeight {
    alpha: f64,
    center: Point,
}

impl ConicalWeight {
    pub fn new(alpha: f64, center: Point) -> Result<Self> {
        if !(alpha > -1.0 && alpha <= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidWeight { alpha });
        }
        Ok(ConicalWeight { alpha, center })
    }

    /// Weight centered at the origin (the cone point of the equation).
    pub fn centered(alpha: f64) -> Result<Self> {
        Self::new(alpha, Point::new(0.0, 0.0))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn center(&self) -> Point {
        self.center
    }

    /// Pointwise weight value |x−c|^{2α}; +∞ at the center for α < 0, 1 for α = 0.
    pub fn eval(&self, x: Point) -> f64 {
        if self.alpha == 0.0 {
            return 1.0;
        }
        let r2 = (x - self.center).norm2();
        r2.powf(self.alpha)
    }

    /// Boundary-flux contribution of the straight edge a → b, assuming the
    /// region lies to the left of the edge (counterclockwise orientation).
    fn edge_flux(&self, a: Point, b: Point) -> f64 {
        let d = b - a;
        // (x−c)·n dl = (a−c) × d dt: constant along the edge (the normal
        // distance from c to the supporting line, times |d|).
        let h = (a - self.center).cross(d);
        if h == 0.0 {
            return 0.0;
        }
        if self.alpha == 0.0 {
            return 0.5 * h; // shoelace term
        }
        let ac = a - self.center;
        let r2 = |t: f64| ac.norm2() + 2.0 * t * ac.dot(d) + t * t * d.norm2();
        let a_exp = self.alpha; // (r²)^α = r^{2α}
        let mut f = |t: f64| r2(t).powf(a_exp);
        let (v, _) = quad::adaptive(&mut f, 0.0, 1.0, AREA_REL_TOL);
        h * v / (2.0 + 2.0 * self.alpha)
    }

    /// Weighted area of the disk B_radius(center).
    pub fn area_disk(&self, center: Point, radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        let d = center.dist(self.center);
        if d <= 1e-15 * radius {
            // Disk about the weight center: closed form.
            return std::f64::consts::PI * radius.powf(2.0 + 2.0 * self.alpha)
                / (1.0 + self.alpha);
        }
        if self.alpha == 0.0 {
            return std::f64::consts::PI * radius * radius;
        }
        // Flux through the circle: x(θ) = q + R n̂(θ), (x−c)·n̂ = (q−c)·n̂ + R.
        let q = center - self.center;
        let r = radius;
        let mut f = |theta: f64| {
            let n = Point::new(theta.cos(), theta.sin());
            let qn = q.dot(n);
            let rho2 = q.norm2() + 2.0 * r * qn + r * r;
            rho2.powf(self.alpha) * (qn + r)
        };
        let (v, _) = quad::adaptive(&mut f, 0.0, 2.0 * std::f64::consts::PI, AREA_REL_TOL);
        v * r / (2.0 + 2.0 * self.alpha)
    }

    /// Weighted area of the axis-aligned rectangle [lo.x, hi.x] × [lo.y, hi.y].
    pub fn area_rect(&self, lo: Point, hi: Point) -> f64 {
        if hi.x <= lo.x || hi.y <= lo.y {
            return 0.0;
        }
        let corners = [
            lo,
            Point::new(hi.x, lo.y),
            hi,
            Point::new(lo.x, hi.y),
        ];
        self.area_polygon(&corners)
    }

    /// Weighted area of a simple polygon (counterclockwise; may be given open
    /// or with the first vertex repeated at the end). Clockwise input yields
    /// the negated value, as with the unweighted shoelace formula.
    pub fn area_polygon(&self, pts: &[Point]) -> f64 {
        let n = pts.len();
        if n < 3 {
            return 0.0;
        }
        let m = if pts[0] == pts[n - 1] { n - 1 } else { n };
        if m < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..m {
            acc += self.edge_flux(pts[i], pts[(i + 1) % m]);
        }
        acc
    }

    /// Weighted length ∫ |x−c|^{α} dl of a polyline (open or closed).
    ///
    /// Errors with [`Error::SingularBoundary`] if a vertex lies exactly on the
    /// weight center while α < 0.
    pub fn length_polyline(&self, pts: &[Point]) -> Result<f64> {
        if pts.len() < 2 {
            return Ok(0.0);
        }
        if self.alpha < 0.0 {
            for p in pts {
                if (*p - self.center).norm2() == 0.0 {
                    return Err(Error::SingularBoundary);
                }
            }
        }
        let mut total = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            let len = d.norm();
            if len == 0.0 {
                continue;
            }
            if self.alpha == 0.0 {
                total += len;
                continue;
            }
            let ac = a - self.center;
            let r2 = |t: f64| ac.norm2() + 2.0 * t * ac.dot(d) + t * t * d.norm2();
            let half_alpha = 0.5 * self.alpha;
            let mut f = |t: f64| r2(t).powf(half_alpha);
            let (v, _) = quad::adaptive(&mut f, 0.0, 1.0, LENGTH_REL_TOL);
            total += len * v;
        }
        Ok(total)
    }

    /// Weighted length of the full circle ∂B_radius(center).
    pub fn length_circle(&self, center: Point, radius: f64) -> Result<f64> {
        if radius <= 0.0 {
            return Ok(0.0);
        }
        let d = center.dist(self.center);
        if self.alpha < 0.0 && (d - radius).abs() == 0.0 {
            return Err(Error::SingularBoundary);
        }
        if d <= 1e-15 * radius || self.alpha == 0.0 {
            return Ok(2.0 * std::f64::consts::PI * radius.powf(1.0 + self.alpha));
        }
        let q = center - self.center;
        let r = radius;
        let half_alpha = 0.5 * self.alpha;
        let mut f = |theta: f64| {
            let n = Point::new(theta.cos(), theta.sin());
            let rho2 = q.norm2() + 2.0 * r * q.dot(n) + r * r;
            rho2.powf(half_alpha)
        };
        let (v, _) = quad::adaptive(&mut f, 0.0, 2.0 * std::f64::consts::PI, LENGTH_REL_TOL);
        Ok(v * r)
    }
}

/// A bounded planar region for [`weighted_area`].
#[derive(Debug, Clone)]
pub enum Region<'a> {
    Disk { center: Point, radius: f64 },
    Rect { lo: Point, hi: Point },
    Polygon(&'a [Point]),
}

/// ∫_region |x−c|^{2α} dx.
pub fn weighted_area(region: &Region, w: &ConicalWeight) -> f64 {
    match *region {
        Region::Disk { center, radius } => w.area_disk(center, radius),
        Region::Rect { lo, hi } => w.area_rect(lo, hi),
        Region::Polygon(pts) => w.area_polygon(pts),
    }
}

/// A rectifiable path for [`weighted_length`].
#[derive(Debug, Clone)]
pub enum Path<'a> {
    Polyline(&'a [Point]),
    Circle { center: Point, radius: f64 },
}

/// ∫_path |x−c|^{α} dl.
pub fn weighted_length(path: &Path, w: &ConicalWeight) -> Result<f64> {
    match *path {
        Path::Polyline(pts) => w.length_polyline(pts),
        Path::Circle { center, radius } => w.length_circle(center, radius),
    }
}
