//! Fractional cell-coverage engine shared by the distribution function, the
//! rearranged mass integrals, and the level audits.
//!
//! Each grid cell is classified once against the clip disk and the level
//! ladder; fully-covered cells are folded into suffix sums keyed by the cell
//! minimum, so a level evaluation costs one binary search plus the handful of
//! cells its contour actually crosses.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{clip_polygon_halfplane, Point};
use crate::grid::GridField;
use crate::potential::PotentialSpec;
use crate::weight::ConicalWeight;

pub(crate) struct Coverage {
    /// Cells sorted by ascending corner minimum.
    cells: Vec<Cell>,
    /// Sorted corner minima, aligned with `cells`.
    vmins: Vec<f64>,
    /// suffix_mu[i] = Σ_{j≥i} cells[j].mu_full (length cells+1).
    suffix_mu: Vec<f64>,
    ladder: Vec<f64>,
    /// Per ladder level: indices of cells whose corner range brackets it.
    crossing: Vec<Vec<u32>>,
    weight: ConicalWeight,
    h: f64,
    /// Corner-value range over the 3×3 cell block around the weight center;
    /// None when the center lies outside the covered grid.
    center_block: Option<(f64, f64)>,
}

#[derive(Clone)]
struct Cell {
    lo: Point,
    /// Corner values counterclockwise from `lo`: (0,0), (1,0), (1,1), (0,1).
    v: [f64; 4],
    vmin: f64,
    vmax: f64,
    /// Weighted measure of the whole cell intersected with the clip region.
    mu_full: f64,
    /// Tangent halfplane standing in for the clip circle across this cell:
    /// (point on the circle, outward unit normal). None well inside the clip.
    rim: Option<(Point, Point)>,
}

impl Coverage {
    pub(crate) fn build(
        field: &GridField,
        weight: &ConicalWeight,
        clip_radius: f64,
        ladder: &[f64],
    ) -> Result<Self> {
        if !(clip_radius > 0.0) {
            return Err(Error::Numerical("clip radius must be positive".into()));
        }
        let n = field.n();
        let h = field.h();
        let c = weight.center();
        let finite_clip = clip_radius.is_finite();

        let rows: Vec<Vec<Cell>> = (0..n - 1)
            .into_par_iter()
            .map(|iy| {
                let mut row = Vec::new();
                for ix in 0..n - 1 {
                    if !(field.masked_in(ix, iy)
                        && field.masked_in(ix + 1, iy)
                        && field.masked_in(ix + 1, iy + 1)
                        && field.masked_in(ix, iy + 1))
                    {
                        continue;
                    }
                    let lo = field.node_point(ix, iy);
                    let v = [
                        field.value(ix, iy),
                        field.value(ix + 1, iy),
                        field.value(ix + 1, iy + 1),
                        field.value(ix, iy + 1),
                    ];
                    let vmin = v[0].min(v[1]).min(v[2]).min(v[3]);
                    let vmax = v[0].max(v[1]).max(v[2]).max(v[3]);
                    let hi = Point::new(lo.x + h, lo.y + h);
                    let mut rim = None;
                    let mu_full;
                    if finite_clip {
                        let pts = corner_pts(lo, h);
                        let mut dmin = f64::INFINITY;
                        let mut dmax = 0.0f64;
                        for p in pts {
                            let d = p.dist(c);
                            dmin = dmin.min(d);
                            dmax = dmax.max(d);
                        }
                        if dmin >= clip_radius {
                            continue;
                        }
                        if dmax > clip_radius {
                            let mid = Point::new(lo.x + 0.5 * h, lo.y + 0.5 * h);
                            let dir = mid - c;
                            let nrm = if dir.norm() > 0.0 {
                                dir * (1.0 / dir.norm())
                            } else {
                                Point::new(1.0, 0.0)
                            };
                            let tangent = c + nrm * clip_radius;
                            rim = Some((tangent, nrm));
                            let clipped = clip_polygon_halfplane(&pts, tangent, nrm);
                            if clipped.len() < 3 {
                                continue;
                            }
                            mu_full = weight.area_polygon(&clipped);
                        } else {
                            mu_full = weight.area_rect(lo, hi);
                        }
                    } else {
                        mu_full = weight.area_rect(lo, hi);
                    }
                    row.push(Cell { lo, v, vmin, vmax, mu_full, rim });
                }
                row
            })
            .collect();
        let mut cells: Vec<Cell> = rows.into_iter().flatten().collect();
        if cells.is_empty() {
            return Err(Error::Numerical("no grid cells inside the clip region".into()));
        }

        let center_block = center_block(field, c);

        cells.sort_by(|a, b| a.vmin.partial_cmp(&b.vmin).unwrap());
        let vmins: Vec<f64> = cells.iter().map(|cell| cell.vmin).collect();
        let mut suffix_mu = vec![0.0; cells.len() + 1];
        for i in (0..cells.len()).rev() {
            suffix_mu[i] = suffix_mu[i + 1] + cells[i].mu_full;
        }

        let mut crossing: Vec<Vec<u32>> = vec![Vec::new(); ladder.len()];
        for (ci, cell) in cells.iter().enumerate() {
            let j_lo = ladder.partition_point(|&t| t < cell.vmin);
            let j_hi = ladder.partition_point(|&t| t < cell.vmax);
            for level in crossing.iter_mut().take(j_hi).skip(j_lo) {
                level.push(ci as u32);
            }
        }

        Ok(Coverage {
            cells,
            vmins,
            suffix_mu,
            ladder: ladder.to_vec(),
            crossing,
            weight: *weight,
            h,
            center_block,
        })
    }

    /// ξ per ladder level, each as bulk suffix sum plus crossing-cell
    /// coverage polygons. Levels evaluate independently in parallel.
    pub(crate) fn xi_ladder(&self) -> Vec<f64> {
        (0..self.ladder.len())
            .into_par_iter()
            .map(|j| {
                let t = self.ladder[j];
                let pos = self.vmins.partition_point(|&v| v <= t);
                let mut xi = self.suffix_mu[pos];
                for &ci in &self.crossing[j] {
                    let cell = &self.cells[ci as usize];
                    for poly in coverage_polys(cell, self.h, t) {
                        if poly.len() >= 3 {
                            xi += self.weight.area_polygon(&poly);
                        }
                    }
                }
                xi
            })
            .collect()
    }

    /// Mass F per ladder level: the integral of K·e^u against the weighted
    /// measure over the same superlevel sets, midpoint-sampled per cell.
    pub(crate) fn fmass_ladder(&self, k: &PotentialSpec) -> Vec<f64> {
        let g: Vec<f64> = self
            .cells
            .par_iter()
            .map(|cell| {
                let mid = Point::new(cell.lo.x + 0.5 * self.h, cell.lo.y + 0.5 * self.h);
                let u_mid = 0.25 * (cell.v[0] + cell.v[1] + cell.v[2] + cell.v[3]);
                k.eval(mid) * u_mid.exp()
            })
            .collect();
        let mut suffix_mug = vec![0.0; self.cells.len() + 1];
        for i in (0..self.cells.len()).rev() {
            suffix_mug[i] = suffix_mug[i + 1] + self.cells[i].mu_full * g[i];
        }
        (0..self.ladder.len())
            .into_par_iter()
            .map(|j| {
                let t = self.ladder[j];
                let pos = self.vmins.partition_point(|&v| v <= t);
                let mut f = suffix_mug[pos];
                for &ci in &self.crossing[j] {
                    let cell = &self.cells[ci as usize];
                    for poly in coverage_polys(cell, self.h, t) {
                        if poly.len() < 3 {
                            continue;
                        }
                        let mu = self.weight.area_polygon(&poly);
                        let cen = polygon_centroid(&poly);
                        let u = bilinear_in_cell(cell, self.h, cen);
                        f += mu * k.eval(cen) * u.exp();
                    }
                }
                f
            })
            .collect()
    }

    /// Single-level ξ by a direct pass over every cell — no suffix sums, no
    /// crossing lists. Kept as an independent path for cross-validation.
    pub(crate) fn xi_direct(&self, t: f64) -> f64 {
        let mut xi = 0.0;
        for cell in &self.cells {
            if t < cell.vmin {
                xi += cell.mu_full;
            } else if t < cell.vmax {
                for poly in coverage_polys(cell, self.h, t) {
                    if poly.len() >= 3 {
                        xi += self.weight.area_polygon(&poly);
                    }
                }
            }
        }
        xi
    }

    /// Isoperimetric constant for the superlevel set at t: 4π(1+α) when the
    /// weight center lies inside with at least one cell of margin, 4π when it
    /// lies outside with the same margin, NaN in the indeterminate band.
    pub(crate) fn beta_at(&self, t: f64) -> f64 {
        let alpha = self.weight.alpha();
        let four_pi = 4.0 * std::f64::consts::PI;
        if alpha == 0.0 {
            return four_pi;
        }
        match self.center_block {
            None => four_pi,
            Some((bmin, bmax)) => {
                if t < bmin {
                    four_pi * (1.0 + alpha)
                } else if t >= bmax {
                    four_pi
                } else {
                    f64::NAN
                }
            }
        }
    }
}

/// Corner-value range over the 3×3 cell block around the weight center.
fn center_block(field: &GridField, c: Point) -> Option<(f64, f64)> {
    let n = field.n() as i64;
    let h = field.h();
    let cix = ((c.x + field.extent()) / h).floor() as i64;
    let ciy = ((c.y + field.extent()) / h).floor() as i64;
    let mut bmin = f64::INFINITY;
    let mut bmax = f64::NEG_INFINITY;
    let mut any = false;
    for dy in -1..=1i64 {
        for dx in -1..=1i64 {
            let (jx, jy) = (cix + dx, ciy + dy);
            if jx < 0 || jy < 0 || jx + 1 >= n || jy + 1 >= n {
                continue;
            }
            let (jx, jy) = (jx as usize, jy as usize);
            if !(field.masked_in(jx, jy)
                && field.masked_in(jx + 1, jy)
                && field.masked_in(jx + 1, jy + 1)
                && field.masked_in(jx, jy + 1))
            {
                continue;
            }
            for (ox, oy) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
                let v = field.value(jx + ox, jy + oy);
                bmin = bmin.min(v);
                bmax = bmax.max(v);
                any = true;
            }
        }
    }
    any.then_some((bmin, bmax))
}

fn corner_pts(lo: Point, h: f64) -> [Point; 4] {
    [
        lo,
        Point::new(lo.x + h, lo.y),
        Point::new(lo.x + h, lo.y + h),
        Point::new(lo.x, lo.y + h),
    ]
}

fn crossing_point(a: Point, b: Point, va: f64, vb: f64, t: f64) -> Point {
    let denom = vb - va;
    let w = if denom != 0.0 { ((t - va) / denom).clamp(0.0, 1.0) } else { 0.5 };
    a + (b - a) * w
}

/// Polygonal approximation of {u > t} within one cell: the counterclockwise
/// corner walk with linear edge crossings, the saddle resolved by the sign of
/// the corner average, and the result clipped by the rim halfplane if any.
fn coverage_polys(cell: &Cell, h: f64, t: f64) -> Vec<Vec<Point>> {
    let pts = corner_pts(cell.lo, h);
    let v = cell.v;
    let inside = [v[0] > t, v[1] > t, v[2] > t, v[3] > t];
    let count = inside.iter().filter(|&&b| b).count();
    let mut polys: Vec<Vec<Point>> = Vec::new();
    if count > 0 {
        let saddle = count == 2 && inside[0] == inside[2];
        let center_avg = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if saddle && center_avg <= t {
            // Two opposite corner triangles; the hyperbolic level curve keeps
            // them apart because the cell center sits below the level.
            for i in 0..4 {
                if !inside[i] {
                    continue;
                }
                let prev = (i + 3) % 4;
                let next = (i + 1) % 4;
                let p_in = crossing_point(pts[prev], pts[i], v[prev], v[i], t);
                let p_out = crossing_point(pts[i], pts[next], v[i], v[next], t);
                polys.push(vec![p_in, pts[i], p_out]);
            }
        } else {
            let mut poly = Vec::with_capacity(8);
            for i in 0..4 {
                let j = (i + 1) % 4;
                if inside[i] {
                    poly.push(pts[i]);
                }
                if inside[i] != inside[j] {
                    poly.push(crossing_point(pts[i], pts[j], v[i], v[j], t));
                }
            }
            polys.push(poly);
        }
    }
    if let Some((tangent, nrm)) = cell.rim {
        let mut clipped = Vec::new();
        for poly in polys {
            let cut = clip_polygon_halfplane(&poly, tangent, nrm);
            if cut.len() >= 3 {
                clipped.push(cut);
            }
        }
        return clipped;
    }
    polys
}

fn polygon_centroid(pts: &[Point]) -> Point {
    let m = pts.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..m {
        let (p, q) = (pts[i], pts[(i + 1) % m]);
        let w = p.cross(q);
        area2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    if area2.abs() < 1e-300 {
        let mut mean = Point::new(0.0, 0.0);
        for p in pts {
            mean = mean + *p;
        }
        return mean * (1.0 / m as f64);
    }
    Point::new(cx / (3.0 * area2), cy / (3.0 * area2))
}

/// Bilinear value of the cell's corner data at p (clamped into the cell).
fn bilinear_in_cell(cell: &Cell, h: f64, p: Point) -> f64 {
    let sx = ((p.x - cell.lo.x) / h).clamp(0.0, 1.0);
    let sy = ((p.y - cell.lo.y) / h).clamp(0.0, 1.0);
    cell.v[0] * (1.0 - sx) * (1.0 - sy)
        + cell.v[1] * sx * (1.0 - sy)
        + cell.v[2] * sx * sy
        + cell.v[3] * (1.0 - sx) * sy
}
