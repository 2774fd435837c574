//! Node-centered scalar fields on a uniform Cartesian grid over the square
//! [−extent, extent]², with a boolean in-domain mask (the disk domain is a
//! mask, not a boundary-fitted mesh). Includes the plain-text field file
//! format used by the CLI.

use std::io::{BufRead, BufReader, Write};
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::geom::Point;

/// Domain shape used when building masks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    /// Every node in the square is in-domain.
    Square,
    /// Nodes with |x| ≤ radius are in-domain.
    Disk { radius: f64 },
}

#[derive(Debug, Clone)]
pub struct GridField {
    extent: f64,
    n: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GridField {
    pub const MIN_N: usize = 16;

    pub fn new(extent: f64, n: usize, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::Numerical("grid extent must be positive".into()));
        }
        if n < Self::MIN_N {
            return Err(Error::Numerical(format!(
                "grid needs at least {} samples per axis, got {n}",
                Self::MIN_N
            )));
        }
        if values.len() != n * n || mask.len() != n * n {
            return Err(Error::Numerical("grid value/mask length mismatch".into()));
        }
        for (v, m) in values.iter().zip(mask.iter()) {
            if *m && !v.is_finite() {
                return Err(Error::Numerical("masked-in grid value is not finite".into()));
            }
        }
        Ok(GridField { extent, n, values, mask })
    }

    /// Build from a closure over node positions.
    pub fn from_fn<F: Fn(Point) -> f64>(
        extent: f64,
        n: usize,
        shape: DomainShape,
        f: F,
    ) -> Result<Self> {
        Self::from_fn_masked(extent, n, shape, |p| Some(f(p)))
    }

    /// Build from a closure that may decline nodes (returning None masks the
    /// node out in addition to the shape mask).
    pub fn from_fn_masked<F: Fn(Point) -> Option<f64>>(
        extent: f64,
        n: usize,
        shape: DomainShape,
        f: F,
    ) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::Numerical("grid extent must be positive".into()));
        }
        if n < Self::MIN_N {
            return Err(Error::Numerical(format!(
                "grid needs at least {} samples per axis, got {n}",
                Self::MIN_N
            )));
        }
        let h = 2.0 * extent / (n - 1) as f64;
        let mut values = vec![0.0; n * n];
        let mut mask = vec![false; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let p = Point::new(-extent + ix as f64 * h, -extent + iy as f64 * h);
                let in_shape = match shape {
                    DomainShape::Square => true,
                    DomainShape::Disk { radius } => p.norm() <= radius,
                };
                if !in_shape {
                    continue;
                }
                if let Some(v) = f(p) {
                    values[iy * n + ix] = v;
                    mask[iy * n + ix] = true;
                }
            }
        }
        Self::new(extent, n, values, mask)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing h = 2·extent/(n−1).
    pub fn h(&self) -> f64 {
        2.0 * self.extent / (self.n - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn node_point(&self, ix: usize, iy: usize) -> Point {
        let h = self.h();
        Point::new(-self.extent + ix as f64 * h, -self.extent + iy as f64 * h)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.idx(ix, iy)]
    }

    pub fn masked_in(&self, ix: usize, iy: usize) -> bool {
        self.mask[self.idx(ix, iy)]
    }

    pub fn set_value(&mut self, ix: usize, iy: usize, v: f64) {
        let i = self.idx(ix, iy);
        self.values[i] = v;
    }

    /// Apply f to every masked-in value in place.
    pub fn map_values<F: Fn(f64) -> f64>(&mut self, f: F) {
        for (v, m) in self.values.iter_mut().zip(self.mask.iter()) {
            if *m {
                *v = f(*v);
            }
        }
    }

    /// (min, max) over masked-in nodes.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (v, m) in self.values.iter().zip(self.mask.iter()) {
            if *m {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        (lo, hi)
    }

    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self.min_max();
        hi - lo
    }

    /// Grid argmax over masked-in nodes; ties broken by the largest node
    /// radius |x| (so a peak ring reports its outermost representative).
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0usize, 0usize, f64::NEG_INFINITY, -1.0f64);
        for iy in 0..self.n {
            for ix in 0..self.n {
                if !self.masked_in(ix, iy) {
                    continue;
                }
                let v = self.value(ix, iy);
                let r = self.node_point(ix, iy).norm();
                if v > best.2 || (v == best.2 && r > best.3) {
                    best = (ix, iy, v, r);
                }
            }
        }
        (best.0, best.1, best.2)
    }

    /// Bilinear interpolation at p. All four corners of the containing cell
    /// must be masked-in; otherwise (or outside the square) this is an
    /// out-of-domain error.
    pub fn interpolate(&self, p: Point) -> Result<f64> {
        let h = self.h();
        let fx = (p.x + self.extent) / h;
        let fy = (p.y + self.extent) / h;
        // Clamp queries within a whisker of the square's rim onto it.
        let eps = 1e-9;
        if fx < -eps || fy < -eps || fx > (self.n - 1) as f64 + eps || fy > (self.n - 1) as f64 + eps
        {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        let fx = fx.clamp(0.0, (self.n - 1) as f64);
        let fy = fy.clamp(0.0, (self.n - 1) as f64);
        let ix = (fx as usize).min(self.n - 2);
        let iy = (fy as usize).min(self.n - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let m = self.masked_in(ix, iy)
            && self.masked_in(ix + 1, iy)
            && self.masked_in(ix, iy + 1)
            && self.masked_in(ix + 1, iy + 1);
        if !m {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        let v00 = self.value(ix, iy);
        let v10 = self.value(ix + 1, iy);
        let v01 = self.value(ix, iy + 1);
        let v11 = self.value(ix + 1, iy + 1);
        Ok(v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty)
    }

    /// Write the plain-text field file: a 4-line header (`extent`, `n`,
    /// `alpha`, `mask` flag) then n² values row-major; when the mask flag is 1,
    /// n² mask entries (0/1) follow. Floats are written with full precision so
    /// load ∘ save is the identity.
    pub fn save(&self, alpha: f64, path: &FsPath) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("extent {:.17e}\n", self.extent));
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("alpha {:.17e}\n", alpha));
        let need_mask = self.mask.iter().any(|m| !*m);
        out.push_str(&format!("mask {}\n", if need_mask { 1 } else { 0 }));
        for iy in 0..self.n {
            let mut line = String::new();
            for ix in 0..self.n {
                if ix > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{:.17e}", self.value(ix, iy)));
            }
            line.push('\n');
            out.push_str(&line);
        }
        if need_mask {
            for iy in 0..self.n {
                let mut line = String::new();
                for ix in 0..self.n {
                    if ix > 0 {
                        line.push(' ');
                    }
                    line.push(if self.masked_in(ix, iy) { '1' } else { '0' });
                }
                line.push('\n');
                out.push_str(&line);
            }
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Read a field file written by [`GridField::save`]. Returns the field and
    /// the weight exponent recorded in the header.
    pub fn load(path: &FsPath) -> Result<(Self, f64)> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut tokens: Vec<String> = Vec::new();
        let mut header: Vec<(String, String)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if header.len() < 4 {
                let mut parts = t.split_whitespace();
                let key = parts.next().unwrap_or_default().to_string();
                let val = parts.next().unwrap_or_default().to_string();
                if parts.next().is_some() {
                    return Err(Error::Parse {
                        what: path.display().to_string(),
                        detail: format!("header line {} has trailing tokens", lineno + 1),
                    });
                }
                header.push((key, val));
            } else {
                tokens.extend(t.split_whitespace().map(|s| s.to_string()));
            }
        }
        let want = ["extent", "n", "alpha", "mask"];
        if header.len() != 4 || header.iter().zip(want.iter()).any(|((k, _), w)| k != w) {
            return Err(Error::Parse {
                what: path.display().to_string(),
                detail: "header must be the four lines: extent, n, alpha, mask".into(),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                what: path.display().to_string(),
                detail: format!("bad {what} value {s:?}: {e}"),
            })
        };
        let extent = parse_f(&header[0].1, "extent")?;
        let n: usize = header[1].1.parse().map_err(|e| Error::Parse {
            what: path.display().to_string(),
            detail: format!("bad n value {:?}: {e}", header[1].1),
        })?;
        let alpha = parse_f(&header[2].1, "alpha")?;
        let mask_flag = match header[3].1.as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    what: path.display().to_string(),
                    detail: format!("mask flag must be 0 or 1, got {other:?}"),
                })
            }
        };
        let expect = if mask_flag { 2 * n * n } else { n * n };
        if tokens.len() != expect {
            return Err(Error::Parse {
                what: path.display().to_string(),
                detail: format!("expected {expect} data values, found {}", tokens.len()),
            });
        }
        let mut values = Vec::with_capacity(n * n);
        for t in &tokens[..n * n] {
            values.push(parse_f(t, "field")?);
        }
        let mask = if mask_flag {
            let mut m = Vec::with_capacity(n * n);
            for t in &tokens[n * n..] {
                m.push(match t.as_str() {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(Error::Parse {
                            what: path.display().to_string(),
                            detail: format!("mask entries must be 0 or 1, got {other:?}"),
                        })
                    }
                });
            }
            m
        } else {
            vec![true; n * n]
        };
        Ok((Self::new(extent, n, values, mask)?, alpha))
    }
}
