//! Radial profiles: sampled functions of the radius r ≥ 0, used for radial
//! solutions, circle max/mean profiles, and mass profiles.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grid::{DomainShape, GridField};

/// A function of the radius sampled on a strictly increasing node set.
/// When derivative samples are attached, evaluation is cubic Hermite;
/// otherwise piecewise linear.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    derivs: Option<Vec<f64>>,
    alpha: f64,
}

impl RadialProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, alpha: f64) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::Numerical(
                "radial profile needs matching node/value arrays of length >= 2".into(),
            ));
        }
        if nodes[0] < 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Numerical(
                "radial profile nodes must be nonnegative and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("radial profile values must be finite".into()));
        }
        Ok(RadialProfile { nodes, values, derivs: None, alpha })
    }

    /// Attach derivative samples (du/dr at each node) for cubic evaluation.
    pub fn with_derivs(mut self, derivs: Vec<f64>) -> Result<Self> {
        if derivs.len() != self.nodes.len() {
            return Err(Error::Numerical("derivative array length mismatch".into()));
        }
        self.derivs = Some(derivs);
        Ok(self)
    }

    /// Sample a closure on the given nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(nodes: Vec<f64>, alpha: f64, f: F) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        Self::new(nodes, values, alpha)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> Option<&[f64]> {
        self.derivs.as_deref()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn first_radius(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last_radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index of the last node ≤ r (binary search).
    fn cell_of(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }

    /// Evaluate at radius r ∈ [first node, last node].
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < self.nodes[0] - 1e-12 || r > self.last_radius() + 1e-12 {
            return Err(Error::OutOfRange { r, max: self.last_radius() });
        }
        let r = r.clamp(self.nodes[0], self.last_radius());
        let i = self.cell_of(r);
        let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        match &self.derivs {
            None => Ok(v0 + (v1 - v0) * t),
            Some(d) => {
                // Cubic Hermite basis.
                let (m0, m1) = (d[i] * h, d[i + 1] * h);
                let t2 = t * t;
                let t3 = t2 * t;
                Ok(v0 * (2.0 * t3 - 3.0 * t2 + 1.0)
                    + m0 * (t3 - 2.0 * t2 + t)
                    + v1 * (-2.0 * t3 + 3.0 * t2)
                    + m1 * (t3 - t2))
            }
        }
    }

    /// Derivative du/dr at r (from the Hermite data when attached, otherwise
    /// the slope of the containing linear segment).
    pub fn eval_deriv(&self, r: f64) -> Result<f64> {
        if r < self.nodes[0] - 1e-12 || r > self.last_radius() + 1e-12 {
            return Err(Error::OutOfRange { r, max: self.last_radius() });
        }
        let r = r.clamp(self.nodes[0], self.last_radius());
        let i = self.cell_of(r);
        let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let h = r1 - r0;
        match &self.derivs {
            None => Ok((v1 - v0) / h),
            Some(d) => {
                let t = (r - r0) / h;
                let (m0, m1) = (d[i], d[i + 1]);
                let t2 = t * t;
                Ok(v0 / h * (6.0 * t2 - 6.0 * t)
                    + m0 * (3.0 * t2 - 4.0 * t + 1.0)
                    + v1 / h * (6.0 * t - 6.0 * t2)
                    + m1 * (3.0 * t2 - 2.0 * t))
            }
        }
    }

    /// Is the profile non-increasing in r, up to `tol` per step?
    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// Sample u(|x|) onto a grid. Nodes whose radius exceeds the profile's
    /// range are masked out.
    pub fn sample_to_grid(&self, extent: f64, n: usize, shape: DomainShape) -> Result<GridField> {
        let rmax = self.last_radius();
        GridField::from_fn_masked(extent, n, shape, |p: Point| {
            let r = p.norm();
            if r > rmax {
                None
            } else {
                Some(self.eval(r).expect("radius inside profile range"))
            }
        })
    }
}
