//! The potential K with its pinch bounds 0 < a ≤ K ≤ b, oscillation ratio
//! σ̄ ≥ 1, logarithmic-modulus constant B ≥ 0, and localization radius ρ̄.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grid::GridField;

#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// K ≡ c.
    Constant(f64),
    /// Annular constants about the origin: value `constants[i]` on
    /// [breakpoints[i−1], breakpoints[i]), with breakpoints[−1] = 0 and the
    /// last constant extending to ∞.
    PiecewiseRadial {
        breakpoints: Vec<f64>,
        constants: Vec<f64>,
    },
    /// K sampled on a grid, bilinearly interpolated.
    Sampled(GridField),
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    kind: PotentialKind,
    a: f64,
    b: f64,
    sigma_bar: f64,
    big_b: f64,
    rho_bar: f64,
}

impl PotentialSpec {
    /// Constant potential K ≡ c with the tight pinch a = b = c.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Numerical(format!(
                "constant potential must be positive and finite, got {c}"
            )));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Constant(c),
            a: c,
            b: c,
            sigma_bar: 1.0,
            big_b: 0.0,
            rho_bar: 0.5,
        })
    }

    /// The degenerate K ≡ 0 control: turns the equation into the Laplace
    /// equation. Violates the pinch 0 < a on purpose; meant for harmonic
    /// negative controls in test harnesses, not for production runs.
    pub fn source_free() -> Self {
        PotentialSpec {
            kind: PotentialKind::Constant(0.0),
            a: 0.0,
            b: 0.0,
            sigma_bar: 1.0,
            big_b: 0.0,
            rho_bar: 0.5,
        }
    }

    /// Annular constants about the origin. `constants.len()` must be
    /// `breakpoints.len() + 1`; breakpoints strictly increasing and positive.
    pub fn piecewise_radial(breakpoints: Vec<f64>, constants: Vec<f64>) -> Result<Self> {
        if constants.len() != breakpoints.len() + 1 || constants.is_empty() {
            return Err(Error::Numerical(
                "piecewise potential needs one more constant than breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0])
            || breakpoints.first().is_some_and(|&r| r <= 0.0)
        {
            return Err(Error::Numerical(
                "piecewise breakpoints must be positive and strictly increasing".into(),
            ));
        }
        let a = constants.iter().cloned().fold(f64::INFINITY, f64::min);
        let b = constants.iter().cloned().fold(0.0f64, f64::max);
        if !(a > 0.0) || !b.is_finite() {
            return Err(Error::Numerical(
                "piecewise potential constants must be positive and finite".into(),
            ));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::PiecewiseRadial { breakpoints, constants },
            a,
            b,
            sigma_bar: b / a,
            big_b: 0.0,
            rho_bar: 0.5,
        })
    }

    /// The two-level potential of the explicit family: K = b inside r < 1/n,
    /// K = a outside. Its oscillation ratio is exactly σ̄ = b/a with B = 0.
    pub fn family(a: f64, b: f64, n: f64) -> Result<Self> {
        if !(0.0 < a && a <= b) || !(n >= 1.0) {
            return Err(Error::Numerical(format!(
                "family potential needs 0 < a <= b and n >= 1, got a={a}, b={b}, n={n}"
            )));
        }
        Self::piecewise_radial(vec![1.0 / n], vec![b, a])
    }

    /// Potential sampled on a grid; `a` and `b` are the caller's certified
    /// pinch bounds (checked against the sampled values).
    pub fn sampled(field: GridField, a: f64, b: f64) -> Result<Self> {
        if !(0.0 < a && a <= b) {
            return Err(Error::Numerical("need 0 < a <= b".into()));
        }
        let (lo, hi) = field.min_max();
        if lo < a - 1e-12 || hi > b + 1e-12 {
            return Err(Error::Numerical(format!(
                "sampled potential range [{lo}, {hi}] escapes the pinch [{a}, {b}]"
            )));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Sampled(field),
            a,
            b,
            sigma_bar: b / a,
            big_b: 0.0,
            rho_bar: 0.5,
        })
    }

    pub fn with_sigma_bar(mut self, sigma_bar: f64) -> Result<Self> {
        if !(sigma_bar >= 1.0) {
            return Err(Error::Numerical("sigma_bar must be >= 1".into()));
        }
        self.sigma_bar = sigma_bar;
        Ok(self)
    }

    pub fn with_log_modulus(mut self, big_b: f64) -> Result<Self> {
        if !(big_b >= 0.0) {
            return Err(Error::Numerical("B must be >= 0".into()));
        }
        self.big_b = big_b;
        Ok(self)
    }

    pub fn with_rho_bar(mut self, rho_bar: f64) -> Result<Self> {
        if !(rho_bar > 0.0 && rho_bar <= 0.5) {
            return Err(Error::Numerical("rho_bar must lie in (0, 1/2]".into()));
        }
        self.rho_bar = rho_bar;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar
    }

    pub fn log_modulus(&self) -> f64 {
        self.big_b
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    /// K at a point. Radial kinds measure the radius from the origin.
    pub fn eval(&self, p: Point) -> f64 {
        match &self.kind {
            PotentialKind::Constant(c) => *c,
            PotentialKind::PiecewiseRadial { .. } => self.eval_radial(p.norm()),
            PotentialKind::Sampled(field) => field
                .interpolate(p)
                .unwrap_or_else(|_| 0.5 * (self.a + self.b)),
        }
    }

    /// Radii at which a piecewise-radial potential jumps (empty otherwise).
    /// Integrators split their meshes here so every piece stays smooth.
    pub fn radial_breakpoints(&self) -> &[f64] {
        match &self.kind {
            PotentialKind::PiecewiseRadial { breakpoints, .. } => breakpoints,
            _ => &[],
        }
    }

    /// True when K is constant along every circle about the origin.
    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, PotentialKind::Sampled(_))
    }

    /// K at radius r (from the origin).
    pub fn eval_radial(&self, r: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant(c) => *c,
            PotentialKind::PiecewiseRadial { breakpoints, constants } => {
                let mut i = 0;
                while i < breakpoints.len() && r >= breakpoints[i] {
                    i += 1;
                }
                constants[i]
            }
            PotentialKind::Sampled(_) => self.eval(Point::new(r, 0.0)),
        }
    }
}
