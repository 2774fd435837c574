//! Explicit radial solutions: a one-parameter family u_n on the unit disk
//! driven by a two-level radial potential, its limiting profile U_{α,a,b},
//! and exact evaluation of the weighted sup+inf combination together with its
//! closed-form upper bound and the total curvature carried by the limit.
//!
//! Everything here is analytic; these functions serve as ground truth for the
//! grid solvers and the audits built on top of them.

use crate::error::{Error, Result};
use crate::quad;

/// Parameters of the explicit family: cone exponent α ∈ (−1, 0], potential
/// levels 0 < a ≤ b, and the family index n ≥ 1 (real-valued so parameter
/// sweeps and bisection work).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleParams {
    alpha: f64,
    a: f64,
    b: f64,
    n: f64,
}

impl BubbleParams {
    pub fn new(alpha: f64, a: f64, b: f64, n: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha <= 0.0) {
            return Err(Error::InvalidWeight { alpha });
        }
        if !(a > 0.0 && b >= a) {
            return Err(Error::Numerical(format!(
                "potential levels must satisfy 0 < a ≤ b, got a={a}, b={b}"
            )));
        }
        if !(n >= 1.0) {
            return Err(Error::Numerical(format!("family index must be ≥ 1, got {n}")));
        }
        Ok(BubbleParams { alpha, a, b, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// √(a/b) ∈ (0, 1]; the exponent that couples the inner and outer branches.
    pub fn s(&self) -> f64 {
        (self.a / self.b).sqrt()
    }

    /// 2(1+α): the radial power of the inner branch.
    pub fn q(&self) -> f64 {
        2.0 * (1.0 + self.alpha)
    }
}

const R_SLACK: f64 = 1e-12;

/// The family member u_n at radius r ∈ [0, 1].
///
/// Piecewise: for r < 1/n an inner bubble cap, for r ∈ [1/n, 1] an outer
/// power-law profile; the two branches agree at r = 1/n (the value there is
/// taken from the inner branch). Radii beyond 1 are out of range.
pub fn family_u(p: &BubbleParams, r: f64) -> Result<f64> {
    if !(r >= -R_SLACK) || r > 1.0 + R_SLACK {
        return Err(Error::OutOfRange { r, max: 1.0 });
    }
    let r = r.clamp(0.0, 1.0);
    let q = p.q();
    let s = p.s();
    let c = 8.0 * (1.0 + p.alpha) * (1.0 + p.alpha) / p.b;
    if r * p.n <= 1.0 {
        // Inner branch: log(c·n^q / (1 + n^q r^q)²).
        let nq = p.n.powf(q);
        Ok((c * nq).ln() - 2.0 * (nq * r.powf(q)).ln_1p())
    } else {
        // Outer branch: log(c·n^{qs} r^{q(s−1)} / (1 + n^{qs} r^{qs})²).
        let nqs = p.n.powf(q * s);
        let core = c.ln() + q * s * p.n.ln() + q * (s - 1.0) * r.ln();
        Ok(core - 2.0 * (nqs * r.powf(q * s)).ln_1p())
    }
}

/// Radial derivative du_n/dr. At the branch point r = 1/n the potential jumps,
/// so the profile is C¹ but not C²; queries within `h` of it are answered from
/// the side the radius falls on.
pub fn family_u_deriv(p: &BubbleParams, r: f64) -> Result<f64> {
    if !(r > 0.0) || r > 1.0 + R_SLACK {
        return Err(Error::OutOfRange { r, max: 1.0 });
    }
    let r = r.min(1.0);
    let q = p.q();
    let s = p.s();
    if r * p.n <= 1.0 {
        let nq = p.n.powf(q);
        let t = nq * r.powf(q);
        Ok(-2.0 * q * t / (r * (1.0 + t)))
    } else {
        let nqs = p.n.powf(q * s);
        let t = nqs * r.powf(q * s);
        Ok(q * (s - 1.0) / r - 2.0 * q * s * t / (r * (1.0 + t)))
    }
}

/// The two-level potential that drives the family: b inside radius 1/n,
/// a on [1/n, 1].
pub fn family_k(p: &BubbleParams, r: f64) -> f64 {
    if r < 1.0 / p.n {
        p.b
    } else {
        p.a
    }
}

/// The limiting profile U_{α,a,b}: a bubble cap on r < 1 matched to a
/// power-law tail on r ≥ 1. Defined for all r ≥ 0.
pub fn limit_bubble(alpha: f64, a: f64, b: f64, r: f64) -> f64 {
    let q = 2.0 * (1.0 + alpha);
    let s = (a / b).sqrt();
    let c = 8.0 * (1.0 + alpha) * (1.0 + alpha) / b;
    if r < 1.0 {
        c.ln() - 2.0 * r.powf(q).ln_1p()
    } else {
        c.ln() + q * (s - 1.0) * r.ln() - 2.0 * r.powf(q * s).ln_1p()
    }
}

/// Radial derivative dU/dr of the limiting profile, one-sided at r = 1.
pub fn limit_bubble_deriv(alpha: f64, a: f64, b: f64, r: f64) -> f64 {
    let q = 2.0 * (1.0 + alpha);
    let s = (a / b).sqrt();
    if r < 1.0 {
        let t = r.powf(q);
        -2.0 * q * t / (r * (1.0 + t))
    } else {
        let t = r.powf(q * s);
        q * (s - 1.0) / r - 2.0 * q * s * t / (r * (1.0 + t))
    }
}

/// √(a/b)·u_n(0) + u_n(1), evaluated in closed form:
/// log( (8(1+α)²/b)^{√(a/b)+1} · n^{4(1+α)√(a/b)} / (1 + n^{2(1+α)√(a/b)})² ).
///
/// The same combination assembled from [`family_u`] agrees to 1e−10; the
/// closed form is returned.
pub fn supinf_combination(p: &BubbleParams) -> f64 {
    let q = p.q();
    let s = p.s();
    let c = 8.0 * (1.0 + p.alpha) * (1.0 + p.alpha) / p.b;
    let nqs = p.n.powf(q * s);
    let closed = (s + 1.0) * c.ln() + 2.0 * q * s * p.n.ln() - 2.0 * nqs.ln_1p();
    debug_assert!({
        let sampled = s * family_u(p, 0.0).unwrap() + family_u(p, 1.0).unwrap();
        (sampled - closed).abs() <= 1e-10 * (1.0 + closed.abs())
    });
    closed
}

/// The same combination assembled from pointwise family values,
/// √(a/b)·u_n(0) + u_n(1); used to cross-check [`supinf_combination`].
pub fn supinf_combination_sampled(p: &BubbleParams) -> f64 {
    let s = p.s();
    s * family_u(p, 0.0).expect("r=0 is in range") + family_u(p, 1.0).expect("r=1 is in range")
}

/// The uniform upper bound (√(a/b)+1)·log(8(1+α)²/b) that the combination
/// approaches from below as n → ∞.
pub fn supinf_bound(alpha: f64, a: f64, b: f64) -> f64 {
    let s = (a / b).sqrt();
    let c = 8.0 * (1.0 + alpha) * (1.0 + alpha) / b;
    (s + 1.0) * c.ln()
}

/// Total curvature ∫ r^{2α} K e^U dx carried by the limiting profile, with
/// K = b inside the unit disk and a outside: adaptive quadrature out to
/// `r_max` plus the analytic tail 8π(1+α)√(a/b)/(1 + r_max^{2(1+α)√(a/b)}).
/// The result lands within `tol` of 4π(1+α)(1+√(a/b)).
pub fn bubble_total_curvature(alpha: f64, a: f64, b: f64, r_max: f64, tol: f64) -> Result<f64> {
    if !(alpha > -1.0 && alpha <= 0.0) {
        return Err(Error::InvalidWeight { alpha });
    }
    if !(r_max >= 10.0) {
        return Err(Error::Numerical(format!(
            "truncation radius must be ≥ 10, got {r_max}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Numerical(format!("tolerance must be positive, got {tol}")));
    }
    let q = 2.0 * (1.0 + alpha);
    let s = (a / b).sqrt();
    let tau = std::f64::consts::TAU;
    let mut inner = |r: f64| tau * r.powf(1.0 + 2.0 * alpha) * b * limit_bubble(alpha, a, b, r).exp();
    let mut outer = |r: f64| tau * r.powf(1.0 + 2.0 * alpha) * a * limit_bubble(alpha, a, b, r).exp();
    let (v1, e1) = quad::adaptive(&mut inner, 0.0, 1.0, 1e-13);
    let (v2, e2) = quad::adaptive(&mut outer, 1.0, r_max, 1e-13);
    let tail = 8.0 * std::f64::consts::PI * (1.0 + alpha) * s / (1.0 + r_max.powf(q * s));
    let achieved = e1 + e2;
    if achieved > tol {
        return Err(Error::QuadratureNoConvergence { achieved });
    }
    Ok(v1 + v2 + tail)
}

