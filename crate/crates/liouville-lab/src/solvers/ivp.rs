//! Radial initial-value shooting for (r u′)′ = −r^{1+2α} K(r) e^u with
//! u(0) = M, and the weighted mass integral 2π ∫ s^{1+2α} K e^u ds over the
//! resulting profiles.
//!
//! The equation is singular at r = 0, so integration starts from a series
//! expansion on a starter interval whose length adapts to K(0)e^M; from there
//! an embedded Runge–Kutta pair with step-size control carries the state
//! outward, breaking the mesh at every radius where K jumps.

use crate::error::{Error, Result};
use crate::potential::{PotentialKind, PotentialSpec};
use crate::quad;
use crate::radial::RadialProfile;

/// Radial initial-value problem: cone exponent, radial potential, center
/// value M = u(0), integration span, and local error tolerance.
#[derive(Debug, Clone)]
pub struct RadialIVP {
    alpha: f64,
    k: PotentialSpec,
    m: f64,
    r_max: f64,
    tol: f64,
}

impl RadialIVP {
    pub fn new(alpha: f64, k: PotentialSpec, m: f64, r_max: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha <= 0.0) {
            return Err(Error::InvalidWeight { alpha });
        }
        if !(r_max > 0.0) {
            return Err(Error::Numerical(format!("span must be positive, got {r_max}")));
        }
        if !m.is_finite() {
            return Err(Error::Numerical(format!("center value must be finite, got {m}")));
        }
        Ok(RadialIVP { alpha, k, m, r_max, tol: 1e-11 })
    }

    /// Local error tolerance for the step controller, in (0, 1e−2].
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::Numerical(format!("tolerance must lie in (0, 1e-2], got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> &PotentialSpec {
        &self.k
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

// Cash–Karp embedded 5(4) pair.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0];
const A5: [f64; 4] = [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0];
const A6: [f64; 5] = [
    1631.0 / 55296.0,
    175.0 / 512.0,
    575.0 / 13824.0,
    44275.0 / 110592.0,
    253.0 / 4096.0,
];
const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];
const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];

/// State carried outward: y = (u, φ) with φ = r u′.
#[derive(Clone, Copy)]
struct State {
    u: f64,
    phi: f64,
}

/// Integrate the initial-value problem and return the profile on the accepted
/// mesh (center node at r = 0 included), with radial derivatives attached.
///
/// Fails with a blow-up overflow when e^u is not representable, naming the
/// radius reached.
pub fn solve_radial(ivp: &RadialIVP) -> Result<RadialProfile> {
    let alpha = ivp.alpha;
    let q = 2.0 + 2.0 * alpha;
    let k0 = ivp.k.eval_radial(0.0);
    let source0 = k0 * ivp.m.exp();
    if !source0.is_finite() {
        return Err(Error::BlowupOverflow { radius: 0.0 });
    }

    // Series on [0, r_start]: u = M − c r^q + (c²/4) r^{2q}, φ = −qc r^q + (q/2)c² r^{2q},
    // with c = K(0)e^M/q². The starter radius keeps the dimensionless drop
    // c·r_start^q small enough that the truncated tail is below tol.
    let c = source0 / (q * q);
    let zeta_cap = (2.0 * ivp.tol.sqrt()).min(1e-2);
    let mut r_start = (1e-3f64).min(ivp.r_max / 4.0);
    if c > 0.0 {
        r_start = r_start.min((zeta_cap / c).powf(1.0 / q));
    }
    let series_u = |r: f64| {
        let w = c * r.powf(q);
        ivp.m - w + 0.25 * w * w
    };
    let series_phi = |r: f64| {
        let w = c * r.powf(q);
        -q * w + 0.5 * q * w * w
    };

    let mut nodes: Vec<f64> = vec![0.0];
    let mut values: Vec<f64> = vec![ivp.m];
    let mut derivs: Vec<f64> = vec![0.0];
    // Resolve the starter interval itself with geometric sub-nodes so the
    // stored profile interpolates the cusp r^q accurately for α < 0.
    const STARTER_SUBDIV: u32 = 16;
    for j in (0..STARTER_SUBDIV).rev() {
        let r = r_start / f64::powi(2.0, j as i32);
        nodes.push(r);
        values.push(series_u(r));
        derivs.push(series_phi(r) / r);
    }

    // Segment ends: potential jump radii inside (r_start, r_max), then r_max.
    let mut ends: Vec<f64> = ivp
        .k
        .radial_breakpoints()
        .iter()
        .copied()
        .filter(|&bp| bp > r_start && bp < ivp.r_max)
        .collect();
    ends.push(ivp.r_max);

    let mut r = r_start;
    let mut y = State { u: series_u(r_start), phi: series_phi(r_start) };
    let mut h = r_start; // grows geometrically out of the starter region
    for &seg_end in &ends {
        let seg_start = r;
        // Piecewise-constant potentials are exactly constant between jump
        // radii; freeze the value so stage evaluations at the segment ends
        // never read across a jump.
        let k_const = match ivp.k.kind() {
            PotentialKind::Constant(_) | PotentialKind::PiecewiseRadial { .. } => {
                Some(ivp.k.eval_radial(0.5 * (seg_start + seg_end)))
            }
            PotentialKind::Sampled(_) => None,
        };
        let rhs = |rr: f64, s: State| -> Option<(f64, f64)> {
            let e = s.u.exp();
            if !e.is_finite() {
                return None;
            }
            let kk = k_const.unwrap_or_else(|| ivp.k.eval_radial(rr));
            Some((s.phi / rr, -rr.powf(1.0 + 2.0 * alpha) * kk * e))
        };
        while r < seg_end {
            let h_cap = (0.01f64).max(0.01 * r);
            h = h.min(h_cap).min(seg_end - r);
            // Embedded step with error control.
            let mut k_stages = [(0.0f64, 0.0f64); 6];
            let mut ok = true;
            for stage in 0..6 {
                let mut us = y.u;
                let mut ps = y.phi;
                let aa: &[f64] = match stage {
                    0 => &[],
                    1 => &A2,
                    2 => &A3,
                    3 => &A4,
                    4 => &A5,
                    _ => &A6,
                };
                for (j, &a) in aa.iter().enumerate() {
                    us += h * a * k_stages[j].0;
                    ps += h * a * k_stages[j].1;
                }
                match rhs(r + C[stage] * h, State { u: us, phi: ps }) {
                    Some(d) => k_stages[stage] = d,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return Err(Error::BlowupOverflow { radius: r });
            }
            let mut u5 = y.u;
            let mut p5 = y.phi;
            let mut u4 = y.u;
            let mut p4 = y.phi;
            for j in 0..6 {
                u5 += h * B5[j] * k_stages[j].0;
                p5 += h * B5[j] * k_stages[j].1;
                u4 += h * B4[j] * k_stages[j].0;
                p4 += h * B4[j] * k_stages[j].1;
            }
            if !u5.is_finite() || !p5.is_finite() {
                return Err(Error::BlowupOverflow { radius: r });
            }
            let err = ((u5 - u4).abs() / (1.0 + u5.abs()))
                .max((p5 - p4).abs() / (1.0 + p5.abs()));
            if err <= ivp.tol {
                r += h;
                if (seg_end - r).abs() <= 4.0 * f64::EPSILON * seg_end.abs().max(1.0) {
                    r = seg_end;
                }
                y = State { u: u5, phi: p5 };
                nodes.push(r);
                values.push(y.u);
                derivs.push(y.phi / r);
                let grow = if err > 0.0 { 0.9 * (ivp.tol / err).powf(0.2) } else { 5.0 };
                h *= grow.clamp(1.0, 5.0);
            } else {
                let shrink = 0.9 * (ivp.tol / err).powf(0.25);
                h *= shrink.clamp(0.1, 0.9);
                if h < 1e-15 * (1.0 + r) {
                    return Err(Error::Numerical(format!(
                        "step size collapsed at radius {r:.6e}"
                    )));
                }
            }
        }
    }

    Ok(RadialProfile::new(nodes, values, alpha)?.with_derivs(derivs)?)
}

/// Weighted mass 2π ∫₀^r s^{1+2α} K(s) e^{u(s)} ds carried by a profile.
///
/// Each profile cell is integrated with a fixed Gauss rule after splitting at
/// the potential's jump radii; a cell whose left end sits at the origin is
/// handled with the exact moments of s^{1+2α} against a quadratic fit, so the
/// singular weight never meets a polynomial quadrature rule.
pub fn radial_mass(profile: &RadialProfile, k: &PotentialSpec, r: f64) -> Result<f64> {
    let last = profile.last_radius();
    if r > last * (1.0 + 1e-9) + 1e-300 {
        return Err(Error::OutOfRange { r, max: last });
    }
    let r = r.min(last);
    if r <= profile.first_radius() {
        return Ok(0.0);
    }
    let alpha = profile.alpha();
    let p = 1.0 + 2.0 * alpha;
    let g = |s: f64| -> Result<f64> {
        Ok(k.eval_radial(s) * profile.eval(s)?.exp())
    };

    // Cell edges: profile nodes up to r, r itself, and K's jump radii.
    let mut edges: Vec<f64> = profile
        .nodes()
        .iter()
        .copied()
        .filter(|&s| s < r)
        .collect();
    edges.extend(
        k.radial_breakpoints()
            .iter()
            .copied()
            .filter(|&bp| bp > profile.first_radius() && bp < r),
    );
    edges.push(r);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs().max(1.0));

    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        if lo == 0.0 {
            // Exact moments of s^{1+2α} against the quadratic through
            // (0, g0), (m, gm), (hi, g1).
            let mid = 0.5 * hi;
            let (g0, gm, g1) = (g(1e-300)?, g(mid)?, g(hi)?);
            // g(s) ≈ c0 + c1 s + c2 s² via the three samples.
            let c0 = g0;
            let c2 = (g1 - 2.0 * gm + g0) / (2.0 * mid * mid);
            let c1 = (gm - g0) / mid - c2 * mid;
            let m0 = hi.powf(p + 1.0) / (p + 1.0);
            let m1 = hi.powf(p + 2.0) / (p + 2.0);
            let m2 = hi.powf(p + 3.0) / (p + 3.0);
            total += c0 * m0 + c1 * m1 + c2 * m2;
        } else {
            let (nodes, weights) = quad::rule16();
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wq) in nodes.iter().zip(weights.iter()) {
                let s = mid + half * x;
                total += half * wq * s.powf(p) * g(s)?;
            }
        }
    }
    Ok(std::f64::consts::TAU * total)
}
