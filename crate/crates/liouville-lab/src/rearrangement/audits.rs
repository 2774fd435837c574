//! Audits built on rearranged profiles: reconstructed-potential bounds, the
//! differential inequality between mass and profile slope, the integrated
//! tail fit of the mass function, and the per-level isoperimetric audit.

use rayon::prelude::*;

use crate::checks::HuberAudit;
use crate::error::{Error, Result};
use crate::geom::{dist_point_segment, point_in_polygon};
use crate::grid::GridField;
use crate::weight::ConicalWeight;

use super::contours::superlevel_contours;
use super::{distribution_function, RearrangedProfile};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Violation counts for the two differential inequalities linking the mass
/// function to the rearranged profile slope: F ≥ 2πs(−dv*/ds) with the
/// plain circumference (regular branch) and F ≥ (1+α)·2πs(−dv*/ds) with the
/// conical one (singular branch). The margin at a sample is F minus the
/// branch right-hand side; a margin below −tol is a violation.
///
/// Which branch applies depends on whether the superlevel set holds the
/// weight center, and the handoff radius is not an output of the profile —
/// so both branches are always measured and reported side by side. A
/// centered singular field is expected to break the regular branch and
/// saturate the singular one.
#[derive(Debug, Clone)]
pub struct DiffIneqReport {
    /// Violation threshold used: 1% of the largest mass value.
    pub tol: f64,
    pub regular_violations: usize,
    pub singular_violations: usize,
    /// Most negative regular-branch margin (≥ 0 means satisfied everywhere).
    pub worst_regular: f64,
    /// Most negative singular-branch margin; ≈ 0 at the equality case.
    pub worst_singular: f64,
}

/// Abscissa for the integrated tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitAbscissa {
    /// Fit against the physical radius r = ((1+α)s²)^{1/(2+2α)}.
    PhysicalRadius,
    /// Fit against the measure radius s itself.
    MeasureRadius,
}

/// Power-law tail fit F(x) ≈ limit − c·x^{−exponent}.
#[derive(Debug, Clone)]
pub struct IntegratedFit {
    pub limit: f64,
    pub c: f64,
    pub exponent: f64,
}

/// Worst overshoot of the reconstructed potential K̂ outside [a, b], over the
/// interior 96% of samples (the outermost 2% on each side are centered-
/// difference boundary effects). Zero when every sample lies inside the band.
pub fn audit_khat_bounds(profile: &RearrangedProfile, a: f64, b: f64) -> f64 {
    let m = profile.len();
    let skip = (m as f64 * 0.02).ceil() as usize;
    let mut worst = 0.0f64;
    for j in skip..m.saturating_sub(skip) {
        let k = profile.k_hat()[j];
        if !k.is_finite() {
            continue;
        }
        worst = worst.max(a - k).max(k - b);
    }
    worst
}

/// Check both slope inequalities at every interior sample of the profile.
pub fn audit_differential_inequality(profile: &RearrangedProfile) -> DiffIneqReport {
    let s = profile.s();
    let v = profile.v_star();
    let f = profile.f();
    let alpha = profile.alpha();
    let max_f = f.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-2 * max_f;
    let mut report = DiffIneqReport {
        tol,
        regular_violations: 0,
        singular_violations: 0,
        worst_regular: f64::NEG_INFINITY,
        worst_singular: f64::NEG_INFINITY,
    };
    for j in 1..s.len().saturating_sub(1) {
        let ds = s[j + 1] - s[j - 1];
        if !(ds > 0.0) {
            continue;
        }
        let slope = (v[j + 1] - v[j - 1]) / ds;
        let circ = 2.0 * std::f64::consts::PI * s[j] * (-slope);
        let regular = f[j] - circ;
        let singular = f[j] - (1.0 + alpha) * circ;
        report.worst_regular = report.worst_regular.max(regular);
        report.worst_singular = report.worst_singular.max(singular);
        if regular > tol {
            report.regular_violations += 1;
        }
        if singular > tol {
            report.singular_violations += 1;
        }
    }
    report
}

/// Fit the tail of the mass function as F(x) ≈ F∞ − c·x^{−γ} over samples
/// with s ≥ s0: golden-section search over F∞ with an inner linear least
/// squares of log(F∞ − F) against log x. Needs at least one decade of
/// abscissa range past s0.
pub fn integrated_bound_fit(
    profile: &RearrangedProfile,
    s0: f64,
    abscissa: FitAbscissa,
) -> Result<IntegratedFit> {
    let alpha = profile.alpha();
    let to_x = |s: f64| -> f64 {
        match abscissa {
            FitAbscissa::MeasureRadius => s,
            FitAbscissa::PhysicalRadius => ((1.0 + alpha) * s * s).powf(1.0 / (2.0 + 2.0 * alpha)),
        }
    };
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for j in 0..profile.len() {
        let s = profile.s()[j];
        if s >= s0 && s > 0.0 {
            xs.push(to_x(s).ln());
            fs.push(profile.f()[j]);
        }
    }
    if xs.len() < 8 {
        return Err(Error::InsufficientTail { decades: 0.0, needed: 1.0 });
    }
    let decades = (xs[xs.len() - 1] - xs[0]) / std::f64::consts::LN_10;
    if decades < 1.0 {
        return Err(Error::InsufficientTail { decades, needed: 1.0 });
    }
    let f_max = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(f_max > 0.0) {
        return Err(Error::Numerical("mass function has no positive tail to fit".into()));
    }

    // Least-squares line of log(F∞ − F) vs log x for a candidate limit,
    // returning (SSR, slope, intercept).
    let line_fit = |limit: f64| -> (f64, f64, f64) {
        let m = xs.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (x, f) in xs.iter().zip(fs.iter()) {
            let y = (limit - f).ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let denom = m * sxx - sx * sx;
        let slope = (m * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / m;
        let mut ssr = 0.0;
        for (x, f) in xs.iter().zip(fs.iter()) {
            let r = (limit - f).ln() - (intercept + slope * x);
            ssr += r * r;
        }
        (ssr, slope, intercept)
    };

    // Golden-section over t = log(F∞ − F_max): the gap spans nine orders of
    // magnitude, so search its logarithm.
    let golden = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut lo = (f_max * 1e-9).ln();
    let mut hi = f_max.ln();
    let mut t1 = hi - golden * (hi - lo);
    let mut t2 = lo + golden * (hi - lo);
    let eval = |t: f64| line_fit(f_max + t.exp()).0;
    let mut f1 = eval(t1);
    let mut f2 = eval(t2);
    for _ in 0..200 {
        if f1 < f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - golden * (hi - lo);
            f1 = eval(t1);
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + golden * (hi - lo);
            f2 = eval(t2);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let limit = f_max + (0.5 * (lo + hi)).exp();
    let (_, slope, intercept) = line_fit(limit);
    Ok(IntegratedFit { limit, c: intercept.exp(), exponent: -slope })
}

/// Per-level isoperimetric audit: weighted contour length squared against
/// β times the weighted superlevel measure, one audit per requested level
/// (sorted ascending). Levels whose superlevel boundary does not close
/// inside the grid get a NaN ratio rather than a silently wrong one.
pub fn audit_huber_levels(
    field: &GridField,
    weight: &ConicalWeight,
    levels: &[f64],
    clip_radius: f64,
) -> Result<Vec<HuberAudit>> {
    let mut ladder: Vec<f64> = levels.to_vec();
    if ladder.is_empty() {
        return Err(Error::Numerical("level ladder is empty".into()));
    }
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let dist = distribution_function(field, weight, &ladder, clip_radius)?;
    let alpha = weight.alpha();
    let center = weight.center();
    let h = field.h();

    let audits: Vec<HuberAudit> = ladder
        .par_iter()
        .zip(dist.xi().par_iter())
        .map(|(&t, &xi)| {
            let contours = superlevel_contours(field, t);
            let mut length = 0.0;
            let mut loops = 0usize;
            let mut enclosing = 0usize;
            let mut min_center_dist = f64::INFINITY;
            for loop_pts in &contours.polylines {
                if clip_radius.is_finite()
                    && loop_pts.iter().any(|p| (*p - center).norm() > clip_radius)
                {
                    continue;
                }
                match weight.length_polyline(loop_pts) {
                    Ok(l) => length += l,
                    Err(_) => continue,
                }
                loops += 1;
                let ring = &loop_pts[..loop_pts.len() - 1];
                if point_in_polygon(center, ring) {
                    enclosing += 1;
                }
                for seg in loop_pts.windows(2) {
                    min_center_dist =
                        min_center_dist.min(dist_point_segment(center, seg[0], seg[1]));
                }
            }
            let indeterminate = alpha != 0.0 && min_center_dist <= h;
            let (beta, singular_inside) = if alpha == 0.0 {
                (FOUR_PI, Some(enclosing > 0))
            } else if indeterminate {
                (FOUR_PI, None)
            } else if enclosing > 0 {
                (FOUR_PI * (1.0 + alpha), Some(true))
            } else {
                (FOUR_PI, Some(false))
            };
            let ratio = if loops == 0 || !(xi > 0.0) {
                f64::NAN
            } else {
                length * length / (beta * xi)
            };
            HuberAudit {
                boundary_weighted_length: length,
                interior_weighted_mass: xi,
                beta,
                ratio,
                singular_inside,
                subharmonic_warning: false,
            }
        })
        .collect();
    Ok(audits)
}
