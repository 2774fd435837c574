//! Damped-Newton solver for the 5-point discretization of
//! −Δu = |x|^{2α} K e^u with Dirichlet data on a masked grid, and the matching
//! discrete residual. The singular weight enters through its exact dual-cell
//! average, so the scheme stays finite and conservative at the cone point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DomainShape, GridField};
use crate::potential::PotentialSpec;
use crate::solvers::minres;
use crate::weight::ConicalWeight;
use crate::Point;

/// Dirichlet problem description: grid geometry, cone exponent, potential,
/// per-node boundary data, Newton controls, and an optional initial iterate
/// (the exponential source admits several solutions for the same boundary
/// data; the initial iterate selects the branch).
#[derive(Debug, Clone)]
pub struct Dirichlet2D {
    extent: f64,
    n: usize,
    shape: DomainShape,
    alpha: f64,
    k: PotentialSpec,
    boundary: Vec<f64>,
    newton_tol: f64,
    max_iter: usize,
    initial: Option<GridField>,
}

impl Dirichlet2D {
    pub fn new(extent: f64, n: usize, shape: DomainShape, alpha: f64, k: PotentialSpec) -> Result<Self> {
        ConicalWeight::centered(alpha)?;
        if !(extent > 0.0) {
            return Err(Error::Numerical("grid extent must be positive".into()));
        }
        if n < GridField::MIN_N {
            return Err(Error::Numerical(format!(
                "grid needs at least {} samples per axis, got {n}",
                GridField::MIN_N
            )));
        }
        Ok(Dirichlet2D {
            extent,
            n,
            shape,
            alpha,
            k,
            boundary: vec![0.0; n * n],
            newton_tol: 1e-10,
            max_iter: 50,
            initial: None,
        })
    }

    /// Set boundary data by evaluating a function at every node (only the
    /// values on boundary nodes are ever read).
    pub fn with_boundary_fn<F: Fn(Point) -> f64>(mut self, f: F) -> Self {
        let h = 2.0 * self.extent / (self.n - 1) as f64;
        for iy in 0..self.n {
            for ix in 0..self.n {
                let p = Point::new(-self.extent + ix as f64 * h, -self.extent + iy as f64 * h);
                self.boundary[iy * self.n + ix] = f(p);
            }
        }
        self
    }

    pub fn with_boundary_const(self, g: f64) -> Self {
        self.with_boundary_fn(|_| g)
    }

    pub fn with_newton(mut self, tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) || max_iter < 1 {
            return Err(Error::Numerical(
                "Newton controls need tol > 0 and at least one iteration".into(),
            ));
        }
        self.newton_tol = tol;
        self.max_iter = max_iter;
        Ok(self)
    }

    /// Seed Newton from this field instead of the harmonic extension.
    pub fn with_initial(mut self, field: GridField) -> Self {
        self.initial = Some(field);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> &PotentialSpec {
        &self.k
    }
}

/// Precomputed stencil data over the unknown (interior) nodes.
struct Stencil {
    h: f64,
    /// Grid index of each unknown.
    interior: Vec<usize>,
    /// Compact neighbor ids (E, W, N, S); −1 where the neighbor is boundary.
    nbrs: Vec<[i32; 4]>,
    /// Dual-cell weight average times K at each unknown.
    wk: Vec<f64>,
}

fn build_stencil(template: &GridField, alpha: f64, k: &PotentialSpec) -> Result<Stencil> {
    let n = template.n();
    let h = template.h();
    let weight = ConicalWeight::centered(alpha)?;
    let mut interior = Vec::new();
    let mut compact = vec![-1i32; n * n];
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let all_in = template.masked_in(ix, iy)
                && template.masked_in(ix + 1, iy)
                && template.masked_in(ix - 1, iy)
                && template.masked_in(ix, iy + 1)
                && template.masked_in(ix, iy - 1);
            if all_in {
                compact[iy * n + ix] = interior.len() as i32;
                interior.push(iy * n + ix);
            }
        }
    }
    let nbrs: Vec<[i32; 4]> = interior
        .iter()
        .map(|&g| [compact[g + 1], compact[g - 1], compact[g + n], compact[g - n]])
        .collect();
    let wk: Vec<f64> = interior
        .par_iter()
        .map(|&g| {
            let (ix, iy) = (g % n, g / n);
            let p = template.node_point(ix, iy);
            let wbar = if alpha == 0.0 {
                1.0
            } else {
                let half = 0.5 * h;
                weight.area_rect(Point::new(p.x - half, p.y - half), Point::new(p.x + half, p.y + half))
                    / (h * h)
            };
            wbar * k.eval(p)
        })
        .collect();
    Ok(Stencil { h, interior, nbrs, wk })
}

/// F_i = −Δ_h u − w̄ K e^u at each unknown, reading neighbor values from the
/// full node array (boundary values included).
fn residual_compact(st: &Stencil, n: usize, u: &[f64]) -> Vec<f64> {
    let h2 = st.h * st.h;
    st.interior
        .par_iter()
        .zip(st.wk.par_iter())
        .map(|(&g, &wk)| {
            let uc = u[g];
            let s = u[g + 1] + u[g - 1] + u[g + n] + u[g - n];
            (4.0 * uc - s) / h2 - wk * uc.exp()
        })
        .collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Solve the Dirichlet problem by damped Newton iteration; the linearized
/// symmetric (generally indefinite) systems go through MINRES.
pub fn solve_dirichlet(problem: &Dirichlet2D) -> Result<GridField> {
    for g in &problem.boundary {
        if !g.is_finite() {
            return Err(Error::Numerical("boundary data must be finite".into()));
        }
    }
    let template = GridField::from_fn(problem.extent, problem.n, problem.shape, |_| 0.0)?;
    let n = problem.n;
    let st = build_stencil(&template, problem.alpha, &problem.k)?;
    if st.interior.is_empty() {
        return Err(Error::Numerical("domain has no interior nodes".into()));
    }
    let h2 = st.h * st.h;
    let lin_iter_cap = 60 * n;

    // Full node array: boundary data everywhere masked-in, interior replaced
    // below by the initial iterate.
    let mut u = vec![0.0; n * n];
    for g in 0..n * n {
        u[g] = problem.boundary[g];
    }

    match &problem.initial {
        Some(init) => {
            if init.n() != n || (init.extent() - problem.extent).abs() > 1e-12 * problem.extent {
                return Err(Error::Numerical(
                    "initial iterate must live on the problem grid".into(),
                ));
            }
            for &g in &st.interior {
                let (ix, iy) = (g % n, g / n);
                if !init.masked_in(ix, iy) {
                    return Err(Error::Numerical(
                        "initial iterate does not cover the interior".into(),
                    ));
                }
                u[g] = init.value(ix, iy);
            }
        }
        None => {
            // Harmonic extension of the boundary data as the starting iterate:
            // one symmetric positive-definite solve.
            let rhs: Vec<f64> = st
                .interior
                .iter()
                .zip(st.nbrs.iter())
                .map(|(&g, nb)| {
                    let mut s = 0.0;
                    for (j, &cn) in nb.iter().enumerate() {
                        if cn < 0 {
                            let gn = match j {
                                0 => g + 1,
                                1 => g - 1,
                                2 => g + n,
                                _ => g - n,
                            };
                            s += problem.boundary[gn];
                        }
                    }
                    s / h2
                })
                .collect();
            let apply = |x: &[f64], y: &mut [f64]| {
                y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                    let mut s = 4.0 * x[i];
                    for &cn in &st.nbrs[i] {
                        if cn >= 0 {
                            s -= x[cn as usize];
                        }
                    }
                    *yi = s / h2;
                });
            };
            let out = minres(apply, &rhs, 1e-12, lin_iter_cap);
            for (i, &g) in st.interior.iter().enumerate() {
                u[g] = out.x[i];
            }
        }
    }

    let mut f = residual_compact(&st, n, &u);
    let mut res = sup_norm(&f);
    for iter in 1..=problem.max_iter {
        if res <= problem.newton_tol {
            return assemble(problem, &template, &u);
        }
        // Jacobian: A − diag(w̄ K e^u), symmetric, possibly indefinite.
        let d: Vec<f64> = st
            .interior
            .iter()
            .zip(st.wk.iter())
            .map(|(&g, &wk)| wk * u[g].exp())
            .collect();
        let apply = |x: &[f64], y: &mut [f64]| {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                let mut s = 4.0 * x[i];
                for &cn in &st.nbrs[i] {
                    if cn >= 0 {
                        s -= x[cn as usize];
                    }
                }
                *yi = s / h2 - d[i] * x[i];
            });
        };
        let rhs: Vec<f64> = f.iter().map(|&v| -v).collect();
        let step = minres(apply, &rhs, 1e-10, lin_iter_cap);

        // Damping: halve until the residual actually drops.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let mut trial = u.clone();
            for (i, &g) in st.interior.iter().enumerate() {
                trial[g] += lambda * step.x[i];
            }
            let ft = residual_compact(&st, n, &trial);
            let rt = sup_norm(&ft);
            if rt < res {
                u = trial;
                f = ft;
                res = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations: iter, residual: res });
        }
    }
    if res <= problem.newton_tol {
        return assemble(problem, &template, &u);
    }
    Err(Error::NonConvergence { iterations: problem.max_iter, residual: res })
}

fn assemble(problem: &Dirichlet2D, template: &GridField, u: &[f64]) -> Result<GridField> {
    let n = problem.n;
    let mut values = vec![0.0; n * n];
    let mut mask = vec![false; n * n];
    for iy in 0..n {
        for ix in 0..n {
            if template.masked_in(ix, iy) {
                values[iy * n + ix] = u[iy * n + ix];
                mask[iy * n + ix] = true;
            }
        }
    }
    GridField::new(problem.extent, n, values, mask)
}

/// Discrete residual −Δ_h u − |x|^{2α} K e^u of a field, with the weight
/// averaged over each node's dual cell. The returned field is masked to the
/// interior nodes where the stencil is defined.
pub fn residual(field: &GridField, alpha: f64, k: &PotentialSpec) -> Result<GridField> {
    let st = build_stencil(field, alpha, k)?;
    let n = field.n();
    let f = residual_compact(&st, n, field.values());
    let mut values = vec![0.0; n * n];
    let mut mask = vec![false; n * n];
    for (i, &g) in st.interior.iter().enumerate() {
        values[g] = f[i];
        mask[g] = true;
    }
    GridField::new(field.extent(), n, values, mask)
}
