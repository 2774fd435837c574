//! Minimum-residual Krylov iteration for symmetric, possibly indefinite
//! systems (Lanczos tridiagonalization + Givens QR). The Newton linearization
//! of the exponential source is symmetric but loses definiteness once the
//! solution carries more than the first eigenvalue's worth of mass, which
//! rules out plain conjugate gradients.

pub struct MinresOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Solve A x = b for symmetric `apply`, stopping when the residual norm falls
/// under `rel_tol`·‖b‖ or after `max_iter` iterations. Always returns the best
/// iterate found together with its residual norm.
pub fn minres<A>(apply: A, b: &[f64], rel_tol: f64, max_iter: usize) -> MinresOutcome
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let beta1 = norm(b);
    let mut x = vec![0.0; n];
    if beta1 == 0.0 {
        return MinresOutcome { x, residual_norm: 0.0, iterations: 0, converged: true };
    }
    let target = rel_tol * beta1;

    let mut v_old = vec![0.0; n];
    let mut v: Vec<f64> = b.iter().map(|&t| t / beta1).collect();
    let mut w_old = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut p = vec![0.0; n];

    // Rotations from the two previous columns of the tridiagonal factor.
    let (mut c_prev, mut s_prev) = (1.0f64, 0.0f64); // G_{k-2}
    let (mut c_cur, mut s_cur) = (1.0f64, 0.0f64); // G_{k-1}
    let mut beta = 0.0f64; // subdiagonal entering the current column
    let mut phibar = beta1;

    for k in 1..=max_iter {
        apply(&v, &mut p);
        let alpha = dot(&v, &p);
        for i in 0..n {
            p[i] -= alpha * v[i] + beta * v_old[i];
        }
        let beta_next = norm(&p);

        // Apply G_{k-2}, G_{k-1} to the new column, then form G_k.
        let rho3 = s_prev * beta;
        let rho2 = s_cur * alpha + c_prev * c_cur * beta;
        let delta = c_cur * alpha - c_prev * s_cur * beta;
        let rho1 = (delta * delta + beta_next * beta_next).sqrt();
        if rho1 == 0.0 {
            return MinresOutcome { x, residual_norm: phibar, iterations: k, converged: false };
        }
        let c_new = delta / rho1;
        let s_new = beta_next / rho1;

        // Direction update and solution step.
        for i in 0..n {
            let wi = (v[i] - rho2 * w[i] - rho3 * w_old[i]) / rho1;
            w_old[i] = w[i];
            w[i] = wi;
            x[i] += c_new * phibar * wi;
        }
        phibar *= s_new;

        if phibar <= target {
            return MinresOutcome { x, residual_norm: phibar, iterations: k, converged: true };
        }
        if beta_next == 0.0 {
            // Krylov space exhausted; the iterate is exact in that space.
            return MinresOutcome {
                x,
                residual_norm: phibar,
                iterations: k,
                converged: phibar <= target,
            };
        }

        for i in 0..n {
            let t = p[i] / beta_next;
            v_old[i] = v[i];
            v[i] = t;
        }
        c_prev = c_cur;
        s_prev = s_cur;
        c_cur = c_new;
        s_cur = s_new;
        beta = beta_next;
    }

    MinresOutcome { x, residual_norm: phibar, iterations: max_iter, converged: false }
}
