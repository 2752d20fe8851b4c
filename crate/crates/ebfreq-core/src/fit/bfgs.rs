//! Dense BFGS minimizer with Armijo backtracking.
//!
//! The parameter counts here are tiny (2 to a few dozen), so the inverse
//! Hessian is kept as a dense matrix. Accepted steps strictly decrease the
//! objective; everything is sequential and deterministic.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use alloc::vec;
use alloc::vec::Vec;

use super::objective::Objective;

pub(crate) struct BfgsOptions {
    pub max_iter: usize,
    /// Euclidean gradient norm below which (together with the objective
    /// criterion) the run counts as converged.
    pub grad_tol: f64,
    /// Relative objective change below which (together with the gradient
    /// criterion) the run counts as converged.
    pub obj_rel_tol: f64,
    /// Cap on the Euclidean length of a single step.
    pub max_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iter: 500, grad_tol: 1e-6, obj_rel_tol: 1e-10, max_step: 20.0 }
    }
}

pub(crate) struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn minimize(obj: &dyn Objective, x0: &[f64], opts: &BfgsOptions) -> BfgsOutcome {
    let n = x0.len();
    debug_assert_eq!(n, obj.dim());

    let mut x = x0.to_vec();
    let mut grad = vec![0.0; n];
    let mut f = obj.eval(&x, Some(&mut grad));

    // Inverse Hessian estimate, row-major.
    let mut h = identity(n);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut grad_new = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..opts.max_iter {
        // dir = -H g, reset to steepest descent if H has gone indefinite.
        mat_vec_neg(&h, &grad, &mut dir);
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            h = identity(n);
            for (d, g) in dir.iter_mut().zip(&grad) {
                *d = -g;
            }
            slope = dot(&grad, &dir);
            if !(slope < 0.0) {
                break; // zero gradient
            }
        }

        let dir_len = norm2(&dir);
        let mut t = if dir_len > opts.max_step { opts.max_step / dir_len } else { 1.0 };

        let mut accepted = false;
        let mut f_new = f;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + t * dir[i];
            }
            f_new = obj.eval(&x_new, None);
            if f_new.is_finite() && f_new <= f + 1e-4 * t * slope {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break; // line search stalled at floating-point resolution
        }

        let f_check = obj.eval(&x_new, Some(&mut grad_new));
        debug_assert_eq!(f_check, f_new);
        iterations += 1;

        let rel_change = (f - f_new).abs() / (1.0 + f_new.abs());
        let gnorm = norm2(&grad_new);
        let done = rel_change < opts.obj_rel_tol && gnorm < opts.grad_tol;

        // BFGS update of the inverse Hessian.
        let mut s = vec![0.0; n];
        let mut yv = vec![0.0; n];
        for i in 0..n {
            s[i] = x_new[i] - x[i];
            yv[i] = grad_new[i] - grad[i];
        }
        let sy = dot(&s, &yv);
        if sy > 1e-12 * norm2(&s) * norm2(&yv) {
            update_inverse(&mut h, &s, &yv, sy);
        }

        x.copy_from_slice(&x_new);
        grad.copy_from_slice(&grad_new);
        f = f_new;

        if done {
            converged = true;
            break;
        }
    }

    let grad_norm = norm2(&grad);
    BfgsOutcome { x, value: f, grad_norm, iterations, converged }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec_neg(h: &[f64], v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for i in 0..n {
        let row = &h[i * n..(i + 1) * n];
        out[i] = -dot(row, v);
    }
}

/// `H <- (I - r s y') H (I - r y s') + r s s'` with `r = 1/sy`.
fn update_inverse(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let mut hy = vec![0.0; n];
    for i in 0..n {
        hy[i] = dot(&h[i * n..(i + 1) * n], y);
    }
    let yhy = dot(y, &hy);
    let c = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += c * s[i] * s[j] - rho * (s[i] * hy[j] + hy[i] * s[j]);
        }
    }
}
