//! Gauss-Jacobi nodes and weights on `[0, 1]` for the weight `(1 - s)^gamma`.
//!
//! Nodes are the zeros of the Jacobi polynomial `P_n^{(gamma, 0)}` mapped from
//! `[-1, 1]`, located by Newton iteration on the three-term recurrence with
//! asymptotic starting values. Weights use the derivative formula and are then
//! normalised to the exact total mass `1 / (gamma + 1)`.

use crate::error::{domain, Error, Result};
use crate::numeric::ksum;

const MAX_NEWTON: usize = 100;

/// Evaluates `(P_n(x), P_{n-1}(x))` for the Jacobi family with parameters `(alpha, beta)`.
fn jacobi_pair(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let ab = alpha + beta;
    let mut p_prev = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p = 0.5 * (alpha - beta + (ab + 2.0) * x);
    for j in 2..=n {
        let jf = j as f64;
        let t = 2.0 * jf + ab;
        let a = 2.0 * jf * (jf + ab) * (t - 2.0);
        let b = (t - 1.0) * (alpha * alpha - beta * beta + t * (t - 2.0) * x);
        let c = 2.0 * (jf - 1.0 + alpha) * (jf - 1.0 + beta) * t;
        let next = (b * p - c * p_prev) / a;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Derivative of `P_n` from `(P_n, P_{n-1})`.
fn jacobi_derivative(n: usize, alpha: f64, beta: f64, x: f64, p: f64, p_prev: f64) -> f64 {
    let nf = n as f64;
    let t = 2.0 * nf + alpha + beta;
    (nf * (alpha - beta - t * x) * p + 2.0 * (nf + alpha) * (nf + beta) * p_prev)
        / (t * (1.0 - x * x))
}

/// Gauss-Jacobi rule with `n` nodes for `\int_0^1 F(s) (1-s)^gamma ds`.
///
/// Returned nodes are increasing in `s`. The rule is exact for polynomials of
/// degree `<= 2n - 1`.
pub fn gauss_jacobi_unit(n: usize, gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(gamma.is_finite() && gamma > -1.0) {
        return Err(domain(format!("Jacobi exponent must exceed -1, got {gamma}")));
    }
    if n == 0 {
        return Err(domain("Gauss-Jacobi rule needs at least one node"));
    }
    let (alpha, beta) = (gamma, 0.0);
    let nf = n as f64;
    let mut xs = Vec::with_capacity(n);
    let mut raw_w = Vec::with_capacity(n);
    for i in 1..=n {
        // Gatteschi-type asymptotic guess, ordered from x near 1 downwards
        let theta = (i as f64 + 0.5 * alpha - 0.25) * std::f64::consts::PI
            / (nf + 0.5 * (alpha + beta + 1.0));
        let mut x = theta.cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, pm) = jacobi_pair(n, alpha, beta, x);
            let dp = jacobi_derivative(n, alpha, beta, x, p, pm);
            let step = p / dp;
            let nx = (x - step).clamp(-1.0 + 1e-300, 1.0 - 1e-300);
            let done = (nx - x).abs() <= 4.0 * f64::EPSILON * nx.abs().max(1e-3);
            x = nx;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure(format!(
                "Newton iteration for Gauss-Jacobi node {i} of {n} (gamma = {gamma}) did not converge"
            )));
        }
        let (p, pm) = jacobi_pair(n, alpha, beta, x);
        let dp = jacobi_derivative(n, alpha, beta, x, p, pm);
        xs.push(x);
        raw_w.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    for w in xs.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::NumericalFailure(format!(
                "Gauss-Jacobi nodes out of order for n = {n}, gamma = {gamma}"
            )));
        }
    }
    let mass = 1.0 / (gamma + 1.0);
    let total = ksum(raw_w.iter().copied());
    // map x in [-1,1] to s = (1 + x)/2, reversing so that s increases
    let nodes: Vec<f64> = xs.iter().rev().map(|x| 0.5 * (1.0 + x)).collect();
    let weights: Vec<f64> = raw_w.iter().rev().map(|w| w * mass / total).collect();
    Ok((nodes, weights))
}

/// Gauss-Legendre on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi_unit(n, 0.0)
}
