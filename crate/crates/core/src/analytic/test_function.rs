use num_complex::Complex64;

use super::grid::{TaylorGrid2D, WeightPair};
use crate::error::{domain, Result};

/// Default truncation order per variable for the test functions.
pub const DEFAULT_TEST_ORDER: usize = 24;

/// Coefficients of `z -> \int_0^z (1 - conj(w) t)^{-p} dt` up to `z^order`.
fn kernel_antiderivative(w: Complex64, p: f64, order: usize) -> Vec<Complex64> {
    let wb = w.conj();
    let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
    // (1 - x)^{-p} = sum (p)_n / n! x^n
    let mut binom = 1.0;
    let mut pow = Complex64::new(1.0, 0.0);
    for n in 0..order {
        out[n + 1] = pow * binom / (n + 1) as f64;
        binom *= (p + n as f64) / (n + 1) as f64;
        pow *= wb;
    }
    out
}

/// Truncated test function `f_{omega}` peaking near `omega`, the sum of a
/// `z1`-term, a `z2`-term and their product.
pub fn test_function(omega: [Complex64; 2], a: WeightPair, order: usize) -> Result<TaylorGrid2D> {
    if order < 1 {
        return Err(domain("test function truncation order must be at least 1"));
    }
    if !(omega[0].norm() < 1.0 && omega[1].norm() < 1.0) {
        return Err(domain("test function centre must lie in the open bidisc"));
    }
    let (p1, p2) = (3.0 - 2.0 * a.a1(), 3.0 - 2.0 * a.a2());
    let c1 = (1.0 - omega[0].norm_sqr()).powf(p1 / 2.0);
    let c2 = (1.0 - omega[1].norm_sqr()).powf(p2 / 2.0);
    let f1 = kernel_antiderivative(omega[0], p1, order);
    let f2 = kernel_antiderivative(omega[1], p2, order);
    Ok(TaylorGrid2D::from_fn(order, order, |k, l| match (k, l) {
        (0, 0) => Complex64::new(0.0, 0.0),
        (k, 0) => f1[k] * c1,
        (0, l) => f2[l] * c2,
        (k, l) => f1[k] * f2[l] * (c1 * c2),
    }))
}
