//! Truncated power series of symbols and of compositions `f o Phi`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{TaylorGrid1D, TaylorGrid2D};
use crate::symbols::{DiscSymbol, SymbolSpec};

/// Default combined truncation order of compositions.
pub const COMPOSITION_ORDER: usize = 48;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Taylor coefficients of `phi` up to `z^order`.
pub fn symbol_series(phi: &DiscSymbol, order: usize) -> TaylorGrid1D {
    match phi.spec() {
        SymbolSpec::Polynomial { coeffs } => {
            TaylorGrid1D::new(coeffs.iter().take(order + 1).copied().collect())
        }
        SymbolSpec::Moebius { alpha } => moebius_series(*alpha, order),
        SymbolSpec::FiniteBlaschke { zeros, factor } => {
            let mut acc = TaylorGrid1D::new(vec![*factor]);
            for &a in zeros {
                // (z - a) / (1 - conj(a) z) = -phi_a(z)
                let f = moebius_series(a, order);
                let neg = TaylorGrid1D::new(f.coeffs.iter().map(|c| -c).collect());
                acc = acc.mul_truncated(&neg, order);
            }
            acc
        }
    }
}

fn moebius_series(alpha: Complex64, order: usize) -> TaylorGrid1D {
    // (alpha - z) sum (conj(alpha) z)^n
    let ab = alpha.conj();
    let mut geo = vec![ZERO; order + 1];
    let mut p = Complex64::new(1.0, 0.0);
    for g in geo.iter_mut() {
        *g = p;
        p *= ab;
    }
    let mut out = vec![ZERO; order + 1];
    for n in 0..=order {
        out[n] = alpha * geo[n] - if n > 0 { geo[n - 1] } else { ZERO };
    }
    TaylorGrid1D::new(out)
}

/// `f(phi1(z1), phi2(z2))` truncated to degree `order` in each variable,
/// with a geometric estimate of the discarded coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct Composition {
    pub series: TaylorGrid2D,
    pub order: usize,
    /// Estimated squared size of the discarded tail, weighted like the
    /// Dirichlet norm with exponent 1/2 in each variable.
    pub tail_estimate: f64,
}

pub fn compose_separated(f: &TaylorGrid2D, phi1: &DiscSymbol, phi2: &DiscSymbol, order: usize) -> Composition {
    let powers = |phi: &DiscSymbol, count: usize| {
        let s = symbol_series(phi, order);
        let mut out = vec![TaylorGrid1D::new(vec![Complex64::new(1.0, 0.0)])];
        for _ in 0..count {
            let next = out.last().unwrap().mul_truncated(&s, order);
            out.push(next);
        }
        out
    };
    let p1 = powers(phi1, f.k_max());
    let p2 = powers(phi2, f.l_max());
    let mut h = TaylorGrid2D::zeros(order, order);
    for (k, l, a) in f.iter() {
        if a == ZERO {
            continue;
        }
        for (m, &u) in p1[k].coeffs.iter().enumerate() {
            if u == ZERO {
                continue;
            }
            for (n, &v) in p2[l].coeffs.iter().enumerate() {
                h.set(m, n, h.get(m, n) + a * u * v);
            }
        }
    }
    let tail_estimate = geometric_tail(&h);
    Composition {
        series: h,
        order,
        tail_estimate,
    }
}

/// Extrapolates the decay of row and column maxima from two blocks of eight
/// orders. Returns infinity when the coefficients do not decay.
fn geometric_tail(h: &TaylorGrid2D) -> f64 {
    let n = h.k_max();
    let row: Vec<f64> = (0..=n)
        .map(|k| (0..=n).map(|l| h.get(k, l).norm()).fold(0.0, f64::max))
        .collect();
    let col: Vec<f64> = (0..=n)
        .map(|l| (0..=n).map(|k| h.get(k, l).norm()).fold(0.0, f64::max))
        .collect();
    let tail = |t: &[f64]| -> f64 {
        let last = *t.last().unwrap();
        let peak = t.iter().copied().fold(0.0, f64::max);
        if last == 0.0 {
            return 0.0;
        }
        if last <= 1e-14 * peak {
            // already at round-off; ratios there are noise
            return (last * (n + 2) as f64).powi(2);
        }
        // block maxima absorb oscillation from complex-conjugate decay modes
        const B: usize = 8;
        if t.len() < 2 * B {
            return f64::INFINITY;
        }
        let block = |r: std::ops::Range<usize>| t[r].iter().copied().fold(0.0, f64::max);
        let (early, late) = (block(t.len() - 2 * B..t.len() - B), block(t.len() - B..t.len()));
        let rho = (late / early).powf(1.0 / B as f64);
        if !(rho < 1.0) {
            return f64::INFINITY;
        }
        let b = late * rho / (1.0 - rho);
        b * b * ((n + 2) as f64) * ((n + 2) as f64)
    };
    tail(&row) + tail(&col)
}
