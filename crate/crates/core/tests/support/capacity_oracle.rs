//! Brute-force capacity oracle shared by the core tests and the acceptance run.

use std::f64::consts::PI;

use holocomp_core::capacity::{Rect, RectUnion};
use nalgebra::{DMatrix, DVector};

/// Dense `M^2 x M^2` kernel matrix from the closed-form 1-D cell integrals,
/// assembled without the operator's circulant shortcut.
pub fn dense_kernel(m: usize) -> DMatrix<f64> {
    let h = 2.0 * PI / m as f64;
    let g = |t: f64| 2.0 * t.sqrt();
    let one_d = |i: usize, j: usize| {
        // signed offset of cell j from cell i, folded onto [-pi, pi]
        let mut d = (j as f64 - i as f64) * h;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        let (lo, hi) = (d - 0.5 * h, d + 0.5 * h);
        if lo >= 0.0 {
            if hi <= PI {
                g(hi) - g(lo)
            } else {
                (g(PI) - g(lo)) + (g(PI) - g(2.0 * PI - hi))
            }
        } else if hi <= 0.0 {
            if lo >= -PI {
                g(-lo) - g(-hi)
            } else {
                (g(PI) - g(-hi)) + (g(PI) - g(2.0 * PI + lo))
            }
        } else {
            g(-lo) + g(hi)
        }
    };
    let a = DMatrix::from_fn(m, m, one_d);
    a.kronecker(&a)
}

/// Exact discrete capacity by enumerating active sets of the dual
/// `max sum(l) - l^T G l / (4 area)`, `l >= 0`.
pub fn brute_force(m: usize, cells: &[usize]) -> f64 {
    let area = (2.0 * PI / m as f64).powi(2);
    let k = dense_kernel(m);
    let ke = DMatrix::from_fn(cells.len(), m * m, |i, j| k[(cells[i], j)]);
    let gram = &ke * ke.transpose();
    let n = cells.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let gs = DMatrix::from_fn(s.len(), s.len(), |i, j| gram[(s[i], s[j])]);
        let Some(ls) = gs.lu().solve(&DVector::from_element(s.len(), 2.0 * area)) else {
            continue;
        };
        if ls.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut l = DVector::zeros(n);
        for (i, &si) in s.iter().enumerate() {
            l[si] = ls[i];
        }
        let gl = &gram * &l;
        // KKT: inactive constraints satisfied
        if (0..n).any(|i| mask & (1 << i) == 0 && gl[i] / (2.0 * area) < 1.0 - 1e-12) {
            continue;
        }
        let dual = l.sum() - l.dot(&gl) / (4.0 * area);
        best = best.max(dual);
    }
    best
}

pub fn cell_rects(m: usize, cells: &[(usize, usize)]) -> RectUnion {
    let h = 2.0 * PI / m as f64;
    RectUnion(
        cells
            .iter()
            .map(|&(i, j)| {
                let a = [-PI + (i as f64 + 0.25) * h, -PI + (j as f64 + 0.25) * h];
                Rect::new(a, [a[0] + 0.5 * h, a[1] + 0.5 * h]).unwrap()
            })
            .collect(),
    )
}
