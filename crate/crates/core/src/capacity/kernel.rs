//! Cell-averaged product kernels on the torus, applied as `A X A` with a
//! circulant one-dimensional factor `A`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::TorusGrid;
use crate::error::{domain, Result};

/// One-dimensional factor of the product kernel in the geodesic distance `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelKind {
    /// `|t|^{-1/2}`.
    Bessel,
    /// `c + log(2/|t|)`.
    Log { c: f64 },
}

impl KernelKind {
    pub fn validate(&self) -> Result<()> {
        if let KernelKind::Log { c } = *self {
            // positivity on the whole circle needs c + log(2/pi) > 0
            if !(c.is_finite() && c + (2.0 / PI).ln() > 0.0) {
                return Err(domain(format!("log kernel constant {c} must exceed log(pi/2)")));
            }
        }
        Ok(())
    }

    /// Antiderivative on `t >= 0`, vanishing at 0.
    fn primitive(&self, t: f64) -> f64 {
        match *self {
            KernelKind::Bessel => 2.0 * t.sqrt(),
            KernelKind::Log { c } => {
                if t == 0.0 {
                    0.0
                } else {
                    t * (c + 2.0f64.ln() + 1.0 - t.ln())
                }
            }
        }
    }

    /// `\int_lo^hi k(|t|) dt` for `0 <= lo <= hi`.
    fn radial(&self, lo: f64, hi: f64) -> f64 {
        self.primitive(hi) - self.primitive(lo)
    }
}

/// `\int_a^b k(d(t)) dt` with `d` the geodesic distance to 0 on the circle,
/// for `-2 pi <= a < b <= 2 pi`, `b - a <= 2 pi`.
pub fn cell_integral(kind: KernelKind, a: f64, b: f64) -> f64 {
    // split at the points where |t| or the wrap changes form
    let mut cuts = vec![a, b];
    for p in [-PI, 0.0, PI] {
        if a < p && p < b {
            cuts.push(p);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let dist = |t: f64| {
        let u = t.abs();
        if u > PI {
            2.0 * PI - u
        } else {
            u
        }
    };
    cuts.windows(2)
        .map(|w| {
            let (x, y) = (dist(w[0]), dist(w[1]));
            kind.radial(x.min(y), x.max(y))
        })
        .sum()
}

/// The operator `(K h)_i = sum_j h_j \int_{cell j} k(theta_i, eta) d eta`.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    grid: TorusGrid,
    kind: KernelKind,
    /// First row of the circulant one-dimensional factor.
    row: Vec<f64>,
    a: DMatrix<f64>,
}

impl KernelOperator {
    pub fn new(grid: TorusGrid, kind: KernelKind) -> Result<Self> {
        kind.validate()?;
        let m = grid.m();
        let h = grid.side();
        let row: Vec<f64> = (0..m)
            .map(|k| {
                let s = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
                cell_integral(kind, (s - 0.5) * h, (s + 0.5) * h)
            })
            .collect();
        let a = DMatrix::from_fn(m, m, |i, j| row[(j + m - i) % m]);
        Ok(Self { grid, kind, row, a })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// First row of the one-dimensional factor; it sums to the kernel's
    /// integral over the circle.
    pub fn row(&self) -> &[f64] {
        &self.row
    }

    /// Entry `(i, j)` of the two-dimensional operator on flattened indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let m = self.grid.m();
        self.a[(i / m, j / m)] * self.a[(i % m, j % m)]
    }

    /// `K h` for `h` indexed `i1 * M + i2`.
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let m = self.grid.m();
        // row-major h is the transpose of the column-major matrix
        let x = DMatrix::from_column_slice(m, m, h);
        let y = &self.a * x * &self.a;
        y.as_slice().to_vec()
    }

    /// `K^2` applied twice in one pass, `(A^2) X (A^2)`.
    pub(crate) fn squared(&self) -> DMatrix<f64> {
        &self.a * &self.a
    }
}
