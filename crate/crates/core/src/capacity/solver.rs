//! Discrete capacity `min area * |h|^2` subject to `h >= 0`, `(K h)_i >= 1` on E.
//!
//! The problem is solved through its dual `max sum(l) - l^T G l / (4 area)`,
//! `l >= 0`, with `G = (K K)_{EE}`. The dual optimum determines
//! `h = K l / (2 area) >= 0`, which is then scaled to exact feasibility, so
//! the returned value is always attained by a feasible point.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{KernelOperator, RectUnion};
use crate::error::{domain, Result};
use crate::numeric::ksum;
use crate::report::GridField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Stop when the relative primal-dual gap falls below this.
    pub gap_tol: f64,
    /// Stop when the best feasible value changed by less than this (relative)
    /// over `window` iterations.
    pub stall_tol: f64,
    pub window: usize,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            stall_tol: 1e-8,
            window: 50,
            max_iter: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// `area * sum h_j^2` of the feasible point `h`.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `max_E (1 - K h)^+`, zero up to round-off after scaling.
    pub max_violation: f64,
    /// `(value - dual) / value` at the returned point.
    pub relative_gap: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub cells_in_e: usize,
    #[serde(skip)]
    pub h: Vec<f64>,
}

impl CapacityResult {
    /// The optimiser on the grid, rows `theta1`, columns `theta2`.
    pub fn field(&self, op: &KernelOperator) -> GridField {
        let g = op.grid();
        let centres: Vec<f64> = (0..g.m()).map(|i| g.centre(i)).collect();
        GridField {
            row_label: "theta1".into(),
            col_label: "theta2".into(),
            rows: centres.clone(),
            cols: centres,
            values: self.h.clone(),
            flags: vec![false; self.h.len()],
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    ksum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// `G l` through `(A^2) L (A^2)` on the full grid.
struct Gram<'a> {
    b: DMatrix<f64>,
    m: usize,
    cells: &'a [usize],
}

impl Gram<'_> {
    fn apply(&self, l: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.m * self.m];
        for (&c, &v) in self.cells.iter().zip(l) {
            full[c] = v;
        }
        let x = DMatrix::from_column_slice(self.m, self.m, &full);
        let y = &self.b * x * &self.b;
        let s = y.as_slice();
        self.cells.iter().map(|&c| s[c]).collect()
    }

    /// Largest eigenvalue by power iteration from the positive vector.
    fn norm_estimate(&self) -> f64 {
        let mut v = vec![1.0; self.cells.len()];
        let mut lambda = 0.0;
        for _ in 0..50 {
            let w = self.apply(&v);
            let n = dot(&w, &w).sqrt();
            let next = dot(&v, &w) / dot(&v, &v);
            v = w.iter().map(|x| x / n).collect();
            if (next - lambda).abs() <= 1e-6 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda
    }
}

/// Capacity of `e` for the kernel of `op`.
pub fn capacity(op: &KernelOperator, e: &RectUnion, cfg: SolverConfig) -> Result<CapacityResult> {
    let grid = op.grid();
    let m = grid.m();
    let area = grid.cell_area();
    if e.is_empty() {
        return Ok(CapacityResult {
            value: 0.0,
            converged: true,
            iterations: 0,
            max_violation: 0.0,
            relative_gap: 0.0,
            m,
            cells_in_e: 0,
            h: vec![0.0; m * m],
        });
    }
    let cells = e.cells(grid);
    if cells.is_empty() {
        return Err(domain(format!(
            "the rectangle union covers no cell centre of the {m} x {m} grid"
        )));
    }
    let gram = Gram {
        b: op.squared(),
        m,
        cells: &cells,
    };
    // Lipschitz constant of the dual gradient G l / (2 area)
    let lip = 1.05 * gram.norm_estimate() / (2.0 * area);
    let n = cells.len();
    let objective = |l: &[f64], gl: &[f64]| dot(l, gl) / (4.0 * area) - ksum(l.iter().copied());
    // primal value of the scaled point and the dual value at l
    let evaluate = |l: &[f64], gl: &[f64]| -> (f64, f64) {
        let quad = dot(l, gl) / (4.0 * area);
        let dual = ksum(l.iter().copied()) - quad;
        let s = gl.iter().fold(f64::INFINITY, |acc, &v| acc.min(v)) / (2.0 * area);
        let primal = if s > 0.0 { quad / (s * s) } else { f64::INFINITY };
        (primal, dual)
    };
    let mut l = vec![1.0 / lip; n];
    let mut gl = gram.apply(&l);
    let mut l_prev = l.clone();
    let mut gl_prev = gl.clone();
    let mut t = 1.0f64;
    let mut f_prev = objective(&l, &gl);
    let mut best = (f64::INFINITY, l.clone());
    let mut best_dual = f64::NEG_INFINITY;
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        iterations = it;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = (t - 1.0) / t_next;
        // extrapolated point and its image, by linearity of G
        let y: Vec<f64> = l.iter().zip(&l_prev).map(|(a, b)| a + mom * (a - b)).collect();
        let gy: Vec<f64> = gl.iter().zip(&gl_prev).map(|(a, b)| a + mom * (a - b)).collect();
        let next: Vec<f64> = y
            .iter()
            .zip(&gy)
            .map(|(&yi, &gi)| (yi - (gi / (2.0 * area) - 1.0) / lip).max(0.0))
            .collect();
        let g_next = gram.apply(&next);
        let f_next = objective(&next, &g_next);
        l_prev = std::mem::replace(&mut l, next);
        gl_prev = std::mem::replace(&mut gl, g_next);
        // adaptive restart when the dual objective goes up
        if f_next > f_prev {
            t = 1.0;
            l_prev.clone_from(&l);
            gl_prev.clone_from(&gl);
        } else {
            t = t_next;
        }
        f_prev = f_next;
        let (primal, dual) = evaluate(&l, &gl);
        if primal < best.0 {
            best = (primal, l.clone());
        }
        best_dual = best_dual.max(dual);
        let gap = (best.0 - best_dual) / best.0;
        if gap <= cfg.gap_tol {
            converged = true;
            break;
        }
        history.push(best.0);
        if history.len() > cfg.window {
            let old = history[history.len() - 1 - cfg.window];
            if (old - best.0).abs() <= cfg.stall_tol * best.0 {
                converged = true;
                break;
            }
        }
    }
    let (value, lam) = best;
    // recover h = K l / (2 area) and scale to feasibility with an independent check
    let mut full = vec![0.0; m * m];
    for (&c, &v) in cells.iter().zip(&lam) {
        full[c] = v / (2.0 * area);
    }
    let mut h = op.apply(&full);
    let kh = op.apply(&h);
    let s = cells.iter().map(|&c| kh[c]).fold(f64::INFINITY, f64::min);
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain("capacity solver produced no feasible point"));
    }
    for v in h.iter_mut() {
        *v /= s;
    }
    let kh = op.apply(&h);
    let max_violation = cells.iter().map(|&c| (1.0 - kh[c]).max(0.0)).fold(0.0, f64::max);
    let direct = area * dot(&h, &h);
    debug_assert!((direct - value).abs() <= 1e-8 * value.max(1e-300));
    Ok(CapacityResult {
        value: direct,
        converged,
        iterations,
        max_violation,
        relative_gap: (direct - best_dual) / direct,
        m,
        cells_in_e: cells.len(),
        h,
    })
}
