//! Discretised Bessel capacities of rectangle unions on the torus `T^2` and
//! their comparison with pull-back volumes of matching Carleson boxes.

mod condition;
mod kernel;
mod solver;

pub use condition::{
    capacity_condition_check, capacity_vs_box_remark, matched_boxes, CapacityFamily, ConditionReport, FamilyResult,
    KernelComparison, VolumeSource,
};
pub use kernel::{cell_integral, KernelKind, KernelOperator};
pub use solver::{capacity, CapacityResult, SolverConfig};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `M x M` cells of side `2 pi / M` with centres in `[-pi, pi)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct TorusGrid {
    m: usize,
}

impl TryFrom<usize> for TorusGrid {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        TorusGrid::new(m)
    }
}

impl From<TorusGrid> for usize {
    fn from(g: TorusGrid) -> usize {
        g.m
    }
}

impl TorusGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 8 || !m.is_power_of_two() {
            return Err(domain(format!("torus grid size must be a power of two >= 8, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn side(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.side() * self.side()
    }

    pub fn centre(&self, i: usize) -> f64 {
        -PI + (i as f64 + 0.5) * self.side()
    }

    pub fn cells(&self) -> usize {
        self.m * self.m
    }
}

/// `[a1, b1] x [a2, b2]` in angle coordinates, taken modulo `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRect", into = "RawRect")]
pub struct Rect {
    a: [f64; 2],
    b: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRect {
    a: [f64; 2],
    b: [f64; 2],
}

impl TryFrom<RawRect> for Rect {
    type Error = Error;

    fn try_from(r: RawRect) -> Result<Self> {
        Rect::new(r.a, r.b)
    }
}

impl From<Rect> for RawRect {
    fn from(r: Rect) -> Self {
        RawRect { a: r.a, b: r.b }
    }
}

impl Rect {
    /// Each side length `b_i - a_i` must lie in `(0, 2 pi]`.
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        for i in 0..2 {
            let len = b[i] - a[i];
            if !(a[i].is_finite() && b[i].is_finite() && len > 0.0 && len <= 2.0 * PI + 1e-12) {
                return Err(domain(format!(
                    "rectangle side {} has length {len}, outside (0, 2 pi]",
                    i + 1
                )));
            }
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> [f64; 2] {
        self.a
    }

    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    pub fn sides(&self) -> [f64; 2] {
        [self.b[0] - self.a[0], self.b[1] - self.a[1]]
    }

    pub fn centre(&self) -> [f64; 2] {
        [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])]
    }

    /// Rotated copy.
    pub fn translated(&self, by: [f64; 2]) -> Self {
        Self {
            a: [self.a[0] + by[0], self.a[1] + by[1]],
            b: [self.b[0] + by[0], self.b[1] + by[1]],
        }
    }

    fn arc_contains(a: f64, len: f64, t: f64) -> bool {
        (t - a).rem_euclid(2.0 * PI) <= len + 1e-12
    }

    pub fn contains(&self, t: [f64; 2]) -> bool {
        let s = self.sides();
        Self::arc_contains(self.a[0], s[0], t[0]) && Self::arc_contains(self.a[1], s[1], t[1])
    }
}

/// Finite union of rectangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RectUnion(pub Vec<Rect>);

impl RectUnion {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Flattened indices `i1 * M + i2` of the cells whose centres lie in the union.
    pub fn cells(&self, grid: TorusGrid) -> Vec<usize> {
        let m = grid.m();
        (0..m * m)
            .filter(|&k| {
                let t = [grid.centre(k / m), grid.centre(k % m)];
                self.0.iter().any(|r| r.contains(t))
            })
            .collect()
    }

    pub fn union(&self, other: &RectUnion) -> RectUnion {
        RectUnion(self.0.iter().chain(&other.0).copied().collect())
    }
}
