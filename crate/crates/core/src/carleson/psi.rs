//! Admissibility of gauge functions: finiteness of
//! `\int_0^{2pi}\int_0^{2pi} psi(xy)/(xy) dx dy`.
//!
//! With `x = 2 pi e^{-u}`, `y = 2 pi e^{-v}` the integral becomes
//! `\int\int_{u,v>0} psi(4 pi^2 e^{-(u+v)}) du dv`. It is refined one octave
//! `[k ln 2, (k+1) ln 2]` at a time toward the axes.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::ksum;
use crate::quadrature::gauss_legendre_unit;
use crate::report::Verdict;

/// Gauge functions expressible in configs: `psi(t) = scale * t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PsiSpec {
    Power {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl PsiSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            PsiSpec::Power { exponent, scale } => scale * t.powf(exponent),
        }
    }
}

/// Thresholds of the octave refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsiConfig {
    pub max_octaves: usize,
    /// Converged once the last increment is at most this fraction of the total.
    pub rtol: f64,
    /// An increment larger than `growth` times the previous one counts as growing.
    pub growth: f64,
    /// Consecutive growing octaves that declare divergence.
    pub growth_run: usize,
    /// Gauss-Legendre points per direction in each octave cell.
    pub cell_order: usize,
}

impl Default for PsiConfig {
    fn default() -> Self {
        Self {
            max_octaves: 40,
            rtol: 1e-3,
            growth: 1.1,
            growth_run: 5,
            cell_order: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiReport {
    /// Finite evidence means admissible, growth means inadmissible.
    pub verdict: Verdict,
    /// Partial integral over the refined octaves.
    pub partial: f64,
    /// Partial integral plus a geometric tail extrapolation (admissible only).
    pub value: f64,
    pub octaves: usize,
    pub increments: Vec<f64>,
}

impl PsiReport {
    pub fn admissible(&self) -> Option<bool> {
        match self.verdict {
            Verdict::FiniteEvidence => Some(true),
            Verdict::GrowthDetected => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

/// Checks `psi >= 0`, finite and nondecreasing on a log grid of `(0, 4 pi^2]`.
fn spot_check<F: Fn(f64) -> f64>(psi: &F) -> Result<()> {
    let top = 4.0 * PI * PI;
    let mut prev: Option<(f64, f64)> = None;
    // from the smallest t upward, 2^{-80} 4 pi^2 .. 4 pi^2
    for k in (0..=320).rev() {
        let t = top * (-(k as f64) / 4.0).exp2();
        let v = psi(t);
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("psi({t:e}) = {v} must be finite and nonnegative")));
        }
        if let Some((tp, vp)) = prev {
            if v < vp - 1e-12 * vp.abs() {
                return Err(domain(format!("psi is not nondecreasing: psi({tp:e}) = {vp} > psi({t:e}) = {v}")));
            }
        }
        prev = Some((t, v));
    }
    Ok(())
}

pub fn psi_admissibility<F: Fn(f64) -> f64>(psi: F, cfg: PsiConfig) -> Result<PsiReport> {
    if cfg.max_octaves < 2 || cfg.cell_order == 0 || !(cfg.rtol > 0.0) || !(cfg.growth > 0.0) {
        return Err(domain("psi refinement needs at least 2 octaves, a positive tolerance and growth factor"));
    }
    spot_check(&psi)?;
    let (xs, ws) = gauss_legendre_unit(cfg.cell_order)?;
    let top = 4.0 * PI * PI;
    // the integrand depends on u + v only, so cell (i, j) depends on i + j
    let mut cells: Vec<f64> = Vec::new();
    let extend = |cells: &mut Vec<f64>, upto: usize| {
        while cells.len() <= upto {
            let shift = cells.len() as f64 * LN_2;
            let mut terms = Vec::with_capacity(xs.len() * xs.len());
            for (&x, &wx) in xs.iter().zip(&ws) {
                for (&y, &wy) in xs.iter().zip(&ws) {
                    let s = shift + (x + y) * LN_2;
                    terms.push(wx * wy * psi(top * (-s).exp()));
                }
            }
            cells.push(LN_2 * LN_2 * ksum(terms));
        }
    };
    let mut increments: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut growing = 0;
    for k in 1..=cfg.max_octaves {
        // the L-shaped layer max(i, j) = k - 1
        extend(&mut cells, 2 * k - 2);
        let d = ksum((0..k - 1).map(|i| 2.0 * cells[k - 1 + i]).chain(std::iter::once(cells[2 * k - 2])));
        total += d;
        if let Some(&prev) = increments.last() {
            if d > cfg.growth * prev {
                growing += 1;
            } else {
                growing = 0;
            }
        }
        increments.push(d);
        if growing >= cfg.growth_run {
            return Ok(PsiReport {
                verdict: Verdict::GrowthDetected,
                partial: total,
                value: f64::INFINITY,
                octaves: k,
                increments,
            });
        }
        let prev = if k >= 2 { increments[k - 2] } else { f64::INFINITY };
        if k >= 2 && d <= cfg.rtol * total && d < prev {
            let q = d / prev;
            let tail = if d == 0.0 { 0.0 } else { d * q / (1.0 - q) };
            return Ok(PsiReport {
                verdict: Verdict::FiniteEvidence,
                partial: total,
                value: total + tail,
                octaves: k,
                increments,
            });
        }
    }
    Ok(PsiReport {
        verdict: Verdict::Inconclusive,
        partial: total,
        value: total,
        octaves: cfg.max_octaves,
        increments,
    })
}
