//! The kernel-ratio condition `sup |k^phi(z1,z2)| / |phi'(z1) phi'(z2)|^{1/(beta+2)}`,
//! a necessary condition for boundedness on `D_a` with `a = 2 sigma - 2 beta`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::report::{mid_level_verdict, GridField, Verdict};
use crate::symbols::DiscSymbol;

/// `k^phi(z1, z2) = (1 - phi(z1) conj(phi(z2))) / (1 - z1 conj(z2))`, with the
/// diagonal limit `(1 - |phi(z)|^2) / (1 - |z|^2)` taken in closed form.
pub fn kernel_phi(phi: &DiscSymbol, z1: Complex64, z2: Complex64) -> Complex64 {
    let (p1, p2) = (phi.eval_unchecked(z1), phi.eval_unchecked(z2));
    if z1 == z2 {
        return Complex64::new((1.0 - p1.norm_sqr()) / (1.0 - z1.norm_sqr()), 0.0);
    }
    (1.0 - p1 * p2.conj()) / (1.0 - z1 * z2.conj())
}

/// Query for the kernel-ratio sup. `sigma`, when given, ties the exponents
/// through `a = 2 sigma - 2 beta` and must satisfy `sigma - 1 < beta <= sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelRatioQuery {
    pub beta: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub grid: KernelGrid,
}

fn default_epsilon() -> f64 {
    1e-6
}

impl KernelRatioQuery {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            sigma: None,
            epsilon: default_epsilon(),
            grid: KernelGrid::default(),
        }
    }

    /// `a = 2 sigma - 2 beta` when `sigma` is set.
    pub fn derived_a(&self) -> Option<f64> {
        self.sigma.map(|s| 2.0 * s - 2.0 * self.beta)
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > -2.0 && self.beta.is_finite()) {
            return Err(domain(format!("beta = {} must exceed -2", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(domain("critical-point cutoff must be positive"));
        }
        if let Some(s) = self.sigma {
            if !(s - 1.0 < self.beta && self.beta <= s) {
                return Err(domain(format!(
                    "beta = {} outside the window sigma - 1 < beta <= sigma for sigma = {s}",
                    self.beta
                )));
            }
        }
        self.grid.validate()
    }
}

/// Polar grid used for both `z1` and `z2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for KernelGrid {
    /// The origin, `0.25`, and `1 - 2^{-j}` for `j = 1..=12`, on 32 angles.
    fn default() -> Self {
        let mut radii = vec![0.0, 0.25];
        radii.extend((1..=12).map(|j| 1.0 - 0.5f64.powi(j)));
        Self { radii, angles: 32 }
    }
}

impl KernelGrid {
    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.angles == 0 {
            return Err(domain("kernel grid is empty"));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(domain(format!("kernel grid radius {r} is outside [0, 1)")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.radii
            .iter()
            .flat_map(|&r| (0..self.angles).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / self.angles as f64)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRatioReport {
    pub beta: f64,
    pub a: Option<f64>,
    pub sup: f64,
    pub argmax: Option<[[f64; 2]; 2]>,
    /// Grid points with `|phi'| < epsilon`; every pair touching one is excluded.
    pub critical_points: Vec<[f64; 2]>,
    pub pairs: usize,
    pub excluded_pairs: usize,
    /// Over the `z1` grid, the largest ratio across `z2`.
    pub field: GridField,
    pub label: &'static str,
}

impl KernelRatioReport {
    /// Largest unflagged ratio per `z1` radius; radii whose points are all
    /// critical are skipped.
    pub fn profile(&self) -> Vec<f64> {
        let f = &self.field;
        (0..f.rows.len())
            .filter_map(|i| {
                (0..f.cols.len())
                    .filter(|&k| !f.flagged(i, k))
                    .map(|k| f.value(i, k))
                    .reduce(f64::max)
            })
            .collect()
    }

    /// Bounded-profile rule on [`Self::profile`] toward the boundary.
    pub fn verdict(&self) -> Verdict {
        mid_level_verdict(&self.profile())
    }
}

pub fn kernel_ratio_sup(phi: &DiscSymbol, q: &KernelRatioQuery) -> Result<KernelRatioReport> {
    q.validate()?;
    let pts = q.grid.points();
    let p = 1.0 / (q.beta + 2.0);
    let deriv: Vec<f64> = pts.iter().map(|&z| phi.derivative_unchecked(z).norm()).collect();
    let critical: Vec<bool> = deriv.iter().map(|&d| d < q.epsilon).collect();
    let rows: Vec<(f64, usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, &z1)| {
            if critical[i] {
                return (f64::NAN, usize::MAX);
            }
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (j, &z2) in pts.iter().enumerate() {
                if critical[j] {
                    continue;
                }
                let v = kernel_phi(phi, z1, z2).norm() / (deriv[i] * deriv[j]).powf(p);
                if v > best.0 {
                    best = (v, j);
                }
            }
            best
        })
        .collect();
    let n_crit = critical.iter().filter(|c| **c).count();
    let n = pts.len();
    let excluded_pairs = n * n - (n - n_crit) * (n - n_crit);
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = None;
    for (i, &(v, j)) in rows.iter().enumerate() {
        if j != usize::MAX && v > sup {
            sup = v;
            argmax = Some([[pts[i].re, pts[i].im], [pts[j].re, pts[j].im]]);
        }
    }
    let field = GridField {
        row_label: "r".into(),
        col_label: "theta".into(),
        rows: q.grid.radii.clone(),
        cols: (0..q.grid.angles).map(|k| 2.0 * PI * k as f64 / q.grid.angles as f64).collect(),
        values: rows.iter().map(|r| r.0).collect(),
        flags: critical.clone(),
    };
    Ok(KernelRatioReport {
        beta: q.beta,
        a: q.derived_a(),
        sup: if argmax.is_some() { sup } else { f64::NAN },
        argmax,
        critical_points: pts
            .iter()
            .zip(&critical)
            .filter(|(_, c)| **c)
            .map(|(z, _)| [z.re, z.im])
            .collect(),
        pairs: n * n,
        excluded_pairs,
        field,
        label: "necessary-condition diagnostic",
    })
}

/// `(grid sup)^{beta+2}`: the shape of the operator-norm bound, up to an
/// unknown constant.
pub fn operator_norm_bound(phi: &DiscSymbol, q: &KernelRatioQuery) -> Result<f64> {
    let r = kernel_ratio_sup(phi, q)?;
    bound_from_report(&r)
}

pub fn bound_from_report(r: &KernelRatioReport) -> Result<f64> {
    if r.argmax.is_none() {
        return Err(Error::UndefinedBound("every grid point is critical".into()));
    }
    if !r.sup.is_finite() {
        return Err(Error::UndefinedBound(format!("kernel ratio sup is {}", r.sup)));
    }
    Ok(r.sup.powf(r.beta + 2.0))
}

/// Closed form of the ratio for `phi_alpha`:
/// `(1-|alpha|^2)^{1-2p} |1 - conj(alpha) z1|^{2p-1} |1 - conj(alpha) z2|^{2p-1}`,
/// `p = 1/(beta+2)`.
pub fn moebius_ratio(alpha: Complex64, beta: f64, z1: Complex64, z2: Complex64) -> f64 {
    let p = 1.0 / (beta + 2.0);
    let e = 2.0 * p - 1.0;
    (1.0 - alpha.norm_sqr()).powf(1.0 - 2.0 * p)
        * (1.0 - alpha.conj() * z1).norm().powf(e)
        * (1.0 - alpha.conj() * z2).norm().powf(e)
}
