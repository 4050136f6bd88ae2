//! Kernel-integral test `sup_w \int kappa_w d(mu)` with the logarithmic
//! product majorant of the real part of the reproducing kernel.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::KahanSum;
use crate::quadrature::SampleCloud;
use crate::report::GridField;

/// Name carried by every report: the integrand is the majorant, not `Re K`.
pub const SURROGATE_LABEL: &str = "surrogate kappa_w(z) = (C1 + log 2/|1 - conj(w1) z1|)(C2 + log 2/|1 - conj(w2) z2|)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidiscKernel {
    pub c1: f64,
    pub c2: f64,
}

impl Default for BidiscKernel {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0 }
    }
}

impl BidiscKernel {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        let k = Self { c1, c2 };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1.is_finite() && self.c1 > 0.0 && self.c2.is_finite() && self.c2 > 0.0) {
            return Err(domain(format!("kernel constants must be positive, got ({}, {})", self.c1, self.c2)));
        }
        Ok(())
    }

    pub fn eval(&self, w: [Complex64; 2], z: [Complex64; 2]) -> f64 {
        factor(self.c1, w[0], z[0]) * factor(self.c2, w[1], z[1])
    }
}

fn factor(c: f64, w: Complex64, z: Complex64) -> f64 {
    c + LN_2 - (1.0 - w.conj() * z).norm().ln()
}

/// Polar probe points `r e^{i theta}` in each coordinate; the origin is
/// included once when a radius is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self {
            radii: vec![0.0, 0.5, 0.75, 0.875, 0.9375],
            angles: 4,
        }
    }
}

impl ProbeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.angles == 0 {
            return Err(domain("probe grid needs at least one radius and one angle"));
        }
        if self.radii.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(domain("probe radii must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for &r in &self.radii {
            if r == 0.0 {
                out.push(Complex64::new(0.0, 0.0));
            } else {
                out.extend((0..self.angles).map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / self.angles as f64)));
            }
        }
        out
    }

    /// Twice the angles and the radial midpoints, including one step further
    /// toward the boundary.
    pub fn refined(&self) -> Self {
        let mut radii = self.radii.clone();
        radii.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(2 * radii.len() + 1);
        for w in radii.windows(2) {
            out.push(w[0]);
            out.push(0.5 * (w[0] + w[1]));
        }
        let last = *radii.last().expect("validated grid");
        out.push(last);
        out.push(0.5 * (last + 1.0));
        Self {
            radii: out,
            angles: 2 * self.angles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelIntegralReport {
    pub label: String,
    pub kernel: BidiscKernel,
    pub sup: f64,
    pub argmax: [Complex64; 2],
    pub probes: usize,
    pub samples: usize,
    /// Maximum over angles of the integral, indexed by the probe radii.
    pub field: GridField,
}

/// `max_w sum_j weight_j kappa_w(z_j)` over the tensor probe grid.
pub fn kernel_integral_test(cloud: &SampleCloud, kernel: BidiscKernel, probes: &ProbeGrid) -> Result<KernelIntegralReport> {
    kernel.validate()?;
    probes.validate()?;
    let pts = probes.points();
    let p = pts.len();
    // the kernel is a product, so per-batch sums reduce to p x p matrix products
    let partial: Vec<Vec<f64>> = cloud
        .batches
        .par_iter()
        .map(|&(lo, hi)| {
            let n = hi - lo;
            let mut a = vec![0.0; p * n];
            let mut b = vec![0.0; p * n];
            for (i, w) in pts.iter().enumerate() {
                for j in 0..n {
                    let z = cloud.points[lo + j];
                    a[i * n + j] = factor(kernel.c1, *w, z[0]) * cloud.weights[lo + j];
                    b[i * n + j] = factor(kernel.c2, *w, z[1]);
                }
            }
            let mut out = vec![0.0; p * p];
            for i in 0..p {
                for k in 0..p {
                    let mut s = KahanSum::new();
                    for j in 0..n {
                        s.add(a[i * n + j] * b[k * n + j]);
                    }
                    out[i * p + k] = s.value();
                }
            }
            out
        })
        .collect();
    let mut totals = vec![KahanSum::new(); p * p];
    for part in &partial {
        for (t, v) in totals.iter_mut().zip(part) {
            t.add(*v);
        }
    }
    let values: Vec<f64> = totals.iter().map(|t| t.value()).collect();
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            arg = i;
        }
    }
    let mut radii = probes.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let radius_index = |w: Complex64| radii.iter().position(|r| (w.norm() - r).abs() < 1e-12).unwrap_or(0);
    let nr = radii.len();
    let mut field = vec![f64::NEG_INFINITY; nr * nr];
    for i in 0..p {
        for k in 0..p {
            let cell = radius_index(pts[i]) * nr + radius_index(pts[k]);
            field[cell] = field[cell].max(values[i * p + k]);
        }
    }
    Ok(KernelIntegralReport {
        label: SURROGATE_LABEL.to_string(),
        kernel,
        sup: best,
        argmax: [pts[arg / p], pts[arg % p]],
        probes: p * p,
        samples: cloud.len(),
        field: GridField {
            row_label: "|w1|".into(),
            col_label: "|w2|".into(),
            rows: radii.clone(),
            cols: radii,
            flags: vec![false; nr * nr],
            values: field,
        },
    })
}
