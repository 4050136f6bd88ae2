//! Carleson boxes on the bidisc, pull-back measures and the box conditions
//! for boundedness into weighted Bergman spaces.

mod kernel;
mod psi;
mod pullback;
mod sweep;

pub use kernel::{kernel_integral_test, BidiscKernel, KernelIntegralReport, ProbeGrid, SURROGATE_LABEL};
pub use psi::{psi_admissibility, PsiConfig, PsiReport, PsiSpec};
pub use pullback::{pullback_box_volume, union_volume, PullbackMeasure, PullbackVolume, MIN_RESOLVED_SAMPLES};
pub use sweep::{one_box_sufficient_check, BoxMeasure, LevelSummary, OneBoxConfig, OneBoxReport, SweepRow};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::BergmanWeight;
use crate::error::{domain, Error, Result};
use crate::numeric::ksum;
use crate::quadrature::{gauss_jacobi_unit, McEstimate, SampleCloud};

/// Radial Gauss-Jacobi order of the one-variable box-mass rule.
pub const BOX_ORDER: usize = 64;

/// `{z in D^2 : |z_i - e^{i zeta_i}| < delta_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox", into = "RawBox")]
pub struct CarlesonBox {
    zeta: [f64; 2],
    delta: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    zeta: [f64; 2],
    delta: [f64; 2],
}

impl TryFrom<RawBox> for CarlesonBox {
    type Error = Error;

    fn try_from(r: RawBox) -> Result<Self> {
        CarlesonBox::new(r.zeta, r.delta)
    }
}

impl From<CarlesonBox> for RawBox {
    fn from(b: CarlesonBox) -> Self {
        RawBox {
            zeta: b.zeta,
            delta: b.delta,
        }
    }
}

impl CarlesonBox {
    pub fn new(zeta: [f64; 2], delta: [f64; 2]) -> Result<Self> {
        if !zeta.iter().all(|t| t.is_finite()) {
            return Err(domain(format!("box centre angles must be finite, got {zeta:?}")));
        }
        if !delta.iter().all(|d| d.is_finite() && *d > 0.0) {
            return Err(domain(format!("box radii must be positive, got {delta:?}")));
        }
        Ok(Self { zeta, delta })
    }

    pub fn zeta(&self) -> [f64; 2] {
        self.zeta
    }

    pub fn delta(&self) -> [f64; 2] {
        self.delta
    }

    /// Unimodular centres `e^{i zeta_i}`.
    pub fn centres(&self) -> [Complex64; 2] {
        [Complex64::from_polar(1.0, self.zeta[0]), Complex64::from_polar(1.0, self.zeta[1])]
    }

    pub fn contains(&self, z: &[Complex64; 2]) -> bool {
        let c = self.centres();
        (z[0] - c[0]).norm() < self.delta[0] && (z[1] - c[1]).norm() < self.delta[1]
    }

    /// `|I x J|` with arc lengths `|I| = 2 delta`, capped at the full circle.
    pub fn arc_area(&self) -> f64 {
        (2.0 * self.delta[0]).min(2.0 * PI) * (2.0 * self.delta[1]).min(2.0 * PI)
    }

    /// True when each radius covers the whole closed disc.
    pub fn covers_bidisc(&self) -> bool {
        self.delta.iter().all(|&d| d >= 2.0)
    }
}

/// Finite union of boxes; overlaps are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxUnion(pub Vec<CarlesonBox>);

impl BoxUnion {
    pub fn contains(&self, z: &[Complex64; 2]) -> bool {
        self.0.iter().any(|b| b.contains(z))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `\int_{D cap D(zeta, delta)} (1-|z|^2)^beta dA`, independent of `zeta`.
///
/// In `s = |z|^2` the angular fraction inside the disc of radius `delta` is
/// `arccos((1 + s - delta^2) / (2 sqrt s)) / pi`. It vanishes (or is one) below
/// `s0 = (1 - delta)^2` and has a square-root onset there, which the
/// substitution `s = s0 + (1 - s0) v^2` turns into a smooth integrand.
pub fn disc_cap_mass(delta: f64, beta: f64, order: usize) -> Result<f64> {
    let total = 1.0 / (beta + 1.0);
    if delta >= 2.0 {
        return Ok(total);
    }
    let s0 = (1.0 - delta).powi(2);
    // region |z| < delta - 1 lies inside the box when delta > 1
    let inner = if delta > 1.0 {
        (1.0 - (1.0 - s0).powf(beta + 1.0)) / (beta + 1.0)
    } else {
        0.0
    };
    let (vs, ws) = gauss_jacobi_unit(order, beta)?;
    let scale = (1.0 - s0).powf(beta + 1.0);
    let terms = vs.iter().zip(&ws).map(|(&v, &w)| {
        let s = s0 + (1.0 - s0) * v * v;
        let r = s.sqrt();
        let x = if r == 0.0 {
            // only reachable for delta = 1, where the limit is 1/2
            0.0
        } else {
            ((1.0 + s - delta * delta) / (2.0 * r)).clamp(-1.0, 1.0)
        };
        w * 2.0 * v * (1.0 + v).powf(beta) * x.acos() / PI
    });
    Ok(inner + scale * ksum(terms))
}

/// `V_beta` of a box, with an optional Monte Carlo cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxVolume {
    pub value: f64,
    /// Change under doubling of the radial order.
    pub error_estimate: f64,
    pub monte_carlo: Option<McEstimate>,
}

/// Quadrature volume `V_beta(S)`; when `cloud` (a `V_beta` sample) is given the
/// two estimates must agree within four standard errors.
pub fn box_volume(b: &CarlesonBox, beta: BergmanWeight, cloud: Option<&SampleCloud>) -> Result<BoxVolume> {
    let one = |order| -> Result<f64> {
        Ok(disc_cap_mass(b.delta[0], beta.beta(), order)? * disc_cap_mass(b.delta[1], beta.beta(), order)?)
    };
    let value = one(BOX_ORDER)?;
    let error_estimate = (one(2 * BOX_ORDER)? - value).abs();
    let monte_carlo = match cloud {
        None => None,
        Some(c) => {
            let mc = c.estimate(|z| f64::from(u8::from(b.contains(z))));
            if (mc.value - value).abs() > 4.0 * mc.stderr + 1e-12 {
                return Err(Error::Consistency(format!(
                    "box volume: quadrature {value:e} vs Monte Carlo {:e} +- {:e}",
                    mc.value, mc.stderr
                )));
            }
            Some(mc)
        }
    };
    Ok(BoxVolume {
        value,
        error_estimate,
        monte_carlo,
    })
}
