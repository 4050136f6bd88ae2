//! The generalized Nevanlinna counting function
//! `N_{phi,a}(z) = sum_{phi(w) = z} (log 1/|w|)^{1-2a}` and the sup-ratio
//! boundedness evidence for separated symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_dirichlet_exponent, WeightPair};
use crate::error::{domain, Error, Result};
use crate::numeric::{ksum, log_inv, pow_or_one};
use crate::quadrature::{disc_average, Resolution};
use crate::report::{mid_level_verdict, GridField, Verdict};
use crate::symbols::{BidiscSymbol, DiscSymbol};

/// Points closer than this to `phi(0)` are flagged.
pub const ORIGIN_IMAGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagReason {
    /// `z = phi(0)`: a preimage sits at the origin, where `log 1/|w|` is infinite.
    OriginImage,
    /// A preimage has multiplicity above one.
    CriticalValue,
    /// A preimage lies within the boundary tolerance of the unit circle.
    BoundaryAmbiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingValue {
    pub value: f64,
    pub preimages: usize,
    pub flag: Option<FlagReason>,
}

/// `N_{phi,a}(z)`; zero when `z` has no preimage.
pub fn counting_function(phi: &DiscSymbol, a: f64, z: Complex64) -> Result<f64> {
    Ok(counting_function_detail(phi, a, z)?.value)
}

/// `N_{phi,a}(z)` together with the number of preimages (with multiplicity)
/// and a flag when `z` is a critical value or `phi(0)`.
pub fn counting_function_detail(phi: &DiscSymbol, a: f64, z: Complex64) -> Result<CountingValue> {
    let a = check_dirichlet_exponent(a)?;
    let e = 1.0 - 2.0 * a;
    let pre = phi.preimages(z)?;
    let value = ksum(
        pre.iter()
            .map(|p| p.multiplicity as f64 * pow_or_one(log_inv(p.z.norm()), e)),
    );
    let flag = if (z - phi.at_origin()).norm() < ORIGIN_IMAGE_TOL {
        Some(FlagReason::OriginImage)
    } else if pre.iter().any(|p| p.multiplicity > 1) {
        Some(FlagReason::CriticalValue)
    } else {
        None
    };
    Ok(CountingValue {
        value,
        preimages: pre.iter().map(|p| p.multiplicity).sum(),
        flag,
    })
}

/// Polar grid for sup estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl RatioGrid {
    /// Levels `r = 1 - 2^{-j}`, `j = 1..=levels`, with `angles` equispaced angles.
    pub fn dyadic(levels: u32, angles: usize) -> Self {
        Self {
            radii: (1..=levels).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect(),
            angles,
        }
    }

    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.angles as f64
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.angles == 0 {
            return Err(domain("ratio grid is empty"));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(domain(format!("ratio grid radius {r} is outside (0, 1)")));
        }
        Ok(())
    }
}

impl Default for RatioGrid {
    fn default() -> Self {
        Self::dyadic(14, 256)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedPoint {
    pub re: f64,
    pub im: f64,
    pub reason: FlagReason,
}

/// Ratio `N_{phi,a}(z) / (1-|z|^2)^{1-2a}` on a polar grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub a: f64,
    pub field: GridField,
    /// Per radial level, the largest unflagged ratio over the angles.
    pub profile: Vec<f64>,
    pub sup: f64,
    pub argmax: Option<[f64; 2]>,
    pub flagged: Vec<FlaggedPoint>,
}

impl RatioReport {
    pub fn verdict(&self) -> Verdict {
        mid_level_verdict(&self.profile)
    }
}

pub fn sup_ratio(phi: &DiscSymbol, a: f64, grid: &RatioGrid) -> Result<RatioReport> {
    let a = check_dirichlet_exponent(a)?;
    grid.validate()?;
    let e = 1.0 - 2.0 * a;
    let points: Vec<(usize, usize)> = (0..grid.radii.len())
        .flat_map(|i| (0..grid.angles).map(move |k| (i, k)))
        .collect();
    let evaluated: Vec<(f64, Option<FlagReason>)> = points
        .par_iter()
        .map(|&(i, k)| {
            let r = grid.radii[i];
            let z = Complex64::from_polar(r, grid.angle(k));
            match counting_function_detail(phi, a, z) {
                Ok(c) => Ok((c.value / pow_or_one(1.0 - r * r, e), c.flag)),
                Err(Error::BoundaryAmbiguity { .. }) => Ok((f64::NAN, Some(FlagReason::BoundaryAmbiguous))),
                Err(err) => Err(err),
            }
        })
        .collect::<Result<_>>()?;

    let mut flagged = Vec::new();
    for (&(i, k), (_, f)) in points.iter().zip(&evaluated) {
        if let Some(reason) = f {
            let z = Complex64::from_polar(grid.radii[i], grid.angle(k));
            flagged.push(FlaggedPoint {
                re: z.re,
                im: z.im,
                reason: *reason,
            });
        }
    }
    let field = GridField {
        row_label: "r".into(),
        col_label: "theta".into(),
        rows: grid.radii.clone(),
        cols: (0..grid.angles).map(|k| grid.angle(k)).collect(),
        values: evaluated.iter().map(|v| v.0).collect(),
        flags: evaluated.iter().map(|v| v.1.is_some()).collect(),
    };
    let profile = (0..grid.radii.len())
        .map(|i| {
            (0..grid.angles)
                .filter(|&k| !field.flagged(i, k))
                .map(|k| field.value(i, k))
                .fold(0.0, f64::max)
        })
        .collect();
    let (sup, argmax) = match field.argmax() {
        Some((i, k, v)) => {
            let z = Complex64::from_polar(grid.radii[i], grid.angle(k));
            (v, Some([z.re, z.im]))
        }
        None => (0.0, None),
    };
    Ok(RatioReport {
        a,
        field,
        profile,
        sup,
        argmax,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedVerdict {
    pub verdict: Verdict,
    pub bounded_evidence: bool,
    pub sup1: f64,
    pub sup2: f64,
    pub growth1: bool,
    pub growth2: bool,
    pub report1: RatioReport,
    pub report2: RatioReport,
}

/// Boundedness evidence for `C_Phi` on the anisotropic Dirichlet space:
/// each coordinate's ratio profile must stay bounded.
pub fn separated_verdict(phi: &BidiscSymbol, a: WeightPair, grid: &RatioGrid) -> Result<SeparatedVerdict> {
    let (phi1, phi2) = phi.as_separated()?;
    let report1 = sup_ratio(phi1, a.a1(), grid)?;
    let report2 = sup_ratio(phi2, a.a2(), grid)?;
    let (v1, v2) = (report1.verdict(), report2.verdict());
    let verdict = v1.and(v2);
    Ok(SeparatedVerdict {
        verdict,
        bounded_evidence: verdict.passed(),
        sup1: report1.sup,
        sup2: report2.sup,
        growth1: v1 == Verdict::GrowthDetected,
        growth2: v2 == Verdict::GrowthDetected,
        report1,
        report2,
    })
}

/// `N(omega)` against the mean of `N` over `|z - omega| < (1-|omega|^2)/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlemanRecord {
    pub omega: [f64; 2],
    pub radius: f64,
    pub n_omega: f64,
    pub mean: f64,
    pub ratio: f64,
    /// Ratio computed with doubled quadrature on the small disc.
    pub ratio_doubled: f64,
}

pub fn aleman_diagnostic(phi: &DiscSymbol, a: f64, omega: Complex64, res: Resolution) -> Result<AlemanRecord> {
    let a = check_dirichlet_exponent(a)?;
    let m = omega.norm();
    if !(m > 0.5 && m < 1.0 - 1e-3) {
        return Err(domain(format!("|omega| = {m} must lie in (1/2, 1 - 1e-3)")));
    }
    let radius = 0.5 * (1.0 - m * m);
    let n_omega = counting_function(phi, a, omega)?;
    let mean_at = |r: Resolution| disc_average(omega, radius, r, |z| counting_function(phi, a, z));
    let mean = mean_at(res)?;
    let mean2 = mean_at(res.doubled())?;
    let ratio = |n: f64, d: f64| if d == 0.0 { 0.0 } else { n / d };
    Ok(AlemanRecord {
        omega: [omega.re, omega.im],
        radius,
        n_omega,
        mean,
        ratio: ratio(n_omega, mean),
        ratio_doubled: ratio(n_omega, mean2),
    })
}
