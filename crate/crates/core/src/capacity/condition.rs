//! Pull-back volume of box unions against the capacity of the matching
//! rectangle unions, and the Bessel versus logarithmic kernel comparison.

use serde::{Deserialize, Serialize};

use super::{capacity, CapacityResult, KernelKind, KernelOperator, RectUnion, SolverConfig, TorusGrid};
use crate::analytic::BergmanWeight;
use crate::carleson::{box_volume, union_volume, BoxUnion, CarlesonBox};
use crate::error::{domain, Error, Result};
use crate::quadrature::SampleCloud;
use crate::report::{last_levels_verdict, Verdict};

/// Convention linking rectangles and boxes, carried by every report.
pub const BOX_CONVENTION: &str =
    "box anchored at the rectangle centre with delta_i = half the side length b_i - a_i";

/// What the verdict of a condition check does and does not establish.
pub const EVIDENCE_SCOPE: &str =
    "evidence for the capacity condition over the tested families only; not a proof for all unions";

/// Boxes anchored at rectangle centres with `delta = side / 2`.
pub fn matched_boxes(rects: &RectUnion) -> Result<BoxUnion> {
    rects
        .0
        .iter()
        .map(|r| {
            let s = r.sides();
            CarlesonBox::new(r.centre(), [0.5 * s[0], 0.5 * s[1]])
        })
        .collect::<Result<Vec<_>>>()
        .map(BoxUnion)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityFamily {
    pub rects: RectUnion,
    /// Defaults to [`matched_boxes`] of the rectangles.
    #[serde(default)]
    pub boxes: Option<BoxUnion>,
}

impl CapacityFamily {
    pub fn boxes(&self) -> Result<BoxUnion> {
        match &self.boxes {
            Some(b) => Ok(b.clone()),
            None => matched_boxes(&self.rects),
        }
    }
}

/// Source of `V_beta(Phi^{-1}(union of boxes))`.
pub enum VolumeSource<'a> {
    /// A pull-back sample cloud (any symbol).
    Samples(&'a SampleCloud),
    /// Exact volumes for the identity symbol; single-box families only.
    ExactIdentity(BergmanWeight),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResult {
    pub volume: f64,
    pub volume_stderr: f64,
    /// Sample hits; `None` for exact volumes.
    pub hits: Option<usize>,
    pub capacity: CapacityResult,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub families: Vec<FamilyResult>,
    pub max_ratio: f64,
    pub argmax: usize,
    /// Bounded-profile rule over the families in the given order (e.g. by scale).
    pub verdict: Verdict,
    pub scope: String,
    pub box_convention: String,
    pub warnings: Vec<String>,
}

pub fn capacity_condition_check(
    source: VolumeSource<'_>,
    families: &[CapacityFamily],
    op: &KernelOperator,
    cfg: SolverConfig,
) -> Result<ConditionReport> {
    if families.is_empty() {
        return Err(domain("capacity condition check needs at least one family"));
    }
    let mut out = Vec::with_capacity(families.len());
    let mut warnings = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        if fam.rects.is_empty() {
            return Err(domain(format!("family {i} has no rectangles")));
        }
        let boxes = fam.boxes()?;
        let (volume, volume_stderr, hits) = match &source {
            VolumeSource::Samples(cloud) => {
                let v = union_volume(cloud, &boxes);
                if let Some(w) = v.warning {
                    warnings.push(format!("family {i}: {w}"));
                }
                (v.estimate.value, v.estimate.stderr, Some(v.hits))
            }
            VolumeSource::ExactIdentity(beta) => {
                let [b] = boxes.0.as_slice() else {
                    return Err(Error::Unsupported(format!(
                        "exact volumes need single-box families, family {i} has {}",
                        boxes.0.len()
                    )));
                };
                (box_volume(b, *beta, None)?.value, 0.0, None)
            }
        };
        let cap = capacity(op, &fam.rects, cfg)?;
        if !cap.converged {
            warnings.push(format!(
                "family {i}: capacity solver stopped after {} iterations without converging",
                cap.iterations
            ));
        }
        out.push(FamilyResult {
            volume,
            volume_stderr,
            hits,
            ratio: volume / cap.value,
            capacity: cap,
        });
    }
    let (argmax, max_ratio) = out
        .iter()
        .enumerate()
        .map(|(i, f)| (i, f.ratio))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let profile: Vec<f64> = out.iter().map(|f| f.ratio).collect();
    Ok(ConditionReport {
        verdict: last_levels_verdict(&profile),
        families: out,
        max_ratio,
        argmax,
        scope: EVIDENCE_SCOPE.into(),
        box_convention: BOX_CONVENTION.into(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelComparison {
    pub bessel: CapacityResult,
    pub log: CapacityResult,
    /// `log / bessel`; absent when both vanish.
    pub ratio: Option<f64>,
    pub log_constant: f64,
}

/// Capacity of `e` under the half-power kernel and under the logarithmic
/// kernel `(c + log 2/|t1|)(c + log 2/|t2|)`.
pub fn capacity_vs_box_remark(e: &RectUnion, grid: TorusGrid, log_constant: f64, cfg: SolverConfig) -> Result<KernelComparison> {
    let bessel = capacity(&KernelOperator::new(grid, KernelKind::Bessel)?, e, cfg)?;
    let log = capacity(&KernelOperator::new(grid, KernelKind::Log { c: log_constant })?, e, cfg)?;
    let ratio = (bessel.value > 0.0).then(|| log.value / bessel.value);
    Ok(KernelComparison {
        bessel,
        log,
        ratio,
        log_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::Rect;
    use crate::quadrature::sample_dvbeta;
    use std::f64::consts::PI;

    fn single(side: f64) -> CapacityFamily {
        CapacityFamily {
            rects: RectUnion(vec![Rect::new([0.3, -0.2], [0.3 + side, -0.2 + side]).unwrap()]),
            boxes: None,
        }
    }

    #[test]
    fn matched_box_geometry() {
        let b = matched_boxes(&single(0.5).rects).unwrap();
        assert_eq!(b.0[0].delta(), [0.25, 0.25]);
        assert!((b.0[0].zeta()[0] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn full_space_family() {
        let op = KernelOperator::new(TorusGrid::new(16).unwrap(), KernelKind::Bessel).unwrap();
        let fam = CapacityFamily {
            rects: RectUnion(vec![Rect::new([-PI, -PI], [PI, PI]).unwrap()]),
            boxes: None,
        };
        let beta = BergmanWeight::new(0.0).unwrap();
        let r = capacity_condition_check(VolumeSource::ExactIdentity(beta), std::slice::from_ref(&fam), &op, SolverConfig::default())
            .unwrap();
        // total mass 1 over the constant-density capacity 1/64
        assert!((r.max_ratio - 64.0).abs() < 1e-4, "{}", r.max_ratio);
        let cloud = sample_dvbeta(0.0, 1000, 1).unwrap();
        let s = capacity_condition_check(VolumeSource::Samples(&cloud), &[fam], &op, SolverConfig::default()).unwrap();
        assert!((s.max_ratio - r.max_ratio).abs() < 1e-9 * r.max_ratio);
    }

    #[test]
    fn dyadic_identity_profile_bounded() {
        let op = KernelOperator::new(TorusGrid::new(32).unwrap(), KernelKind::Bessel).unwrap();
        let fams: Vec<CapacityFamily> = (1..=4).map(|j| single(2.0 * PI / f64::from(1 << j))).collect();
        let beta = BergmanWeight::new(0.0).unwrap();
        let r = capacity_condition_check(VolumeSource::ExactIdentity(beta), &fams, &op, SolverConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::FiniteEvidence);
        assert_eq!(r.argmax, 0);
    }

    #[test]
    fn exact_volumes_reject_unions() {
        let op = KernelOperator::new(TorusGrid::new(8).unwrap(), KernelKind::Bessel).unwrap();
        let mut fam = single(1.0);
        fam.rects.0.push(Rect::new([2.0, 2.0], [3.0, 3.0]).unwrap());
        let beta = BergmanWeight::new(0.0).unwrap();
        let e = capacity_condition_check(VolumeSource::ExactIdentity(beta), &[fam], &op, SolverConfig::default());
        assert!(matches!(e, Err(Error::Unsupported(_))));
    }

    #[test]
    fn kernel_comparison() {
        let g = TorusGrid::new(16).unwrap();
        let empty = capacity_vs_box_remark(&RectUnion(vec![]), g, 1.0, SolverConfig::default()).unwrap();
        assert_eq!((empty.bessel.value, empty.log.value, empty.ratio), (0.0, 0.0, None));
        let inner = RectUnion(vec![Rect::new([0.0, 0.0], [0.8, 0.8]).unwrap()]);
        let outer = RectUnion(vec![Rect::new([-0.4, -0.4], [1.2, 1.2]).unwrap()]);
        let a = capacity_vs_box_remark(&inner, g, 1.0, SolverConfig::default()).unwrap();
        let b = capacity_vs_box_remark(&outer, g, 1.0, SolverConfig::default()).unwrap();
        assert!(a.bessel.value <= b.bessel.value * (1.0 + 1e-6));
        assert!(a.log.value <= b.log.value * (1.0 + 1e-6));
        assert!(a.ratio.unwrap() > 0.0);
    }
}
