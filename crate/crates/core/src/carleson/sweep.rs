//! One-box sufficient condition: `mu(S(I x J)) <= C psi(|I x J|)` over a
//! dyadic family of boxes.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disc_cap_mass;
use crate::analytic::BergmanWeight;
use crate::error::{domain, Result};
use crate::quadrature::{batch_estimate, SampleCloud};
use crate::report::{last_levels_verdict, GridField, Verdict};

/// Hits in the heaviest box of a level needed before the level counts as resolved.
pub const MIN_LEVEL_HITS: usize = 10;

/// Centres `2 pi k / centers` per coordinate, radii `2^{-j}` for `j = 0..=max_level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OneBoxConfig {
    pub centers: usize,
    pub max_level: usize,
    /// Optional constant `C`; the check passes it when the sup ratio is at most `C`.
    pub threshold: Option<f64>,
}

impl Default for OneBoxConfig {
    fn default() -> Self {
        Self {
            centers: 8,
            max_level: 10,
            threshold: None,
        }
    }
}

/// How box masses are obtained.
pub enum BoxMeasure<'a> {
    /// Exact `V_beta` volumes: the pull-back under the identity symbol.
    Quadrature { beta: BergmanWeight, order: usize },
    /// A weighted sample of the measure, e.g. a pull-back cloud.
    Samples(&'a SampleCloud),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub level: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub volume: f64,
    pub ratio: f64,
    pub stderr: f64,
    /// Sample hits; `None` for exact volumes.
    pub hits: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub delta: f64,
    pub max_ratio: f64,
    pub argmax: [f64; 2],
    /// Enough sample hits (or exact volumes) for the ratio to be meaningful.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneBoxReport {
    pub config: OneBoxConfig,
    pub levels: Vec<LevelSummary>,
    pub rows: Vec<SweepRow>,
    pub sup: f64,
    pub argmax: [f64; 2],
    pub argmax_level: usize,
    /// Bounded-profile rule applied to the resolved levels only.
    pub verdict: Verdict,
    pub within_threshold: Option<bool>,
    pub warnings: Vec<String>,
    pub field: GridField,
}

impl OneBoxReport {
    /// Columns `j, theta1, theta2, volume, ratio, stderr`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,theta1,theta2,volume,ratio,stderr\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.level, r.theta1, r.theta2, r.volume, r.ratio, r.stderr
            );
        }
        s
    }
}

/// Largest level `j <= max` with `d < 2^{-j}`, or `None` when `d >= 1`.
fn deepest_level(d: f64, max: usize) -> Option<usize> {
    if d >= 1.0 {
        return None;
    }
    if d == 0.0 {
        return Some(max);
    }
    let mut j = (-d.log2()).floor().max(0.0) as usize;
    while j > 0 && (-(j as f64)).exp2() <= d {
        j -= 1;
    }
    Some(j.min(max))
}

pub fn one_box_sufficient_check<F>(measure: BoxMeasure<'_>, psi: F, cfg: OneBoxConfig) -> Result<OneBoxReport>
where
    F: Fn(f64) -> f64,
{
    if cfg.centers == 0 {
        return Err(domain("sweep needs at least one centre per coordinate"));
    }
    let nc = cfg.centers;
    let nl = cfg.max_level + 1;
    let angles: Vec<f64> = (0..nc).map(|k| 2.0 * PI * k as f64 / nc as f64).collect();
    let deltas: Vec<f64> = (0..nl).map(|j| (-(j as f64)).exp2()).collect();
    // masses[(j * nc + a) * nc + b] with standard errors and hit counts
    let (masses, stderrs, hits) = match measure {
        BoxMeasure::Quadrature { beta, order } => {
            let mut m = Vec::with_capacity(nl * nc * nc);
            for &d in &deltas {
                let cap = disc_cap_mass(d, beta.beta(), order)?;
                m.extend(std::iter::repeat_n(cap * cap, nc * nc));
            }
            let n = m.len();
            (m, vec![0.0; n], vec![None; n])
        }
        BoxMeasure::Samples(cloud) => sampled_masses(cloud, &angles, cfg.max_level),
    };
    let mut rows = Vec::with_capacity(masses.len());
    let mut levels = Vec::with_capacity(nl);
    let mut warnings = Vec::new();
    let mut field = Vec::with_capacity(nl * nc * nc);
    for (j, &d) in deltas.iter().enumerate() {
        let area = (2.0 * d).min(2.0 * PI).powi(2);
        let gauge = psi(area);
        if !(gauge.is_finite() && gauge > 0.0) {
            return Err(domain(format!("psi({area:e}) = {gauge} must be positive and finite")));
        }
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0], None);
        for a in 0..nc {
            for b in 0..nc {
                let i = (j * nc + a) * nc + b;
                let ratio = masses[i] / gauge;
                if ratio > best.0 {
                    best = (ratio, [angles[a], angles[b]], hits[i]);
                }
                field.push(ratio);
                rows.push(SweepRow {
                    level: j,
                    theta1: angles[a],
                    theta2: angles[b],
                    volume: masses[i],
                    ratio,
                    stderr: stderrs[i],
                    hits: hits[i],
                });
            }
        }
        let resolved = best.2.is_none_or(|h| h >= MIN_LEVEL_HITS);
        if !resolved {
            warnings.push(format!(
                "level {j} (delta = {d:e}): heaviest box has {} sample hits, below {MIN_LEVEL_HITS}",
                best.2.unwrap_or(0)
            ));
        }
        levels.push(LevelSummary {
            level: j,
            delta: d,
            max_ratio: best.0,
            argmax: best.1,
            resolved,
        });
    }
    let resolved: Vec<f64> = levels.iter().filter(|l| l.resolved).map(|l| l.max_ratio).collect();
    let verdict = last_levels_verdict(&resolved);
    let top = levels
        .iter()
        .filter(|l| l.resolved)
        .max_by(|x, y| x.max_ratio.total_cmp(&y.max_ratio))
        .unwrap_or(&levels[0]);
    let within_threshold = cfg.threshold.map(|c| top.max_ratio <= c);
    let columns: Vec<f64> = (0..nc * nc).map(|k| k as f64).collect();
    let flags = (0..nl)
        .flat_map(|j| std::iter::repeat_n(!levels[j].resolved, nc * nc))
        .collect();
    Ok(OneBoxReport {
        config: cfg,
        sup: top.max_ratio,
        argmax: top.argmax,
        argmax_level: top.level,
        levels,
        rows,
        verdict,
        within_threshold,
        warnings,
        field: GridField {
            row_label: "delta".into(),
            col_label: "centre index (a * centers + b)".into(),
            rows: deltas,
            cols: columns,
            values: field,
            flags,
        },
    })
}

/// Box masses for every level and centre pair from one pass over the cloud.
///
/// A point lies in box `(a, b)` at level `j` iff `j` is at most the deepest
/// level reached in both coordinates, so each point adds to one histogram
/// cell per centre pair and a suffix sum over levels finishes the job.
fn sampled_masses(cloud: &SampleCloud, angles: &[f64], max_level: usize) -> (Vec<f64>, Vec<f64>, Vec<Option<usize>>) {
    let nc = angles.len();
    let nl = max_level + 1;
    let centres: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let per_batch: Vec<(Vec<f64>, Vec<usize>, f64)> = cloud
        .batches
        .par_iter()
        .map(|&(lo, hi)| {
            let mut mass = vec![0.0; nl * nc * nc];
            let mut count = vec![0usize; nl * nc * nc];
            let mut total = 0.0;
            for i in lo..hi {
                let z = cloud.points[i];
                let w = cloud.weights[i];
                total += w;
                let l1: Vec<Option<usize>> = centres.iter().map(|c| deepest_level((z[0] - c).norm(), max_level)).collect();
                let l2: Vec<Option<usize>> = centres.iter().map(|c| deepest_level((z[1] - c).norm(), max_level)).collect();
                for (a, ja) in l1.iter().enumerate() {
                    let Some(ja) = ja else { continue };
                    for (b, jb) in l2.iter().enumerate() {
                        let Some(jb) = jb else { continue };
                        let k = (ja.min(jb) * nc + a) * nc + b;
                        mass[k] += w;
                        count[k] += 1;
                    }
                }
            }
            // suffix sums: a point at deepest level j is in every level <= j
            for j in (0..nl - 1).rev() {
                for ab in 0..nc * nc {
                    mass[j * nc * nc + ab] += mass[(j + 1) * nc * nc + ab];
                    count[j * nc * nc + ab] += count[(j + 1) * nc * nc + ab];
                }
            }
            (mass, count, total)
        })
        .collect();
    let n = nl * nc * nc;
    let mut masses = Vec::with_capacity(n);
    let mut stderrs = Vec::with_capacity(n);
    let mut hits = Vec::with_capacity(n);
    for k in 0..n {
        let sums: Vec<(f64, f64)> = per_batch.iter().map(|b| (b.0[k], b.2)).collect();
        let e = batch_estimate(&sums, cloud.len());
        masses.push(e.value);
        stderrs.push(e.stderr);
        hits.push(Some(per_batch.iter().map(|b| b.1[k]).sum()));
    }
    (masses, stderrs, hits)
}
