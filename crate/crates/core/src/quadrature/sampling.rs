//! Seeded sampling of the normalised weighted volume on the bidisc.
//!
//! Points are generated in independent batches; batch `b` draws from a ChaCha
//! stream selected by `(seed, b)`, so a cloud is reproducible for a fixed
//! seed regardless of how many threads produce it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::ksum;

/// Number of batches used for batch-means standard errors.
pub const DEFAULT_BATCHES: usize = 32;

/// Weighted sample of a measure on the bidisc.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub seed: u64,
    pub points: Vec<[Complex64; 2]>,
    pub weights: Vec<f64>,
    /// Half-open index ranges of the batches, in order.
    pub batches: Vec<(usize, usize)>,
}

/// Monte Carlo estimate with batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn batch_ranges(n: usize, batches: usize) -> Vec<(usize, usize)> {
    let b = batches.min(n).max(1);
    let base = n / b;
    let extra = n % b;
    let mut out = Vec::with_capacity(b);
    let mut start = 0;
    for i in 0..b {
        let len = base + usize::from(i < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}

/// Draws `n` points from the probability density proportional to
/// `(1-|z1|^2)^beta (1-|z2|^2)^beta` and weights them so they sum to the
/// total mass `1/(beta+1)^2`.
pub fn sample_dvbeta(beta: f64, n: usize, seed: u64) -> Result<SampleCloud> {
    if !(beta.is_finite() && beta > -1.0) {
        return Err(domain(format!("Bergman exponent must exceed -1, got {beta}")));
    }
    if n == 0 {
        return Err(domain("sample size must be at least 1"));
    }
    let ranges = batch_ranges(n, DEFAULT_BATCHES);
    let inv = 1.0 / (beta + 1.0);
    let chunks: Vec<Vec<[Complex64; 2]>> = ranges
        .par_iter()
        .enumerate()
        .map(|(b, &(lo, hi))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut draw = || {
                // u in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                let r = (1.0 - u.powf(inv)).max(0.0).sqrt();
                let t = 2.0 * PI * rng.random::<f64>();
                Complex64::from_polar(r, t)
            };
            (lo..hi).map(|_| [draw(), draw()]).collect()
        })
        .collect();
    let points: Vec<[Complex64; 2]> = chunks.into_iter().flatten().collect();
    let mass = inv * inv;
    let weights = vec![mass / n as f64; n];
    Ok(SampleCloud {
        seed,
        points,
        weights,
        batches: ranges,
    })
}

impl SampleCloud {
    /// A cloud from explicit points and weights (a single batch per point
    /// when there are few points).
    pub fn from_points(points: Vec<[Complex64; 2]>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(domain("sample cloud needs matching, nonempty points and weights"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(domain("sample weights must be finite and nonnegative"));
        }
        let batches = batch_ranges(points.len(), DEFAULT_BATCHES);
        Ok(Self {
            seed: 0,
            points,
            weights,
            batches,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        ksum(self.weights.iter().copied())
    }

    /// `\int f d(mu)` with a batch-means standard error.
    pub fn estimate<F>(&self, f: F) -> McEstimate
    where
        F: Fn(&[Complex64; 2]) -> f64 + Sync,
    {
        let sums: Vec<(f64, f64)> = self
            .batches
            .par_iter()
            .map(|&(lo, hi)| {
                let s = ksum((lo..hi).map(|i| self.weights[i] * f(&self.points[i])));
                let m = ksum(self.weights[lo..hi].iter().copied());
                (s, m)
            })
            .collect();
        batch_estimate(&sums, self.len())
    }
}

/// Combines per-batch `(weighted sum, batch mass)` pairs into an estimate
/// whose standard error comes from batch means.
pub fn batch_estimate(sums: &[(f64, f64)], samples: usize) -> McEstimate {
    let value = ksum(sums.iter().map(|p| p.0));
    let total = ksum(sums.iter().map(|p| p.1));
    let b = sums.len();
    let stderr = if b < 2 || total == 0.0 {
        0.0
    } else {
        // each batch estimates the full integral as total * (s_b / m_b)
        let est: Vec<f64> = sums
            .iter()
            .map(|&(s, m)| if m > 0.0 { total * s / m } else { 0.0 })
            .collect();
        let mean = ksum(est.iter().copied()) / b as f64;
        let var = ksum(est.iter().map(|e| (e - mean).powi(2))) / (b as f64 - 1.0);
        (var / b as f64).sqrt()
    };
    McEstimate {
        value,
        stderr,
        samples,
    }
}
