//! The double-integral characterisation of one-variable Dirichlet-type norms:
//! `\int\int |f(z)-f(w)|^2 / |1 - conj(w) z|^{2(beta+2)} dA_sigma dA_tau`
//! is comparable to `||f||^2` in `D_{sigma+tau-2 beta}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::TaylorGrid1D;
use crate::error::{domain, Result};
use crate::numeric::{ksum, KahanSum};
use crate::quadrature::{QuadratureRule, RadialWeight, Resolution};

pub const BW_RESOLUTION: Resolution = Resolution::new(24, 48);

/// Exponents of the double integral. `dA_sigma = (1-|z|^2)^sigma dA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BwParams {
    pub sigma: f64,
    pub tau: f64,
    pub beta: f64,
}

impl Default for BwParams {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            tau: 0.5,
            beta: 0.0,
        }
    }
}

impl BwParams {
    /// Checks `sigma, tau > -1` and `max(sigma, tau)/2 - 1 < beta <= (sigma+tau)/2`.
    pub fn new(sigma: f64, tau: f64, beta: f64) -> Result<Self> {
        let p = Self { sigma, tau, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { sigma, tau, beta } = *self;
        if !(sigma > -1.0 && tau > -1.0) {
            return Err(domain(format!(
                "sigma = {sigma} and tau = {tau} must exceed -1 for dA_sigma to be finite"
            )));
        }
        if !(sigma.max(tau) / 2.0 - 1.0 < beta && beta <= (sigma + tau) / 2.0) {
            return Err(domain(format!(
                "beta = {beta} outside max(sigma, tau)/2 - 1 < beta <= (sigma + tau)/2"
            )));
        }
        Ok(())
    }

    /// Weight exponent `c = sigma + tau - 2 beta` of the comparison space.
    pub fn norm_exponent(&self) -> f64 {
        self.sigma + self.tau - 2.0 * self.beta
    }
}

/// `sum_{k>=1} k^{1-c} |a_k|^2`, comparable to `\int |f'|^2 (1-|z|^2)^c dA`.
pub fn dirichlet_seminorm_1d(f: &TaylorGrid1D, c: f64) -> f64 {
    ksum(
        f.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| (k as f64).powf(1.0 - c) * a.norm_sqr()),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwEntry {
    pub double_integral: f64,
    pub norm: f64,
    /// `double_integral / norm`, zero for constants (both sides vanish).
    pub ratio: f64,
}

/// Equivalence-band summary over a family of functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub params: BwParams,
    pub norm_exponent: f64,
    pub resolution: Resolution,
    pub entries: Vec<BwEntry>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub warnings: Vec<String>,
}

impl EquivalenceReport {
    pub fn band(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Precomputed radial nodes for one parameter set.
///
/// Both rules share the equispaced angles `(j+1/2) 2 pi / M`, so the angular
/// part of the tensor sum depends only on the node difference and the sum
/// diagonalises over Taylor coefficients. For degree `< M` this reproduces
/// the full `M^2` tensor sum exactly at cost `O(M deg)` per radial pair.
pub struct BwIntegrator {
    params: BwParams,
    res: Resolution,
    z: Vec<(f64, f64)>,
    w: Vec<(f64, f64)>,
}

impl BwIntegrator {
    pub fn new(params: BwParams, res: Resolution) -> Result<Self> {
        params.validate()?;
        let rz = QuadratureRule::new(RadialWeight::Standard { gamma: params.sigma }, res, 1)?;
        let rw = QuadratureRule::new(RadialWeight::Standard { gamma: params.tau }, res, 1)?;
        let radial = |r: &QuadratureRule| r.radii().iter().copied().zip(r.radial_weights().iter().copied()).collect();
        Ok(Self {
            params,
            res,
            z: radial(&rz),
            w: radial(&rw),
        })
    }

    pub fn double_integral(&self, f: &TaylorGrid1D) -> f64 {
        if f.degree() < self.res.angular {
            self.diagonal_sum(f)
        } else {
            self.tensor_sum(f)
        }
    }

    fn diagonal_sum(&self, f: &TaylorGrid1D) -> f64 {
        let e = -(self.params.beta + 2.0);
        let m = self.res.angular;
        let h = 2.0 * PI / m as f64;
        let deg = f.degree();
        let a2: Vec<f64> = f.coeffs.iter().map(|a| a.norm_sqr()).collect();
        let partial: Vec<f64> = self
            .z
            .par_iter()
            .map(|&(r, wr)| {
                let mut s = KahanSum::new();
                for &(rho, wp) in &self.w {
                    let t = r * rho;
                    let kernel: Vec<f64> = (0..m)
                        .map(|d| (1.0 - Complex64::from_polar(t, d as f64 * h)).norm_sqr().powf(e))
                        .collect();
                    let hat = |k: usize| {
                        ksum(kernel.iter().enumerate().map(|(d, v)| v * (k as f64 * d as f64 * h).cos())) / m as f64
                    };
                    let k0 = hat(0);
                    let mut inner = KahanSum::new();
                    for (k, &ak) in a2.iter().enumerate().take(deg + 1).skip(1) {
                        if ak == 0.0 {
                            continue;
                        }
                        let (rk, pk) = (r.powi(k as i32), rho.powi(k as i32));
                        inner.add(ak * ((rk * rk + pk * pk) * k0 - 2.0 * rk * pk * hat(k)));
                    }
                    s.add(wp * inner.value());
                }
                wr * s.value()
            })
            .collect();
        ksum(partial)
    }

    fn tensor_sum(&self, f: &TaylorGrid1D) -> f64 {
        let e = -(self.params.beta + 2.0);
        let nodes = |radial: &[(f64, f64)]| -> Vec<(Complex64, f64)> {
            let m = self.res.angular;
            radial
                .iter()
                .flat_map(|&(r, w)| {
                    (0..m).map(move |j| {
                        let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                        (Complex64::from_polar(r, t), w / m as f64)
                    })
                })
                .collect()
        };
        let (zs, ws) = (nodes(&self.z), nodes(&self.w));
        let fw: Vec<Complex64> = ws.iter().map(|&(w, _)| f.eval(w)).collect();
        let partial: Vec<f64> = zs
            .par_iter()
            .map(|&(z, wz)| {
                let fz = f.eval(z);
                let mut s = KahanSum::new();
                for (&(w, ww), &fv) in ws.iter().zip(&fw) {
                    let k = (1.0 - w.conj() * z).norm_sqr().powf(e);
                    s.add(ww * (fz - fv).norm_sqr() * k);
                }
                wz * s.value()
            })
            .collect();
        ksum(partial)
    }

    pub fn entry(&self, f: &TaylorGrid1D) -> BwEntry {
        let double_integral = self.double_integral(f);
        let norm = dirichlet_seminorm_1d(f, self.params.norm_exponent());
        let ratio = if norm == 0.0 { 0.0 } else { double_integral / norm };
        BwEntry {
            double_integral,
            norm,
            ratio,
        }
    }

    pub fn report(&self, family: &[TaylorGrid1D]) -> EquivalenceReport {
        let entries: Vec<BwEntry> = family.iter().map(|f| self.entry(f)).collect();
        let positive = entries.iter().filter(|e| e.norm > 0.0).map(|e| e.ratio);
        let min_ratio = positive.clone().fold(f64::INFINITY, f64::min);
        let max_ratio = positive.fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if 2.0 * (self.params.beta + 2.0) >= 3.0 {
            warnings.push(format!(
                "kernel exponent 2(beta+2) = {} >= 3: integrand is nearly singular where both nodes approach the same boundary point",
                2.0 * (self.params.beta + 2.0)
            ));
        }
        EquivalenceReport {
            params: self.params,
            norm_exponent: self.params.norm_exponent(),
            resolution: self.res,
            entries,
            min_ratio,
            max_ratio,
            warnings,
        }
    }
}

/// Single-function ratio of the double integral to the comparison norm.
pub fn balooch_wu_ratio(f: &TaylorGrid1D, params: BwParams, res: Resolution) -> Result<BwEntry> {
    Ok(BwIntegrator::new(params, res)?.entry(f))
}
