//! Deterministic weighted quadrature on the disc and bidisc, plus seeded
//! Monte Carlo sampling of the weighted volume `dV_beta`.
//!
//! Every disc rule is a tensor product of a radial Gauss rule in `s = |z|^2`
//! and a uniform angular rule. With the normalised area `dA = dx dy / pi`,
//! `dA = ds dtheta / (2 pi)`, so the radial factor of a weight
//! `omega(|z|)` becomes a one-dimensional weight on `s in [0, 1]`.

mod gauss_jacobi;
mod sampling;

pub use gauss_jacobi::{gauss_jacobi_unit, gauss_legendre_unit};
pub use sampling::{batch_estimate, sample_dvbeta, McEstimate, SampleCloud, DEFAULT_BATCHES};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{ksum, ksum_c, log_inv};

/// Radial weight attached to a disc rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialWeight {
    /// `(1 - |z|^2)^gamma dA`, the standard weight of `dA_a` and `dA_beta`.
    Standard { gamma: f64 },
    /// `(log 1/|z|)^gamma dA`, the weight under which the counting-function
    /// change of variables holds with equality.
    Logarithmic { gamma: f64 },
}

impl RadialWeight {
    pub fn gamma(&self) -> f64 {
        match *self {
            RadialWeight::Standard { gamma } | RadialWeight::Logarithmic { gamma } => gamma,
        }
    }

    /// Density of the weight at radius `r` (with respect to `dA`).
    pub fn density(&self, r: f64) -> f64 {
        match *self {
            RadialWeight::Standard { gamma } => (1.0 - r * r).powf(gamma),
            RadialWeight::Logarithmic { gamma } => log_inv(r).powf(gamma),
        }
    }
}

/// Radial and angular orders of a disc rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub radial: usize,
    pub angular: usize,
}

impl Resolution {
    pub const fn new(radial: usize, angular: usize) -> Self {
        Self { radial, angular }
    }

    pub fn doubled(&self) -> Self {
        Self::new(2 * self.radial, 2 * self.angular)
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::new(32, 64)
    }
}

/// A value together with its convergence sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

impl Estimate {
    /// Fails with an accuracy error when the estimate exceeds `tol` relative
    /// to the value. Errors at round-off level never fail.
    pub fn within(self, tol: f64, context: &str) -> Result<Self> {
        let floor = 64.0 * f64::EPSILON * self.value.abs().max(f64::MIN_POSITIVE);
        if self.error_estimate > tol * self.value.abs() && self.error_estimate > floor {
            return Err(Error::Accuracy {
                estimate: self.error_estimate,
                tolerance: tol,
                context: context.to_string(),
            });
        }
        Ok(self)
    }
}

/// Tensor rule on the disc for a radial weight.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    weight: RadialWeight,
    resolution: Resolution,
    grading: u32,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    angles: Vec<(f64, f64)>,
}

/// Standard-weight rule `(1-|z|^2)^gamma dA`, exact for radial polynomials of
/// degree `<= 2n - 1` in `|z|^2` and angular harmonics of order `< M`.
pub fn build_rule(gamma: f64, radial: usize, angular: usize) -> Result<QuadratureRule> {
    if radial < 4 || angular < 8 {
        return Err(domain(format!(
            "rule orders must satisfy n >= 4 and M >= 8, got n = {radial}, M = {angular}"
        )));
    }
    QuadratureRule::new(RadialWeight::Standard { gamma }, Resolution::new(radial, angular), 1)
}

impl QuadratureRule {
    /// Builds a rule. `grading = q > 1` substitutes `s = u^q`, which clusters
    /// nodes at the origin and removes logarithmic singularities there; the
    /// rule is then spectrally convergent rather than polynomially exact.
    pub fn new(weight: RadialWeight, resolution: Resolution, grading: u32) -> Result<Self> {
        let gamma = weight.gamma();
        if !(gamma.is_finite() && gamma > -1.0) {
            return Err(domain(format!("weight exponent must exceed -1, got {gamma}")));
        }
        if resolution.radial == 0 || resolution.angular == 0 {
            return Err(domain("quadrature orders must be positive"));
        }
        if grading == 0 {
            return Err(domain("grading exponent must be at least 1"));
        }
        let q = grading as f64;
        let (us, ws) = gauss_jacobi_unit(resolution.radial, gamma)?;
        let mut radii = Vec::with_capacity(us.len());
        let mut radial_weights = Vec::with_capacity(us.len());
        for (&u, &w) in us.iter().zip(&ws) {
            let s = u.powf(q);
            // remaining factor after pulling (1-u)^gamma out of the weight
            let jac = q * u.powf(q - 1.0);
            let factor = match weight {
                RadialWeight::Standard { .. } => {
                    if grading == 1 {
                        1.0
                    } else {
                        // (1 - u^q)/(1 - u) = 1 + u + ... + u^{q-1}
                        let geo: f64 = (0..grading).map(|k| u.powi(k as i32)).sum();
                        geo.powf(gamma) * jac
                    }
                }
                RadialWeight::Logarithmic { .. } => {
                    // (1/2 ln 1/s)^gamma = (q/2)^gamma (-ln u)^gamma
                    let ratio = if 1.0 - u < 1e-8 {
                        1.0 + 0.5 * (1.0 - u)
                    } else {
                        -u.ln() / (1.0 - u)
                    };
                    (0.5 * q).powf(gamma) * ratio.powf(gamma) * jac
                }
            };
            radii.push(s.sqrt());
            radial_weights.push(w * factor);
        }
        let m = resolution.angular;
        let angles = (0..m)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                (t.cos(), t.sin())
            })
            .collect();
        Ok(Self {
            weight,
            resolution,
            grading,
            radii,
            radial_weights,
            angles,
        })
    }

    pub fn weight(&self) -> RadialWeight {
        self.weight
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    /// Same weight and grading at a different resolution.
    pub fn with_resolution(&self, resolution: Resolution) -> Result<Self> {
        Self::new(self.weight, resolution, self.grading)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radial weights; they already include the `1/(2 pi)` angular normalisation
    /// only after division by `M`, see [`QuadratureRule::nodes`].
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of all weights: the weighted area of the disc.
    pub fn total_mass(&self) -> f64 {
        ksum(self.radial_weights.iter().copied())
    }

    /// All `(node, weight)` pairs, radial index outer and angular inner.
    pub fn nodes(&self) -> Vec<(Complex64, f64)> {
        let m = self.angles.len() as f64;
        let mut out = Vec::with_capacity(self.len());
        for (&r, &w) in self.radii.iter().zip(&self.radial_weights) {
            for &(c, s) in &self.angles {
                out.push((Complex64::new(r * c, r * s), w / m));
            }
        }
        out
    }

    /// `\int_D f d(weight)`.
    pub fn integrate<F: Fn(Complex64) -> f64>(&self, f: F) -> Result<f64> {
        let nodes = self.nodes();
        let mut vals = Vec::with_capacity(nodes.len());
        for (z, w) in nodes {
            let v = f(z);
            if !v.is_finite() {
                return Err(non_finite(&[z]));
            }
            vals.push(w * v);
        }
        Ok(ksum(vals))
    }
}

pub(crate) fn non_finite(points: &[Complex64]) -> Error {
    let desc: Vec<String> = points
        .iter()
        .map(|z| format!("({:.6}{:+.6}i)", z.re, z.im))
        .collect();
    Error::NonFinite {
        node: desc.join(", "),
    }
}

/// Tensor-product quadrature of a complex integrand on the bidisc.
///
/// The outer loop may run in parallel; partial sums are reduced in node order.
pub fn integrate2d<G>(g: G, rule1: &QuadratureRule, rule2: &QuadratureRule) -> Result<Complex64>
where
    G: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    let outer = rule1.nodes();
    let inner = rule2.nodes();
    let partial: Result<Vec<Complex64>> = outer
        .par_iter()
        .map(|&(z1, w1)| {
            let mut terms = Vec::with_capacity(inner.len());
            for &(z2, w2) in &inner {
                let v = g(z1, z2);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(non_finite(&[z1, z2]));
                }
                terms.push(v * w2);
            }
            Ok(ksum_c(terms) * w1)
        })
        .collect();
    Ok(ksum_c(partial?))
}

/// Real-valued tensor quadrature over precomputed node data.
///
/// `left[i]` and `right[j]` carry per-node payloads; the integrand is
/// `g(left_i, right_j)` and the result is `sum_i sum_j wl_i wr_j g`.
pub fn tensor_sum<A, B, G>(left: &[(A, f64)], right: &[(B, f64)], g: G) -> Result<f64>
where
    A: Sync,
    B: Sync,
    G: Fn(&A, &B) -> f64 + Sync,
{
    let partial: Result<Vec<f64>> = left
        .par_iter()
        .enumerate()
        .map(|(i, (a, wa))| {
            let mut s = crate::numeric::KahanSum::new();
            for (b, wb) in right {
                let v = g(a, b);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        node: format!("outer node {i}"),
                    });
                }
                s.add(wb * v);
            }
            Ok(wa * s.value())
        })
        .collect();
    Ok(ksum(partial?))
}

/// Average of `f` over the Euclidean disc `|z - center| < radius`.
pub fn disc_average<F: Fn(Complex64) -> Result<f64>>(
    center: Complex64,
    radius: f64,
    resolution: Resolution,
    f: F,
) -> Result<f64> {
    let rule = QuadratureRule::new(RadialWeight::Standard { gamma: 0.0 }, resolution, 1)?;
    let mut terms = Vec::with_capacity(rule.len());
    for (z, w) in rule.nodes() {
        let p = center + z * radius;
        let v = f(p)?;
        if !v.is_finite() {
            return Err(non_finite(&[p]));
        }
        terms.push(w * v);
    }
    Ok(ksum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_rule_masses() {
        for &(gamma, mass) in &[(0.0, 1.0), (1.0, 0.5), (0.5, 1.0 / 1.5), (-0.5, 2.0)] {
            let rule = build_rule(gamma, 8, 16).unwrap();
            assert!((rule.total_mass() - mass).abs() < 1e-12 * mass);
        }
    }

    #[test]
    fn second_moment() {
        let rule = build_rule(0.0, 4, 8).unwrap();
        let v = rule.integrate(|z| z.norm_sqr()).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn graded_standard_rule_matches_plain() {
        let plain = build_rule(0.4, 24, 16).unwrap();
        let graded =
            QuadratureRule::new(RadialWeight::Standard { gamma: 0.4 }, Resolution::new(48, 16), 4)
                .unwrap();
        let f = |z: Complex64| (1.0 + z.re).powi(3) + z.norm_sqr().powi(5);
        let a = plain.integrate(f).unwrap();
        let b = graded.integrate(f).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn graded_rule_resolves_log_singularity() {
        // \int (log 1/|z|)^{1/2} dA = Gamma(3/2) / 2^{1/2}
        let exact = statrs::function::gamma::gamma(1.5) / 2f64.sqrt();
        let rule = QuadratureRule::new(
            RadialWeight::Logarithmic { gamma: 0.5 },
            Resolution::new(40, 8),
            4,
        )
        .unwrap();
        assert!((rule.total_mass() - exact).abs() < 1e-10, "{}", rule.total_mass());
    }

    #[test]
    fn rejects_small_orders() {
        assert!(build_rule(0.0, 3, 8).is_err());
        assert!(build_rule(0.0, 4, 7).is_err());
        assert!(build_rule(-1.0, 4, 8).is_err());
    }

    #[test]
    fn integrate2d_product_moment() {
        let r = build_rule(0.0, 4, 8).unwrap();
        let v = integrate2d(|a, b| Complex64::new(a.norm_sqr() * b.norm_sqr(), 0.0), &r, &r).unwrap();
        assert!((v.re - 0.25).abs() < 1e-14 && v.im.abs() < 1e-15);
        let one = integrate2d(|_, _| Complex64::new(1.0, 0.0), &r, &r).unwrap();
        assert!((one.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate2d_reports_non_finite() {
        let r = build_rule(0.0, 4, 8).unwrap();
        let err = integrate2d(|_, _| Complex64::new(f64::NAN, 0.0), &r, &r).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn disc_average_of_harmonic_is_center_value() {
        let c = Complex64::new(0.3, -0.2);
        let avg = disc_average(c, 0.1, Resolution::new(8, 16), |z| Ok((z * z).re)).unwrap();
        assert!((avg - (c * c).re).abs() < 1e-14);
    }
}
