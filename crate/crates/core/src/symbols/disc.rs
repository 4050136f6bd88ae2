use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{cluster, polynomial_roots, CLUSTER_TOL};
use crate::error::{domain, Error, Result};

/// Points on the validation ring.
pub const VALIDATION_POINTS: usize = 720;
/// Radius of the validation ring.
pub const VALIDATION_RADIUS: f64 = 1.0 - 1e-6;
/// Allowed overshoot of `|phi|` on the validation ring.
pub const VALIDATION_SLACK: f64 = 1e-9;
/// Largest accepted residual `|phi(z) - w|` of a computed preimage.
pub const PREIMAGE_RESIDUAL: f64 = 1e-8;
/// Roots this close to the unit circle cannot be classified.
pub const BOUNDARY_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn unit() -> Complex64 {
    ONE
}

/// Variants of a disc self-map as they appear in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum SymbolSpec {
    #[serde(rename = "poly")]
    Polynomial { coeffs: Vec<Complex64> },
    #[serde(rename = "moebius")]
    Moebius { alpha: Complex64 },
    #[serde(rename = "blaschke")]
    FiniteBlaschke {
        zeros: Vec<Complex64>,
        #[serde(default = "unit")]
        factor: Complex64,
    },
}

/// A holomorphic self-map of the unit disc, validated at construction.
///
/// Möbius maps follow `phi_alpha(z) = (alpha - z) / (1 - conj(alpha) z)`,
/// which is its own inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolSpec", into = "SymbolSpec")]
pub struct DiscSymbol {
    spec: SymbolSpec,
}

/// One solution of `phi(z) = w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preimage {
    pub z: Complex64,
    pub multiplicity: usize,
}

impl TryFrom<SymbolSpec> for DiscSymbol {
    type Error = Error;

    fn try_from(spec: SymbolSpec) -> Result<Self> {
        match spec {
            SymbolSpec::Polynomial { coeffs } => Self::polynomial(coeffs),
            SymbolSpec::Moebius { alpha } => Self::moebius(alpha),
            SymbolSpec::FiniteBlaschke { zeros, factor } => Self::blaschke(zeros, factor),
        }
    }
}

impl From<DiscSymbol> for SymbolSpec {
    fn from(s: DiscSymbol) -> Self {
        s.spec
    }
}

impl DiscSymbol {
    pub fn identity() -> Self {
        Self {
            spec: SymbolSpec::Polynomial {
                coeffs: vec![ZERO, ONE],
            },
        }
    }

    /// `sum coeffs[k] z^k`; trailing zero coefficients are dropped.
    pub fn polynomial(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain("polynomial coefficients must be finite"));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self::validated(SymbolSpec::Polynomial { coeffs })
    }

    pub fn moebius(alpha: Complex64) -> Result<Self> {
        if !(alpha.norm() < 1.0) {
            return Err(domain(format!("Möbius parameter {alpha} must lie in the open disc")));
        }
        Self::validated(SymbolSpec::Moebius { alpha })
    }

    pub fn blaschke(zeros: Vec<Complex64>, factor: Complex64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(domain("a Blaschke product needs at least one zero"));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(domain(format!("Blaschke zero {z} must lie in the open disc")));
        }
        if (factor.norm() - 1.0).abs() > 1e-12 {
            return Err(domain(format!("Blaschke factor {factor} must be unimodular")));
        }
        Self::validated(SymbolSpec::FiniteBlaschke { zeros, factor })
    }

    fn validated(spec: SymbolSpec) -> Result<Self> {
        let s = Self { spec };
        let worst = s.boundary_max();
        if !(worst <= 1.0 + VALIDATION_SLACK) {
            return Err(domain(format!(
                "symbol is not a self-map of the disc: |phi| reaches {worst} on the ring |z| = {VALIDATION_RADIUS}"
            )));
        }
        Ok(s)
    }

    /// Largest `|phi|` on the validation ring.
    pub fn boundary_max(&self) -> f64 {
        (0..VALIDATION_POINTS)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / VALIDATION_POINTS as f64;
                self.eval_unchecked(Complex64::from_polar(VALIDATION_RADIUS, t)).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn spec(&self) -> &SymbolSpec {
        &self.spec
    }

    /// Number of preimages of a generic point, counting those outside the disc
    /// for polynomials.
    pub fn degree(&self) -> usize {
        match &self.spec {
            SymbolSpec::Polynomial { coeffs } => coeffs.len() - 1,
            SymbolSpec::Moebius { .. } => 1,
            SymbolSpec::FiniteBlaschke { zeros, .. } => zeros.len(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(&self.spec, SymbolSpec::Polynomial { coeffs } if coeffs[..] == [ZERO, ONE])
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_inside(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_inside(z)?;
        Ok(self.derivative_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match &self.spec {
            SymbolSpec::Polynomial { coeffs } => coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c),
            SymbolSpec::Moebius { alpha } => moebius(*alpha, z),
            SymbolSpec::FiniteBlaschke { zeros, factor } => zeros
                .iter()
                .fold(*factor, |acc, &a| acc * (z - a) / (ONE - a.conj() * z)),
        }
    }

    pub(crate) fn derivative_unchecked(&self, z: Complex64) -> Complex64 {
        match &self.spec {
            SymbolSpec::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(ZERO, |acc, (k, &c)| acc * z + c * k as f64),
            SymbolSpec::Moebius { alpha } => {
                let d = ONE - alpha.conj() * z;
                (alpha.norm_sqr() - 1.0) / (d * d)
            }
            SymbolSpec::FiniteBlaschke { zeros, factor } => {
                // product rule with prefix and suffix products, safe at the zeros
                let b: Vec<Complex64> = zeros
                    .iter()
                    .map(|&a| (z - a) / (ONE - a.conj() * z))
                    .collect();
                let n = b.len();
                let mut suffix = vec![ONE; n + 1];
                for j in (0..n).rev() {
                    suffix[j] = suffix[j + 1] * b[j];
                }
                let mut prefix = ONE;
                let mut sum = ZERO;
                for (j, &a) in zeros.iter().enumerate() {
                    let d = ONE - a.conj() * z;
                    let db = (1.0 - a.norm_sqr()) / (d * d);
                    sum += prefix * db * suffix[j + 1];
                    prefix *= b[j];
                }
                *factor * sum
            }
        }
    }

    /// `phi(0)`.
    pub fn at_origin(&self) -> Complex64 {
        self.eval_unchecked(ZERO)
    }

    /// All solutions of `phi(z) = w` in the open disc, with multiplicity.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Preimage>> {
        if !(w.norm() < 1.0) {
            return Err(domain(format!("target point {w} must lie in the open disc")));
        }
        let poly: Vec<Complex64> = match &self.spec {
            SymbolSpec::Moebius { alpha } => {
                return Ok(vec![Preimage {
                    z: moebius(*alpha, w),
                    multiplicity: 1,
                }])
            }
            SymbolSpec::Polynomial { coeffs } => {
                if coeffs.len() == 1 {
                    return Err(domain("preimages of a constant symbol are not a finite set"));
                }
                let mut p = coeffs.clone();
                p[0] -= w;
                p
            }
            SymbolSpec::FiniteBlaschke { zeros, factor } => {
                // factor * prod (z - a_j) - w * prod (1 - conj(a_j) z)
                let mut num = vec![*factor];
                let mut den = vec![ONE];
                for &a in zeros {
                    num = mul_linear(&num, -a, ONE);
                    den = mul_linear(&den, ONE, -a.conj());
                }
                num.iter().zip(&den).map(|(&n, &d)| n - w * d).collect()
            }
        };
        let roots = polynomial_roots(&poly)?;
        let mut inside = Vec::new();
        for z in roots {
            let m = z.norm();
            if (m - 1.0).abs() < BOUNDARY_TOL {
                return Err(Error::BoundaryAmbiguity {
                    re: z.re,
                    im: z.im,
                    tol: BOUNDARY_TOL,
                });
            }
            if m < 1.0 {
                inside.push(z);
            }
        }
        let found: Vec<Preimage> = cluster(&inside, CLUSTER_TOL)
            .into_iter()
            .map(|(z, multiplicity)| Preimage { z, multiplicity })
            .collect();
        for p in &found {
            let r = (self.eval_unchecked(p.z) - w).norm();
            if !(r <= PREIMAGE_RESIDUAL) {
                return Err(Error::NumericalFailure(format!(
                    "preimage {} of {w} has residual {r:e}",
                    p.z
                )));
            }
        }
        if let SymbolSpec::FiniteBlaschke { zeros, .. } = &self.spec {
            let total: usize = found.iter().map(|p| p.multiplicity).sum();
            if total != zeros.len() {
                return Err(Error::NumericalFailure(format!(
                    "Blaschke product of degree {} has {total} preimages of {w} in the disc",
                    zeros.len()
                )));
            }
        }
        Ok(found)
    }
}

/// `(alpha - z) / (1 - conj(alpha) z)`.
pub fn moebius(alpha: Complex64, z: Complex64) -> Complex64 {
    (alpha - z) / (ONE - alpha.conj() * z)
}

/// `p(z) * (c0 + c1 z)` on ascending coefficients.
fn mul_linear(p: &[Complex64], c0: Complex64, c1: Complex64) -> Vec<Complex64> {
    let mut out = vec![ZERO; p.len() + 1];
    for (k, &a) in p.iter().enumerate() {
        out[k] += a * c0;
        out[k + 1] += a * c1;
    }
    out
}

fn check_inside(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("point {z} is not in the open disc")))
    }
}
