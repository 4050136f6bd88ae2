//! Coefficient and integral norms on the bidisc.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{BergmanWeight, TaylorGrid1D, TaylorGrid2D, WeightPair};
use crate::error::Result;
use crate::numeric::{ksum, KahanSum};
use crate::quadrature::{Estimate, QuadratureRule, RadialWeight, Resolution};

/// `sum (k+1)^{2 a1} (l+1)^{2 a2} |a_{k,l}|^2`, summed row-major with compensation.
pub fn dirichlet_norm_coeff(f: &TaylorGrid2D, a: WeightPair) -> f64 {
    let (e1, e2) = (2.0 * a.a1(), 2.0 * a.a2());
    ksum(
        f.iter()
            .map(|(k, l, c)| ((k + 1) as f64).powf(e1) * ((l + 1) as f64).powf(e2) * c.norm_sqr()),
    )
}

/// `\int |p|^2 d(rule)` for a one-variable polynomial.
pub fn abs2_integral_1d(p: &TaylorGrid1D, rule: &QuadratureRule) -> Result<f64> {
    if rule.resolution().angular > p.degree() {
        let m = radial_moments(rule, p.degree());
        return finite(ksum(p.coeffs.iter().zip(&m).map(|(c, m)| c.norm_sqr() * m)), "radial moment sum");
    }
    rule.integrate(|z| p.eval(z).norm_sqr())
}

/// `\int\int |F(z1, z2)|^2 d(rule1)(z1) d(rule2)(z2)`.
///
/// For each outer node the grid collapses to a one-variable polynomial in
/// `z2`, so the cost is `N1 (K L + N2 L)` rather than `N1 N2 K L`.
pub fn abs2_integral_2d(
    f: &TaylorGrid2D,
    rule1: &QuadratureRule,
    rule2: &QuadratureRule,
) -> Result<f64> {
    if rule1.resolution().angular > f.k_max() && rule2.resolution().angular > f.l_max() {
        return abs2_by_moments(f, rule1, rule2);
    }
    abs2_tensor(f, &rule1.nodes(), &rule2.nodes())
}

/// Tensor rule with enough angles to integrate `|F|^2` exactly in angle: the
/// monomials are then orthogonal and only the radial moments
/// `m_k = sum_i w_i r_i^{2k}` remain.
fn abs2_by_moments(f: &TaylorGrid2D, rule1: &QuadratureRule, rule2: &QuadratureRule) -> Result<f64> {
    let m1 = radial_moments(rule1, f.k_max());
    let m2 = radial_moments(rule2, f.l_max());
    finite(ksum(f.iter().map(|(k, l, c)| c.norm_sqr() * m1[k] * m2[l])), "radial moment sum")
}

fn radial_moments(rule: &QuadratureRule, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            ksum(
                rule.radii()
                    .iter()
                    .zip(rule.radial_weights())
                    .map(|(&r, &w)| w * r.powi(2 * k as i32)),
            )
        })
        .collect()
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::error::Error::NonFinite { node: what.into() })
    }
}

/// `sum_i sum_j w_i v_j |F(z_i, u_j)|^2` over two weighted point sets.
///
/// For each outer node the grid collapses to a one-variable polynomial in
/// `z2`, so the cost is `N1 (K L + N2 L)` rather than `N1 N2 K L`.
pub fn abs2_tensor(
    f: &TaylorGrid2D,
    outer: &[(Complex64, f64)],
    inner: &[(Complex64, f64)],
) -> Result<f64> {
    let partial: Vec<f64> = outer
        .par_iter()
        .map(|&(z1, w1)| {
            let slice = f.slice_z2(z1);
            let mut s = KahanSum::new();
            for &(z2, w2) in inner {
                s.add(w2 * slice.eval(z2).norm_sqr());
            }
            w1 * s.value()
        })
        .collect();
    let v = ksum(partial);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::error::Error::NonFinite {
            node: "tensor |F|^2 integral".into(),
        })
    }
}

/// The four pieces of the integral form of the Dirichlet-type norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub constant: f64,
    pub slice1: f64,
    pub slice2: f64,
    pub mixed: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        ksum([self.constant, self.slice1, self.slice2, self.mixed])
    }
}

/// `|f(0,0)|^2`, `\int |d1 f(z1,0)|^2`, `\int |d2 f(0,z2)|^2` and
/// `\int\int |d1 d2 f|^2` against the given rules.
pub fn energy_parts(
    f: &TaylorGrid2D,
    rule1: &QuadratureRule,
    rule2: &QuadratureRule,
) -> Result<EnergyParts> {
    let zero = Complex64::new(0.0, 0.0);
    let constant = f.get(0, 0).norm_sqr();
    let slice1 = abs2_integral_1d(&f.slice_z1(zero).derivative(), rule1)?;
    let slice2 = abs2_integral_1d(&f.slice_z2(zero).derivative(), rule2)?;
    let mixed = abs2_integral_2d(&f.mixed_partial(), rule1, rule2)?;
    Ok(EnergyParts {
        constant,
        slice1,
        slice2,
        mixed,
    })
}

fn rules_for(
    a: WeightPair,
    log: bool,
    res: Resolution,
) -> Result<(QuadratureRule, QuadratureRule)> {
    let (g1, g2) = a.gammas();
    let (w1, w2, grading) = if log {
        (
            RadialWeight::Logarithmic { gamma: g1 },
            RadialWeight::Logarithmic { gamma: g2 },
            4,
        )
    } else {
        (
            RadialWeight::Standard { gamma: g1 },
            RadialWeight::Standard { gamma: g2 },
            1,
        )
    };
    Ok((
        QuadratureRule::new(w1, res, grading)?,
        QuadratureRule::new(w2, res, grading)?,
    ))
}

fn estimate_with_doubling<F>(res: Resolution, tol: f64, context: &str, eval: F) -> Result<Estimate>
where
    F: Fn(Resolution) -> Result<(f64, usize)>,
{
    let (coarse, _) = eval(res)?;
    let (fine, nodes) = eval(res.doubled())?;
    Estimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        nodes_used: nodes,
    }
    .within(tol, context)
}

/// `|f(0,0)|^2 + D_a(f)` with the standard weights `(1-|z_i|^2)^{1-2 a_i} dA`.
///
/// The result carries a doubling-based error estimate; an estimate above
/// `tol` (relative) is an accuracy error.
pub fn dirichlet_energy_integral(
    f: &TaylorGrid2D,
    a: WeightPair,
    res: Resolution,
    tol: f64,
) -> Result<Estimate> {
    estimate_with_doubling(res, tol, "Dirichlet energy integral", |r| {
        let (r1, r2) = rules_for(a, false, r)?;
        Ok((energy_parts(f, &r1, &r2)?.total(), r1.len() + r2.len()))
    })
}

/// Energy with the logarithmic weights `(log 1/|z_i|)^{1-2 a_i} dA`.
///
/// This is the form in which the norm of a composition equals its
/// counting-function expansion exactly.
pub fn log_energy_parts(f: &TaylorGrid2D, a: WeightPair, res: Resolution) -> Result<EnergyParts> {
    let (r1, r2) = rules_for(a, true, res)?;
    energy_parts(f, &r1, &r2)
}

/// `\int_{D^2} |f|^2 dV_beta` with `dV_beta = (1-|z1|^2)^beta (1-|z2|^2)^beta dA dA`.
pub fn bergman_norm(
    f: &TaylorGrid2D,
    w: BergmanWeight,
    res: Resolution,
    tol: f64,
) -> Result<Estimate> {
    estimate_with_doubling(res, tol, "Bergman norm", |r| {
        let rule = QuadratureRule::new(RadialWeight::Standard { gamma: w.beta() }, r, 1)?;
        Ok((abs2_integral_2d(f, &rule, &rule)?, 2 * rule.len()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    const RES: Resolution = Resolution::new(8, 16);

    #[test]
    fn coefficient_norm_examples() {
        let a = WeightPair::new(0.5, 0.5).unwrap();
        assert_eq!(dirichlet_norm_coeff(&TaylorGrid2D::monomial(1, 1, c(1.0)), a), 4.0);
        let k = Complex64::new(2.0, -1.0);
        assert_eq!(dirichlet_norm_coeff(&TaylorGrid2D::constant(k), a), 5.0);
    }

    #[test]
    fn energy_examples() {
        let a = WeightPair::new(0.5, 0.5).unwrap();
        let e = dirichlet_energy_integral(&TaylorGrid2D::monomial(1, 1, c(1.0)), a, RES, 1e-10)
            .unwrap();
        assert!((e.value - 1.0).abs() < 1e-14);
        let e = dirichlet_energy_integral(&TaylorGrid2D::constant(c(3.0)), a, RES, 1e-10).unwrap();
        assert!((e.value - 9.0).abs() < 1e-14);
    }

    #[test]
    fn bergman_examples() {
        let one = TaylorGrid2D::constant(c(1.0));
        let b0 = BergmanWeight::new(0.0).unwrap();
        let b1 = BergmanWeight::new(1.0).unwrap();
        assert!((bergman_norm(&one, b0, RES, 1e-10).unwrap().value - 1.0).abs() < 1e-14);
        assert!((bergman_norm(&one, b1, RES, 1e-10).unwrap().value - 0.25).abs() < 1e-14);
        let z1 = TaylorGrid2D::monomial(1, 0, c(1.0));
        assert!((bergman_norm(&z1, b0, RES, 1e-10).unwrap().value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn under_resolved_energy_is_an_accuracy_error() {
        // degree 40 in z1 cannot be integrated by 4 radial nodes
        let f = TaylorGrid2D::from_fn(40, 1, |_, _| c(1.0));
        let a = WeightPair::new(0.25, 0.25).unwrap();
        let err = dirichlet_energy_integral(&f, a, Resolution::new(4, 8), 1e-10).unwrap_err();
        assert!(matches!(err, crate::error::Error::Accuracy { .. }));
    }

    #[test]
    fn moment_path_matches_pointwise_tensor() {
        let f = TaylorGrid2D::from_fn(5, 3, |k, l| Complex64::new((k + 2 * l) as f64 * 0.1, (k as f64 - l as f64) * 0.2));
        let r1 = QuadratureRule::new(RadialWeight::Logarithmic { gamma: 0.5 }, Resolution::new(12, 16), 4).unwrap();
        let r2 = QuadratureRule::new(RadialWeight::Standard { gamma: 0.2 }, Resolution::new(12, 16), 1).unwrap();
        let fast = abs2_integral_2d(&f, &r1, &r2).unwrap();
        let slow = abs2_tensor(&f, &r1.nodes(), &r2.nodes()).unwrap();
        assert!((fast - slow).abs() < 1e-13 * slow);
        let p = f.slice_z1(Complex64::new(0.3, 0.1));
        let fast = abs2_integral_1d(&p, &r1).unwrap();
        let slow = r1.integrate(|z| p.eval(z).norm_sqr()).unwrap();
        assert!((fast - slow).abs() < 1e-13 * slow);
    }

    #[test]
    fn log_energy_of_identity_slices() {
        // \int |1|^2 (log 1/|z|)^{1/2} dA = Gamma(3/2) 2^{-1/2}
        let f = TaylorGrid2D::from_fn(1, 1, |k, l| if k + l == 1 { c(1.0) } else { c(0.0) });
        let a = WeightPair::new(0.25, 0.25).unwrap();
        let p = log_energy_parts(&f, a, Resolution::new(32, 8)).unwrap();
        let exact = statrs::function::gamma::gamma(1.5) / 2f64.sqrt();
        assert!((p.slice1 - exact).abs() < 1e-10);
        assert!((p.slice2 - exact).abs() < 1e-10);
        assert_eq!(p.mixed, 0.0);
    }
}
