//! Two exact identities behind the separated-symbol results, checked by
//! computing both sides independently.
//!
//! Both identities are exact when the pulled-back side carries the weight
//! `(log 1/|z|)^{1-2a} dA`, the weight that defines `N_{phi,a}`. With
//! `(1-|z|^2)^{1-2a}` they hold only up to constants.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{compose_separated, Composition, COMPOSITION_ORDER};
use crate::analytic::{abs2_tensor, log_energy_parts, EnergyParts, TaylorGrid2D, WeightPair};
use crate::error::{domain, Error, Result};
use crate::nevanlinna::{counting_function_detail, FlagReason};
use crate::numeric::{ksum, relative_gap};
use crate::quadrature::{tensor_sum, QuadratureRule, RadialWeight, Resolution};
use crate::symbols::{moebius, BidiscSymbol, DiscSymbol};

/// Default resolution of both identity checks.
pub const IDENTITY_RESOLUTION: Resolution = Resolution::new(48, 96);

/// Grading exponent of the radial rules used for both sides.
const GRADING: u32 = 4;

/// Integrands for the change-of-variables identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestIntegrand {
    One,
    /// `exp(Re w1 + Re w2)`.
    Smooth,
    /// `|1 - s conj(w2) w1|^{-2}` with `0 <= s < 1`.
    ShiftedKernel { s: f64 },
}

impl TestIntegrand {
    pub fn eval(&self, w: [Complex64; 2]) -> f64 {
        match *self {
            TestIntegrand::One => 1.0,
            TestIntegrand::Smooth => (w[0].re + w[1].re).exp(),
            TestIntegrand::ShiftedKernel { s } => (1.0 - s * w[1].conj() * w[0]).norm_sqr().recip(),
        }
    }

    /// `sum_i sum_j u_i v_j g(x_i, y_j)`, factorised when `g` is a product.
    pub fn tensor_integral(&self, left: &[(Complex64, f64)], right: &[(Complex64, f64)]) -> Result<f64> {
        let sum = |nodes: &[(Complex64, f64)], h: fn(Complex64) -> f64| ksum(nodes.iter().map(|&(x, w)| w * h(x)));
        let v = match self {
            TestIntegrand::One => sum(left, |_| 1.0) * sum(right, |_| 1.0),
            TestIntegrand::Smooth => sum(left, |x| x.re.exp()) * sum(right, |x| x.re.exp()),
            TestIntegrand::ShiftedKernel { .. } => {
                return tensor_sum(left, right, |p: &Complex64, q: &Complex64| self.eval([*p, *q]))
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                node: "separable tensor integral".into(),
            })
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TestIntegrand::ShiftedKernel { s } if !(0.0..1.0).contains(&s) => {
                Err(domain(format!("kernel shift s = {s} must lie in [0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

/// Both sides of an identity at one resolution and after doubling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub resolution: Resolution,
    pub lhs_doubled: f64,
    pub rhs_doubled: f64,
    pub gap_doubled: f64,
    pub flags: Vec<String>,
}

impl IdentityReport {
    /// Whether the doubled run at least halved the gap (gaps at round-off
    /// level count as halved).
    pub fn gap_halved(&self) -> bool {
        self.gap_doubled <= (0.5 * self.gap).max(1e-9)
    }
}

/// Weighted nodes `(phi(z), w |phi'(z)|^2)` of the rule for
/// `(log 1/|z|)^{1-2a} dA(z)`: integrating `G` against them gives
/// `\int G(phi) |phi'|^2 (log 1/|z|)^{1-2a} dA`.
pub fn pullback_nodes(phi: &DiscSymbol, a: f64, res: Resolution) -> Result<Vec<(Complex64, f64)>> {
    let rule = QuadratureRule::new(RadialWeight::Logarithmic { gamma: 1.0 - 2.0 * a }, res, GRADING)?;
    Ok(rule
        .nodes()
        .into_iter()
        .map(|(z, w)| (phi.eval_unchecked(z), w * phi.derivative_unchecked(z).norm_sqr()))
        .collect())
}

/// Weighted nodes `(w, weight)` whose sums approximate
/// `\int G(w) N_{phi,a}(w) dA(w)`, with the count of nodes at critical values.
///
/// The rule lives in `u = phi_c(w)`, `c = phi(0)`, which moves the logarithmic
/// singularity of `N` to the origin where the graded rule resolves it; the
/// Jacobi weight `(1-|u|^2)^{1-2a}` carries the boundary decay of `N`.
pub fn counting_nodes(phi: &DiscSymbol, a: f64, res: Resolution) -> Result<(Vec<(Complex64, f64)>, usize)> {
    let gamma = 1.0 - 2.0 * a;
    let rule = QuadratureRule::new(RadialWeight::Standard { gamma }, res, GRADING)?;
    let c = phi.at_origin();
    let nodes: Vec<((Complex64, f64), bool)> = rule
        .nodes()
        .par_iter()
        .map(|&(u, w)| {
            let (x, jac) = if c == Complex64::new(0.0, 0.0) {
                (u, 1.0)
            } else {
                let d = 1.0 - c.conj() * u;
                (moebius(c, u), ((1.0 - c.norm_sqr()) / d.norm_sqr()).powi(2))
            };
            let n = counting_function_detail(phi, a, x)?;
            let weight = w * jac * n.value / (1.0 - u.norm_sqr()).powf(gamma);
            if !weight.is_finite() {
                return Err(Error::NonFinite {
                    node: format!("counting-function node w = {x}"),
                });
            }
            Ok(((x, weight), n.flag == Some(FlagReason::CriticalValue)))
        })
        .collect::<Result<_>>()?;
    let critical = nodes.iter().filter(|n| n.1).count();
    let out = nodes.into_iter().map(|n| n.0).collect();
    Ok((out, critical))
}

fn cov_sides(
    phi1: &DiscSymbol,
    phi2: &DiscSymbol,
    a: WeightPair,
    g: &TestIntegrand,
    res: Resolution,
    flags: &mut Vec<String>,
) -> Result<(f64, f64)> {
    let l1 = pullback_nodes(phi1, a.a1(), res)?;
    let l2 = pullback_nodes(phi2, a.a2(), res)?;
    let lhs = g.tensor_integral(&l1, &l2)?;
    let (r1, c1) = counting_nodes(phi1, a.a1(), res)?;
    let (r2, c2) = counting_nodes(phi2, a.a2(), res)?;
    if c1 + c2 > 0 {
        flags.push(format!("{} quadrature nodes at critical values at {}x{}", c1 + c2, res.radial, res.angular));
    }
    let rhs = g.tensor_integral(&r1, &r2)?;
    Ok((lhs, rhs))
}

/// `\int g(phi1, phi2) |phi1'|^2 |phi2'|^2 dA_{a1} dA_{a2}` against
/// `\int g N_{phi1,a1} N_{phi2,a2} dV`, at `res` and at doubled resolution.
pub fn verify_change_of_variables(
    phi1: &DiscSymbol,
    phi2: &DiscSymbol,
    a: WeightPair,
    g: &TestIntegrand,
    res: Resolution,
) -> Result<IdentityReport> {
    g.validate()?;
    let mut flags = vec!["pulled-back side weighted by (log 1/|z|)^(1-2a)".to_string()];
    let (lhs, rhs) = cov_sides(phi1, phi2, a, g, res, &mut flags)?;
    let (lhs_doubled, rhs_doubled) = cov_sides(phi1, phi2, a, g, res.doubled(), &mut flags)?;
    Ok(IdentityReport {
        lhs,
        rhs,
        gap: relative_gap(lhs, rhs),
        resolution: res,
        lhs_doubled,
        rhs_doubled,
        gap_doubled: relative_gap(lhs_doubled, rhs_doubled),
        flags,
    })
}

/// Per-term comparison of `||C_Phi f||^2` computed two ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    /// Energy of the composed series under the logarithmic weights.
    pub direct: EnergyParts,
    /// Counting-function expansion.
    pub expansion: EnergyParts,
    pub term_gaps: [f64; 4],
    pub total: IdentityReport,
    pub composition_order: usize,
    pub composition_tail: f64,
}

/// Counting-function side: `|f(Phi(0))|^2`, the slices through
/// `(., phi2(0))` and `(phi1(0), .)` weighted by `N_{phi_i}`, and the mixed
/// term weighted by `N_{phi1} N_{phi2}`.
pub fn counting_expansion(f: &TaylorGrid2D, phi1: &DiscSymbol, phi2: &DiscSymbol, a: WeightPair, res: Resolution) -> Result<EnergyParts> {
    let (c1, c2) = (phi1.at_origin(), phi2.at_origin());
    let (n1, _) = counting_nodes(phi1, a.a1(), res)?;
    let (n2, _) = counting_nodes(phi2, a.a2(), res)?;
    let d1 = f.partial_z1().slice_z1(c2);
    let d2 = f.partial_z2().slice_z2(c1);
    Ok(EnergyParts {
        constant: f.eval_unchecked(c1, c2).norm_sqr(),
        slice1: ksum(n1.iter().map(|&(w, m)| m * d1.eval(w).norm_sqr())),
        slice2: ksum(n2.iter().map(|&(w, m)| m * d2.eval(w).norm_sqr())),
        mixed: abs2_tensor(&f.mixed_partial(), &n1, &n2)?,
    })
}

fn expansion_sides(
    f: &TaylorGrid2D,
    comp: &Composition,
    phi1: &DiscSymbol,
    phi2: &DiscSymbol,
    a: WeightPair,
    res: Resolution,
) -> Result<(EnergyParts, EnergyParts)> {
    let direct = log_energy_parts(&comp.series, a, res)?;
    let expansion = counting_expansion(f, phi1, phi2, a, res)?;
    Ok((direct, expansion))
}

/// Checks `||f o Phi||^2` (direct, through the composed series) against its
/// counting-function expansion for a separated `Phi`.
///
/// Fails with an accuracy error when the estimated truncation tail of the
/// composition exceeds `tol` relative to the norm.
pub fn verify_separated_norm_expansion(
    phi: &BidiscSymbol,
    a: WeightPair,
    f: &TaylorGrid2D,
    res: Resolution,
    tol: f64,
) -> Result<ExpansionReport> {
    let (phi1, phi2) = phi.as_separated()?;
    let comp = compose_separated(f, phi1, phi2, COMPOSITION_ORDER);
    let (direct, expansion) = expansion_sides(f, &comp, phi1, phi2, a, res)?;
    let total = direct.total();
    if comp.tail_estimate > tol * total.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Accuracy {
            estimate: comp.tail_estimate / total.abs().max(f64::MIN_POSITIVE),
            tolerance: tol,
            context: format!("composition truncated at order {COMPOSITION_ORDER}"),
        });
    }
    let (direct2, expansion2) = expansion_sides(f, &comp, phi1, phi2, a, res.doubled())?;
    let gap = |x: f64, y: f64| relative_gap(x, y);
    let term_gaps = [
        gap(direct.constant, expansion.constant),
        gap(direct.slice1, expansion.slice1),
        gap(direct.slice2, expansion.slice2),
        gap(direct.mixed, expansion.mixed),
    ];
    let report = IdentityReport {
        lhs: direct.total(),
        rhs: expansion.total(),
        gap: gap(direct.total(), expansion.total()),
        resolution: res,
        lhs_doubled: direct2.total(),
        rhs_doubled: expansion2.total(),
        gap_doubled: gap(direct2.total(), expansion2.total()),
        flags: vec![
            "direct side weighted by (log 1/|z|)^(1-2a)".to_string(),
            "slices taken through phi(0)".to_string(),
        ],
    };
    Ok(ExpansionReport {
        direct,
        expansion,
        term_gaps,
        total: report,
        composition_order: comp.order,
        composition_tail: comp.tail_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const RES: Resolution = Resolution::new(24, 48);

    #[test]
    fn identity_symbols_give_matching_sides() {
        let id = DiscSymbol::identity();
        let a = WeightPair::new(0.25, 0.4).unwrap();
        let r = verify_change_of_variables(&id, &id, a, &TestIntegrand::Smooth, RES).unwrap();
        assert!(r.gap < 1e-6, "{r:?}");
    }

    #[test]
    fn moebius_constant_integrand() {
        let m = DiscSymbol::moebius(c(0.4, 0.0)).unwrap();
        let a = WeightPair::new(0.3, 0.3).unwrap();
        let r = verify_change_of_variables(&m, &m, a, &TestIntegrand::One, RES).unwrap();
        assert!(r.gap < 1e-3, "{r:?}");
    }

    #[test]
    fn counting_measure_of_square_has_closed_form_mass() {
        // \int N_{z^2,a} dA = 2 \int (log 1/|z|)^{1-2a} |z|^2 dA... checked via
        // the pulled-back side with G = 1
        let sq = DiscSymbol::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let a = 0.25;
        let (nodes, _) = counting_nodes(&sq, a, RES).unwrap();
        let mass = ksum(nodes.iter().map(|n| n.1));
        let pulled = ksum(pullback_nodes(&sq, a, RES).unwrap().iter().map(|n| n.1));
        // \int 4|z|^2 (log 1/|z|)^{1/2} dA = 4 Gamma(3/2) 2^{-1/2} / 2^{3/2}
        let exact = 4.0 * statrs::function::gamma::gamma(1.5) / 2f64.sqrt() / 2f64.powf(1.5);
        assert!((mass - exact).abs() < 1e-10 * exact, "{mass} vs {exact}");
        assert!((pulled - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn expansion_identity_pair() {
        let f = TaylorGrid2D::from_fn(2, 2, |k, l| c(1.0 / (1 + k + l) as f64, 0.0));
        let a = WeightPair::new(0.25, 0.25).unwrap();
        let r = verify_separated_norm_expansion(&BidiscSymbol::identity(), a, &f, RES, 1e-6).unwrap();
        assert!(r.total.gap < 1e-10, "{r:?}");
    }

    #[test]
    fn expansion_moebius_pair() {
        let phi = BidiscSymbol::separated(
            DiscSymbol::moebius(c(0.3, 0.0)).unwrap(),
            DiscSymbol::moebius(c(-0.2, 0.0)).unwrap(),
        );
        let f = TaylorGrid2D::monomial(1, 1, c(1.0, 0.0));
        let a = WeightPair::new(0.25, 0.25).unwrap();
        let r = verify_separated_norm_expansion(&phi, a, &f, RES, 1e-6).unwrap();
        assert!(r.total.gap < 1e-3, "{r:?}");
        assert!(r.term_gaps.iter().all(|g| *g < 1e-3), "{r:?}");
    }

    #[test]
    fn non_separated_rejected() {
        let p = TaylorGrid2D::monomial(1, 0, c(1.0, 0.0));
        let phi = BidiscSymbol::poly_pair(p.clone(), p.clone()).unwrap();
        let a = WeightPair::new(0.25, 0.25).unwrap();
        assert!(matches!(verify_separated_norm_expansion(&phi, a, &p, RES, 1e-6), Err(Error::Type(_))));
    }
}
