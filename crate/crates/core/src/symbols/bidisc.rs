use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disc::{DiscSymbol, VALIDATION_POINTS, VALIDATION_RADIUS, VALIDATION_SLACK};
use crate::analytic::TaylorGrid2D;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BidiscSpec {
    Separated { phi1: DiscSymbol, phi2: DiscSymbol },
    PolyPair { p1: TaylorGrid2D, p2: TaylorGrid2D },
}

/// A holomorphic self-map of the bidisc.
///
/// Separated maps `(z1, z2) -> (phi1(z1), phi2(z2))` are self-maps by
/// construction; polynomial pairs are checked on a grid of the torus
/// `|z1| = |z2| = 1 - 1e-6`, where the maximum modulus is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BidiscSpec", into = "BidiscSpec")]
pub struct BidiscSymbol {
    spec: BidiscSpec,
}

impl TryFrom<BidiscSpec> for BidiscSymbol {
    type Error = Error;

    fn try_from(spec: BidiscSpec) -> Result<Self> {
        match spec {
            BidiscSpec::Separated { phi1, phi2 } => Ok(Self::separated(phi1, phi2)),
            BidiscSpec::PolyPair { p1, p2 } => Self::poly_pair(p1, p2),
        }
    }
}

impl From<BidiscSymbol> for BidiscSpec {
    fn from(s: BidiscSymbol) -> Self {
        s.spec
    }
}

impl BidiscSymbol {
    pub fn separated(phi1: DiscSymbol, phi2: DiscSymbol) -> Self {
        Self {
            spec: BidiscSpec::Separated { phi1, phi2 },
        }
    }

    pub fn identity() -> Self {
        Self::separated(DiscSymbol::identity(), DiscSymbol::identity())
    }

    pub fn poly_pair(p1: TaylorGrid2D, p2: TaylorGrid2D) -> Result<Self> {
        let worst = torus_max(&p1).max(torus_max(&p2));
        if !(worst <= 1.0 + VALIDATION_SLACK) {
            return Err(domain(format!(
                "polynomial pair is not a self-map of the bidisc: a component reaches modulus {worst} on the validation torus"
            )));
        }
        Ok(Self {
            spec: BidiscSpec::PolyPair { p1, p2 },
        })
    }

    pub fn spec(&self) -> &BidiscSpec {
        &self.spec
    }

    /// The two factors of a separated symbol.
    pub fn as_separated(&self) -> Result<(&DiscSymbol, &DiscSymbol)> {
        match &self.spec {
            BidiscSpec::Separated { phi1, phi2 } => Ok((phi1, phi2)),
            BidiscSpec::PolyPair { .. } => Err(Error::Type(
                "this operation needs a separated symbol, got a polynomial pair".into(),
            )),
        }
    }

    pub fn eval(&self, z: [Complex64; 2]) -> Result<[Complex64; 2]> {
        if !(z[0].norm() < 1.0 && z[1].norm() < 1.0) {
            return Err(domain(format!("point ({}, {}) is not in the open bidisc", z[0], z[1])));
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        match &self.spec {
            BidiscSpec::Separated { phi1, phi2 } => [phi1.eval_unchecked(z[0]), phi2.eval_unchecked(z[1])],
            BidiscSpec::PolyPair { p1, p2 } => [p1.eval_unchecked(z[0], z[1]), p2.eval_unchecked(z[0], z[1])],
        }
    }
}

fn torus_max(p: &TaylorGrid2D) -> f64 {
    let ring: Vec<Complex64> = (0..VALIDATION_POINTS)
        .map(|j| Complex64::from_polar(VALIDATION_RADIUS, 2.0 * PI * j as f64 / VALIDATION_POINTS as f64))
        .collect();
    ring.par_iter()
        .map(|&z1| {
            let slice = p.slice_z2(z1);
            ring.iter().map(|&z2| slice.eval(z2).norm()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn separated_evaluates_componentwise() {
        let phi = BidiscSymbol::separated(
            DiscSymbol::moebius(c(0.5)).unwrap(),
            DiscSymbol::polynomial(vec![c(0.0), c(0.0), c(1.0)]).unwrap(),
        );
        let w = phi.eval([c(0.0), c(0.3)]).unwrap();
        assert_eq!(w[0], c(0.5));
        assert!((w[1] - c(0.09)).norm() < 1e-16);
        assert!(phi.eval([c(1.0), c(0.0)]).is_err());
    }

    #[test]
    fn poly_pair_validation() {
        // (z1 z2, (z1 + z2)/2) maps the bidisc into itself
        let p1 = TaylorGrid2D::monomial(1, 1, c(1.0));
        let p2 = TaylorGrid2D::from_fn(1, 1, |k, l| if k + l == 1 { c(0.5) } else { c(0.0) });
        let phi = BidiscSymbol::poly_pair(p1.clone(), p2.clone()).unwrap();
        assert!(phi.as_separated().is_err());
        let bad = TaylorGrid2D::from_fn(1, 1, |k, l| if k + l == 1 { c(0.6) } else { c(0.0) });
        assert!(BidiscSymbol::poly_pair(p1, bad).is_err());
    }

    #[test]
    fn json_forms() {
        let s: BidiscSymbol = serde_json::from_str(
            r#"{"type":"separated","phi1":{"type":"moebius","alpha":[0.5,0]},"phi2":{"type":"poly","coeffs":[[0,0],[1,0]]}}"#,
        )
        .unwrap();
        assert!(s.as_separated().unwrap().1.is_identity());
        let back: BidiscSymbol = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
