//! Empirical pull-back measures `V_beta o Phi^{-1}`.

use serde::{Deserialize, Serialize};

use super::BoxUnion;
use crate::analytic::BergmanWeight;
use crate::error::{domain, Result};
use crate::quadrature::{sample_dvbeta, McEstimate, SampleCloud};
use crate::symbols::BidiscSymbol;

/// Below this many samples a box with no hits is reported as unresolved.
pub const MIN_RESOLVED_SAMPLES: usize = 10_000;

/// `V_beta o Phi^{-1}` realised by pushing a seeded `V_beta` sample through
/// `Phi`. The total mass `1/(beta+1)^2` is inherited from the sample weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackMeasure {
    pub symbol: BidiscSymbol,
    pub beta: BergmanWeight,
    pub samples: usize,
    pub seed: u64,
}

impl PullbackMeasure {
    pub fn new(symbol: BidiscSymbol, beta: BergmanWeight, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(domain("pull-back measure needs at least one sample"));
        }
        Ok(Self {
            symbol,
            beta,
            samples,
            seed,
        })
    }

    /// Sample cloud of the image measure: points `Phi(z_j)`, weights unchanged.
    pub fn cloud(&self) -> Result<SampleCloud> {
        let mut c = sample_dvbeta(self.beta.beta(), self.samples, self.seed)?;
        for p in c.points.iter_mut() {
            *p = self.symbol.eval_unchecked(*p);
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackVolume {
    pub estimate: McEstimate,
    pub hits: usize,
    pub warning: Option<String>,
}

/// Mass of a box union under a sampled measure.
pub fn union_volume(cloud: &SampleCloud, boxes: &BoxUnion) -> PullbackVolume {
    let estimate = cloud.estimate(|z| f64::from(u8::from(boxes.contains(z))));
    let hits = cloud.points.iter().filter(|z| boxes.contains(z)).count();
    let warning = (hits == 0 && cloud.len() < MIN_RESOLVED_SAMPLES).then(|| {
        format!(
            "no sample landed in the box union with N = {} < {MIN_RESOLVED_SAMPLES}; the zero volume is unresolved",
            cloud.len()
        )
    });
    PullbackVolume {
        estimate,
        hits,
        warning,
    }
}

/// `V_beta(Phi^{-1}(union of boxes))` by Monte Carlo; deterministic for a fixed seed.
pub fn pullback_box_volume(m: &PullbackMeasure, boxes: &BoxUnion) -> Result<PullbackVolume> {
    Ok(union_volume(&m.cloud()?, boxes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::{box_volume, CarlesonBox};
    use crate::symbols::DiscSymbol;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn squares_preserve_total_mass() {
        let sq = DiscSymbol::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let phi = BidiscSymbol::separated(sq.clone(), sq);
        for beta in [0.0, 1.0] {
            let m = PullbackMeasure::new(phi.clone(), BergmanWeight::new(beta).unwrap(), 5000, 3).unwrap();
            let all = BoxUnion(vec![CarlesonBox::new([0.0, 0.0], [2.0, 2.0]).unwrap()]);
            let v = pullback_box_volume(&m, &all).unwrap();
            assert!((v.estimate.value - 1.0 / (beta + 1.0f64).powi(2)).abs() < 1e-12);
            assert_eq!(v.hits, 5000);
        }
    }

    #[test]
    fn moebius_pullback_matches_change_of_variables() {
        // the Moebius map is an involution, so the preimage of a disc cap
        // has area int_{cap} |phi'(w)|^2 dA(w)
        let alpha = c(0.5, 0.0);
        let phi = BidiscSymbol::separated(DiscSymbol::moebius(alpha).unwrap(), DiscSymbol::identity());
        let m = PullbackMeasure::new(phi, BergmanWeight::new(0.0).unwrap(), 400_000, 17).unwrap();
        let b = CarlesonBox::new([0.0, 1.0], [0.4, 0.6]).unwrap();
        let v = pullback_box_volume(&m, &BoxUnion(vec![b])).unwrap().estimate;
        let n = 800;
        let centre = Complex64::from_polar(1.0, 0.0);
        let mut first = 0.0;
        for i in 0..n {
            let rho = (i as f64 + 0.5) * 0.4 / n as f64;
            for j in 0..4 * n {
                let t = 2.0 * PI * (j as f64 + 0.5) / (4 * n) as f64;
                let w = centre + Complex64::from_polar(rho, t);
                if w.norm() < 1.0 {
                    let jac = (1.0 - alpha.norm_sqr()) / (1.0 - alpha.conj() * w).norm_sqr();
                    first += jac * jac * rho * (0.4 / n as f64) * (2.0 * PI / (4 * n) as f64) / PI;
                }
            }
        }
        let second = super::super::disc_cap_mass(0.6, 0.0, 64).unwrap();
        let exact = first * second;
        assert!((v.value - exact).abs() < 4.0 * v.stderr + 2e-3 * exact, "{v:?} vs {exact}");
    }

    #[test]
    fn identity_matches_quadrature_on_unions() {
        let m = PullbackMeasure::new(BidiscSymbol::identity(), BergmanWeight::new(0.0).unwrap(), 200_000, 5).unwrap();
        let cloud = m.cloud().unwrap();
        let b = CarlesonBox::new([0.5, -0.5], [0.7, 0.9]).unwrap();
        let q = box_volume(&b, m.beta, None).unwrap().value;
        let v = union_volume(&cloud, &BoxUnion(vec![b, b])).estimate;
        assert!((v.value - q).abs() < 4.0 * v.stderr);
    }

    #[test]
    fn empty_hits_warn_only_when_undersampled() {
        let tiny = BoxUnion(vec![CarlesonBox::new([0.0, 0.0], [1e-4, 1e-4]).unwrap()]);
        let few = PullbackMeasure::new(BidiscSymbol::identity(), BergmanWeight::new(0.0).unwrap(), 100, 1).unwrap();
        let v = pullback_box_volume(&few, &tiny).unwrap();
        assert_eq!(v.hits, 0);
        assert!(v.warning.is_some());
        let many = PullbackMeasure { samples: 20_000, ..few };
        assert!(pullback_box_volume(&many, &tiny).unwrap().warning.is_none());
    }
}
