//! Small numeric helpers: compensated summation and a few closed forms.

use num_complex::Complex64;

/// Neumaier-compensated running sum. Summation order is the call order, so
/// results are bit-stable for a fixed sequence of inputs.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Compensated total; an infinite or NaN running sum is returned as is.
    pub fn value(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.comp
        } else {
            self.sum
        }
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Compensated complex sum (real and imaginary parts compensated separately).
pub fn ksum_c<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for z in iter {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Relative gap `|x - y| / max(|x|, |y|)`, zero when both vanish.
pub fn relative_gap(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

/// `ln(1/r)` for `0 < r <= 1`, accurate when `r` is close to 1.
pub fn log_inv(r: f64) -> f64 {
    if r > 0.5 {
        -(-(1.0 - r)).ln_1p()
    } else {
        -r.ln()
    }
}

/// `x^p` with the convention `x^0 = 1` for every `x`, including infinity.
pub fn pow_or_one(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ksum(xs), 2.0);
        assert_eq!(ksum([1.0, f64::INFINITY]), f64::INFINITY);
    }

    #[test]
    fn log_inv_matches_ln_near_one() {
        let t = 2f64.powi(-40);
        let r = 1.0 - t;
        assert!((log_inv(r) - (t + t * t / 2.0)).abs() < 1e-15 * t);
        assert!((log_inv(0.25) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gap_is_symmetric() {
        assert_eq!(relative_gap(1.0, 2.0), relative_gap(2.0, 1.0));
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
    }
}
