use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Exponents `(a1, a2)` of the anisotropic Dirichlet-type space, each in `(0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightPair {
    a1: f64,
    a2: f64,
}

pub(crate) fn check_dirichlet_exponent(a: f64) -> Result<f64> {
    if a.is_finite() && a > 0.0 && a <= 0.5 {
        Ok(a)
    } else {
        Err(domain(format!("Dirichlet exponent must lie in (0, 1/2], got {a}")))
    }
}

impl WeightPair {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        Ok(Self {
            a1: check_dirichlet_exponent(a1)?,
            a2: check_dirichlet_exponent(a2)?,
        })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Radial weight exponents `1 - 2 a_i` of `dA_{a_i}`.
    pub fn gammas(&self) -> (f64, f64) {
        (1.0 - 2.0 * self.a1, 1.0 - 2.0 * self.a2)
    }

    pub fn swapped(&self) -> Self {
        Self {
            a1: self.a2,
            a2: self.a1,
        }
    }
}

impl<'de> Deserialize<'de> for WeightPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a1, a2] = <[f64; 2]>::deserialize(d)?;
        WeightPair::new(a1, a2).map_err(serde::de::Error::custom)
    }
}

/// Exponent `beta > -1` of the Bergman weight `(1-|z|^2)^beta dA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BergmanWeight {
    beta: f64,
}

impl BergmanWeight {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > -1.0 {
            Ok(Self { beta })
        } else {
            Err(domain(format!("Bergman exponent must exceed -1, got {beta}")))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `V_beta(D^2) = 1/(beta+1)^2` under normalised area measure.
    pub fn total_mass(&self) -> f64 {
        (self.beta + 1.0).powi(-2)
    }
}

impl<'de> Deserialize<'de> for BergmanWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        BergmanWeight::new(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Polynomial `sum_k c_k z^k` in one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorGrid1D {
    pub coeffs: Vec<Complex64>,
}

impl TaylorGrid1D {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation, valid at any complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Product truncated to degree `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        let deg = (self.degree() + other.degree()).min(max_degree);
        let mut out = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(deg + 1) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(deg + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

/// Rectangle of coefficients `a_{k,l}`, `0 <= k <= K`, `0 <= l <= L`, of
/// `f(z1, z2) = sum a_{k,l} z1^k z2^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorGrid2D {
    k_max: usize,
    l_max: usize,
    coeffs: Vec<Complex64>,
}

impl TaylorGrid2D {
    pub fn zeros(k_max: usize, l_max: usize) -> Self {
        Self {
            k_max,
            l_max,
            coeffs: vec![Complex64::new(0.0, 0.0); (k_max + 1) * (l_max + 1)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut g = Self::zeros(0, 0);
        g.coeffs[0] = c;
        g
    }

    pub fn monomial(k: usize, l: usize, c: Complex64) -> Self {
        let mut g = Self::zeros(k, l);
        g.set(k, l, c);
        g
    }

    pub fn from_fn(k_max: usize, l_max: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut g = Self::zeros(k_max, l_max);
        for k in 0..=k_max {
            for l in 0..=l_max {
                g.set(k, l, f(k, l));
            }
        }
        g
    }

    /// Builds a grid from rows indexed by `k`, each of equal length `L + 1`.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| domain("coefficient grid needs at least one row"))?;
        if first.is_empty() || rows.iter().any(|r| r.len() != first.len()) {
            return Err(domain("coefficient grid rows must be nonempty and of equal length"));
        }
        let (k_max, l_max) = (rows.len() - 1, first.len() - 1);
        Ok(Self::from_fn(k_max, l_max, |k, l| rows[k][l]))
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        if k > self.k_max || l > self.l_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[k * (self.l_max + 1) + l]
        }
    }

    #[inline]
    pub fn set(&mut self, k: usize, l: usize, c: Complex64) {
        self.coeffs[k * (self.l_max + 1) + l] = c;
    }

    /// Row-major iterator over `(k, l, a_{k,l})`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let w = self.l_max + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i / w, i % w, c))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            k_max: self.k_max,
            l_max: self.l_max,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Nested Horner evaluation; no domain check.
    pub fn eval_unchecked(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=self.k_max).rev() {
            let row = &self.coeffs[k * (self.l_max + 1)..(k + 1) * (self.l_max + 1)];
            let inner = row
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |a, &c| a * z2 + c);
            acc = acc * z1 + inner;
        }
        acc
    }

    /// `f(z1, z2)` on the open bidisc.
    pub fn eval(&self, z: [Complex64; 2]) -> Result<Complex64> {
        if !(z[0].norm() < 1.0 && z[1].norm() < 1.0) {
            return Err(domain(format!(
                "evaluation point ({}, {}) is outside the open bidisc",
                z[0], z[1]
            )));
        }
        Ok(self.eval_unchecked(z[0], z[1]))
    }

    /// `d/dz2 d/dz1 f`, of shape `(K-1, L-1)`; the zero grid when `K = 0` or `L = 0`.
    pub fn mixed_partial(&self) -> Self {
        if self.k_max == 0 || self.l_max == 0 {
            return Self::zeros(0, 0);
        }
        Self::from_fn(self.k_max - 1, self.l_max - 1, |k, l| {
            self.get(k + 1, l + 1) * ((k + 1) * (l + 1)) as f64
        })
    }

    /// Antiderivative in both variables vanishing on the coordinate axes.
    pub fn antiderivative_both(&self) -> Self {
        let mut g = Self::zeros(self.k_max + 1, self.l_max + 1);
        for (k, l, c) in self.iter() {
            g.set(k + 1, l + 1, c / ((k + 1) * (l + 1)) as f64);
        }
        g
    }

    /// One-variable restriction `z1 -> f(z1, z2)`.
    pub fn slice_z1(&self, z2: Complex64) -> TaylorGrid1D {
        TaylorGrid1D::new(
            (0..=self.k_max)
                .map(|k| {
                    (0..=self.l_max)
                        .rev()
                        .fold(Complex64::new(0.0, 0.0), |a, l| a * z2 + self.get(k, l))
                })
                .collect(),
        )
    }

    /// One-variable restriction `z2 -> f(z1, z2)`.
    pub fn slice_z2(&self, z1: Complex64) -> TaylorGrid1D {
        TaylorGrid1D::new(
            (0..=self.l_max)
                .map(|l| {
                    (0..=self.k_max)
                        .rev()
                        .fold(Complex64::new(0.0, 0.0), |a, k| a * z1 + self.get(k, l))
                })
                .collect(),
        )
    }

    /// `d/dz1 f` as a grid.
    pub fn partial_z1(&self) -> Self {
        if self.k_max == 0 {
            return Self::zeros(0, self.l_max);
        }
        Self::from_fn(self.k_max - 1, self.l_max, |k, l| self.get(k + 1, l) * (k + 1) as f64)
    }

    /// `d/dz2 f` as a grid.
    pub fn partial_z2(&self) -> Self {
        if self.l_max == 0 {
            return Self::zeros(self.k_max, 0);
        }
        Self::from_fn(self.k_max, self.l_max - 1, |k, l| self.get(k, l + 1) * (l + 1) as f64)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridJson {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for TaylorGrid2D {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..=self.k_max)
                .map(|k| (0..=self.l_max).map(|l| part(&self.get(k, l))).collect())
                .collect()
        };
        GridJson {
            k: self.k_max,
            l: self.l_max,
            re: rows(|c| c.re),
            im: rows(|c| c.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TaylorGrid2D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let g = GridJson::deserialize(d)?;
        let shape_ok = |rows: &Vec<Vec<f64>>| {
            rows.len() == g.k + 1 && rows.iter().all(|r| r.len() == g.l + 1)
        };
        if !shape_ok(&g.re) || !shape_ok(&g.im) {
            return Err(D::Error::custom(format!(
                "coefficient arrays must have shape ({}, {})",
                g.k + 1,
                g.l + 1
            )));
        }
        Ok(TaylorGrid2D::from_fn(g.k, g.l, |k, l| {
            Complex64::new(g.re[k][l], g.im[k][l])
        }))
    }
}
