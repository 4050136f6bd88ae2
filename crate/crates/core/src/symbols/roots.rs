//! Polynomial roots via companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots closer than this are reported as one root with multiplicity.
pub const CLUSTER_TOL: f64 = 1e-7;

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[k] z^k`, without multiplicity grouping.
///
/// The leading coefficient must be nonzero. Each eigenvalue gets one Newton
/// step, kept only if it lowers the residual.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len().saturating_sub(1);
    let lead = *coeffs
        .last()
        .ok_or_else(|| Error::Domain("empty polynomial".into()))?;
    if lead == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("leading coefficient is zero".into()));
    }
    match d {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-coeffs[0] / coeffs[1]]),
        _ => {}
    }
    // Symmetric root patterns (z^d - c) give companion matrices on which
    // shifted QR stalls; retry on the polynomial in y = z - s.
    let shifts = [0.0, 0.05, 0.1, 0.2];
    let mut eig = None;
    for &r in &shifts {
        let s = Complex64::from_polar(r, 0.7);
        if let Some(e) = companion_eigenvalues(&taylor_shift(coeffs, s), d) {
            eig = Some(e.into_iter().map(|y| y + s).collect::<Vec<_>>());
            break;
        }
    }
    let eig = eig
        .ok_or_else(|| Error::NumericalFailure("companion eigenvalues did not converge".into()))?;
    Ok(eig
        .iter()
        .map(|&z| {
            let (p, dp) = horner(coeffs, z);
            if dp.norm() == 0.0 {
                return z;
            }
            let z1 = z - p / dp;
            if z1.is_finite() && horner(coeffs, z1).0.norm() < p.norm() {
                z1
            } else {
                z
            }
        })
        .collect())
}

fn companion_eigenvalues(coeffs: &[Complex64], d: usize) -> Option<Vec<Complex64>> {
    let lead = coeffs[d];
    let mut c = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        c[(i, d - 1)] = -coeffs[i] / lead;
    }
    let schur = c.try_schur(f64::EPSILON, 200 * d)?;
    schur.eigenvalues().map(|e| e.iter().copied().collect())
}

/// Coefficients of `p(y + s)`.
fn taylor_shift(coeffs: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut q = coeffs.to_vec();
    if s == Complex64::new(0.0, 0.0) {
        return q;
    }
    let n = q.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let hi = q[j + 1];
            q[j] += s * hi;
        }
    }
    q
}

/// Group roots lying within `tol` of each other (single linkage); each group
/// is reported by its centroid and size.
pub fn cluster(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((r, z, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, s, m)| (s / m as f64, m))
        .collect()
}
