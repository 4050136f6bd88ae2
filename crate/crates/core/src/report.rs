//! Verdicts and grid-shaped results shared by the checks.

use serde::{Deserialize, Serialize};

/// Outcome of a finite-grid boundedness check. Grid evidence can never prove
/// finiteness, hence three states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    FiniteEvidence,
    GrowthDetected,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::FiniteEvidence
    }

    /// Combine two verdicts: growth anywhere wins, then inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (GrowthDetected, _) | (_, GrowthDetected) => GrowthDetected,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => FiniteEvidence,
        }
    }
}

/// Allowed growth factor of a profile toward the boundary.
pub const GROWTH_FACTOR: f64 = 2.0;

/// Radial-profile rule: none of the last three levels may exceed twice the
/// value at the middle level.
pub fn mid_level_verdict(profile: &[f64]) -> Verdict {
    if profile.len() < 4 || profile.iter().any(|v| v.is_nan()) {
        return Verdict::Inconclusive;
    }
    let mid = profile[(profile.len() - 1) / 2];
    tail_verdict(&profile[profile.len() - 3..], mid)
}

/// Sweep rule: none of the last three levels may exceed twice the level just
/// before them.
pub fn last_levels_verdict(profile: &[f64]) -> Verdict {
    if profile.len() < 4 || profile.iter().any(|v| v.is_nan()) {
        return Verdict::Inconclusive;
    }
    let n = profile.len();
    tail_verdict(&profile[n - 3..], profile[n - 4])
}

fn tail_verdict(tail: &[f64], reference: f64) -> Verdict {
    if !reference.is_finite() {
        return Verdict::Inconclusive;
    }
    if tail.iter().all(|&v| v <= GROWTH_FACTOR * reference) {
        Verdict::FiniteEvidence
    } else {
        Verdict::GrowthDetected
    }
}

/// A scalar field on a rectangular grid, row-major, with per-point flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub row_label: String,
    pub col_label: String,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub values: Vec<f64>,
    pub flags: Vec<bool>,
}

impl GridField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols.len() + j]
    }

    pub fn flagged(&self, i: usize, j: usize) -> bool {
        self.flags[i * self.cols.len() + j]
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    /// Largest finite unflagged value and its grid index.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.rows.len() {
            for j in 0..self.cols.len() {
                let v = self.value(i, j);
                if self.flagged(i, j) || !v.is_finite() {
                    continue;
                }
                if best.is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }

    /// CSV with one line per grid point: `row,col,value,flag`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{},value,flag\n", self.row_label, self.col_label);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.cols.iter().enumerate() {
                out.push_str(&format!(
                    "{r:.17e},{c:.17e},{:.17e},{}\n",
                    self.value(i, j),
                    u8::from(self.flagged(i, j))
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_rules() {
        let flat = [1.0, 1.0, 1.0, 1.1, 1.2, 1.3];
        assert_eq!(mid_level_verdict(&flat), Verdict::FiniteEvidence);
        assert_eq!(last_levels_verdict(&flat), Verdict::FiniteEvidence);
        let growing = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        assert_eq!(mid_level_verdict(&growing), Verdict::GrowthDetected);
        assert_eq!(last_levels_verdict(&growing), Verdict::GrowthDetected);
        assert_eq!(mid_level_verdict(&[1.0, 2.0]), Verdict::Inconclusive);
    }

    #[test]
    fn argmax_skips_flags() {
        let g = GridField {
            row_label: "r".into(),
            col_label: "theta".into(),
            rows: vec![0.1, 0.2],
            cols: vec![0.0, 1.0],
            values: vec![1.0, 5.0, f64::INFINITY, 2.0],
            flags: vec![false, true, false, false],
        };
        assert_eq!(g.argmax(), Some((1, 1, 2.0)));
        assert_eq!(g.to_csv().lines().count(), 5);
    }
}
