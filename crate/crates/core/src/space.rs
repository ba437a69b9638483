//! Finite semi-metric spaces stored as dense distance matrices.
//!
//! The triangle inequality is never enforced; [`FiniteSemiMetricSpace::is_metric`]
//! reports violations for diagnostics only.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when accepting a nearly symmetric input matrix.
const SYMMETRY_RTOL: f64 = 1e-12;

/// Symmetric, zero-diagonal matrix of positive off-diagonal distances.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSemiMetricSpace {
    dist: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

/// A triple `(i, j, k)` with `d(i, k) > d(i, j) + d(j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub i: usize,
    pub via: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpaceJson {
    n: usize,
    dist: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Vec<String>,
}

impl FiniteSemiMetricSpace {
    /// Validates a square matrix given as rows.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: r,
                    len: row.len(),
                    expected: n,
                });
            }
        }
        if n < 2 {
            return Err(Error::TooSmall { min: 2, got: n });
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_dmatrix(mut dist: DMatrix<f64>) -> Result<Self> {
        let n = dist.nrows();
        if dist.ncols() != n {
            return Err(Error::NotSquare {
                row: 0,
                len: dist.ncols(),
                expected: n,
            });
        }
        if n < 2 {
            return Err(Error::TooSmall { min: 2, got: n });
        }
        for i in 0..n {
            for j in 0..n {
                if !dist[(i, j)].is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            if dist[(i, i)] != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    i,
                    value: dist[(i, i)],
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (dist[(i, j)], dist[(j, i)]);
                if a != b {
                    if (a - b).abs() > SYMMETRY_RTOL * a.abs().max(b.abs()) {
                        return Err(Error::AsymmetricMatrix { i, j, a, b });
                    }
                    let mean = 0.5 * (a + b);
                    dist[(i, j)] = mean;
                    dist[(j, i)] = mean;
                }
                if dist[(i, j)] <= 0.0 {
                    return Err(Error::NonpositiveOffDiagonal {
                        i,
                        j,
                        value: dist[(i, j)],
                    });
                }
            }
        }
        Ok(Self { dist, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Parse(format!(
                "expected {} labels, got {}",
                self.len(),
                labels.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.dist.nrows()
    }

    /// Always false: a valid space has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.dist
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| self.dist.row(i).iter().copied().collect())
            .collect()
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| self.dist[(i, j)]))
    }

    pub fn diameter(&self) -> f64 {
        self.off_diagonal().fold(0.0, f64::max)
    }

    pub fn min_positive_distance(&self) -> f64 {
        self.off_diagonal().fold(f64::INFINITY, f64::min)
    }

    /// Diameter over minimum distance; exactly 1 for multiples of the discrete metric.
    pub fn scaled_diameter(&self) -> f64 {
        self.diameter() / self.min_positive_distance()
    }

    /// Entrywise `d^p` with the diagonal kept at zero (also for `p = 0`).
    pub fn power_matrix(&self, p: f64) -> Result<DMatrix<f64>> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::NegativeExponent(p));
        }
        let n = self.len();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else if p == 1.0 {
                self.dist[(i, j)]
            } else {
                self.dist[(i, j)].powf(p)
            }
        }))
    }

    pub fn rescale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonpositiveScale(c));
        }
        Ok(Self {
            dist: &self.dist * c,
            labels: self.labels.clone(),
        })
    }

    /// Checks the triangle inequality on every ordered triple.
    pub fn is_metric(&self) -> (bool, Vec<TriangleViolation>) {
        let n = self.len();
        let mut bad = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let direct = self.dist[(i, k)];
                    let detour = self.dist[(i, j)] + self.dist[(j, k)];
                    if direct > detour * (1.0 + 1e-15) {
                        bad.push(TriangleViolation { i, via: j, k });
                    }
                }
            }
        }
        (bad.is_empty(), bad)
    }

    /// Subspace on the given point indices, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Result<Self> {
        let m = points.len();
        if m < 2 {
            return Err(Error::TooSmall { min: 2, got: m });
        }
        let dist = DMatrix::from_fn(m, m, |a, b| self.dist[(points[a], points[b])]);
        let mut out = Self::from_dmatrix(dist)?;
        if let Some(l) = &self.labels {
            out.labels = Some(points.iter().map(|&i| l[i].clone()).collect());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.json_repr()).expect("space serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.json_repr()).expect("space serializes")
    }

    fn json_repr(&self) -> SpaceJson {
        SpaceJson {
            n: self.len(),
            dist: self.to_rows(),
            labels: self.labels.clone().unwrap_or_default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpaceJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.n != raw.dist.len() {
            return Err(Error::Parse(format!(
                "declared n = {} but matrix has {} rows",
                raw.n,
                raw.dist.len()
            )));
        }
        let space = Self::from_matrix(&raw.dist)?;
        if raw.labels.is_empty() {
            Ok(space)
        } else {
            space.with_labels(raw.labels)
        }
    }
}
