//! Example families: weighted trees, discrete metrics, circles, Enflo block
//! truncations and seeded random semi-metrics.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FiniteSemiMetricSpace;

/// Weighted edge `(u, v, weight)` on 0-based vertex ids.
pub type Edge = (usize, usize, f64);

/// A validated finite tree with positive edge weights and its path metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTree {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedTree {
    /// The vertex set is `0..=max id`; every vertex must be covered by the
    /// `n - 1` edges without a cycle.
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::NotATree("no edges".into()));
        }
        for &(u, v, w) in &edges {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight { u, v, weight: w });
            }
        }
        let n = edges.iter().map(|&(u, v, _)| u.max(v)).max().unwrap_or(0) + 1;
        if edges.len() != n - 1 {
            return Err(Error::NotATree(format!(
                "{} edges on {} vertices (a tree has {})",
                edges.len(),
                n,
                n - 1
            )));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v, _) in &edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(Error::NotATree(format!("edge ({u}, {v}) closes a cycle")));
            }
            parent[ru] = rv;
        }
        Ok(Self { n, edges })
    }

    /// Star with `leaves` leaves around center 0.
    pub fn star(leaves: usize, weight: f64) -> Result<Self> {
        if leaves < 2 {
            return Err(Error::TooSmall {
                min: 2,
                got: leaves,
            });
        }
        Self::new((1..=leaves).map(|i| (0, i, weight)).collect())
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize, weight: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { min: 2, got: n });
        }
        Self::new((1..n).map(|i| (i - 1, i, weight)).collect())
    }

    /// Random recursive tree: vertex `v` attaches to a uniform earlier vertex,
    /// weights uniform in `[lo, hi]`.
    pub fn random(n: usize, seed: u64, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { min: 2, got: n });
        }
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::BadRange { min: lo, max: hi });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = (1..n)
            .map(|v| {
                let u = rng.random_range(0..v);
                let w = if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..=hi)
                };
                (u, v, w)
            })
            .collect();
        Self::new(edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|&(_, _, w)| w == 1.0)
    }

    /// Path-sum metric.
    pub fn space(&self) -> FiniteSemiMetricSpace {
        let n = self.n;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        let mut dist = DMatrix::zeros(n, n);
        let mut stack = Vec::with_capacity(n);
        for src in 0..n {
            let mut seen = vec![false; n];
            seen[src] = true;
            stack.push((src, 0.0));
            while let Some((x, dx)) = stack.pop() {
                dist[(src, x)] = dx;
                for &(y, w) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push((y, dx + w));
                    }
                }
            }
        }
        FiniteSemiMetricSpace::from_dmatrix(dist).expect("tree metric is a valid space")
    }
}

pub fn gen_tree(edges: Vec<Edge>) -> Result<FiniteSemiMetricSpace> {
    Ok(WeightedTree::new(edges)?.space())
}

/// All distinct points at distance 1.
pub fn gen_discrete(n: usize) -> Result<FiniteSemiMetricSpace> {
    if n < 2 {
        return Err(Error::TooSmall { min: 2, got: n });
    }
    FiniteSemiMetricSpace::from_dmatrix(DMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { 0.0 } else { 1.0 },
    ))
}

pub fn gen_star(leaves: usize, weight: f64) -> Result<FiniteSemiMetricSpace> {
    Ok(WeightedTree::star(leaves, weight)?.space())
}

pub fn gen_path(n: usize, weight: f64) -> Result<FiniteSemiMetricSpace> {
    Ok(WeightedTree::path(n, weight)?.space())
}

/// Truncation `X_m` of an Enflo space: `m = exps.len()` blocks, each a pair of
/// `n`-point sides `Y_k`, `Z_k` with cross distance `(1 - 1/n)^(1/exps[k])`.
/// Every other distinct pair is at distance 1. Points are ordered
/// `Y_1, Z_1, Y_2, Z_2, ...`.
pub fn gen_enflo_truncation(target: f64, exps: &[f64], n: usize) -> Result<FiniteSemiMetricSpace> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::ExponentsNotDecreasing { target });
    }
    if exps.is_empty() {
        return Err(Error::ExponentsNotDecreasing { target });
    }
    let decreasing = exps.windows(2).all(|w| w[0] > w[1]);
    if !decreasing || exps.iter().any(|&e| !(e > target) || !e.is_finite()) {
        return Err(Error::ExponentsNotDecreasing { target });
    }
    if n < 2 || (1.0 - 1.0 / n as f64).powf(1.0 / target) < 0.5 {
        return Err(Error::BlockSizeTooSmall { n, target });
    }
    let base = 1.0 - 1.0 / n as f64;
    let m = exps.len();
    let size = 2 * m * n;
    // block index and side (0 = Y, 1 = Z) of each point
    let place = |p: usize| (p / (2 * n), (p / n) % 2);
    let dist = DMatrix::from_fn(size, size, |a, b| {
        if a == b {
            return 0.0;
        }
        let (ka, sa) = place(a);
        let (kb, sb) = place(b);
        if ka == kb && sa != sb {
            base.powf(1.0 / exps[ka])
        } else {
            1.0
        }
    });
    let labels = (0..size)
        .map(|p| {
            let (k, s) = place(p);
            format!("{}{}.{}", if s == 0 { 'y' } else { 'z' }, k + 1, p % n)
        })
        .collect();
    FiniteSemiMetricSpace::from_dmatrix(dist)?.with_labels(labels)
}

/// Points on the unit circle with the geodesic (arc-length) metric.
pub fn gen_circle(angles: &[f64]) -> Result<FiniteSemiMetricSpace> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::TooSmall { min: 2, got: n });
    }
    let theta: Vec<f64> = angles.iter().map(|a| a.rem_euclid(2.0 * PI)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if theta[i] == theta[j] {
                return Err(Error::DuplicateAngle(angles[j]));
            }
        }
    }
    let dist = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let delta = (theta[i] - theta[j]).abs();
            delta.min(2.0 * PI - delta)
        }
    });
    FiniteSemiMetricSpace::from_dmatrix(dist)
}

/// Off-diagonal distances i.i.d. uniform in `[min_d, max_d]`, deterministic per seed.
pub fn gen_random_semimetric(
    n: usize,
    seed: u64,
    min_d: f64,
    max_d: f64,
) -> Result<FiniteSemiMetricSpace> {
    if n < 2 {
        return Err(Error::TooSmall { min: 2, got: n });
    }
    if !(min_d > 0.0 && min_d <= max_d && max_d.is_finite()) {
        return Err(Error::BadRange {
            min: min_d,
            max: max_d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = if min_d == max_d {
                min_d
            } else {
                rng.random_range(min_d..=max_d)
            };
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    FiniteSemiMetricSpace::from_dmatrix(dist)
}
