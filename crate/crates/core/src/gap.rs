//! Simplex gaps and the normalized negative type gap.
//!
//! A normalized load on a bipartition `(A, B)` is the same thing as a vector
//! `eta` with positive part on `A` summing to 1 and negative part on `B`
//! summing to -1; the simplex gap equals `-1/2 sum d^p eta_i eta_j`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checker::{FormSpectrum, Status};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::generators::WeightedTree;
use crate::qp::SimplexQp;
use crate::space::FiniteSemiMetricSpace;
use crate::tolerance::ToleranceConfig;

const NORMALIZATION_TOL: f64 = 1e-12;
/// Largest point count for exhaustive bipartition search (2^21 cells).
pub const MAX_EXHAUSTIVE_POINTS: usize = 22;
/// Largest point count for which the oracle enumerates every partial bipartition.
const MAX_PARTIAL_ENUMERATION: usize = 10;

/// Two disjoint weighted sides of a simplex. Weights on each side sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimplexRepr", into = "SimplexRepr")]
pub struct LoadedSimplex {
    side_a: Vec<usize>,
    weights_a: Vec<f64>,
    side_b: Vec<usize>,
    weights_b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SimplexRepr {
    side_a: Vec<(usize, f64)>,
    side_b: Vec<(usize, f64)>,
}

impl From<LoadedSimplex> for SimplexRepr {
    fn from(s: LoadedSimplex) -> Self {
        SimplexRepr {
            side_a: s.side_a.into_iter().zip(s.weights_a).collect(),
            side_b: s.side_b.into_iter().zip(s.weights_b).collect(),
        }
    }
}

impl TryFrom<SimplexRepr> for LoadedSimplex {
    type Error = Error;
    fn try_from(r: SimplexRepr) -> Result<Self> {
        let (a, wa) = r.side_a.into_iter().unzip();
        let (b, wb) = r.side_b.into_iter().unzip();
        LoadedSimplex::closure(a, wa, b, wb)
    }
}

impl LoadedSimplex {
    /// Strict form: every weight positive.
    pub fn new(
        side_a: Vec<usize>,
        weights_a: Vec<f64>,
        side_b: Vec<usize>,
        weights_b: Vec<f64>,
    ) -> Result<Self> {
        if weights_a.iter().chain(&weights_b).any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidSimplex("weights must be positive".into()));
        }
        Self::closure(side_a, weights_a, side_b, weights_b)
    }

    /// Closure form: zero weights allowed.
    pub fn closure(
        side_a: Vec<usize>,
        weights_a: Vec<f64>,
        side_b: Vec<usize>,
        weights_b: Vec<f64>,
    ) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidSimplex("both sides must be nonempty".into()));
        }
        if side_a.len() != weights_a.len() || side_b.len() != weights_b.len() {
            return Err(Error::InvalidSimplex("one weight per vertex".into()));
        }
        let mut all: Vec<usize> = side_a.iter().chain(&side_b).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex(
                "vertices must be pairwise distinct".into(),
            ));
        }
        for w in weights_a.iter().chain(&weights_b) {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidSimplex(format!("bad weight {w}")));
            }
        }
        for side in [&weights_a, &weights_b] {
            let s: f64 = side.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidSimplex(format!(
                    "side weights sum to {s}, not 1"
                )));
            }
        }
        Ok(Self {
            side_a,
            weights_a,
            side_b,
            weights_b,
        })
    }

    /// Splits `eta` by sign, dropping `|eta_i| <= drop_rtol * max |eta|`, and
    /// normalizes each side to total weight 1.
    pub fn from_eta(eta: &[f64], drop_rtol: f64) -> Result<Self> {
        let big = eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(big > 0.0) {
            return Err(Error::InvalidSimplex("zero vector".into()));
        }
        let cut = drop_rtol * big;
        let (mut a, mut wa, mut b, mut wb) = (vec![], vec![], vec![], vec![]);
        for (i, &v) in eta.iter().enumerate() {
            if v > cut {
                a.push(i);
                wa.push(v);
            } else if v < -cut {
                b.push(i);
                wb.push(-v);
            }
        }
        for w in [&mut wa, &mut wb] {
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
        }
        Self::new(a, wa, b, wb)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }
    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }
    pub fn weights_a(&self) -> &[f64] {
        &self.weights_a
    }
    pub fn weights_b(&self) -> &[f64] {
        &self.weights_b
    }

    /// `(s, t)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.side_a.len(), self.side_b.len())
    }

    /// Signed load vector on `n` points: `+m_j` on side A, `-n_i` on side B.
    pub fn to_eta(&self, n: usize) -> Vec<f64> {
        let mut eta = vec![0.0; n];
        for (&i, &w) in self.side_a.iter().zip(&self.weights_a) {
            eta[i] = w;
        }
        for (&i, &w) in self.side_b.iter().zip(&self.weights_b) {
            eta[i] = -w;
        }
        eta
    }
}

/// Cross-side weighted sum minus both same-side sums, with `d^p` evaluated
/// pair by pair.
pub fn simplex_gap(x: &FiniteSemiMetricSpace, s: &LoadedSimplex, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::NegativeExponent(p));
    }
    let n = x.len();
    if s.side_a.iter().chain(&s.side_b).any(|&i| i >= n) {
        return Err(Error::InvalidSimplex(format!(
            "vertex index out of range for {n} points"
        )));
    }
    let dp = |i: usize, j: usize| x.d(i, j).powf(p);
    let mut cross = 0.0;
    for (&a, &m) in s.side_a.iter().zip(&s.weights_a) {
        for (&b, &w) in s.side_b.iter().zip(&s.weights_b) {
            cross += m * w * dp(a, b);
        }
    }
    let same = |idx: &[usize], wt: &[f64]| {
        let mut acc = 0.0;
        for j1 in 0..idx.len() {
            for j2 in (j1 + 1)..idx.len() {
                acc += wt[j1] * wt[j2] * dp(idx[j1], idx[j2]);
            }
        }
        acc
    };
    Ok(cross - same(&s.side_a, &s.weights_a) - same(&s.side_b, &s.weights_b))
}

/// `-1/2 sum_ij d^p eta_i eta_j` for a load vector whose positive and
/// negative parts each have mass 1.
pub fn gap_from_eta(x: &FiniteSemiMetricSpace, eta: &[f64], p: f64) -> Result<f64> {
    if eta.len() != x.len() {
        return Err(Error::BadNormalization);
    }
    let pos: f64 = eta.iter().filter(|v| **v > 0.0).sum();
    let neg: f64 = eta.iter().filter(|v| **v < 0.0).sum();
    if (pos - 1.0).abs() > 1e-10 || (neg + 1.0).abs() > 1e-10 {
        return Err(Error::BadNormalization);
    }
    let m = x.power_matrix(p)?;
    Ok(-0.5 * crate::linalg::quadratic_form(&m, eta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub p: f64,
    /// `Gamma_X^p`; `-inf` when p-negative type fails.
    pub gamma: ExtendedReal,
    pub arg_simplex: LoadedSimplex,
    pub bipartitions_searched: u64,
    pub qp_iterations_total: u64,
    /// False when some cell hit `qp_max_iter` before reaching `qp_tol`.
    pub converged: bool,
    pub unconverged_cells: u64,
    pub status: Status,
    pub scale: f64,
}

struct CellResult {
    mask: u64,
    value: f64,
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn solve_cell(
    m: &DMatrix<f64>,
    mask: u64,
    lipschitz: f64,
    tol: f64,
    max_iter: usize,
) -> CellResult {
    let n = m.nrows();
    // point 0 always on side A; bit (i-1) of mask puts point i on side B
    let on_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
    let sign: Vec<f64> = (0..n).map(|i| if on_b(i) { -1.0 } else { 1.0 }).collect();
    let hessian = DMatrix::from_fn(n, n, |i, j| -sign[i] * sign[j] * m[(i, j)]);
    let groups = vec![
        (0..n).filter(|&i| !on_b(i)).collect::<Vec<_>>(),
        (0..n).filter(|&i| on_b(i)).collect::<Vec<_>>(),
    ];
    let sol = SimplexQp {
        hessian: &hessian,
        groups: &groups,
        lipschitz,
        tol,
        max_iter,
    }
    .solve();
    let x = sol.x.iter().zip(&sign).map(|(v, s)| v * s).collect();
    CellResult {
        mask,
        value: sol.value,
        x,
        iterations: sol.iterations,
        converged: sol.converged,
    }
}

/// `Gamma_X^p`: minimum simplex gap over every bipartition of the full point
/// set, each cell solved over its closed load polytope by projected gradient.
pub fn negative_type_gap(
    x: &FiniteSemiMetricSpace,
    p: f64,
    tol: &ToleranceConfig,
) -> Result<GapResult> {
    tol.validate()?;
    let n = x.len();
    if n > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::TooManyPoints {
            max: MAX_EXHAUSTIVE_POINTS,
            got: n,
        });
    }
    let spec = FormSpectrum::new(x, p)?;
    let status = spec.status(tol);
    if status == Status::Fail {
        let simplex = LoadedSimplex::from_eta(&spec.extremal_vector(), 1e-12)?;
        return Ok(GapResult {
            p,
            gamma: ExtendedReal::NegInfinity,
            arg_simplex: simplex,
            bipartitions_searched: 0,
            qp_iterations_total: 0,
            converged: true,
            unconverged_cells: 0,
            status,
            scale: spec.scale,
        });
    }
    let lipschitz = spec.max_eigenvalue();
    let abs_tol = tol.qp_tol * spec.scale.max(f64::MIN_POSITIVE);
    let cells = (1u64 << (n - 1)) - 1;
    let m = &spec.power;
    let best = (1..=cells)
        .into_par_iter()
        .map(|mask| solve_cell(m, mask, lipschitz, abs_tol, tol.qp_max_iter))
        .map(|c| (c.iterations as u64, u64::from(!c.converged), Some(c)))
        .reduce(
            || (0, 0, None),
            |(ia, ua, a), (ib, ub, b)| {
                let pick = match (a, b) {
                    (None, y) => y,
                    (y, None) => y,
                    (Some(a), Some(b)) => {
                        let a_first = a
                            .value
                            .total_cmp(&b.value)
                            .then(a.mask.cmp(&b.mask))
                            .is_le();
                        Some(if a_first { a } else { b })
                    }
                };
                (ia + ib, ua + ub, pick)
            },
        );
    let (iterations, unconverged, cell) = best;
    let cell = cell.expect("n >= 2 gives at least one cell");
    let mut eta = cell.x;
    for v in eta.iter_mut() {
        if v.abs() <= 1e-15 {
            *v = 0.0;
        }
    }
    let simplex = LoadedSimplex::from_eta(&eta, 0.0)?;
    let gamma = simplex_gap(x, &simplex, p)?;
    Ok(GapResult {
        p,
        gamma: ExtendedReal::Finite(gamma),
        arg_simplex: simplex,
        bipartitions_searched: cells,
        qp_iterations_total: iterations,
        converged: unconverged == 0,
        unconverged_cells: unconverged,
        status,
        scale: spec.scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub simplex: LoadedSimplex,
    pub samples: usize,
    pub enumerated: u64,
}

/// Sampling oracle for `Gamma_X^p`: the smallest simplex gap over
/// uniform-weight simplices on every (partial) bipartition plus `samples`
/// random loaded simplices. Half of the draws assign every point to side A,
/// side B or neither and take normalized exponential weights per side; the
/// other half perturb the best simplex found so far. Only simplex gaps are
/// evaluated, so the result is always an upper bound for the true infimum.
pub fn brute_force_gap(
    x: &FiniteSemiMetricSpace,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<OracleResult> {
    let n = x.len();
    let mut best: Option<(f64, LoadedSimplex)> = None;
    let consider = |s: LoadedSimplex, best: &mut Option<(f64, LoadedSimplex)>| -> Result<()> {
        let g = simplex_gap(x, &s, p)?;
        if best.as_ref().is_none_or(|(v, _)| g < *v) {
            *best = Some((g, s));
        }
        Ok(())
    };
    let uniform = |idx: &[usize]| vec![1.0 / idx.len() as f64; idx.len()];
    let mut enumerated = 0u64;
    if n <= MAX_PARTIAL_ENUMERATION {
        let total = 3u64.pow(n as u32);
        for code in 0..total {
            let (mut a, mut b) = (vec![], vec![]);
            let mut c = code;
            for i in 0..n {
                match c % 3 {
                    1 => a.push(i),
                    2 => b.push(i),
                    _ => {}
                }
                c /= 3;
            }
            // unordered: the smallest used index sits on side A
            if a.is_empty() || b.is_empty() || b[0] < a[0] {
                continue;
            }
            enumerated += 1;
            let (wa, wb) = (uniform(&a), uniform(&b));
            consider(LoadedSimplex::new(a, wa, b, wb)?, &mut best)?;
        }
    } else if n <= MAX_EXHAUSTIVE_POINTS {
        for mask in 1..(1u64 << (n - 1)) {
            let a: Vec<usize> = (0..n)
                .filter(|&i| i == 0 || (mask >> (i - 1)) & 1 == 0)
                .collect();
            let b: Vec<usize> = (1..n).filter(|&i| (mask >> (i - 1)) & 1 == 1).collect();
            enumerated += 1;
            let (wa, wb) = (uniform(&a), uniform(&b));
            consider(LoadedSimplex::new(a, wa, b, wb)?, &mut best)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let global = samples.div_ceil(2);
    let mut drawn = 0;
    while drawn < global {
        let (mut a, mut b) = (vec![], vec![]);
        for i in 0..n {
            match rng.random_range(0..3u8) {
                0 => a.push(i),
                1 => b.push(i),
                _ => {}
            }
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        drawn += 1;
        let wa = normalized(a.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect());
        let wb = normalized(b.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect());
        if let Ok(s) = LoadedSimplex::new(a, wa, b, wb) {
            consider(s, &mut best)?;
        }
    }
    // Remaining budget: random multiplicative perturbations of the incumbent
    // with a geometrically shrinking spread, occasionally moving one point.
    let local = samples - global;
    for k in 0..local {
        let Some((_, inc)) = &best else { break };
        let spread = 0.5 * (2e-3f64).powf(k as f64 / local as f64);
        let mut sides = [
            inc.side_a
                .iter()
                .copied()
                .zip(inc.weights_a.iter().copied())
                .collect::<Vec<_>>(),
            inc.side_b
                .iter()
                .copied()
                .zip(inc.weights_b.iter().copied())
                .collect::<Vec<_>>(),
        ];
        if rng.random_bool(0.2) {
            let i = rng.random_range(0..n);
            let side = rng.random_range(0..2usize);
            let held = sides.iter().position(|s| s.iter().any(|&(v, _)| v == i));
            match held {
                Some(h) if sides[h].len() > 1 => sides[h].retain(|&(v, _)| v != i),
                Some(_) => {}
                None => {
                    let w = spread / sides[side].len() as f64;
                    sides[side].push((i, w));
                }
            }
        }
        for side in sides.iter_mut() {
            for (_, w) in side.iter_mut() {
                *w *= (spread * rng.sample::<f64, _>(StandardNormal)).exp();
            }
            side.sort_by_key(|&(v, _)| v);
        }
        let [sa, sb] = sides;
        let (a, wa): (Vec<usize>, Vec<f64>) = sa.into_iter().unzip();
        let (b, wb): (Vec<usize>, Vec<f64>) = sb.into_iter().unzip();
        if let Ok(s) = LoadedSimplex::new(a, normalized(wa), b, normalized(wb)) {
            consider(s, &mut best)?;
        }
    }
    let (value, simplex) = match best {
        Some(b) => b,
        None => {
            // nothing enumerated and no samples: fall back to the first pair
            let s = LoadedSimplex::new(vec![0], vec![1.0], vec![1], vec![1.0])?;
            (simplex_gap(x, &s, p)?, s)
        }
    };
    Ok(OracleResult {
        value,
        simplex,
        samples,
        enumerated,
    })
}

fn normalized(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Harmonic formula `(sum_e 1/|e|)^(-1)` for the 1-negative type gap of a
/// weighted tree.
pub fn tree_gap(tree: &WeightedTree) -> f64 {
    1.0 / tree.edges().iter().map(|&(_, _, w)| 1.0 / w).sum::<f64>()
}
