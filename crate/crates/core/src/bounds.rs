//! Closed-form lower bounds on the supremal strict negative type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::generators::WeightedTree;
use crate::space::FiniteSemiMetricSpace;

/// `1 - (1/floor(m/2) + 1/ceil(m/2)) / 2`, the largest combined same-side
/// mass over normalized simplices on `m` points. Strictly increasing in `m`.
pub fn gamma_fn(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::TooSmall { min: 2, got: m });
    }
    let lo = (m / 2) as f64;
    let hi = m.div_ceil(2) as f64;
    Ok(1.0 - 0.5 * (1.0 / lo + 1.0 / hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub p: f64,
    pub gamma_gap: f64,
    pub diam_p: f64,
    pub n: usize,
    pub gamma_n: f64,
    pub frak_d: f64,
    pub zeta: ExtendedReal,
    /// Strict q-negative type is guaranteed on `[interval_lo, interval_hi)`.
    pub interval_lo: f64,
    pub interval_hi: ExtendedReal,
}

impl ZetaReport {
    /// Re-evaluates the bound from the stored audit fields.
    pub fn recompute(&self) -> ExtendedReal {
        zeta_formula(self.gamma_gap, self.diam_p, self.gamma_n, self.frak_d)
    }
}

fn zeta_formula(gamma_gap: f64, diam_p: f64, gamma_n: f64, frak_d: f64) -> ExtendedReal {
    if frak_d <= 1.0 {
        return ExtendedReal::PosInfinity;
    }
    ExtendedReal::Finite((gamma_gap / (diam_p * gamma_n)).ln_1p() / frak_d.ln())
}

/// Length `zeta` of the exponent interval `[p, p + zeta)` on which strict
/// type is guaranteed, given the gap `Gamma_X^p` at `p`. Multiples of the
/// discrete metric give `+inf`.
pub fn zeta_bound(x: &FiniteSemiMetricSpace, p: f64, gamma_gap: f64) -> Result<ZetaReport> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    if !(p >= 0.0) {
        return Err(Error::NegativeExponent(p));
    }
    if !(gamma_gap >= 0.0) {
        return Err(Error::NegativeGap(gamma_gap));
    }
    let diam_p = x.diameter().powf(p);
    let gamma_n = gamma_fn(n)?;
    let frak_d = x.scaled_diameter();
    let zeta = zeta_formula(gamma_gap, diam_p, gamma_n, frak_d);
    let interval_hi = match zeta {
        ExtendedReal::Finite(z) => ExtendedReal::Finite(p + z),
        other => other,
    };
    Ok(ZetaReport {
        p,
        gamma_gap,
        diam_p,
        n,
        gamma_n,
        frak_d,
        zeta,
        interval_lo: p,
        interval_hi,
    })
}

/// `1 + ln(1 + 1/(D (n-1) gamma(n))) / ln D` for a unit-weight tree with
/// diameter `D` on `n >= 3` vertices.
pub fn tree_type_lower_bound(tree: &WeightedTree) -> Result<f64> {
    let n = tree.vertex_count();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    if !tree.is_unit_weight() {
        return Err(Error::NotUnitWeights);
    }
    let diam = tree.space().diameter();
    let denom = diam * (n - 1) as f64 * gamma_fn(n)?;
    Ok(1.0 + (1.0 / denom).ln_1p() / diam.ln())
}

/// Exact supremal type `1 + ln(1 + 1/(n-2)) / ln 2` of the unit star on `n`
/// vertices (`n - 1` leaves).
pub fn star_exact_type(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    Ok(1.0 + (1.0 / (n - 2) as f64).ln_1p() / std::f64::consts::LN_2)
}
