//! Spectral decision of (strict) q-negative type, supremal exponent search and
//! boundary witnesses.
//!
//! The form `sum M_ij eta_i eta_j` with `M = d^q` is restricted to the
//! hyperplane `sum eta = 0` through an orthonormal basis `Q`. The eigenvalues of
//! `-Q^T M Q` decide the verdict: all above `+eig_tol * scale` is strict, any
//! below `-eig_tol * scale` fails, otherwise the space sits on the boundary.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::gap::{simplex_gap, LoadedSimplex};
use crate::linalg::{compress_negated, hyperplane_basis, jacobi_eigen, unit};
use crate::space::FiniteSemiMetricSpace;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Strict,
    Boundary,
    Fail,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Strict => "STRICT",
            Status::Boundary => "BOUNDARY",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegTypeVerdict {
    pub q: f64,
    pub status: Status,
    /// Largest value of the form over unit vectors summing to zero.
    pub critical_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

/// Spectrum of the negated form on the sum-zero hyperplane.
#[derive(Debug, Clone)]
pub struct FormSpectrum {
    pub q: f64,
    /// Largest absolute entry of the power matrix.
    pub scale: f64,
    pub power: DMatrix<f64>,
    /// Ascending eigenvalues of `-Q^T M Q`.
    pub values: Vec<f64>,
    /// Eigenvectors lifted back to `R^n`, one per column, each summing to zero.
    pub vectors: DMatrix<f64>,
}

impl FormSpectrum {
    pub fn new(x: &FiniteSemiMetricSpace, q: f64) -> Result<Self> {
        let power = x.power_matrix(q)?;
        let scale = power.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let basis = hyperplane_basis(x.len());
        let eig = jacobi_eigen(&compress_negated(&power, &basis))?;
        Ok(Self {
            q,
            scale,
            values: eig.values,
            vectors: basis * eig.vectors,
            power,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.values.last().expect("n >= 2")
    }

    pub fn status(&self, tol: &ToleranceConfig) -> Status {
        let band = tol.eig_tol * self.scale;
        let lo = self.min_eigenvalue();
        if lo > band {
            Status::Strict
        } else if lo < -band {
            Status::Fail
        } else {
            Status::Boundary
        }
    }

    /// Unit eigenvector of the smallest eigenvalue, recentered to sum zero,
    /// signed so its first non-negligible entry is positive.
    pub fn extremal_vector(&self) -> Vec<f64> {
        let mut v: DVector<f64> = self.vectors.column(0).into_owned();
        let mean = v.mean();
        v.add_scalar_mut(-mean);
        let v = unit(v);
        let big = v.amax();
        let sign = v
            .iter()
            .find(|c| c.abs() > 1e-9 * big)
            .map_or(1.0, |c| c.signum());
        v.iter().map(|c| c * sign).collect()
    }

    pub fn verdict(&self, tol: &ToleranceConfig) -> NegTypeVerdict {
        let status = self.status(tol);
        NegTypeVerdict {
            q: self.q,
            status,
            critical_value: -self.min_eigenvalue(),
            witness: (status != Status::Strict).then(|| self.extremal_vector()),
        }
    }
}

pub fn check(x: &FiniteSemiMetricSpace, q: f64, tol: &ToleranceConfig) -> Result<NegTypeVerdict> {
    Ok(FormSpectrum::new(x, q)?.verdict(tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupremalResult {
    pub p_sup: ExtendedReal,
    /// Final `(lo, hi)` around a finite supremum, `hi - lo <= bisect_tol`.
    pub bracket: Option<(f64, f64)>,
    pub verdict_at_sup: Option<NegTypeVerdict>,
    pub probes: usize,
    pub p_max: f64,
}

/// Supremal q-negative type. Reported as `+inf` when the form still holds at
/// `p_max`. Otherwise brackets the threshold by doubling from `q = 1`, then
/// bisects on the verdict until a probe lands in the boundary band.
pub fn supremal_negative_type(
    x: &FiniteSemiMetricSpace,
    tol: &ToleranceConfig,
) -> Result<SupremalResult> {
    tol.validate()?;
    let mut probes = 1;
    if check(x, tol.p_max, tol)?.status != Status::Fail {
        return Ok(SupremalResult {
            p_sup: ExtendedReal::PosInfinity,
            bracket: None,
            verdict_at_sup: None,
            probes,
            p_max: tol.p_max,
        });
    }
    let (mut lo, mut hi) = (0.0, tol.p_max);
    let mut found = None;
    let mut q = 1.0f64;
    while q < tol.p_max {
        let v = check(x, q, tol)?;
        probes += 1;
        match v.status {
            Status::Strict => {
                lo = q;
                q = (2.0 * q).min(tol.p_max);
            }
            Status::Boundary => {
                found = Some(v);
                break;
            }
            Status::Fail => {
                hi = q;
                break;
            }
        }
    }
    if found.is_none() {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = check(x, mid, tol)?;
            probes += 1;
            match v.status {
                Status::Strict => lo = mid,
                Status::Fail => hi = mid,
                Status::Boundary => {
                    found = Some(v);
                    break;
                }
            }
        }
    }
    let half = 0.5 * tol.bisect_tol;
    let (p, verdict, bracket) = match found {
        Some(v) => {
            let p = v.q;
            (p, v, (lo.max(p - half), hi.min(p + half)))
        }
        None => {
            // the boundary band is narrower than one ulp of q; report the
            // failing endpoint of the exhausted bracket
            let v = check(x, hi, tol)?;
            probes += 1;
            (hi, v, (lo, hi))
        }
    };
    Ok(SupremalResult {
        p_sup: ExtendedReal::Finite(p),
        bracket: Some(bracket),
        verdict_at_sup: Some(verdict),
        probes,
        p_max: tol.p_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub q: f64,
    pub status: Status,
    pub critical_value: f64,
}

/// Verdicts along an increasing grid. The statuses must read
/// `STRICT* BOUNDARY? FAIL*`; any other order is an `IntervalAnomaly`.
pub fn interval_scan(
    x: &FiniteSemiMetricSpace,
    grid: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<ScanPoint>> {
    if grid.is_empty()
        || grid.iter().any(|q| !(q.is_finite() && *q >= 0.0))
        || grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::BadGrid);
    }
    let points = grid
        .par_iter()
        .map(|&q| {
            check(x, q, tol).map(|v| ScanPoint {
                q,
                status: v.status,
                critical_value: v.critical_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_interval_pattern(&points)?;
    Ok(points)
}

fn rank(s: Status) -> u8 {
    match s {
        Status::Strict => 0,
        Status::Boundary => 1,
        Status::Fail => 2,
    }
}

pub fn check_interval_pattern(points: &[ScanPoint]) -> Result<()> {
    let mut last: Option<&ScanPoint> = None;
    for p in points {
        if let Some(prev) = last {
            let (a, b) = (rank(prev.status), rank(p.status));
            let ok = b > a || (a == 0 && b == 0) || (a == 2 && b == 2);
            if !ok {
                return Err(Error::IntervalAnomaly {
                    q_first: prev.q,
                    first: prev.status,
                    q_second: p.q,
                    second: p.status,
                });
            }
        }
        last = Some(p);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullWitness {
    pub exponent: f64,
    pub simplex: LoadedSimplex,
    pub gap: f64,
    pub scale: f64,
}

/// Loaded simplex with vanishing gap at the supremal exponent, read off the
/// boundary eigenvector.
pub fn witness_null_simplex(
    x: &FiniteSemiMetricSpace,
    tol: &ToleranceConfig,
) -> Result<NullWitness> {
    let sup = supremal_negative_type(x, tol)?;
    let verdict = match (sup.p_sup, sup.verdict_at_sup) {
        (ExtendedReal::Finite(_), Some(v)) => v,
        _ => {
            return Err(Error::NoBoundaryWitness(format!(
                "supremal negative type is unbounded (>= {})",
                tol.p_max
            )))
        }
    };
    if verdict.status != Status::Boundary {
        return Err(Error::NoBoundaryWitness(format!(
            "verdict at q = {} is {}",
            verdict.q, verdict.status
        )));
    }
    let eta = verdict.witness.expect("boundary verdicts carry a witness");
    let simplex = LoadedSimplex::from_eta(&eta, 1e-12)
        .map_err(|e| Error::NoBoundaryWitness(format!("degenerate witness: {e}")))?;
    let gap = simplex_gap(x, &simplex, verdict.q)?;
    let scale = x
        .power_matrix(verdict.q)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(NullWitness {
        exponent: verdict.q,
        simplex,
        gap,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_circle, gen_discrete, gen_path, gen_star};
    use crate::linalg::quadratic_form;
    use std::f64::consts::PI;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn discrete_is_strict() {
        let v = check(&gen_discrete(3).unwrap(), 5.0, &tol()).unwrap();
        assert_eq!(v.status, Status::Strict);
        // the form is -|eta|^2 on the hyperplane
        assert!((v.critical_value + 1.0).abs() < 1e-14);
        assert!(v.witness.is_none());
    }

    #[test]
    fn p3_boundary_at_two() {
        let v = check(&gen_path(3, 1.0).unwrap(), 2.0, &tol()).unwrap();
        assert_eq!(v.status, Status::Boundary);
        let w = v.witness.unwrap();
        let expect = [1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt()];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn square_on_circle_boundary_at_one() {
        let x = gen_circle(&[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        let v = check(&x, 1.0, &tol()).unwrap();
        assert_eq!(v.status, Status::Boundary);
        let w = v.witness.unwrap();
        for (a, b) in w.iter().zip([0.5, -0.5, 0.5, -0.5]) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn fail_witness_is_positive_on_the_raw_form() {
        let x = gen_star(3, 1.0).unwrap();
        let v = check(&x, 2.0, &tol()).unwrap();
        assert_eq!(v.status, Status::Fail);
        let w = v.witness.unwrap();
        let m = x.power_matrix(2.0).unwrap();
        assert!(quadratic_form(&m, &w) > 0.0);
        let sum: f64 = w.iter().sum();
        let l1: f64 = w.iter().map(|c| c.abs()).sum();
        assert!(sum.abs() <= 1e-12 * l1);
    }

    #[test]
    fn supremal_values() {
        let p3 = supremal_negative_type(&gen_path(3, 1.0).unwrap(), &tol()).unwrap();
        assert!((p3.p_sup.finite().unwrap() - 2.0).abs() < 1e-6);
        let star = supremal_negative_type(&gen_star(3, 1.0).unwrap(), &tol()).unwrap();
        let exact = 1.0 + 1.5f64.ln() / 2f64.ln();
        assert!((star.p_sup.finite().unwrap() - exact).abs() < 1e-5);
        let (lo, hi) = star.bracket.unwrap();
        assert!(hi - lo <= 1e-6);
        assert_eq!(star.verdict_at_sup.unwrap().status, Status::Boundary);
        let d6 = supremal_negative_type(&gen_discrete(6).unwrap(), &tol()).unwrap();
        assert_eq!(d6.p_sup, ExtendedReal::PosInfinity);
    }

    #[test]
    fn scans() {
        let p3 = gen_path(3, 1.0).unwrap();
        let pts = interval_scan(&p3, &[0.5, 1.0, 1.5, 2.0, 2.5], &tol()).unwrap();
        let st: Vec<Status> = pts.iter().map(|p| p.status).collect();
        use Status::*;
        assert_eq!(st, vec![Strict, Strict, Strict, Boundary, Fail]);
        let d4 = gen_discrete(4).unwrap();
        let pts = interval_scan(&d4, &[0.0, 1.0, 7.0, 30.0], &tol()).unwrap();
        assert!(pts.iter().all(|p| p.status == Strict));
        let star = gen_star(3, 1.0).unwrap();
        let st: Vec<Status> = interval_scan(&star, &[1.0, 1.58, 1.59], &tol())
            .unwrap()
            .iter()
            .map(|p| p.status)
            .collect();
        assert_eq!(st, vec![Strict, Strict, Fail]);
        assert!(matches!(
            interval_scan(&p3, &[1.0, 1.0], &tol()),
            Err(Error::BadGrid)
        ));
    }

    #[test]
    fn anomalous_patterns_are_reported() {
        use Status::*;
        let mk = |s: &[Status]| -> Vec<ScanPoint> {
            s.iter()
                .enumerate()
                .map(|(i, &status)| ScanPoint {
                    q: i as f64,
                    status,
                    critical_value: 0.0,
                })
                .collect()
        };
        assert!(check_interval_pattern(&mk(&[Strict, Boundary, Fail, Fail])).is_ok());
        assert!(check_interval_pattern(&mk(&[Strict, Fail])).is_ok());
        let e = check_interval_pattern(&mk(&[Strict, Fail, Strict])).unwrap_err();
        assert_eq!(
            e,
            Error::IntervalAnomaly {
                q_first: 1.0,
                first: Fail,
                q_second: 2.0,
                second: Strict
            }
        );
        assert!(check_interval_pattern(&mk(&[Boundary, Boundary])).is_err());
        assert!(check_interval_pattern(&mk(&[Fail, Boundary])).is_err());
    }

    #[test]
    fn null_simplices() {
        let w = witness_null_simplex(&gen_path(3, 1.0).unwrap(), &tol()).unwrap();
        let s = &w.simplex;
        let (mut a, mut b) = (s.side_a().to_vec(), s.side_b().to_vec());
        if a.len() == 1 {
            std::mem::swap(&mut a, &mut b);
        }
        assert_eq!(a, vec![0, 2]);
        assert_eq!(b, vec![1]);
        assert!(w.gap.abs() <= 1e-6 * w.scale);

        let sq = gen_circle(&[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        let w = witness_null_simplex(&sq, &tol()).unwrap();
        assert!((w.exponent - 1.0).abs() < 1e-9);
        assert_eq!(w.simplex.side_a(), &[0, 2]);
        assert_eq!(w.simplex.side_b(), &[1, 3]);
        for m in w.simplex.weights_a().iter().chain(w.simplex.weights_b()) {
            assert!((m - 0.5).abs() < 1e-12);
        }
        assert!(w.gap.abs() <= 1e-6 * w.scale);

        assert!(matches!(
            witness_null_simplex(&gen_discrete(3).unwrap(), &tol()),
            Err(Error::NoBoundaryWitness(_))
        ));
    }
}
