//! Accelerated projected gradient for `min 1/2 x^T H x` over a product of
//! probability simplices.
//!
//! The objective must be convex along the feasible directions (vectors that
//! sum to zero inside every group). `lipschitz` bounds the curvature along
//! those directions; the step size is `1 / lipschitz`.

use nalgebra::DMatrix;

/// Euclidean projection of `v` onto `{x >= 0, sum x = 1}` (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct SimplexQp<'a> {
    pub hessian: &'a DMatrix<f64>,
    /// Index groups; each group's coordinates live on its own simplex.
    pub groups: &'a [Vec<usize>],
    pub lipschitz: f64,
    /// Stop once the gradient-mapping norm falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl SimplexQp<'_> {
    fn project(&self, z: &mut [f64]) {
        for g in self.groups {
            let part: Vec<f64> = g.iter().map(|&i| z[i]).collect();
            for (&i, v) in g.iter().zip(project_simplex(&part)) {
                z[i] = v;
            }
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let h = self.hessian;
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                s += h[(i, j)] * xj;
            }
            *o = s;
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        0.5 * crate::linalg::quadratic_form(self.hessian, x)
    }

    /// FISTA with gradient-based momentum restart, started from the
    /// barycenter of every group.
    pub fn solve(&self) -> QpSolution {
        let n = self.hessian.nrows();
        let mut x = vec![0.0; n];
        for g in self.groups {
            for &i in g {
                x[i] = 1.0 / g.len() as f64;
            }
        }
        let step = 1.0 / self.lipschitz;
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut grad = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            self.gradient(&y, &mut grad);
            for i in 0..n {
                z[i] = y[i] - step * grad[i];
            }
            self.project(&mut z);
            let mapping: f64 = y
                .iter()
                .zip(&z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                * self.lipschitz;
            if mapping < self.tol {
                x.copy_from_slice(&z);
                converged = true;
                break;
            }
            // restart when the step opposes the momentum direction
            let align: f64 = (0..n).map(|i| (y[i] - z[i]) * (z[i] - x[i])).sum();
            let t_next = if align > 0.0 {
                1.0
            } else {
                0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
            };
            let beta = if align > 0.0 { 0.0 } else { (t - 1.0) / t_next };
            for i in 0..n {
                y[i] = z[i] + beta * (z[i] - x[i]);
            }
            x.copy_from_slice(&z);
            t = t_next;
        }
        if !converged {
            // y may sit outside the feasible set; x is always feasible
            x.copy_from_slice(&z);
        }
        let value = self.objective(&x);
        QpSolution {
            x,
            value,
            iterations,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn projection_cases() {
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let p = project_simplex(&[0.0, 0.0, 0.0]);
        for v in p {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
        let p = project_simplex(&[0.5, 0.5, -3.0]);
        assert_eq!(p, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn minimizes_sum_of_squares_on_simplex() {
        // min 1/2 |x|^2 on the 4-simplex is the barycenter
        let h = DMatrix::<f64>::identity(4, 4);
        let groups = vec![vec![0, 1, 2, 3]];
        let qp = SimplexQp {
            hessian: &h,
            groups: &groups,
            lipschitz: 1.0,
            tol: 1e-12,
            max_iter: 1000,
        };
        let s = qp.solve();
        assert!(s.converged);
        assert_relative_eq!(s.value, 0.125, epsilon = 1e-14);
    }

    #[test]
    fn weighted_diagonal_two_groups() {
        // min 1/2 (a^2 + 3 b^2) + 1/2 (c^2) with a+b = 1, c = 1:
        // a = 3/4, b = 1/4 -> 1/2 (9/16 + 3/16) + 1/2 = 7/8
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, 1.0]));
        let groups = vec![vec![0, 1], vec![2]];
        let qp = SimplexQp {
            hessian: &h,
            groups: &groups,
            lipschitz: 3.0,
            tol: 1e-12,
            max_iter: 10_000,
        };
        let s = qp.solve();
        assert!(s.converged);
        assert_relative_eq!(s.x[0], 0.75, epsilon = 1e-10);
        assert_relative_eq!(s.value, 0.875, epsilon = 1e-12);
    }
}
