//! Dense primal simplex method for `min c·x` subject to `A x = b, x ≥ 0`.
//!
//! The caller supplies a starting basis whose columns form an identity
//! matrix in `A` and a right-hand side `b ≥ 0`, so no phase one is needed.
//! Pivots follow Bland's rule, which rules out cycling.

use crate::error::{precondition, Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const DEFAULT_PIVOT_CAP: usize = 200_000;

#[derive(Clone, Debug)]
pub struct LpProblem {
    /// Row-major `m × n` constraint matrix.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LpProblem {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    /// Solve from the identity basis `basis` (one column per row).
    pub fn solve(&self, basis: &[usize], pivot_cap: usize) -> Result<LpSolution> {
        let m = self.rows();
        let n = self.cols();
        if basis.len() != m || self.b.len() != m || self.a.iter().any(|r| r.len() != n) {
            return Err(precondition("flatnorm", "inconsistent LP dimensions"));
        }
        for (i, &j) in basis.iter().enumerate() {
            let unit = (0..m).all(|r| {
                let want = if r == i { 1.0 } else { 0.0 };
                (self.a[r][j] - want).abs() <= FEASIBILITY_TOL
            });
            if !unit || self.b[i] < -FEASIBILITY_TOL {
                return Err(precondition(
                    "flatnorm",
                    "starting basis is not a feasible identity basis",
                ));
            }
        }
        let mut t: Vec<Vec<f64>> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, &rhs)| {
                let mut r = row.clone();
                r.push(rhs.max(0.0));
                r
            })
            .collect();
        let mut basis = basis.to_vec();
        // reduced costs c_j - c_B·A_j, last entry is -objective
        let mut z: Vec<f64> = self.c.clone();
        z.push(0.0);
        for (i, &j) in basis.iter().enumerate() {
            let cb = self.c[j];
            if cb != 0.0 {
                for (zj, tij) in z.iter_mut().zip(&t[i]) {
                    *zj -= cb * tij;
                }
            }
        }
        let mut pivots = 0;
        while let Some(enter) = (0..n).find(|&j| z[j] < -FEASIBILITY_TOL) {
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                let a = t[i][enter];
                if a > FEASIBILITY_TOL {
                    let ratio = t[i][n] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best - FEASIBILITY_TOL
                                || (ratio <= best + FEASIBILITY_TOL && basis[i] < basis[l])
                        }
                    };
                    if better {
                        best = ratio.min(best);
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(precondition("flatnorm", "LP is unbounded below"));
            };
            pivots += 1;
            if pivots > pivot_cap {
                return Err(Error::SolverIterationCap(pivot_cap));
            }
            let inv = 1.0 / t[r][enter];
            for x in t[r].iter_mut() {
                *x *= inv;
            }
            let pivot_row = t[r].clone();
            for (i, row) in t.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                let f = row[enter];
                if f != 0.0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * p;
                    }
                    row[enter] = 0.0;
                }
            }
            let f = z[enter];
            for (x, p) in z.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            z[enter] = 0.0;
            basis[r] = enter;
        }
        let mut x = vec![0.0; n];
        for (i, &j) in basis.iter().enumerate() {
            x[j] = t[i][n].max(0.0);
        }
        let objective = self.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective, pivots })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_transport_problem() {
        // min x0 + 2 x1 + 3 s0 + 3 s1
        // x0 + x1 + s0 = 4 ; x0 - x1 + s1 = 0
        let lp = LpProblem {
            a: vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, -1.0, 0.0, 1.0]],
            b: vec![4.0, 0.0],
            c: vec![1.0, 2.0, 3.0, 3.0],
        };
        let sol = lp.solve(&[2, 3], DEFAULT_PIVOT_CAP).unwrap();
        assert!((sol.objective - 6.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_start_terminates() {
        let lp = LpProblem {
            a: vec![vec![1.0, -1.0, 1.0, 0.0], vec![-1.0, 1.0, 0.0, 1.0]],
            b: vec![0.0, 0.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
        };
        // the feasible set is the ray x0 = x1, unbounded in the cost direction
        assert!(lp.solve(&[2, 3], DEFAULT_PIVOT_CAP).is_err());
    }

    #[test]
    fn rejects_bad_basis() {
        let lp = LpProblem {
            a: vec![vec![2.0, 1.0]],
            b: vec![1.0],
            c: vec![1.0, 1.0],
        };
        assert!(lp.solve(&[0], 10).is_err());
    }
}
