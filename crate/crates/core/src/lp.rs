//! Dense dual active-set solver for `maximize c·x subject to A x ≤ b` with free `x`.
//!
//! The programs in this crate have at most four variables and at most a few
//! thousand rows. Box rows `|x_k| ≤ BOX` give a dual-feasible starting basis, so
//! there is no phase one; a box row left in the optimal basis with a positive
//! multiplier reports the program as unbounded.

use nalgebra::{DMatrix, DVector};

pub const BOX: f64 = 1e6;

const FEAS_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpFailure {
    Infeasible,
    Unbounded,
    /// Iteration cap hit or a singular basis; should not happen on well-posed input.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Real (non-box) rows in the final basis.
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Lp {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Lp {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "an LP needs at least one variable");
        Lp {
            n,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    /// Add `a·x ≤ b`; returns the row index.
    pub fn le(&mut self, a: &[f64], b: f64) -> usize {
        assert_eq!(a.len(), self.n);
        self.a.extend_from_slice(a);
        self.b.push(b);
        self.b.len() - 1
    }

    pub fn ge(&mut self, a: &[f64], b: f64) -> usize {
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        self.le(&neg, -b)
    }

    pub fn eq(&mut self, a: &[f64], b: f64) {
        self.le(a, b);
        self.ge(a, b);
    }

    pub fn row(&self, i: usize) -> (&[f64], f64) {
        (&self.a[i * self.n..(i + 1) * self.n], self.b[i])
    }

    fn full_row(&self, j: usize, out: &mut [f64]) -> f64 {
        let m = self.rows();
        if j < m {
            out.copy_from_slice(&self.a[j * self.n..(j + 1) * self.n]);
            self.b[j]
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            let k = (j - m) / 2;
            out[k] = if (j - m) % 2 == 0 { 1.0 } else { -1.0 };
            BOX
        }
    }

    pub fn maximize(&self, c: &[f64]) -> Result<LpSolution, LpFailure> {
        assert_eq!(c.len(), self.n);
        let n = self.n;
        let m = self.rows();
        let total = m + 2 * n;
        let mut basis: Vec<usize> = (0..n)
            .map(|k| if c[k] >= 0.0 { m + 2 * k } else { m + 2 * k + 1 })
            .collect();
        let mut y: Vec<f64> = c.iter().map(|v| v.abs()).collect();
        let c_scale = 1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bland_after = 20 * total + 50;
        let max_iter = 200 * total + 2000;
        let mut row = vec![0.0; n];
        let mut bmat = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);

        for iter in 0..max_iter {
            for (r, &j) in basis.iter().enumerate() {
                rhs[r] = self.full_row(j, &mut row);
                for k in 0..n {
                    bmat[(r, k)] = row[k];
                }
            }
            let lu = bmat.clone().lu();
            let x = lu.solve(&rhs).ok_or(LpFailure::Stalled)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LpFailure::Stalled);
            }

            // Entering row: a violated constraint.
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..total {
                if basis.contains(&j) {
                    continue;
                }
                let bj = self.full_row(j, &mut row);
                let ax: f64 = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                let viol = ax - bj;
                if viol > FEAS_TOL * (1.0 + bj.abs()) {
                    if iter >= bland_after {
                        enter = Some((j, viol));
                        break;
                    }
                    if enter.map_or(true, |(_, v)| viol > v) {
                        enter = Some((j, viol));
                    }
                }
            }

            let Some((j, _)) = enter else {
                for (k, &bj) in basis.iter().enumerate() {
                    if bj >= m && y[k] > 1e-9 * c_scale {
                        return Err(LpFailure::Unbounded);
                    }
                }
                let value: f64 = c.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                let mut real: Vec<usize> = basis.iter().copied().filter(|&j| j < m).collect();
                real.sort_unstable();
                return Ok(LpSolution {
                    x: x.iter().copied().collect(),
                    value,
                    basis: real,
                });
            };

            self.full_row(j, &mut row);
            let aj = DVector::from_column_slice(&row);
            let d = bmat.transpose().lu().solve(&aj).ok_or(LpFailure::Stalled)?;

            let mut leave: Option<(usize, f64)> = None;
            for k in 0..n {
                if d[k] > PIVOT_TOL {
                    let ratio = y[k].max(0.0) / d[k];
                    let better = match leave {
                        None => true,
                        Some((kk, r)) => {
                            if iter >= bland_after {
                                ratio < r - 1e-15 || (ratio <= r + 1e-15 && basis[k] < basis[kk])
                            } else {
                                ratio < r - 1e-15 || (ratio <= r + 1e-15 && d[k] > d[kk])
                            }
                        }
                    };
                    if better {
                        leave = Some((k, ratio));
                    }
                }
            }
            let Some((k, theta)) = leave else {
                return Err(LpFailure::Infeasible);
            };
            for i in 0..n {
                y[i] = (y[i] - theta * d[i]).max(0.0);
            }
            y[k] = theta;
            basis[k] = j;
        }
        Err(LpFailure::Stalled)
    }

    pub fn minimize(&self, c: &[f64]) -> Result<LpSolution, LpFailure> {
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        self.maximize(&neg).map(|mut s| {
            s.value = -s.value;
            s
        })
    }

    /// Sequential lexicographic minimization: each objective is minimized with the
    /// previous ones held within `slack` (relative) of their optima.
    pub fn lex_minimize(&self, objectives: &[Vec<f64>], slack: f64) -> Result<LpSolution, LpFailure> {
        let mut lp = self.clone();
        let mut last = None;
        for c in objectives {
            let s = lp.minimize(c)?;
            lp.le(c, s.value + slack * (1.0 + s.value.abs()));
            last = Some(s);
        }
        last.ok_or(LpFailure::Stalled)
    }

    /// Whether `x` satisfies every row within `tol`.
    pub fn satisfied(&self, x: &[f64], tol: f64) -> bool {
        (0..self.rows()).all(|i| {
            let (a, b) = self.row(i);
            a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + tol
        })
    }
}
