//! Minimal enclosing homothet `[X]_P` of a finite point set.

use super::{ConvexBody, Homothet};
use crate::error::{Error, Result};
use crate::lp::Lp;
use crate::Vector;
use nalgebra::DMatrix;

impl ConvexBody {
    /// Smallest copy `w + tP` containing every point. Among minimizers the center
    /// is lexicographically minimal (sequential LPs); balls have a unique center.
    pub fn min_enclosing_homothet(&self, points: &[Vector]) -> Result<Homothet> {
        let first = points
            .first()
            .ok_or_else(|| Error::invalid("minimal enclosing homothet of an empty set"))?;
        for p in points {
            self.check_dim(p)?;
        }
        if points.iter().all(|p| p == first) {
            return Ok(Homothet::new(first.clone(), 0.0));
        }
        if self.is_ball() {
            let (c, r) = min_ball(points, self.dim);
            return Ok(Homothet::new(c, r));
        }
        let n = self.dim;
        let mut lp = Lp::new(n + 1);
        let mut rows = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let h = points.iter().map(|p| f.normal.dot(p)).fold(f64::NEG_INFINITY, f64::max);
            let mut row = vec![0.0; n + 1];
            for k in 0..n {
                row[k] = -f.normal[k];
            }
            row[n] = -f.offset;
            lp.le(&row, -h);
            rows.push((row, -h));
        }
        let mut objectives = Vec::with_capacity(n + 1);
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        objectives.push(c);
        for k in 0..n {
            let mut c = vec![0.0; n + 1];
            c[k] = 1.0;
            objectives.push(c);
        }
        let s = lp
            .lex_minimize(&objectives, 1e-13)
            .map_err(|e| Error::Numerical(format!("enclosing LP failed: {e:?}")))?;
        let x = polish(&rows, s.x);
        Ok(Homothet::new(Vector::from_column_slice(&x[..n]), x[n].max(0.0)))
    }
}

/// Re-solve the constraints active at the LP vertex exactly, removing the slack the
/// sequential LPs leave behind. Keeps `x` unless the active rows pin a unique point
/// that stays feasible and within `1e-9` of it.
fn polish(rows: &[(Vec<f64>, f64)], x: Vec<f64>) -> Vec<f64> {
    let m = x.len();
    let scale = 1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let value = |r: &[f64], y: &[f64]| r.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let active: Vec<&(Vec<f64>, f64)> = rows
        .iter()
        .filter(|(r, b)| (value(r, &x) - b).abs() <= 1e-9 * scale)
        .collect();
    if active.len() < m {
        return x;
    }
    // Greedily pick `m` independent active rows and solve them as a square system.
    let mut picked: Vec<&(Vec<f64>, f64)> = Vec::with_capacity(m);
    for r in &active {
        let mut trial = picked.clone();
        trial.push(r);
        let t = DMatrix::from_fn(trial.len(), m, |i, j| trial[i].0[j]);
        if t.svd(false, false).rank(1e-10) == trial.len() {
            picked = trial;
        }
        if picked.len() == m {
            break;
        }
    }
    if picked.len() < m {
        return x;
    }
    let a = DMatrix::from_fn(m, m, |i, j| picked[i].0[j]);
    let b = nalgebra::DVector::from_iterator(m, picked.iter().map(|r| r.1));
    let Some(y) = a.lu().solve(&b) else { return x };
    let y: Vec<f64> = y.iter().copied().collect();
    let close = y.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9 * scale);
    let feasible = rows.iter().all(|(r, b)| value(r, &y) <= b + 1e-12 * scale);
    if close && feasible {
        y
    } else {
        x
    }
}

/// Smallest enclosing ball by Welzl's move-to-front recursion.
pub(crate) fn min_ball(points: &[Vector], dim: usize) -> (Vector, f64) {
    let mut pts = points.to_vec();
    let mut support = Vec::with_capacity(dim + 1);
    let n = pts.len();
    let (c, r) = mtf(&mut pts, n, &mut support, dim);
    (c, r.max(0.0))
}

fn inside(c: &Vector, r: f64, p: &Vector) -> bool {
    (p - c).norm() <= r + 1e-12 * (1.0 + r)
}

fn mtf(pts: &mut Vec<Vector>, n: usize, support: &mut Vec<Vector>, dim: usize) -> (Vector, f64) {
    let mut ball = circumball(support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..n {
        if !inside(&ball.0, ball.1, &pts[i]) {
            support.push(pts[i].clone());
            ball = mtf(pts, i, support, dim);
            support.pop();
            let p = pts.remove(i);
            pts.insert(0, p);
        }
    }
    ball
}

/// Smallest ball with every support point on its boundary.
fn circumball(support: &[Vector], dim: usize) -> (Vector, f64) {
    match support.len() {
        0 => (Vector::zeros(dim), -1.0),
        1 => (support[0].clone(), 0.0),
        k => {
            let p0 = &support[0];
            let diffs: Vec<Vector> = support[1..].iter().map(|p| p - p0).collect();
            let m = k - 1;
            let mut g = DMatrix::<f64>::zeros(m, m);
            let mut rhs = nalgebra::DVector::<f64>::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    g[(i, j)] = diffs[i].dot(&diffs[j]);
                }
                rhs[i] = diffs[i].norm_squared() / 2.0;
            }
            let lam = g
                .clone()
                .lu()
                .solve(&rhs)
                .or_else(|| g.pseudo_inverse(1e-14).ok().map(|pinv| pinv * &rhs))
                .unwrap_or_else(|| nalgebra::DVector::zeros(m));
            let mut c = p0.clone();
            for i in 0..m {
                c += &diffs[i] * lam[i];
            }
            let r = support.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
            (c, r)
        }
    }
}
