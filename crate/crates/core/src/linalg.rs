//! Dense helpers for the low-dimensional linear algebra used throughout.

use crate::Vector;
use std::f64::consts::PI;

/// Tolerance on residual norms when deciding linear independence.
pub const RANK_TOL: f64 = 1e-8;

pub fn unit(v: &Vector) -> Option<Vector> {
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Orthonormal basis of span(vectors) by modified Gram–Schmidt with one
/// re-orthogonalization pass.
pub fn orthonormal_basis(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let scale = v.norm().max(1.0);
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = r.dot(b);
                r -= b * c;
            }
        }
        let n = r.norm();
        if n > tol * scale {
            basis.push(r / n);
        }
    }
    basis
}

pub fn rank(vectors: &[Vector], tol: f64) -> usize {
    orthonormal_basis(vectors, tol).len()
}

/// Orthonormal basis of the orthogonal complement of span(rows) in R^dim.
pub fn null_space(rows: &[Vector], dim: usize, tol: f64) -> Vec<Vector> {
    let row_basis = orthonormal_basis(rows, tol);
    let mut all = row_basis.clone();
    let k = row_basis.len();
    for i in 0..dim {
        let mut e = Vector::zeros(dim);
        e[i] = 1.0;
        all.push(e);
    }
    let full = orthonormal_basis(&all, 1e-6);
    full.into_iter().skip(k).collect()
}

/// Intersection of two linear subspaces given by spanning sets.
pub fn intersect(a: &[Vector], b: &[Vector], dim: usize, tol: f64) -> Vec<Vector> {
    let mut rows = null_space(a, dim, tol);
    rows.extend(null_space(b, dim, tol));
    null_space(&rows, dim, tol)
}

/// Affine dimension of a point set; −1 for the empty set.
pub fn affine_dim(points: &[Vector], tol: f64) -> isize {
    match points.split_first() {
        None => -1,
        Some((p0, rest)) => {
            let diffs: Vec<Vector> = rest.iter().map(|p| p - p0).collect();
            rank(&diffs, tol) as isize
        }
    }
}

/// `n` unit vectors evenly spaced on the circle, starting at angle 0.
pub fn circle_directions(n: usize) -> Vec<Vector> {
    (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            Vector::from_vec(vec![a.cos(), a.sin()])
        })
        .collect()
}

/// `n` near-uniform unit vectors on the 2-sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Sample directions for a dimension: the circle in 2D, the Fibonacci sphere in 3D,
/// and a Gaussian-free deterministic spread (coordinate and diagonal directions) otherwise.
pub fn sphere_directions(dim: usize, n2: usize, n3: usize) -> Vec<Vector> {
    match dim {
        1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
        2 => circle_directions(n2),
        3 => fibonacci_sphere(n3),
        d => {
            let mut out = Vec::new();
            for i in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = Vector::zeros(d);
                    e[i] = s;
                    out.push(e);
                }
            }
            for mask in 0..(1u32 << d) {
                let v = Vector::from_iterator(d, (0..d).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }));
                out.push(v / (d as f64).sqrt());
            }
            out
        }
    }
}

/// Determinant of the 4×4 matrix with rows (p, 1), the coplanarity test for four points in R³.
pub fn orientation3(a: &Vector, b: &Vector, c: &Vector, d: &Vector) -> f64 {
    let m = nalgebra::Matrix3::new(
        b[0] - a[0],
        b[1] - a[1],
        b[2] - a[2],
        c[0] - a[0],
        c[1] - a[1],
        c[2] - a[2],
        d[0] - a[0],
        d[1] - a[1],
        d[2] - a[2],
    );
    m.determinant()
}

pub fn cross3(a: &Vector, b: &Vector) -> Vector {
    Vector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}
