//! Test bodies and target sets.
//!
//! Every generator is deterministic given its parameters (and seed, where one is taken).
//! `body_by_name` / `target_by_name` parse the short names used by the CLI and the
//! session service.

use crate::bodies::{ConvexBody, Segment};
use crate::derivative::TargetSet;
use crate::error::{Error, Result};
use crate::linalg::orientation3;
use crate::{rng, vector, Vector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Regular `n`-gon with circumradius √2 and vertices at angles `π/n + 2πk/n`;
/// `n = 4` is `[−1,1]²`.
pub fn regular_ngon(n: usize) -> Result<ConvexBody> {
    if n < 3 {
        return Err(Error::invalid("a polygon needs at least 3 vertices"));
    }
    let r = 2f64.sqrt();
    let pts: Vec<Vector> = (0..n)
        .map(|k| {
            let a = PI / n as f64 + 2.0 * PI * k as f64 / n as f64;
            let (s, c) = a.sin_cos();
            vector(&[snap(r * c), snap(r * s)])
        })
        .collect();
    let name = if n == 4 {
        "square".to_string()
    } else {
        format!("ngon-{n}")
    };
    ConvexBody::polytope(&name, &pts)
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-12 {
        r
    } else {
        v
    }
}

pub fn square() -> ConvexBody {
    regular_ngon(4).expect("square")
}

pub fn disk() -> ConvexBody {
    ConvexBody::ball(2).expect("disk")
}

/// `[−1,1]³`.
pub fn cube() -> Result<ConvexBody> {
    let mut pts = Vec::new();
    for x in [-1.0, 1.0] {
        for y in [-1.0, 1.0] {
            for z in [-1.0, 1.0] {
                pts.push(vector(&[x, y, z]));
            }
        }
    }
    ConvexBody::polytope("cube", &pts)
}

/// Regular tetrahedron on alternate cube corners.
pub fn tetrahedron() -> Result<ConvexBody> {
    let pts = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let pts: Vec<Vector> = pts.iter().map(|p| vector(p)).collect();
    ConvexBody::polytope("tetrahedron", &pts)
}

/// Triangular prism: an equilateral triangle of circumradius 1 times `[−1,1]`.
pub fn prism() -> Result<ConvexBody> {
    let mut pts = Vec::new();
    for z in [-1.0, 1.0] {
        for k in 0..3 {
            let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
            pts.push(vector(&[a.cos(), a.sin(), z]));
        }
    }
    ConvexBody::polytope("prism", &pts)
}

/// Hull of `n` Gaussian directions on the unit sphere of R^dim, re-centered.
pub fn random_polytope(dim: usize, n: usize, seed: u64) -> Result<ConvexBody> {
    if !(dim == 2 || dim == 3) || n < dim + 1 {
        return Err(Error::invalid(
            "random polytope needs dim in {2,3} and at least dim+1 points",
        ));
    }
    let mut g = rng::stream(seed, 11);
    for _ in 0..100 {
        let pts: Vec<Vector> = (0..n)
            .map(|_| {
                let v = Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut g));
                let norm = v.norm().max(1e-12);
                v / norm
            })
            .collect();
        if let Ok(b) = ConvexBody::polytope_centered(&format!("random-polytope-{dim}-{n}-{seed}"), &pts) {
            if b.inradius() > 0.05 {
                return Ok(b);
            }
        }
    }
    Err(Error::Construction {
        message: "could not draw a well-conditioned random polytope".into(),
        suggestion: None,
    })
}

/// Ellipse with semi-axes `a`, `b` as a smooth planar body.
pub fn ellipse(a: f64, b: f64, samples: usize) -> Result<ConvexBody> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::invalid("ellipse semi-axes must be positive"));
    }
    let pts: Vec<Vector> = (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            vector(&[a * t.cos(), b * t.sin()])
        })
        .collect();
    ConvexBody::smooth2d(&format!("ellipse-{a}-{b}"), &pts)
}

/// A body in R³ together with its generating boundary segments.
#[derive(Clone, Debug)]
pub struct SegmentHull {
    pub body: ConvexBody,
    pub segments: Vec<Segment>,
}

/// Convex hull of `m` skew segments joining a unit circle at height 0 to a circle of
/// radius 0.6 at height 1.2, each twisted by `0.3 · 2π/m`.
///
/// Checks that no two segments are coplanar (4×4 determinant of their endpoints) and that
/// each segment is an edge of the hull: the sum of the normals of the facets through it
/// strictly separates it from every other vertex.
pub fn non_coplanar_hull(m: usize) -> Result<SegmentHull> {
    if !(3..=12).contains(&m) {
        return Err(Error::invalid("nonCoplanarHull needs 3 <= m <= 12"));
    }
    let phi = 0.3 * 2.0 * PI / m as f64;
    let mut raw = Vec::new();
    for i in 0..m {
        let th = 2.0 * PI * i as f64 / m as f64;
        let a = vector(&[th.cos(), th.sin(), 0.0]);
        let b = vector(&[0.6 * (th + phi).cos(), 0.6 * (th + phi).sin(), 1.2]);
        raw.push(Segment::new(a, b));
    }
    let mut c = Vector::zeros(3);
    for s in &raw {
        c += &s.x + &s.y;
    }
    c /= (2 * m) as f64;
    let segments: Vec<Segment> = raw.iter().map(|s| s.translate(&-&c)).collect();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&segments[i], &segments[j]);
            let det = orientation3(&a.x, &a.y, &b.x, &b.y);
            if det.abs() <= 1e-9 {
                return Err(Error::Construction {
                    message: format!("segments {i} and {j} are coplanar (determinant {det:e})"),
                    suggestion: None,
                });
            }
        }
    }
    let pts: Vec<Vector> = segments.iter().flat_map(|s| [s.x.clone(), s.y.clone()]).collect();
    let body = ConvexBody::polytope(&format!("noncoplanar-{m}"), &pts)?;
    let tol = 1e-9;
    for (i, s) in segments.iter().enumerate() {
        let through: Vec<&crate::HalfSpace> = body
            .facets()
            .iter()
            .filter(|f| f.gap(&s.x).abs() <= tol && f.gap(&s.y).abs() <= tol)
            .collect();
        if through.len() < 2 {
            return Err(Error::Construction {
                message: format!(
                    "segment {i} is not an edge of the hull ({} facets through it)",
                    through.len()
                ),
                suggestion: None,
            });
        }
        let n = through.iter().fold(Vector::zeros(3), |acc, f| acc + &f.normal);
        let n = n.normalize();
        let level = n.dot(&s.x);
        for v in body.vertices() {
            if (v - &s.x).norm() <= tol || (v - &s.y).norm() <= tol {
                continue;
            }
            if n.dot(v) >= level - tol {
                return Err(Error::Construction {
                    message: format!("segment {i}: supporting plane does not strictly separate vertex {v:?}"),
                    suggestion: None,
                });
            }
        }
    }
    Ok(SegmentHull { body, segments })
}

/// `n` equally spaced points on the unit circle, resolution 1.5 × arc spacing.
pub fn circle(n: usize) -> TargetSet {
    let pts = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            vector(&[t.cos(), t.sin()])
        })
        .collect();
    TargetSet {
        points: pts,
        eps: 1.5 * 2.0 * PI / n.max(1) as f64,
        generator: format!("circle-{n}"),
    }
}

/// Centers of the level-`depth` squares of the planar middle-thirds Cantor dust on
/// `[−1,1]²`; resolution 1.5 × the smallest spacing.
pub fn cantor_dust(depth: usize) -> Result<TargetSet> {
    if depth > 6 {
        return Err(Error::ResourceLimit(format!("cantor dust depth {depth} exceeds 6")));
    }
    let mut centers = vec![0.0f64];
    let mut half = 1.0;
    for _ in 0..depth {
        let off = 2.0 * half / 3.0;
        centers = centers.iter().flat_map(|c| [c - off, c + off]).collect();
        half /= 3.0;
    }
    let mut pts = Vec::new();
    for &x in &centers {
        for &y in &centers {
            pts.push(vector(&[x, y]));
        }
    }
    let spacing = if centers.len() > 1 { 4.0 * half } else { 1.0 };
    Ok(TargetSet {
        points: pts,
        eps: 1.5 * spacing,
        generator: format!("cantor-dust-depth{depth}"),
    })
}

/// `n` points in `[−1,1]^dim` at pairwise distance ≥ 0.15, resolution 0.01.
pub fn scatter(n: usize, seed: u64, dim: usize) -> Result<TargetSet> {
    if dim == 0 {
        return Err(Error::invalid("scatter dimension must be positive"));
    }
    let mut g = rng::stream(seed, 7);
    let mut pts: Vec<Vector> = Vec::new();
    let mut tries = 0;
    while pts.len() < n {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::ResourceLimit(format!("could not place {n} separated points")));
        }
        let p = Vector::from_fn(dim, |_, _| g.gen_range(-1.0..1.0));
        if pts.iter().all(|q| (q - &p).norm() >= 0.15) {
            pts.push(p);
        }
    }
    Ok(TargetSet {
        points: pts,
        eps: 0.01,
        generator: "finite-scatter".into(),
    })
}

/// `{(1/k, 0) : 1 ≤ k ≤ n} ∪ {(0,0)}`.
pub fn convergent(n: usize, eps: f64) -> TargetSet {
    let mut pts: Vec<Vector> = (1..=n).map(|k| vector(&[1.0 / k as f64, 0.0])).collect();
    pts.push(vector(&[0.0, 0.0]));
    TargetSet {
        points: pts,
        eps,
        generator: format!("convergent-{n}"),
    }
}

/// `circle(n)` plus four short outward sequences at the axis directions, at radii
/// `1 + 0.5·2^{−k}`, `k = 1..3`.
pub fn circle_decorated(n: usize) -> TargetSet {
    let mut t = circle(n);
    for j in 0..4 {
        let a = PI / 2.0 * j as f64;
        for k in 1..=3 {
            let r = 1.0 + 0.5 * 0.5f64.powi(k);
            t.points.push(vector(&[snap(r * a.cos()), snap(r * a.sin())]));
        }
    }
    t.generator = format!("circle-decorated-{n}");
    t
}

/// 101 samples of `[−1,1]×{0}` (resolution 0.03) and the isolated point `(0, 1.5)`.
pub fn segment_with_isolated() -> TargetSet {
    let mut pts: Vec<Vector> = (0..=100).map(|k| vector(&[-1.0 + 0.02 * k as f64, 0.0])).collect();
    pts.push(vector(&[0.0, 1.5]));
    TargetSet {
        points: pts,
        eps: 0.03,
        generator: "segment-isolated".into(),
    }
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::invalid(format!("bad {what} '{s}'")))
}

/// Bodies by short name: `disk`, `ballD`, `square`, `ngon-N`, `cube`, `tetrahedron`,
/// `prism`, `ellipse`, `ellipse-A-B`, `random-polytope-D-N`, `noncoplanar-M`.
pub fn body_by_name(name: &str, seed: u64) -> Result<ConvexBody> {
    let parts: Vec<&str> = name.split('-').collect();
    match parts.as_slice() {
        ["disk"] => Ok(disk()),
        ["square"] => Ok(square()),
        ["cube"] => cube(),
        ["tetrahedron"] => tetrahedron(),
        ["prism"] => prism(),
        ["ellipse"] => ellipse(2.0, 1.0, 512),
        ["ellipse", a, b] => ellipse(number(a, "semi-axis")?, number(b, "semi-axis")?, 512),
        ["ngon", n] => regular_ngon(number(n, "vertex count")?),
        ["random", "polytope", d, n] => random_polytope(number(d, "dimension")?, number(n, "vertex count")?, seed),
        ["noncoplanar", m] => non_coplanar_hull(number(m, "segment count")?).map(|h| h.body),
        [b] if b.starts_with("ball") => ConvexBody::ball(number(&b[4..], "dimension")?),
        _ => Err(Error::invalid(format!("unknown body generator '{name}'"))),
    }
}

/// Targets by short name: `circle-N`, `circle-decorated-N`, `cantor-dust-depthD`,
/// `scatter-N`, `scatter3-N`, `convergent-N`, `segment-isolated`.
pub fn target_by_name(name: &str, seed: u64) -> Result<TargetSet> {
    let parts: Vec<&str> = name.split('-').collect();
    match parts.as_slice() {
        ["circle", n] => Ok(circle(number(n, "point count")?)),
        ["circle", "decorated", n] => Ok(circle_decorated(number(n, "point count")?)),
        ["cantor", "dust", d] if d.starts_with("depth") => cantor_dust(number(&d[5..], "depth")?),
        ["scatter", n] => scatter(number(n, "point count")?, seed, 2),
        ["scatter3", n] => scatter(number(n, "point count")?, seed, 3),
        ["convergent", n] => Ok(convergent(number(n, "point count")?, 0.05)),
        ["segment", "isolated"] => Ok(segment_with_isolated()),
        _ => Err(Error::invalid(format!("unknown target generator '{name}'"))),
    }
}
