//! Convex bodies `P` with the origin in their interior, their homothets `w + tP`,
//! and the kernel queries on them.
//!
//! Three representations share one interface:
//! * `Ball`: the closed unit Euclidean ball in any dimension;
//! * `Polytope`: the convex hull of a vertex list in R² or R³, with a derived
//!   half-space representation;
//! * `Smooth2d`: a planar convex region given by at least 256 boundary samples.
//!   It is the sample polygon for containment and chord queries, but supporting
//!   lines at samples come from discrete (central-difference) tangents.

mod contact;
mod delta;
mod enclose;
mod kernel;

pub use contact::{Contact, ScaleBound};
pub use delta::{ChordTable, DeltaConfig, DeltaReport, ExceptionalPoints};

use crate::error::{Error, Result};
use crate::linalg::{self, cross3, RANK_TOL};
use crate::{Vector, TAU};
use serde::{Deserialize, Serialize};

/// Minimum number of boundary samples for a smooth planar body.
pub const MIN_SMOOTH_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BodyKind {
    #[serde(rename = "ball")]
    Ball,
    #[serde(rename = "polytope")]
    Polytope,
    #[serde(rename = "smooth2d")]
    Smooth2d,
}

/// Wire form of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<Vec<f64>>,
    #[serde(default)]
    pub name: String,
}

/// Closed half-space `normal·z ≤ offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vector,
    pub offset: f64,
}

impl HalfSpace {
    pub fn gap(&self, z: &Vector) -> f64 {
        self.normal.dot(z) - self.offset
    }
}

/// A supporting hyperplane through `base`; the body lies where `normal·(z − base) ≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneAt {
    #[serde(with = "crate::serde_vec")]
    pub base: Vector,
    #[serde(with = "crate::serde_vec")]
    pub normal: Vector,
}

/// A translated and scaled copy `center + scale·P` of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Homothet {
    #[serde(with = "crate::serde_vec")]
    pub center: Vector,
    pub scale: f64,
}

impl Homothet {
    pub fn new(center: Vector, scale: f64) -> Self {
        Homothet { center, scale }
    }

    /// The body itself: center 0, scale 1.
    pub fn identity(dim: usize) -> Self {
        Homothet::new(Vector::zeros(dim), 1.0)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Image of a body point: `w + t·p`.
    pub fn apply(&self, p: &Vector) -> Vector {
        &self.center + p * self.scale
    }

    /// Body coordinates of `p`: `(p − w)/t`.
    pub fn pull_back(&self, p: &Vector) -> Vector {
        (p - &self.center) / self.scale
    }

    /// `self ∘ inner`: `w₁ + t₁(w₂ + t₂P) = (w₁ + t₁w₂) + t₁t₂P`.
    pub fn compose(&self, inner: &Homothet) -> Homothet {
        Homothet::new(self.apply(&inner.center), self.scale * inner.scale)
    }

    pub fn with_scale(&self, scale: f64) -> Homothet {
        Homothet::new(self.center.clone(), scale)
    }

    /// Predicate tolerance for this copy: `TAU` relative to its scale.
    pub fn tol(&self) -> f64 {
        TAU * self.scale.max(1e-7)
    }
}

/// Closed segment between two points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "crate::serde_vec")]
    pub x: Vector,
    #[serde(with = "crate::serde_vec")]
    pub y: Vector,
}

impl Segment {
    pub fn new(x: Vector, y: Vector) -> Self {
        Segment { x, y }
    }

    pub fn length(&self) -> f64 {
        (&self.y - &self.x).norm()
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() <= TAU
    }

    /// Unit direction from `x` to `y`, if non-degenerate.
    pub fn direction(&self) -> Option<Vector> {
        if self.is_degenerate() {
            None
        } else {
            linalg::unit(&(&self.y - &self.x))
        }
    }

    pub fn translate(&self, t: &Vector) -> Segment {
        Segment::new(&self.x + t, &self.y + t)
    }
}

#[derive(Clone, Debug)]
pub struct ConvexBody {
    name: String,
    kind: BodyKind,
    dim: usize,
    /// Extreme points (polytope) or boundary samples (smooth2d); counter-clockwise in 2D.
    vertices: Vec<Vector>,
    /// Facets; in 2D facet `i` is the edge from vertex `i` to vertex `i + 1`.
    facets: Vec<HalfSpace>,
    /// Vertex indices on each facet.
    facet_vertices: Vec<Vec<usize>>,
    /// Discrete outward normals at the samples of a smooth body.
    sample_normals: Vec<Vector>,
    inradius: f64,
    diameter: f64,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.to_spec() == other.to_spec()
    }
}

impl ConvexBody {
    /// The closed unit ball in R^dim.
    pub fn ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ball dimension must be positive"));
        }
        Ok(ConvexBody {
            name: format!("ball{dim}"),
            kind: BodyKind::Ball,
            dim,
            vertices: Vec::new(),
            facets: Vec::new(),
            facet_vertices: Vec::new(),
            sample_normals: Vec::new(),
            inradius: 1.0,
            diameter: 2.0,
        })
    }

    /// Convex hull of `points` in R² or R³. Non-extreme points are dropped.
    pub fn polytope(name: &str, points: &[Vector]) -> Result<Self> {
        let dim = check_points(points)?;
        let (vertices, facets) = match dim {
            2 => hull2(points)?,
            3 => hull3(points)?,
            _ => return Err(Error::invalid("polytopes must live in R² or R³")),
        };
        Self::finish(name, BodyKind::Polytope, dim, vertices, facets)
    }

    /// Like [`ConvexBody::polytope`] but first translates the points so their
    /// vertex centroid is the origin.
    pub fn polytope_centered(name: &str, points: &[Vector]) -> Result<Self> {
        let dim = check_points(points)?;
        let c = centroid(points, dim);
        let shifted: Vec<Vector> = points.iter().map(|p| p - &c).collect();
        Self::polytope(name, &shifted)
    }

    /// Planar convex region from boundary samples in convex position.
    pub fn smooth2d(name: &str, samples: &[Vector]) -> Result<Self> {
        let dim = check_points(samples)?;
        if dim != 2 {
            return Err(Error::invalid("smooth2d bodies are planar"));
        }
        if samples.len() < MIN_SMOOTH_SAMPLES {
            return Err(Error::invalid(format!(
                "smooth2d needs at least {MIN_SMOOTH_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        let (vertices, facets) = hull2(samples)?;
        if vertices.len() != samples.len() {
            return Err(Error::Construction {
                message: format!(
                    "{} of {} samples are not in strictly convex position",
                    samples.len() - vertices.len(),
                    samples.len()
                ),
                suggestion: None,
            });
        }
        Self::finish(name, BodyKind::Smooth2d, 2, vertices, facets)
    }

    fn finish(name: &str, kind: BodyKind, dim: usize, vertices: Vec<Vector>, facets: Vec<HalfSpace>) -> Result<Self> {
        let scale = vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if let Some(f) = facets.iter().find(|f| f.offset <= TAU) {
            let c = centroid(&vertices, dim);
            return Err(Error::Construction {
                message: format!(
                    "origin is not interior (facet with normal {:?} has offset {:.3e}); translate by the suggested vector",
                    f.normal.as_slice(),
                    f.offset
                ),
                suggestion: Some((-c).as_slice().to_vec()),
            });
        }
        // Cross-check the two representations.
        let tol = 1e-7 * scale;
        let mut facet_vertices = vec![Vec::new(); facets.len()];
        for (vi, v) in vertices.iter().enumerate() {
            for (fi, f) in facets.iter().enumerate() {
                let g = f.gap(v);
                if g > tol {
                    return Err(Error::Numerical(format!("vertex {vi} violates facet {fi} by {g:.3e}")));
                }
                if g.abs() <= tol {
                    facet_vertices[fi].push(vi);
                }
            }
        }
        for (fi, fv) in facet_vertices.iter().enumerate() {
            if fv.len() < dim {
                return Err(Error::Numerical(format!(
                    "facet {fi} carries only {} vertices",
                    fv.len()
                )));
            }
        }
        let sample_normals = if kind == BodyKind::Smooth2d {
            let m = vertices.len();
            (0..m)
                .map(|i| {
                    let t = &vertices[(i + 1) % m] - &vertices[(i + m - 1) % m];
                    linalg::unit(&Vector::from_vec(vec![t[1], -t[0]])).expect("distinct samples")
                })
                .collect()
        } else {
            Vec::new()
        };
        let mut diameter: f64 = 0.0;
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                diameter = diameter.max((&vertices[i] - &vertices[j]).norm());
            }
        }
        let inradius = chebyshev_radius(&facets, dim)?;
        Ok(ConvexBody {
            name: name.to_string(),
            kind,
            dim,
            vertices,
            facets,
            facet_vertices,
            sample_normals,
            inradius,
            diameter,
        })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        let conv = |rows: &[Vec<f64>]| -> Result<Vec<Vector>> {
            rows.iter()
                .map(|r| {
                    if r.len() != spec.dim {
                        Err(Error::invalid(format!(
                            "point {:?} has {} coordinates, expected dim = {}",
                            r,
                            r.len(),
                            spec.dim
                        )))
                    } else {
                        Ok(Vector::from_column_slice(r))
                    }
                })
                .collect()
        };
        let mut body = match spec.kind {
            BodyKind::Ball => {
                if !spec.vertices.is_empty() || !spec.samples.is_empty() {
                    return Err(Error::invalid("a ball takes neither vertices nor samples"));
                }
                Self::ball(spec.dim)?
            }
            BodyKind::Polytope => {
                if !spec.samples.is_empty() {
                    return Err(Error::invalid("a polytope takes vertices, not samples"));
                }
                Self::polytope(&spec.name, &conv(&spec.vertices)?)?
            }
            BodyKind::Smooth2d => {
                if !spec.vertices.is_empty() {
                    return Err(Error::invalid("a smooth2d body takes samples, not vertices"));
                }
                if spec.dim != 2 {
                    return Err(Error::invalid("smooth2d bodies have dim = 2"));
                }
                Self::smooth2d(&spec.name, &conv(&spec.samples)?)?
            }
        };
        if !spec.name.is_empty() {
            body.name = spec.name.clone();
        }
        Ok(body)
    }

    pub fn to_spec(&self) -> BodySpec {
        let rows: Vec<Vec<f64>> = self.vertices.iter().map(|v| v.as_slice().to_vec()).collect();
        let (vertices, samples) = match self.kind {
            BodyKind::Ball => (Vec::new(), Vec::new()),
            BodyKind::Polytope => (rows, Vec::new()),
            BodyKind::Smooth2d => (Vec::new(), rows),
        };
        BodySpec {
            kind: self.kind,
            dim: self.dim,
            vertices,
            samples,
            name: self.name.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points of a polytope or samples of a smooth body; empty for balls.
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn facet_vertices(&self) -> &[Vec<usize>] {
        &self.facet_vertices
    }

    pub fn is_ball(&self) -> bool {
        self.kind == BodyKind::Ball
    }

    /// Polytopes and smooth bodies share the polygon machinery.
    pub fn is_polyhedral(&self) -> bool {
        self.kind != BodyKind::Ball
    }

    /// Whether the body, as modelled, contains no boundary segment.
    pub fn is_strictly_convex(&self) -> bool {
        self.kind == BodyKind::Ball
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Largest distance from the origin to the body.
    pub fn circumradius(&self) -> f64 {
        if self.is_ball() {
            1.0
        } else {
            self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
        }
    }

    /// Discrete outward normal at sample `i` of a smooth body.
    pub fn sample_normal(&self, i: usize) -> Option<&Vector> {
        self.sample_normals.get(i)
    }

    /// Axis-aligned bounding box of a copy, as (lower, upper) corners.
    pub fn bounding_box(&self, q: &Homothet) -> (Vector, Vector) {
        let mut lo = Vector::zeros(self.dim);
        let mut hi = Vector::zeros(self.dim);
        for k in 0..self.dim {
            let mut e = Vector::zeros(self.dim);
            e[k] = 1.0;
            hi[k] = q.center[k] + q.scale * self.support_value(&e);
            lo[k] = q.center[k] - q.scale * self.support_value(&-e);
        }
        (lo, hi)
    }
}

fn check_points(points: &[Vector]) -> Result<usize> {
    let first = points.first().ok_or_else(|| Error::invalid("empty point list"))?;
    let dim = first.len();
    for p in points {
        if p.len() != dim {
            return Err(Error::invalid("points of mixed dimension"));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
    }
    if points.len() <= dim {
        return Err(Error::invalid(format!("need at least {} points in R^{dim}", dim + 1)));
    }
    Ok(dim)
}

fn centroid(points: &[Vector], dim: usize) -> Vector {
    let mut c = Vector::zeros(dim);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

fn cross2(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone-chain hull, counter-clockwise, collinear points removed.
fn hull2(points: &[Vector]) -> Result<(Vec<Vector>, Vec<HalfSpace>)> {
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (&*a - &*b).norm() <= TAU);
    let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let hull = lower;
    if hull.len() < 3 {
        return Err(Error::Construction {
            message: "points are collinear".into(),
            suggestion: None,
        });
    }
    let m = hull.len();
    let facets = (0..m)
        .map(|i| {
            let e = &hull[(i + 1) % m] - &hull[i];
            let n = linalg::unit(&Vector::from_vec(vec![e[1], -e[0]])).expect("distinct hull vertices");
            let offset = n.dot(&hull[i]);
            HalfSpace { normal: n, offset }
        })
        .collect();
    Ok((hull, facets))
}

/// Brute-force hull in R³: every plane through three points that leaves all
/// points on one side is a facet plane.
fn hull3(points: &[Vector]) -> Result<(Vec<Vector>, Vec<HalfSpace>)> {
    let n = points.len();
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let mut facets: Vec<HalfSpace> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let c = cross3(&(&points[j] - &points[i]), &(&points[k] - &points[i]));
                let Some(mut nrm) = linalg::unit(&c).filter(|_| c.norm() > 1e-10 * scale * scale) else {
                    continue;
                };
                let mut off = nrm.dot(&points[i]);
                let mut above = false;
                let mut below = false;
                for p in points {
                    let g = nrm.dot(p) - off;
                    above |= g > tol;
                    below |= g < -tol;
                }
                if above && below {
                    continue;
                }
                if above {
                    nrm = -nrm;
                    off = -off;
                }
                if !below && !above {
                    return Err(Error::Construction {
                        message: "points are coplanar".into(),
                        suggestion: None,
                    });
                }
                if !facets
                    .iter()
                    .any(|f| (&f.normal - &nrm).norm() < 1e-7 && (f.offset - off).abs() < 1e-7 * scale)
                {
                    facets.push(HalfSpace {
                        normal: nrm,
                        offset: off,
                    });
                }
            }
        }
    }
    let mut vertices: Vec<Vector> = Vec::new();
    for p in points {
        let active: Vec<Vector> = facets
            .iter()
            .filter(|f| f.gap(p).abs() <= tol)
            .map(|f| f.normal.clone())
            .collect();
        if linalg::rank(&active, RANK_TOL) == 3 && !vertices.iter().any(|v| (v - p).norm() <= TAU) {
            vertices.push(p.clone());
        }
    }
    Ok((vertices, facets))
}

/// Radius of the largest ball inside the polyhedron (1 for the unit ball).
fn chebyshev_radius(facets: &[HalfSpace], dim: usize) -> Result<f64> {
    if facets.is_empty() {
        return Ok(1.0);
    }
    let mut lp = crate::lp::Lp::new(dim + 1);
    for f in facets {
        let mut row: Vec<f64> = f.normal.iter().copied().collect();
        row.push(1.0);
        lp.le(&row, f.offset);
    }
    let mut c = vec![0.0; dim + 1];
    c[dim] = 1.0;
    lp.maximize(&c)
        .map(|s| s.value)
        .map_err(|e| Error::Numerical(format!("inradius LP failed: {e:?}")))
}
