//! Supporting hyperplanes, maximal directions, `δ_P` and planar tangents.
//!
//! `δ_P(x)` is the infimum of `|ℓ̂·n|` over maximal segments `ℓ` with endpoint
//! `x` and outward normals `n` of supporting hyperplanes at `x`. The normal cone
//! at `x` is generated by finitely many normals and `n ↦ |ℓ̂·n|` is minimized over
//! the cone at a generator, so generators suffice. Maximal directions from `x`
//! are the zeros of `f(u) = maxChord(u) − exit(x, u)`, found by sampling `u`
//! and refining near sampled minima and at the ends of sampled zero runs.

use super::{BodyKind, ConvexBody, HyperplaneAt};
use crate::error::{Error, Result};
use crate::linalg::{self, cross3};
use crate::{Vector, TAU};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct DeltaConfig {
    pub directions_2d: usize,
    pub directions_3d: usize,
    /// Upper bound on boundary points visited by `delta_global`.
    pub boundary_samples: usize,
    /// `f(u) ≤ maximal_tol` counts as a maximal direction.
    pub maximal_tol: f64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig {
            directions_2d: 720,
            directions_3d: 2562,
            boundary_samples: 128,
            maximal_tol: 1e-9,
        }
    }
}

/// Maximal chord length for every sample direction, computed once per body.
#[derive(Clone, Debug)]
pub struct ChordTable {
    dirs: Vec<Vector>,
    lengths: Vec<f64>,
    /// Nearest sample directions (3D only; 2D uses angular order).
    neighbors: Vec<Vec<usize>>,
    /// Directions between vertex pairs, with their chord lengths.
    extra: Vec<(Vector, f64)>,
    spacing: f64,
    maximal_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaReport {
    pub value: f64,
    pub uncertainty: f64,
    #[serde(with = "crate::serde_vec")]
    pub point: Vector,
    #[serde(with = "crate::serde_vec::option")]
    pub direction: Option<Vector>,
    #[serde(with = "crate::serde_vec::option")]
    pub normal: Option<Vector>,
    /// Number of maximal directions found at `point`.
    pub maximal_directions: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExceptionalPoints {
    /// Boundary points with `δ_P(x) = 0`.
    #[serde(with = "crate::serde_vec::list")]
    pub points: Vec<Vector>,
    /// Lower bound for `δ_P` over the sampled boundary away from `points`.
    pub delta: f64,
    pub delta_uncertainty: f64,
    /// Minimum over points with exactly one maximal tangent of the bound on
    /// `|ℓ̂·N(other tangent)|`; `None` when no such point exists.
    pub eta: Option<f64>,
}

/// A maximal direction from a point, and whether it was located by refinement
/// (as opposed to being a raw sample).
#[derive(Clone, Debug)]
struct MaxDir {
    u: Vector,
    refined: bool,
}

impl ConvexBody {
    pub fn chord_table(&self, cfg: &DeltaConfig) -> ChordTable {
        let dirs = linalg::sphere_directions(self.dim, cfg.directions_2d, cfg.directions_3d);
        let n = dirs.len();
        let lengths: Vec<f64> = if self.dim == 2 {
            // Chord lengths are even in u.
            let mut l = vec![0.0; n];
            for k in 0..n {
                if n % 2 == 0 && k >= n / 2 {
                    l[k] = l[k - n / 2];
                } else {
                    l[k] = self.max_chord_length(&dirs[k]);
                }
            }
            l
        } else {
            dirs.iter().map(|u| self.max_chord_length(u)).collect()
        };
        let neighbors = if self.dim == 3 {
            (0..n)
                .map(|i| {
                    let mut idx: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                    idx.sort_by(|&a, &b| dirs[b].dot(&dirs[i]).total_cmp(&dirs[a].dot(&dirs[i])));
                    idx.truncate(6);
                    idx
                })
                .collect()
        } else {
            Vec::new()
        };
        let mut extra = Vec::new();
        if self.kind == BodyKind::Polytope {
            for i in 0..self.vertices.len() {
                for j in 0..self.vertices.len() {
                    if i != j {
                        if let Some(u) = linalg::unit(&(&self.vertices[j] - &self.vertices[i])) {
                            let l = self.max_chord_length(&u);
                            extra.push((u, l));
                        }
                    }
                }
            }
        }
        let spacing = match self.dim {
            2 => 2.0 * PI / n as f64,
            3 => (4.0 * PI / n as f64).sqrt(),
            _ => 1.0,
        };
        ChordTable {
            dirs,
            lengths,
            neighbors,
            extra,
            spacing,
            maximal_tol: cfg.maximal_tol,
        }
    }

    /// Generators of the normal cone at a boundary point.
    pub fn supporting_hyperplanes_at(&self, x: &Vector) -> Result<Vec<HyperplaneAt>> {
        self.check_dim(x)?;
        let sd = self.body_signed_distance(x);
        if sd.abs() > 10.0 * TAU {
            return Err(Error::precondition(
                format!("point is not on the boundary (signed distance {sd:.3e})"),
                Some(x.as_slice().to_vec()),
            ));
        }
        let normals: Vec<Vector> = match self.kind {
            BodyKind::Ball => vec![x / x.norm()],
            BodyKind::Polytope => self
                .facets
                .iter()
                .filter(|f| f.gap(x).abs() <= 10.0 * TAU)
                .map(|f| f.normal.clone())
                .collect(),
            BodyKind::Smooth2d => vec![self.smooth_normal(x)],
        };
        Ok(normals
            .into_iter()
            .map(|n| HyperplaneAt {
                base: x.clone(),
                normal: n,
            })
            .collect())
    }

    /// Interpolated discrete normal of a smooth body at a boundary point.
    fn smooth_normal(&self, x: &Vector) -> Vector {
        let m = self.vertices.len();
        let (i, s) = self.locate_on_loop(x);
        if s <= 1e-9 {
            return self.sample_normals[i].clone();
        }
        if s >= 1.0 - 1e-9 {
            return self.sample_normals[(i + 1) % m].clone();
        }
        let n = &self.sample_normals[i] * (1.0 - s) + &self.sample_normals[(i + 1) % m] * s;
        n.normalize()
    }

    /// Edge index and fractional position of a boundary point of a planar polygon.
    fn locate_on_loop(&self, x: &Vector) -> (usize, f64) {
        let m = self.vertices.len();
        let mut best = (0, 0.0, f64::INFINITY);
        for i in 0..m {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % m];
            let ab = b - a;
            let s = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            let d = (x - (a + &ab * s)).norm();
            if d < best.2 {
                best = (i, s, d);
            }
        }
        (best.0, best.1)
    }

    fn deficiency(&self, x: &Vector, u: &Vector) -> f64 {
        self.max_chord_length(u) - self.ray_exit(x, u)
    }

    /// Directions `u` such that the chord from `x` along `u` is maximal.
    fn maximal_directions(&self, x: &Vector, normals: &[Vector], table: &ChordTable) -> Vec<MaxDir> {
        let tol = table.maximal_tol;
        let n = table.dirs.len();
        let f: Vec<f64> = (0..n)
            .map(|k| table.lengths[k] - self.ray_exit(x, &table.dirs[k]))
            .collect();
        let in_z = |v: f64| v <= tol;
        let mut out: Vec<MaxDir> = (0..n)
            .filter(|&k| in_z(f[k]))
            .map(|k| MaxDir {
                u: table.dirs[k].clone(),
                refined: false,
            })
            .collect();
        // Exact candidates: vertex-pair directions and directions to vertices.
        for (u, l) in &table.extra {
            if l - self.ray_exit(x, u) <= tol {
                out.push(MaxDir {
                    u: u.clone(),
                    refined: true,
                });
            }
        }
        for v in &self.vertices {
            if let Some(u) = linalg::unit(&(v - x)).filter(|_| (v - x).norm() > TAU) {
                if self.deficiency(x, &u) <= tol {
                    out.push(MaxDir { u, refined: true });
                }
            }
        }
        let value = |u: &Vector| normals.iter().map(|nv| u.dot(nv).abs()).fold(f64::INFINITY, f64::min);
        let raw_best = out.iter().map(|d| value(&d.u)).fold(f64::INFINITY, f64::min);
        let worth = |u: &Vector| value(u) <= raw_best + 2.0 * table.spacing;

        if self.dim == 2 {
            let ang = |u: &Vector| u[1].atan2(u[0]);
            let at = |t: f64| Vector::from_vec(vec![t.cos(), t.sin()]);
            let step = 2.0 * PI / n as f64;
            let theta = |k: usize| ang(&table.dirs[k]);
            for k in 0..n {
                let prev = (k + n - 1) % n;
                let next = (k + 1) % n;
                // Local minimum of f not yet in Z: golden-section refine.
                if !in_z(f[k]) && f[k] <= f[prev] && f[k] <= f[next] && (f[k] < f[prev] || f[k] < f[next]) {
                    let t0 = theta(k);
                    let (t, v) = golden_min(|t| self.deficiency(x, &at(t)), t0 - step, t0 + step, 80);
                    if in_z(v) {
                        out.push(MaxDir {
                            u: at(t),
                            refined: true,
                        });
                    }
                }
                // Ends of zero runs.
                if in_z(f[k]) != in_z(f[next]) && worth(&table.dirs[if in_z(f[k]) { k } else { next }]) {
                    let (mut a, mut b) = (theta(k), theta(k) + step);
                    let a_in = in_z(f[k]);
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        if in_z(self.deficiency(x, &at(mid))) == a_in {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    let t = if a_in { a } else { b };
                    if in_z(self.deficiency(x, &at(t))) {
                        out.push(MaxDir {
                            u: at(t),
                            refined: true,
                        });
                    }
                }
                // Inside a zero run, a direction orthogonal to a normal gives 0.
                if in_z(f[k]) && in_z(f[next]) {
                    for nv in normals {
                        let phi = ang(nv);
                        for t in [phi + PI / 2.0, phi - PI / 2.0] {
                            let off = (t - theta(k)).rem_euclid(2.0 * PI);
                            if off > 0.0 && off < step {
                                let u = at(theta(k) + off);
                                if in_z(self.deficiency(x, &u)) {
                                    out.push(MaxDir { u, refined: true });
                                }
                            }
                        }
                    }
                }
            }
        } else if self.dim == 3 {
            for k in 0..n {
                let nb = &table.neighbors[k];
                if !in_z(f[k]) && nb.iter().all(|&j| f[k] <= f[j]) && f[k] < 0.1 * self.diameter {
                    if let Some(u) = compass_min(|u| self.deficiency(x, u), &table.dirs[k], table.spacing) {
                        if in_z(self.deficiency(x, &u)) {
                            out.push(MaxDir { u, refined: true });
                        }
                    }
                }
                if in_z(f[k]) && worth(&table.dirs[k]) {
                    for &j in nb {
                        if !in_z(f[j]) {
                            let (mut a, mut b) = (0.0, 1.0);
                            for _ in 0..50 {
                                let mid = 0.5 * (a + b);
                                let u = slerp(&table.dirs[k], &table.dirs[j], mid);
                                if in_z(self.deficiency(x, &u)) {
                                    a = mid;
                                } else {
                                    b = mid;
                                }
                            }
                            out.push(MaxDir {
                                u: slerp(&table.dirs[k], &table.dirs[j], a),
                                refined: true,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn delta_at(&self, x: &Vector) -> Result<DeltaReport> {
        let table = self.chord_table(&DeltaConfig::default());
        self.delta_at_with(x, &table)
    }

    pub fn delta_at_with(&self, x: &Vector, table: &ChordTable) -> Result<DeltaReport> {
        let normals: Vec<Vector> = self
            .supporting_hyperplanes_at(x)?
            .into_iter()
            .map(|h| h.normal)
            .collect();
        let dirs = self.maximal_directions(x, &normals, table);
        let mut report = DeltaReport {
            value: f64::INFINITY,
            uncertainty: table.spacing,
            point: x.clone(),
            direction: None,
            normal: None,
            maximal_directions: dirs.len(),
        };
        for d in &dirs {
            for nv in &normals {
                let v = d.u.dot(nv).abs();
                if v < report.value {
                    report.value = v;
                    report.direction = Some(d.u.clone());
                    report.normal = Some(nv.clone());
                    report.uncertainty = if d.refined { 1e-9 } else { table.spacing / 2.0 };
                }
            }
        }
        if dirs.is_empty() {
            return Err(Error::Numerical(
                "no maximal direction found at the resolution in use".into(),
            ));
        }
        Ok(report)
    }

    /// Points spread over the boundary used by `delta_global`.
    pub fn boundary_samples(&self, cap: usize) -> Vec<Vector> {
        match (self.kind, self.dim) {
            (BodyKind::Ball, 2) => linalg::circle_directions(64),
            (BodyKind::Ball, 3) => linalg::fibonacci_sphere(64),
            (BodyKind::Ball, d) => linalg::sphere_directions(d, 64, 64),
            (BodyKind::Smooth2d, _) => {
                let m = self.vertices.len();
                let stride = m.div_ceil(cap.max(1)).max(1);
                self.vertices.iter().step_by(stride).cloned().collect()
            }
            (BodyKind::Polytope, 2) => {
                let m = self.vertices.len();
                let mut out = Vec::new();
                for i in 0..m {
                    let a = &self.vertices[i];
                    let b = &self.vertices[(i + 1) % m];
                    for k in 0..8 {
                        out.push(a + (b - a) * (k as f64 / 8.0));
                    }
                }
                out
            }
            (BodyKind::Polytope, _) => {
                let mut out: Vec<Vector> = self.vertices.clone();
                for (a, b) in self.edges() {
                    let (a, b) = (&self.vertices[a], &self.vertices[b]);
                    for k in 1..4 {
                        out.push(a + (b - a) * (k as f64 / 4.0));
                    }
                }
                for fv in &self.facet_vertices {
                    let mut c = Vector::zeros(self.dim);
                    for &i in fv {
                        c += &self.vertices[i];
                    }
                    out.push(c / fv.len() as f64);
                }
                out
            }
        }
    }

    /// Vertex pairs spanning an edge of a polytope.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nv = self.vertices.len();
        if self.dim == 2 {
            return (0..nv).map(|i| (i, (i + 1) % nv)).collect();
        }
        let mut out = Vec::new();
        for a in 0..nv {
            for b in a + 1..nv {
                let shared: Vec<Vector> = self
                    .facet_vertices
                    .iter()
                    .zip(&self.facets)
                    .filter(|(fv, _)| fv.contains(&a) && fv.contains(&b))
                    .map(|(_, f)| f.normal.clone())
                    .collect();
                if linalg::rank(&shared, linalg::RANK_TOL) >= self.dim - 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn delta_global(&self) -> Result<DeltaReport> {
        self.delta_global_with(&DeltaConfig::default())
    }

    pub fn delta_global_with(&self, cfg: &DeltaConfig) -> Result<DeltaReport> {
        let table = self.chord_table(cfg);
        let mut best: Option<DeltaReport> = None;
        for x in self.boundary_samples(cfg.boundary_samples) {
            let r = self.delta_at_with(&x, &table)?;
            if best.as_ref().map_or(true, |b| r.value < b.value) {
                let zero = r.value <= TAU;
                best = Some(r);
                if zero {
                    break;
                }
            }
        }
        best.ok_or_else(|| Error::Numerical("no boundary samples".into()))
    }

    /// Unit left and right tangents `(ℓ_x, r_x)` at a boundary point of a planar
    /// body; `r_x` follows the boundary counter-clockwise.
    pub fn tangents_2d(&self, x: &Vector) -> Result<(Vector, Vector)> {
        if self.dim != 2 {
            return Err(Error::invalid("tangents are defined for planar bodies"));
        }
        if !self.on_boundary(x) {
            return Err(Error::precondition(
                "point is not on the boundary",
                Some(x.as_slice().to_vec()),
            ));
        }
        let rot = |n: &Vector| Vector::from_vec(vec![-n[1], n[0]]);
        match self.kind {
            BodyKind::Ball => {
                let r = rot(&(x / x.norm()));
                Ok((-&r, r))
            }
            BodyKind::Smooth2d => {
                let r = rot(&self.smooth_normal(x));
                Ok((-&r, r))
            }
            BodyKind::Polytope => {
                let m = self.vertices.len();
                if let Some(i) = self.vertices.iter().position(|v| (v - x).norm() <= 10.0 * TAU) {
                    let r = (&self.vertices[(i + 1) % m] - &self.vertices[i]).normalize();
                    let l = (&self.vertices[(i + m - 1) % m] - &self.vertices[i]).normalize();
                    return Ok((l, r));
                }
                let (i, _) = self.locate_on_loop(x);
                let r = (&self.vertices[(i + 1) % m] - &self.vertices[i]).normalize();
                Ok((-&r, r))
            }
        }
    }

    /// Whether polygon edge `i` is a longest chord in its direction.
    fn edge_is_maximal(&self, i: usize) -> bool {
        let m = self.vertices.len();
        let e = &self.vertices[(i + 1) % m] - &self.vertices[i];
        e.norm() >= self.max_chord_length(&e.normalize()) - 1e-9 * self.diameter.max(1.0)
    }

    /// Boundary points where `δ_P` vanishes, the bound `δ` off them, and `η`.
    pub fn exceptional_points_2d(&self) -> Result<ExceptionalPoints> {
        if self.dim != 2 {
            return Err(Error::invalid("exceptional points are computed for planar bodies"));
        }
        let cfg = DeltaConfig::default();
        let table = self.chord_table(&cfg);
        if self.is_ball() {
            let d = self.delta_global_with(&cfg)?;
            return Ok(ExceptionalPoints {
                points: Vec::new(),
                delta: d.value,
                delta_uncertainty: d.uncertainty,
                eta: None,
            });
        }
        let m = self.vertices.len();
        let maximal: Vec<bool> = (0..m).map(|i| self.edge_is_maximal(i)).collect();
        let in_f: Vec<bool> = (0..m).map(|i| maximal[i] || maximal[(i + m - 1) % m]).collect();
        let points: Vec<Vector> = (0..m).filter(|&i| in_f[i]).map(|i| self.vertices[i].clone()).collect();

        let mut delta = f64::INFINITY;
        let mut unc: f64 = 0.0;
        for x in self.boundary_samples(cfg.boundary_samples) {
            if points.iter().any(|p| (p - &x).norm() <= 10.0 * TAU) {
                continue;
            }
            let r = self.delta_at_with(&x, &table)?;
            if r.value < delta {
                delta = r.value;
                unc = r.uncertainty;
            }
        }

        let mut eta: Option<f64> = None;
        for i in 0..m {
            let (prev_max, next_max) = (maximal[(i + m - 1) % m], maximal[i]);
            if prev_max == next_max {
                continue;
            }
            let x = &self.vertices[i];
            let (l, r) = self.tangents_2d(x)?;
            let (max_t, other) = if next_max { (r, l) } else { (l, r) };
            let n_other = Vector::from_vec(vec![-other[1], other[0]]);
            let normals: Vec<Vector> = self
                .supporting_hyperplanes_at(x)?
                .into_iter()
                .map(|h| h.normal)
                .collect();
            let mut eta_x = f64::INFINITY;
            for d in self.maximal_directions(x, &normals, &table) {
                if (&d.u - &max_t).norm() > 1e-6 {
                    eta_x = eta_x.min(d.u.dot(&n_other).abs());
                }
            }
            if eta_x.is_finite() {
                eta = Some(eta.map_or(eta_x, |e: f64| e.min(eta_x)));
            }
        }
        Ok(ExceptionalPoints {
            points,
            delta,
            delta_uncertainty: unc,
            eta,
        })
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Compass search for a minimum of `f` on the unit sphere near `u0`.
fn compass_min(f: impl Fn(&Vector) -> f64, u0: &Vector, step0: f64) -> Option<Vector> {
    let seed = if u0[0].abs() < 0.9 {
        Vector::from_vec(vec![1.0, 0.0, 0.0])
    } else {
        Vector::from_vec(vec![0.0, 1.0, 0.0])
    };
    let e1 = linalg::unit(&cross3(u0, &seed))?;
    let e2 = cross3(u0, &e1);
    let at = |a: f64, b: f64| (u0 + &e1 * a + &e2 * b).normalize();
    let (mut a, mut b) = (0.0, 0.0);
    let mut best = f(u0);
    let mut h = step0;
    let mut iters = 0;
    while h > 1e-11 && iters < 2000 {
        iters += 1;
        let mut moved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = f(&at(a + da, b + db));
            if v < best {
                best = v;
                a += da;
                b += db;
                moved = true;
                break;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    Some(at(a, b))
}

fn slerp(a: &Vector, b: &Vector, t: f64) -> Vector {
    (a * (1.0 - t) + b * t).normalize()
}
