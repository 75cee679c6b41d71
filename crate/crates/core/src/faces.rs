//! Face lattices of polytopes, extreme segments, incidence sets and critical subspaces.
//!
//! Facets are identified by their index in [`ConvexBody::facets`]. A face is stored with
//! its full active set (every facet containing it), so faces and facet-index sets are
//! interchangeable.
//!
//! Extremality is decided on the translation body `T(ℓ) = {t : ℓ + t ⊆ P}`: a maximal
//! segment is extreme exactly when `0` is a vertex of `T(ℓ)`, i.e. when the facets active
//! at either endpoint have normals spanning R^d.

use crate::bodies::{ConvexBody, Homothet, Segment};
use crate::error::{Error, Result};
use crate::linalg::{intersect, null_space, orthonormal_basis, rank, RANK_TOL};
use crate::lp::Lp;
use crate::{Vector, TAU};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const MAX_FACETS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    /// Facets containing the face.
    pub active: Vec<usize>,
    pub dim: isize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceLattice {
    /// Non-empty faces, ordered by dimension then vertex set; the last face is `P`.
    pub faces: Vec<Face>,
    /// Covering pairs `(smaller, larger)` of the inclusion order.
    pub incidence: Vec<(usize, usize)>,
    pub dim: usize,
}

impl FaceLattice {
    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim + 1];
        for f in &self.faces {
            out[f.dim as usize] += 1;
        }
        out
    }

    /// The smallest face containing every vertex in `vertices`.
    pub fn join(&self, vertices: &[usize]) -> &Face {
        self.faces
            .iter()
            .find(|f| vertices.iter().all(|v| f.vertices.contains(v)))
            .expect("P contains every vertex")
    }

    /// The face cut out by a facet set; `None` if the facets have no common vertex.
    pub fn face_of(&self, facets: &[usize]) -> Option<&Face> {
        self.faces
            .iter()
            .filter(|f| facets.iter().all(|i| f.active.contains(i)))
            .max_by_key(|f| f.dim)
    }
}

fn require_polytope(body: &ConvexBody) -> Result<()> {
    if !body.is_polyhedral() {
        return Err(Error::invalid("face computations need a polytope"));
    }
    if body.dim() > 3 {
        return Err(Error::invalid("face computations support d <= 3"));
    }
    if body.facets().len() > MAX_FACETS {
        return Err(Error::ResourceLimit(format!(
            "{} facets exceed the limit of {MAX_FACETS}",
            body.facets().len()
        )));
    }
    Ok(())
}

/// All non-empty faces by closing the facet vertex sets under intersection.
pub fn build_face_lattice(body: &ConvexBody) -> Result<FaceLattice> {
    require_polytope(body)?;
    let nv = body.vertices().len();
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    sets.insert((0..nv).collect());
    let mut frontier: Vec<Vec<usize>> = body.facet_vertices().iter().map(|f| sorted(f)).collect();
    while let Some(s) = frontier.pop() {
        if s.is_empty() || !sets.insert(s.clone()) {
            continue;
        }
        for f in body.facet_vertices() {
            let i: Vec<usize> = s.iter().copied().filter(|v| f.contains(v)).collect();
            if !i.is_empty() && !sets.contains(&i) {
                frontier.push(i);
            }
        }
    }
    let verts = body.vertices();
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|vs| {
            let pts: Vec<Vector> = vs.iter().map(|&v| verts[v].clone()).collect();
            let active = (0..body.facets().len())
                .filter(|&i| vs.iter().all(|v| body.facet_vertices()[i].contains(v)))
                .collect();
            Face {
                id: 0,
                active,
                dim: crate::linalg::affine_dim(&pts, RANK_TOL),
                vertices: vs,
            }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.vertices.cmp(&b.vertices)));
    for (i, f) in faces.iter_mut().enumerate() {
        f.id = i;
    }
    let mut incidence = Vec::new();
    for a in &faces {
        for b in &faces {
            if b.dim == a.dim + 1 && a.vertices.iter().all(|v| b.vertices.contains(v)) {
                incidence.push((a.id, b.id));
            }
        }
    }
    Ok(FaceLattice {
        faces,
        incidence,
        dim: body.dim(),
    })
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Facets active at `x`; empty for interior points.
pub fn faces_containing(body: &ConvexBody, x: &Vector) -> Result<Vec<usize>> {
    body.check_dim(x)?;
    let gaps: Vec<f64> = body.facets().iter().map(|f| f.gap(x)).collect();
    if let Some((i, g)) = gaps.iter().enumerate().find(|(_, g)| **g > TAU) {
        return Err(Error::precondition(
            format!("point lies outside facet {i} by {g:e}"),
            Some(x.iter().copied().collect()),
        ));
    }
    Ok(gaps
        .iter()
        .enumerate()
        .filter(|(_, g)| g.abs() <= TAU)
        .map(|(i, _)| i)
        .collect())
}

/// The erosion `T(ℓ) = {t : ℓ + t ⊆ P}` as rows `a·t ≤ c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationBody {
    #[serde(with = "crate::serde_vec::list")]
    pub normals: Vec<Vector>,
    pub offsets: Vec<f64>,
    /// Facet index of each row.
    pub facet: Vec<usize>,
}

impl TranslationBody {
    pub fn of(body: &ConvexBody, seg: &Segment) -> TranslationBody {
        let mut out = TranslationBody {
            normals: Vec::new(),
            offsets: Vec::new(),
            facet: Vec::new(),
        };
        for (i, f) in body.facets().iter().enumerate() {
            for p in [&seg.x, &seg.y] {
                out.normals.push(f.normal.clone());
                out.offsets.push(-f.gap(p));
                out.facet.push(i);
            }
        }
        out
    }

    pub fn contains(&self, t: &Vector) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(a, c)| a.dot(t) <= c + TAU)
    }

    /// Rows tight at `t = 0`.
    pub fn active_at_zero(&self) -> Vec<usize> {
        (0..self.offsets.len())
            .filter(|&k| self.offsets[k].abs() <= TAU)
            .collect()
    }

    pub fn zero_is_vertex(&self, dim: usize) -> bool {
        let act: Vec<Vector> = self.active_at_zero().iter().map(|&k| self.normals[k].clone()).collect();
        rank(&act, RANK_TOL) == dim
    }
}

fn require_maximal(body: &ConvexBody, seg: &Segment) -> Result<()> {
    if seg.is_degenerate() {
        return Err(Error::precondition("segment is degenerate", None));
    }
    if !body.is_maximal_segment(seg)? {
        return Err(Error::precondition(
            "segment is not maximal",
            Some(seg.y.iter().copied().collect()),
        ));
    }
    Ok(())
}

/// Extremality of a maximal segment.
pub fn is_extreme_segment(body: &ConvexBody, seg: &Segment) -> Result<bool> {
    require_maximal(body, seg)?;
    if body.is_ball() {
        return Ok(true);
    }
    Ok(TranslationBody::of(body, seg).zero_is_vertex(body.dim()))
}

/// Facets containing both endpoints.
pub fn segment_face_incidence(body: &ConvexBody, seg: &Segment) -> Result<Vec<usize>> {
    body.check_dim(&seg.x)?;
    body.check_dim(&seg.y)?;
    Ok(body
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.gap(&seg.x).abs() <= TAU && f.gap(&seg.y).abs() <= TAU)
        .map(|(i, _)| i)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSetResult {
    pub member: bool,
    pub witness: Option<Homothet>,
    /// Forced scale of any copy in which the segment is maximal.
    pub scale: f64,
    /// Extreme placements examined (vertices of the placement polytope).
    pub placements: usize,
    /// Whether the search covered every extreme placement.
    pub complete: bool,
}

/// Is there a copy `w + sP` in which `[x, y]` is extreme, maximal, and lies in exactly the
/// facets `f`?
///
/// The scale is forced by maximality. Placements `w` with `[x, y] ⊆ w + sP` form a polytope
/// `W`, and the segment is extreme in `w + sP` iff `w` is a vertex of `W`; the vertices are
/// enumerated as `d`-subsets of its rows.
pub fn g_set_membership(body: &ConvexBody, x: &Vector, y: &Vector, f: &[usize]) -> Result<GSetResult> {
    body.check_dim(x)?;
    body.check_dim(y)?;
    let u = y - x;
    let len = u.norm();
    if len <= TAU {
        return Err(Error::invalid("x and y coincide"));
    }
    let chord = body.max_chord_length(&u);
    if !(chord > TAU) {
        return Err(Error::invalid("degenerate chord in this direction"));
    }
    let s = len / chord;
    let want = sorted(f);
    if body.is_ball() {
        let w = (x + y) / 2.0;
        return Ok(GSetResult {
            member: want.is_empty(),
            witness: want.is_empty().then(|| Homothet::new(w, s)),
            scale: s,
            placements: 1,
            complete: true,
        });
    }
    let d = body.dim();
    // Rows a·w ≥ a·p − s·b for p ∈ {x, y}.
    let mut rows: Vec<(Vector, f64)> = Vec::new();
    for fc in body.facets() {
        for p in [x, y] {
            rows.push((fc.normal.clone(), fc.normal.dot(p) - s * fc.offset));
        }
    }
    let mut seen: Vec<Vector> = Vec::new();
    let mut placements = 0;
    let mut found = None;
    for combo in combinations(rows.len(), d) {
        let m = nalgebra::DMatrix::from_fn(d, d, |r, c| rows[combo[r]].0[c]);
        let rhs = Vector::from_fn(d, |r, _| rows[combo[r]].1);
        let Some(w) = m.clone().lu().solve(&rhs) else { continue };
        if (&m * &w - &rhs).norm() > 1e-9 || m.determinant().abs() < 1e-10 {
            continue;
        }
        let tol = TAU * s.max(1.0);
        if rows.iter().any(|(a, c)| a.dot(&w) < c - tol) {
            continue;
        }
        if seen.iter().any(|v| (v - &w).norm() <= tol) {
            continue;
        }
        seen.push(w.clone());
        placements += 1;
        let copy = Homothet::new(w, s);
        let seg = Segment::new(copy.pull_back(x), copy.pull_back(y));
        if sorted(&segment_face_incidence(body, &seg)?) == want
            && body.is_maximal_segment(&seg)?
            && TranslationBody::of(body, &seg).zero_is_vertex(d)
        {
            found = Some(copy);
            break;
        }
    }
    Ok(GSetResult {
        member: found.is_some(),
        witness: found,
        scale: s,
        placements,
        complete: true,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extremalized {
    pub segment: Segment,
    pub iterations: usize,
    /// Total endpoint-facet incidences after each iteration, starting with the input.
    pub incidence_counts: Vec<usize>,
}

/// Translate a maximal segment to an extreme one, moving each time to the
/// lexicographically smallest vertex of the current face of `T(ℓ)` through `0`.
pub fn extremalize(body: &ConvexBody, seg: &Segment) -> Result<Extremalized> {
    require_maximal(body, seg)?;
    let d = body.dim();
    let mut cur = seg.clone();
    let count = |s: &Segment| TranslationBody::of(body, s).active_at_zero().len();
    let mut counts = vec![count(&cur)];
    if body.is_ball() {
        return Ok(Extremalized {
            segment: cur,
            iterations: 0,
            incidence_counts: counts,
        });
    }
    let cap = body.facets().len();
    for it in 0..=cap {
        let tb = TranslationBody::of(body, &cur);
        if tb.zero_is_vertex(d) {
            return Ok(Extremalized {
                segment: cur,
                iterations: it,
                incidence_counts: counts,
            });
        }
        let active = tb.active_at_zero();
        let mut lp = Lp::new(d);
        for k in 0..tb.offsets.len() {
            let a: Vec<f64> = tb.normals[k].iter().copied().collect();
            if active.contains(&k) {
                lp.eq(&a, 0.0);
            } else {
                lp.le(&a, tb.offsets[k]);
            }
        }
        let objectives: Vec<Vec<f64>> = (0..d)
            .map(|j| (0..d).map(|k| if k == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let sol = lp
            .lex_minimize(&objectives, 1e-12)
            .map_err(|e| Error::Numerical(format!("translation body LP failed: {e:?}")))?;
        let t = Vector::from_vec(sol.x);
        cur = cur.translate(&t);
        counts.push(count(&cur));
    }
    Err(Error::Numerical(
        "extremalize did not reach a vertex within the facet count".into(),
    ))
}

/// An affine subspace `origin + span(basis)` with an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineSubspace {
    #[serde(with = "crate::serde_vec")]
    pub origin: Vector,
    #[serde(with = "crate::serde_vec::list")]
    pub basis: Vec<Vector>,
}

impl AffineSubspace {
    pub fn new(origin: Vector, directions: &[Vector]) -> Self {
        AffineSubspace {
            basis: orthonormal_basis(directions, RANK_TOL),
            origin,
        }
    }

    pub fn whole(dim: usize) -> Self {
        let e: Vec<Vector> = (0..dim)
            .map(|i| Vector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        AffineSubspace::new(Vector::zeros(dim), &e)
    }

    /// Affine hull of a point set.
    pub fn through(points: &[Vector]) -> Result<Self> {
        let (p0, rest) = points
            .split_first()
            .ok_or_else(|| Error::invalid("affine hull of no points"))?;
        let diffs: Vec<Vector> = rest.iter().map(|p| p - p0).collect();
        Ok(AffineSubspace::new(p0.clone(), &diffs))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.origin.len()
    }

    pub fn contains(&self, p: &Vector, tol: f64) -> bool {
        let mut r = p - &self.origin;
        for b in &self.basis {
            r -= b * b.dot(&r);
        }
        r.norm() <= tol
    }

    /// Translate through `p`.
    pub fn at(&self, p: &Vector) -> AffineSubspace {
        AffineSubspace {
            origin: p.clone(),
            basis: self.basis.clone(),
        }
    }
}

/// Affine hull dimension of the union of two affine subspaces.
pub fn affine_hull_dim(a: &AffineSubspace, b: &AffineSubspace) -> usize {
    let mut dirs = a.basis.clone();
    dirs.extend(b.basis.iter().cloned());
    dirs.push(&b.origin - &a.origin);
    rank(&dirs, RANK_TOL)
}

/// Direction space of the minimal face through `x`: the common null space of the
/// normals of the facets active at `x`.
fn face_directions(body: &ConvexBody, active: &[usize]) -> Vec<Vector> {
    let normals: Vec<Vector> = active.iter().map(|&i| body.facets()[i].normal.clone()).collect();
    null_space(&normals, body.dim(), RANK_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSubspace {
    /// Facets of the two faces the pair was built from.
    pub faces: (Vec<usize>, Vec<usize>),
    /// Orthonormal basis of the co-dimension-1 linear subspace of `S(0)`.
    #[serde(with = "crate::serde_vec::list")]
    pub basis: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSubspaceFamily {
    pub subspace: AffineSubspace,
    pub members: Vec<CriticalSubspace>,
}

impl CriticalSubspaceFamily {
    /// Does `y` lie in a member translated through `x`?
    pub fn covers(&self, x: &Vector, y: &Vector, tol: f64) -> bool {
        self.members
            .iter()
            .any(|m| AffineSubspace::new(x.clone(), &m.basis).contains(y, tol))
    }
}

/// The finite family of co-dimension-1 subspaces of `S` containing the difference
/// directions of every critical pair.
///
/// For each pair of faces `(A, B)` with `dim(L_A ∩ S₀) + dim(L_B ∩ S₀) ≤ dim S − 2`
/// (`L` the face direction space, `S₀` the direction space of `S`), the member is the
/// span of `L_A ∩ S₀` and the affine set `(aff B − x) ∩ S₀` for a point `x ∈ A`, padded
/// with basis vectors of `S₀` up to dimension `dim S − 1`.
pub fn critical_subspaces(body: &ConvexBody, s: &AffineSubspace) -> Result<CriticalSubspaceFamily> {
    if s.dim() < 2 {
        return Err(Error::invalid("critical subspaces need dim(S) >= 2"));
    }
    if s.ambient() != body.dim() {
        return Err(Error::invalid("subspace and body dimensions differ"));
    }
    let mut fam = CriticalSubspaceFamily {
        subspace: s.clone(),
        members: Vec::new(),
    };
    if !body.is_polyhedral() {
        return Ok(fam);
    }
    let lattice = build_face_lattice(body)?;
    let d = body.dim();
    let k = s.dim();
    let faces: Vec<&Face> = lattice.faces.iter().filter(|f| (f.dim as usize) < d).collect();
    let lin: Vec<Vec<Vector>> = faces
        .iter()
        .map(|f| intersect(&face_directions(body, &f.active), &s.basis, d, RANK_TOL))
        .collect();
    for (ia, a) in faces.iter().enumerate() {
        for (ib, b) in faces.iter().enumerate() {
            if lin[ia].len() + lin[ib].len() + 2 > k {
                continue;
            }
            let x = &body.vertices()[a.vertices[0]];
            let vb = &body.vertices()[b.vertices[0]];
            // Solve N (x + S c − v_B) = 0 for c.
            let normals: Vec<Vector> = b.active.iter().map(|&i| body.facets()[i].normal.clone()).collect();
            let n = nalgebra::DMatrix::from_fn(normals.len(), d, |r, c| normals[r][c]);
            let sb = nalgebra::DMatrix::from_fn(d, k, |r, c| s.basis[c][r]);
            let m = &n * &sb;
            let rhs = &n * (vb - x);
            let svd = m.clone().svd(true, true);
            let Ok(c) = svd.solve(&rhs, 1e-10) else { continue };
            if (&m * &c - &rhs).norm() > 1e-8 {
                continue;
            }
            let p = &sb * &c;
            let mut dirs = lin[ia].clone();
            dirs.push(p);
            for v in null_space(
                &(0..m.nrows()).map(|r| m.row(r).transpose()).collect::<Vec<_>>(),
                k,
                RANK_TOL,
            ) {
                dirs.push(&sb * v);
            }
            let mut basis = orthonormal_basis(&dirs, RANK_TOL);
            if basis.len() > k - 1 {
                continue;
            }
            for e in &s.basis {
                if basis.len() == k - 1 {
                    break;
                }
                let mut cand = basis.clone();
                cand.push(e.clone());
                let ob = orthonormal_basis(&cand, RANK_TOL);
                if ob.len() > basis.len() {
                    basis = ob;
                }
            }
            let dup = fam.members.iter().any(|m| {
                let mut all = m.basis.clone();
                all.extend(basis.iter().cloned());
                rank(&all, RANK_TOL) == basis.len()
            });
            if !dup {
                fam.members.push(CriticalSubspace {
                    faces: (a.active.clone(), b.active.clone()),
                    basis,
                });
            }
        }
    }
    Ok(fam)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionReport {
    pub dim_x: usize,
    pub dim_y: usize,
    pub dim_s: usize,
    /// `dim_x + dim_y ≤ dim_s − 1`.
    pub holds: bool,
}

/// Dimensions of `F_x ∩ S` and `F_y ∩ S` for an extreme maximal segment, against the
/// bound `dim S − 1`. The dimension of `F_x ∩ S` is that of its direction space, since
/// `x` lies in the relative interior of its minimal face.
pub fn dimension_bound_check(body: &ConvexBody, seg: &Segment, s: &AffineSubspace) -> Result<DimensionReport> {
    let tol = 1e-7;
    for p in [&seg.x, &seg.y] {
        if !s.contains(p, tol) {
            return Err(Error::precondition(
                "segment endpoint not in S",
                Some(p.iter().copied().collect()),
            ));
        }
    }
    if !is_extreme_segment(body, seg)? {
        return Err(Error::precondition("segment is not extreme", None));
    }
    let d = body.dim();
    let dim_of = |p: &Vector| -> Result<usize> {
        let act = faces_containing(body, p)?;
        Ok(intersect(&face_directions(body, &act), &s.basis, d, RANK_TOL).len())
    };
    let (dx, dy) = if body.is_ball() {
        (0, 0)
    } else {
        (dim_of(&seg.x)?, dim_of(&seg.y)?)
    };
    Ok(DimensionReport {
        dim_x: dx,
        dim_y: dy,
        dim_s: s.dim(),
        holds: dx + dy + 1 <= s.dim(),
    })
}

/// Start point of the maximal chord in direction `u` nearest (in max-norm) to `x`.
pub fn nearest_maximal_chord(body: &ConvexBody, u: &Vector, x: &Vector) -> Result<Segment> {
    require_polytope(body)?;
    let (len, _) = body.max_chord(u)?;
    let uh = u / u.norm();
    let d = body.dim();
    let mut lp = Lp::new(d + 1);
    for f in body.facets() {
        let mut a: Vec<f64> = f.normal.iter().copied().collect();
        a.push(0.0);
        lp.le(&a, f.offset);
        lp.le(&a, f.offset - len * f.normal.dot(&uh));
    }
    for j in 0..d {
        let mut a = vec![0.0; d + 1];
        a[j] = 1.0;
        a[d] = -1.0;
        lp.le(&a, x[j]);
        a[j] = -1.0;
        lp.le(&a, -x[j]);
    }
    let mut c = vec![0.0; d + 1];
    c[d] = 1.0;
    let sol = lp
        .minimize(&c)
        .map_err(|e| Error::Numerical(format!("nearest chord LP failed: {e:?}")))?;
    let w = Vector::from_iterator(d, sol.x.into_iter().take(d));
    Ok(Segment::new(w.clone(), w + uh * len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cube, prism, square, tetrahedron};
    use crate::vector;

    fn facet_with_normal(body: &ConvexBody, n: &[f64]) -> usize {
        let n = vector(n);
        body.facets()
            .iter()
            .position(|f| (&f.normal - &n).norm() < 1e-9)
            .unwrap()
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(build_face_lattice(&square()).unwrap().count_by_dim(), vec![4, 4, 1]);
        assert_eq!(
            build_face_lattice(&tetrahedron().unwrap()).unwrap().count_by_dim(),
            vec![4, 6, 4, 1]
        );
        assert_eq!(
            build_face_lattice(&prism().unwrap()).unwrap().count_by_dim(),
            vec![6, 9, 5, 1]
        );
        assert!(build_face_lattice(&ConvexBody::ball(2).unwrap()).is_err());
    }

    #[test]
    fn faces_containing_examples() {
        let sq = square();
        assert_eq!(faces_containing(&sq, &vector(&[-1.0, -1.0])).unwrap().len(), 2);
        assert!(faces_containing(&sq, &vector(&[0.0, 0.0])).unwrap().is_empty());
        assert_eq!(
            faces_containing(&sq, &vector(&[-1.0, 0.3])).unwrap(),
            vec![facet_with_normal(&sq, &[-1.0, 0.0])]
        );
        assert!(faces_containing(&sq, &vector(&[2.0, 0.0])).is_err());
    }

    #[test]
    fn extreme_examples() {
        let sq = square();
        let s = |a: [f64; 2], b: [f64; 2]| Segment::new(vector(&a), vector(&b));
        assert!(!is_extreme_segment(&sq, &s([-1.0, 0.0], [1.0, 0.0])).unwrap());
        assert!(is_extreme_segment(&sq, &s([-1.0, -1.0], [1.0, -1.0])).unwrap());
        assert!(is_extreme_segment(&sq, &s([-1.0, -1.0], [1.0, 1.0])).unwrap());
        assert!(is_extreme_segment(&sq, &s([-1.0, 0.0], [0.0, 0.0])).is_err());
    }

    #[test]
    fn incidence_examples() {
        let sq = square();
        let bottom = facet_with_normal(&sq, &[0.0, -1.0]);
        let e = Segment::new(vector(&[-1.0, -1.0]), vector(&[1.0, -1.0]));
        assert_eq!(segment_face_incidence(&sq, &e).unwrap(), vec![bottom]);
        let diag = Segment::new(vector(&[-1.0, -1.0]), vector(&[1.0, 1.0]));
        assert!(segment_face_incidence(&sq, &diag).unwrap().is_empty());
        let c = cube().unwrap();
        let edge = Segment::new(vector(&[-1.0, -1.0, -1.0]), vector(&[1.0, -1.0, -1.0]));
        assert_eq!(segment_face_incidence(&c, &edge).unwrap().len(), 2);
    }

    #[test]
    fn g_set_examples() {
        let sq = square();
        let bottom = facet_with_normal(&sq, &[0.0, -1.0]);
        let (x, y) = (vector(&[0.0, 0.0]), vector(&[2.0, 0.0]));
        let r = g_set_membership(&sq, &x, &y, &[bottom]).unwrap();
        assert!(r.member);
        let w = r.witness.unwrap();
        assert!((w.scale - 1.0).abs() < 1e-12);
        assert!((&w.center - vector(&[1.0, 1.0])).norm() < 1e-9);
        assert!(!g_set_membership(&sq, &x, &y, &[]).unwrap().member);
        let disk = ConvexBody::ball(2).unwrap();
        let r = g_set_membership(&disk, &x, &vector(&[0.0, 3.0]), &[]).unwrap();
        assert!(r.member && (r.witness.unwrap().scale - 1.5).abs() < 1e-12);
    }

    #[test]
    fn extremalize_examples() {
        let sq = square();
        let r = extremalize(&sq, &Segment::new(vector(&[-1.0, 0.0]), vector(&[1.0, 0.0]))).unwrap();
        assert!((&r.segment.x - vector(&[-1.0, -1.0])).norm() < 1e-9);
        assert!((&r.segment.y - vector(&[1.0, -1.0])).norm() < 1e-9);
        let diag = Segment::new(vector(&[-1.0, -1.0]), vector(&[1.0, 1.0]));
        let r = extremalize(&sq, &diag).unwrap();
        assert_eq!((r.segment, r.iterations), (diag, 0));
        let c = cube().unwrap();
        let r = extremalize(&c, &Segment::new(vector(&[-1.0, 0.0, 0.0]), vector(&[1.0, 0.0, 0.0]))).unwrap();
        assert!((&r.segment.x - vector(&[-1.0, -1.0, -1.0])).norm() < 1e-9);
        assert!(r.incidence_counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn square_critical_lines_are_vertex_differences() {
        let fam = critical_subspaces(&square(), &AffineSubspace::whole(2)).unwrap();
        assert_eq!(fam.members.len(), 4);
        for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]] {
            assert!(fam.covers(&vector(&[0.0, 0.0]), &vector(&dir), 1e-9));
        }
        assert!(!fam.covers(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.3]), 1e-9));
        let ball = critical_subspaces(&ConvexBody::ball(2).unwrap(), &AffineSubspace::whole(2)).unwrap();
        assert!(ball.members.is_empty());
        assert!(critical_subspaces(
            &square(),
            &AffineSubspace::new(vector(&[0.0, 0.0]), &[vector(&[1.0, 0.0])])
        )
        .is_err());
    }

    #[test]
    fn dimension_examples() {
        let sq = square();
        let e = Segment::new(vector(&[-1.0, -1.0]), vector(&[1.0, -1.0]));
        let r = dimension_bound_check(&sq, &e, &AffineSubspace::whole(2)).unwrap();
        assert_eq!((r.dim_x, r.dim_y, r.holds), (0, 0, true));
        let c = cube().unwrap();
        let diag = Segment::new(vector(&[-1.0, -1.0, -1.0]), vector(&[1.0, 1.0, 1.0]));
        let r = dimension_bound_check(&c, &diag, &AffineSubspace::whole(3)).unwrap();
        assert_eq!((r.dim_x, r.dim_y, r.holds), (0, 0, true));
    }
}
