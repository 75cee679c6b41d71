//! Support function, signed distance, containment, chords.

use super::{BodyKind, ConvexBody, Homothet, Segment};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::Lp;
use crate::{Vector, TAU};

impl ConvexBody {
    /// `max_{z∈P} z·u` and a maximizer.
    pub fn support(&self, u: &Vector) -> Result<(f64, Vector)> {
        self.check_dim(u)?;
        if u.norm() <= 0.0 {
            return Err(Error::invalid("support direction must be non-zero"));
        }
        Ok(match self.kind {
            BodyKind::Ball => (u.norm(), u / u.norm()),
            _ => {
                let (i, v) = self.argmax_vertex(u);
                (v, self.vertices[i].clone())
            }
        })
    }

    /// Support value without argument checks; 0 for the zero vector.
    pub fn support_value(&self, u: &Vector) -> f64 {
        match self.kind {
            BodyKind::Ball => u.norm(),
            _ => self.argmax_vertex(u).1,
        }
    }

    fn argmax_vertex(&self, u: &Vector) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, v) in self.vertices.iter().enumerate() {
            let s = v.dot(u);
            if s > best.1 + 1e-15 {
                best = (i, s);
            }
        }
        best
    }

    pub(crate) fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            Err(Error::invalid(format!(
                "vector has {} coordinates, body has dim {}",
                v.len(),
                self.dim
            )))
        } else {
            Ok(())
        }
    }

    /// Signed distance of `p` to the boundary of the body itself (scale 1, center 0):
    /// exact for balls, the largest facet gap for polytopes, and for smooth bodies
    /// the facet gap inside and the Euclidean distance to the sample loop outside.
    pub fn body_signed_distance(&self, p: &Vector) -> f64 {
        match self.kind {
            BodyKind::Ball => p.norm() - 1.0,
            BodyKind::Polytope => self.max_facet_gap(p),
            BodyKind::Smooth2d => {
                let g = self.max_facet_gap(p);
                if g <= 0.0 {
                    g
                } else {
                    let m = self.vertices.len();
                    (0..m)
                        .map(|i| point_segment_distance(p, &self.vertices[i], &self.vertices[(i + 1) % m]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub(crate) fn max_facet_gap(&self, p: &Vector) -> f64 {
        self.facets.iter().map(|f| f.gap(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Signed distance of `p` to `∂q`. A scale-0 copy is the point `q.center`.
    pub fn signed_distance(&self, q: &Homothet, p: &Vector) -> f64 {
        if q.scale <= 0.0 {
            return (p - &q.center).norm();
        }
        q.scale * self.body_signed_distance(&q.pull_back(p))
    }

    pub fn contains_point(&self, q: &Homothet, p: &Vector) -> bool {
        self.signed_distance(q, p) <= q.tol()
    }

    /// How far `inner` sticks out of `outer` (≤ 0 when contained) and the inner
    /// point that sticks out most.
    pub fn containment_gap(&self, outer: &Homothet, inner: &Homothet) -> (f64, Vector) {
        let d = &inner.center - &outer.center;
        match self.kind {
            BodyKind::Ball => {
                let gap = d.norm() + inner.scale - outer.scale;
                let dir = linalg::unit(&d).unwrap_or_else(|| {
                    let mut e = Vector::zeros(self.dim);
                    e[0] = 1.0;
                    e
                });
                (gap, &inner.center + dir * inner.scale)
            }
            _ => {
                let mut best = (f64::NEG_INFINITY, inner.center.clone());
                for f in &self.facets {
                    let gap = f.normal.dot(&d) + (inner.scale - outer.scale) * f.offset;
                    if gap > best.0 {
                        let (i, _) = self.argmax_vertex(&f.normal);
                        best = (gap, inner.apply(&self.vertices[i]));
                    }
                }
                best
            }
        }
    }

    pub fn contains_copy(&self, outer: &Homothet, inner: &Homothet) -> bool {
        self.containment_gap(outer, inner).0 <= outer.tol().max(inner.tol())
    }

    /// Separation of two copies: positive iff disjoint, with a witness point that
    /// lies in both copies when they overlap. For balls this is the Euclidean gap;
    /// for polyhedral bodies it is `min_z max(facet gaps of z in a, in b)`.
    pub fn separation(&self, a: &Homothet, b: &Homothet) -> (f64, Vector) {
        match self.kind {
            BodyKind::Ball => {
                let d = &b.center - &a.center;
                let dist = d.norm();
                let gap = dist - a.scale - b.scale;
                let witness = match linalg::unit(&d) {
                    Some(dir) => &a.center + dir * (a.scale + gap / 2.0).clamp(0.0, dist),
                    None => a.center.clone(),
                };
                (gap, witness)
            }
            _ => {
                let n = self.dim;
                let mut lp = Lp::new(n + 1);
                let mut row = vec![0.0; n + 1];
                for q in [a, b] {
                    for f in &self.facets {
                        row[..n].copy_from_slice(f.normal.as_slice());
                        row[n] = -1.0;
                        lp.le(&row, f.normal.dot(&q.center) + q.scale * f.offset);
                    }
                }
                let mut c = vec![0.0; n + 1];
                c[n] = 1.0;
                match lp.minimize(&c) {
                    Ok(s) => (s.value, Vector::from_column_slice(&s.x[..n])),
                    Err(_) => (f64::NEG_INFINITY, a.center.clone()),
                }
            }
        }
    }

    /// Disjointness of two copies, relaxed by the copies' tolerance.
    pub fn disjoint(&self, a: &Homothet, b: &Homothet) -> bool {
        self.separation(a, b).0 >= -a.tol().max(b.tol())
    }

    /// `sup{λ ≥ 0 : x + λu ∈ P}` for `x ∈ P` and unit `u`.
    pub fn ray_exit(&self, x: &Vector, u: &Vector) -> f64 {
        match self.kind {
            BodyKind::Ball => {
                let b = x.dot(u);
                let disc = b * b - x.norm_squared() + 1.0;
                (-b + disc.max(0.0).sqrt()).max(0.0)
            }
            _ => {
                let mut best = f64::INFINITY;
                for f in &self.facets {
                    let au = f.normal.dot(u);
                    if au > 1e-15 {
                        best = best.min((f.offset - f.normal.dot(x)) / au);
                    }
                }
                best.max(0.0)
            }
        }
    }

    /// Longest chord of `P` parallel to `u`, via the LP
    /// `maximize λ s.t. w ∈ P, w + λû ∈ P`.
    pub fn max_chord(&self, u: &Vector) -> Result<(f64, Segment)> {
        self.check_dim(u)?;
        let uh = linalg::unit(u).ok_or_else(|| Error::invalid("chord direction must be non-zero"))?;
        if self.is_ball() {
            return Ok((2.0, Segment::new(-&uh, uh.clone())));
        }
        let n = self.dim;
        let mut lp = Lp::new(n + 1);
        let mut row = vec![0.0; n + 1];
        for f in &self.facets {
            row[..n].copy_from_slice(f.normal.as_slice());
            row[n] = 0.0;
            lp.le(&row, f.offset);
            row[n] = f.normal.dot(&uh);
            lp.le(&row, f.offset);
        }
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let s = lp
            .maximize(&c)
            .map_err(|e| Error::Numerical(format!("max-chord LP failed: {e:?}")))?;
        let w = Vector::from_column_slice(&s.x[..n]);
        let len = s.x[n];
        Ok((len, Segment::new(w.clone(), w + &uh * len)))
    }

    /// Length of the longest chord parallel to the unit vector `u`.
    pub fn max_chord_length(&self, u: &Vector) -> f64 {
        self.max_chord(u).map(|(l, _)| l).unwrap_or(0.0)
    }

    /// A segment in `P` is maximal iff it is a longest chord in its direction.
    pub fn is_maximal_segment(&self, seg: &Segment) -> Result<bool> {
        let dir = seg.direction().ok_or_else(|| Error::invalid("degenerate segment"))?;
        for p in [&seg.x, &seg.y] {
            let sd = self.body_signed_distance(p);
            if sd > TAU {
                return Err(Error::precondition(
                    format!("segment endpoint lies outside the body by {sd:.3e}"),
                    Some(p.as_slice().to_vec()),
                ));
            }
        }
        Ok(seg.length() >= self.max_chord_length(&dir) - TAU)
    }

    /// Whether a point of the body lies on its boundary within `TAU`.
    pub fn on_boundary(&self, x: &Vector) -> bool {
        self.body_signed_distance(x).abs() <= TAU
    }
}

pub(crate) fn point_segment_distance(p: &Vector, a: &Vector, b: &Vector) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    let t = if l2 > 0.0 {
        ((p - a).dot(&ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}
