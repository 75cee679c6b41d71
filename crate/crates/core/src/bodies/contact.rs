//! The scaling bound for copies inside `P \ (1−ε)P` and contact sets `∂Q ∩ ∂P`.

use super::{ConvexBody, Homothet, Segment};
use crate::error::{Error, Result};
use crate::linalg;
use crate::{Vector, TAU};
use serde::Serialize;

/// Outcome of [`ConvexBody::scale_bound_check`]. The line through the origin and
/// the copy's center meets `P`, `(1−ε)P` and `Q` in chords of lengths
/// `line_p`, `line_inner` and `line_q`; the chord of `Q` fits in one of the two
/// pieces of `P \ (1−ε)P` on that line, each of length at most `ε·line_p`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaleBound {
    pub holds: bool,
    pub delta: f64,
    pub eps: f64,
    pub line_p: f64,
    pub line_inner: f64,
    pub line_q: f64,
}

/// Contact set `∂Q ∩ ∂P` of a copy `Q ⊆ P`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Contact {
    Empty,
    SinglePoint {
        #[serde(with = "crate::serde_vec")]
        point: Vector,
    },
    /// Planar polyhedral bodies: the edges of `Q` lying on edges of `P`.
    SupportingSegments {
        segments: Vec<Segment>,
    },
    /// Polytopes in R³: indices of the facets of `Q` lying on facets of `P`.
    FacetSet {
        facets: Vec<usize>,
    },
}

impl Contact {
    /// Number of pieces in the contact set.
    pub fn pieces(&self) -> usize {
        match self {
            Contact::Empty => 0,
            Contact::SinglePoint { .. } => 1,
            Contact::SupportingSegments { segments } => segments.len(),
            Contact::FacetSet { facets } => facets.len(),
        }
    }

    /// Whether `z` lies within `tol` of the contact set.
    pub fn near(&self, body: &ConvexBody, q: &Homothet, z: &Vector, tol: f64) -> bool {
        match self {
            Contact::Empty => false,
            Contact::SinglePoint { point } => (z - point).norm() <= tol,
            Contact::SupportingSegments { segments } => segments
                .iter()
                .any(|s| super::kernel::point_segment_distance(z, &s.x, &s.y) <= tol),
            Contact::FacetSet { facets } => facets.iter().any(|&i| {
                let f = &body.facets()[i];
                (f.normal.dot(&q.pull_back(z)) - f.offset).abs() * q.scale <= tol && body.signed_distance(q, z) <= tol
            }),
        }
    }
}

impl ConvexBody {
    /// Check that a copy `q = y + δP` inside `P \ (1−ε)P` has `δ ≤ ε`.
    pub fn scale_bound_check(&self, q: &Homothet, eps: f64) -> Result<ScaleBound> {
        self.check_dim(&q.center)?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::invalid("eps must lie in (0, 1]"));
        }
        let unit = Homothet::identity(self.dim);
        let (gap, w) = self.containment_gap(&unit, q);
        if gap > TAU {
            return Err(Error::precondition(
                format!("copy is not inside P (sticks out by {gap:.3e})"),
                Some(w.as_slice().to_vec()),
            ));
        }
        let inner = Homothet::new(Vector::zeros(self.dim), 1.0 - eps);
        let (sep, w) = self.separation(q, &inner);
        if sep < -TAU {
            return Err(Error::precondition(
                format!("copy meets the interior of (1−ε)P (separation {sep:.3e})"),
                Some(w.as_slice().to_vec()),
            ));
        }
        let dir = linalg::unit(&q.center).unwrap_or_else(|| {
            let mut e = Vector::zeros(self.dim);
            e[0] = 1.0;
            e
        });
        let origin = Vector::zeros(self.dim);
        let line_p = self.ray_exit(&origin, &dir) + self.ray_exit(&origin, &-&dir);
        Ok(ScaleBound {
            holds: q.scale <= eps + TAU,
            delta: q.scale,
            eps,
            line_p,
            line_inner: (1.0 - eps) * line_p,
            line_q: q.scale * line_p,
        })
    }

    /// Contact set of `q ⊆ p`, identified facet by facet (polyhedral) or by internal
    /// tangency (balls).
    pub fn boundary_contact(&self, p: &Homothet, q: &Homothet) -> Result<Contact> {
        let tol = p.tol();
        let (gap, w) = self.containment_gap(p, q);
        if gap > tol {
            return Err(Error::precondition(
                format!("inner copy is not contained (sticks out by {gap:.3e})"),
                Some(w.as_slice().to_vec()),
            ));
        }
        if q.scale >= p.scale {
            return Err(Error::precondition("inner copy must have a smaller scale", None));
        }
        if self.is_ball() {
            if gap < -tol {
                return Ok(Contact::Empty);
            }
            let d = &q.center - &p.center;
            let dir = linalg::unit(&d).expect("smaller contained copy touching the boundary is off-center");
            return Ok(Contact::SinglePoint {
                point: &p.center + dir * p.scale,
            });
        }
        let d = &q.center - &p.center;
        let active: Vec<usize> = self
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.normal.dot(&d) + (q.scale - p.scale) * f.offset >= -tol)
            .map(|(i, _)| i)
            .collect();
        if active.is_empty() {
            return Ok(Contact::Empty);
        }
        if self.dim == 2 {
            let m = self.vertices.len();
            let segments = active
                .iter()
                .map(|&i| Segment::new(q.apply(&self.vertices[i]), q.apply(&self.vertices[(i + 1) % m])))
                .collect();
            Ok(Contact::SupportingSegments { segments })
        } else {
            Ok(Contact::FacetSet { facets: active })
        }
    }
}
