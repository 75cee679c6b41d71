//! Geometry of legal placements: the largest legal scale at a center, the default opening
//! and deterministic fallback moves used when a strategy forfeits.

use crate::bodies::{BodyKind, ConvexBody, Homothet};
use crate::derivative::TargetSet;
use crate::Vector;

/// Margin kept below the supremum so that the returned copy is strictly legal.
const BACKOFF: f64 = 1.0 - 1e-6;

/// Default first move: the minimal enclosing copy of the target, enlarged by 1.25.
pub fn default_opening(body: &ConvexBody, target: &TargetSet) -> Homothet {
    if target.is_empty() {
        return Homothet::identity(body.dim());
    }
    match body.min_enclosing_homothet(&target.points) {
        Ok(h) => {
            let s = h.scale.max(target.eps).max(1e-6);
            h.with_scale(1.25 * s)
        }
        Err(_) => Homothet::identity(body.dim()),
    }
}

/// Whether `q` lies strictly inside `outer` and strictly apart from `excluded`.
pub(crate) fn strictly_legal(body: &ConvexBody, outer: &Homothet, excluded: &Homothet, q: &Homothet) -> bool {
    q.scale > 0.0
        && body.containment_gap(outer, q).0 <= -outer.tol()
        && body.separation(q, excluded).0 > excluded.tol().max(q.tol())
}

/// Largest `t` for which `center + tP` lies inside `outer` and avoids `excluded`,
/// backed off slightly so the copy is strictly legal; `0` when none exists.
pub fn max_legal_scale(body: &ConvexBody, outer: &Homothet, excluded: Option<&Homothet>, center: &Vector) -> f64 {
    let mut hi = containment_room(body, outer, center);
    if let Some(e) = excluded {
        hi = hi.min(separation_room(body, e, center, hi));
    }
    if !(hi > 0.0) {
        return 0.0;
    }
    let t = hi * BACKOFF;
    let q = Homothet::new(center.clone(), t);
    let ok = |q: &Homothet| match excluded {
        Some(e) => strictly_legal(body, outer, e, q),
        None => q.scale > 0.0 && body.containment_gap(outer, q).0 <= -outer.tol(),
    };
    if ok(&q) {
        return t;
    }
    // Tolerances bit: bisect on the predicate itself.
    let (mut lo, mut hi) = (0.0, t);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(&Homothet::new(center.clone(), mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `sup{t : center + tP ⊆ outer}`.
fn containment_room(body: &ConvexBody, outer: &Homothet, center: &Vector) -> f64 {
    match body.kind() {
        BodyKind::Ball => outer.scale - (center - &outer.center).norm(),
        _ => {
            let d = center - &outer.center;
            let mut room = f64::INFINITY;
            for f in body.facets() {
                let slack = outer.scale * f.offset - f.normal.dot(&d);
                if f.offset > 0.0 {
                    room = room.min(slack / f.offset);
                } else if slack < 0.0 {
                    return 0.0;
                }
            }
            room
        }
    }
}

/// `sup{t ≤ cap : center + tP` avoids `excluded}` by bisection on the separation.
fn separation_room(body: &ConvexBody, excluded: &Homothet, center: &Vector, cap: f64) -> f64 {
    if body.is_ball() {
        return (center - &excluded.center).norm() - excluded.scale;
    }
    if !(cap > 0.0) {
        return 0.0;
    }
    let apart = |t: f64| body.separation(&Homothet::new(center.clone(), t), excluded).0 > 0.0;
    if apart(cap) {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    if !apart(cap * 1e-12) {
        return 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if apart(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Candidate centers probed by the fallback: the preferred points first, then a
/// fixed pattern of boundary-ward points of `outer`.
fn probe_centers(body: &ConvexBody, outer: &Homothet, prefer: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = prefer.to_vec();
    out.push(outer.center.clone());
    let samples = body.boundary_samples(16 * body.dim());
    for f in [0.25, 0.5, 0.75] {
        for s in &samples {
            out.push(outer.apply(&(s * f)));
        }
    }
    out
}

/// Deterministic legal I-move: the largest strictly legal copy over the probe centers,
/// preferring centers at preferred points (survivors) when any of them is legal.
pub fn fallback_i(body: &ConvexBody, outer: &Homothet, excluded: &Homothet, prefer: &[Vector]) -> Option<Homothet> {
    let mut best: Option<(bool, f64, Vector)> = None;
    for (k, c) in probe_centers(body, outer, prefer).into_iter().enumerate() {
        let t = max_legal_scale(body, outer, Some(excluded), &c);
        if !(t > 0.0) {
            continue;
        }
        let preferred = k < prefer.len();
        let better = match &best {
            None => true,
            Some((bp, bt, _)) => (preferred, t) > (*bp, *bt),
        };
        if better {
            best = Some((preferred, t, c));
        }
    }
    best.map(|(_, t, c)| Homothet::new(c, t))
}

/// Deterministic legal II-move: the concentric copy at half scale.
pub fn fallback_ii(last_i: &Homothet) -> Homothet {
    last_i.with_scale(0.5 * last_i.scale)
}
