//! Resolution-parameterized P-derivative: good copies, derivative steps and rank traces.
//!
//! A target is a finite sample of a closed set `A` with a declared resolution `ε`.
//! At that resolution
//! * `x` is a limit of a set `S` when some other point of `S` lies within `ε` of `x`;
//! * the band of a copy `Q` (points with `|signedDistance(Q, x)| ≤ ε`) stands in for `A ∩ ∂Q`
//!   and points with `signedDistance ≤ −ε` for `A ∩ int Q`;
//! * `B(Q)` is the set of band points that are limits of deep points, or of band points
//!   within `ε` of a supporting hyperplane of `Q` at the contact locus;
//! * `Q` is good when `B(Q)` is non-empty and cannot be covered by a copy of scale
//!   `≤ (1−η)·scale(Q)`.
//!
//! A derivative step removes every point lying in a candidate ball without a good copy.
//! Candidate balls are centered at target points with radii `ε·2^j`. Containing a good
//! copy is monotone in the radius, so a point is removed exactly when its `ε`-ball is
//! bad; the largest bad radius is then recorded in the removal certificate.

use crate::bodies::{ConvexBody, Homothet, HyperplaneAt};
use crate::error::{Error, Result};
use crate::{Vector, TAU};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Finite sample of a target set at resolution `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSet {
    #[serde(with = "crate::serde_vec::list")]
    pub points: Vec<Vector>,
    pub eps: f64,
    #[serde(default)]
    pub generator: String,
}

impl TargetSet {
    pub fn new(points: Vec<Vector>, eps: f64, generator: &str) -> Result<Self> {
        let t = TargetSet {
            points,
            eps,
            generator: generator.to_string(),
        };
        t.validate()?;
        Ok(t)
    }

    /// Check `eps > 0`, a common dimension and pairwise distinct points.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("target resolution eps must be positive"));
        }
        if let Some(p0) = self.points.first() {
            let d = p0.len();
            for (i, p) in self.points.iter().enumerate() {
                if p.len() != d {
                    return Err(Error::invalid(format!(
                        "point {i} has dimension {}, expected {d}",
                        p.len()
                    )));
                }
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(format!("point {i} is not finite")));
                }
            }
            for i in 0..self.points.len() {
                for j in i + 1..self.points.len() {
                    if (&self.points[i] - &self.points[j]).norm() <= TAU {
                        return Err(Error::invalid(format!("points {i} and {j} coincide")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    /// The sub-target on the given indices, same resolution.
    pub fn subset(&self, indices: &[usize]) -> TargetSet {
        TargetSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            eps: self.eps,
            generator: format!("{}-subset", self.generator),
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                d = d.max((&self.points[i] - &self.points[j]).norm());
            }
        }
        d
    }
}

#[derive(Clone, Debug)]
pub struct DerivativeConfig {
    /// Strictness margin for "strictly smaller copy".
    pub eta: f64,
    /// Pairs are drawn from this many ball members nearest the center.
    pub pair_pool: usize,
    /// Triples are drawn from this many ball members nearest the center.
    pub triple_pool: usize,
    pub scale_factors: Vec<f64>,
    /// Refuted copies kept verbatim in a removal certificate; the rest are counted.
    pub kept_refutations: usize,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            eta: 1e-6,
            pair_pool: 24,
            triple_pool: 10,
            scale_factors: vec![1.0, 0.75, 0.5],
            kept_refutations: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GoodCopyCertificate {
    pub copy: Homothet,
    /// Target indices of `B(Q)`.
    pub band: Vec<usize>,
    pub cover_scale: f64,
    pub good: bool,
    /// Supporting hyperplanes that admitted points to `B(Q)` (a few, for display).
    pub hyperplanes: Vec<HyperplaneAt>,
}

/// What was searched inside one candidate ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BallSearch {
    pub center: usize,
    pub radius: f64,
    pub members: usize,
    pub pairs: usize,
    pub triples: usize,
    pub copies_tested: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub index: usize,
    /// Largest dyadic radius whose ball around the point has no good copy.
    pub radius: f64,
    pub search: BallSearch,
    /// Refuted copies (the first few; `search.copies_tested` counts all of them).
    pub refuted: Vec<Homothet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Retention {
    pub index: usize,
    pub witness: GoodCopyCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub kept: Vec<usize>,
    pub removed: Vec<Removal>,
    pub retained: Vec<Retention>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stage {
    pub members: Vec<usize>,
    /// Removals that turn this stage into the next one.
    pub removed: Vec<Removal>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivativeTrace {
    pub stages: Vec<Stage>,
    /// Index of the first stage equal to its own derivative.
    pub fixpoint_index: usize,
    /// False when the stage cap was hit before stabilization.
    pub complete: bool,
    pub eta: f64,
}

impl DerivativeTrace {
    /// First stabilization index.
    pub fn rank(&self) -> usize {
        self.fixpoint_index
    }

    pub fn fixpoint(&self) -> &[usize] {
        &self.stages[self.fixpoint_index].members
    }

    /// Stage at which point `i` is removed; `None` for fixpoint points.
    pub fn removal_stage(&self, i: usize) -> Option<usize> {
        self.stages.iter().position(|s| s.removed.iter().any(|r| r.index == i))
    }

    pub fn removal(&self, i: usize) -> Option<&Removal> {
        self.stages.iter().flat_map(|s| s.removed.iter()).find(|r| r.index == i)
    }
}

/// Derivative machinery bound to a body and a target.
pub struct Engine<'a> {
    body: &'a ConvexBody,
    target: &'a TargetSet,
    cfg: DerivativeConfig,
    neighbors: Vec<Vec<usize>>,
    /// Euclidean distance to a copy is at most this factor times its signed distance.
    gap_factor: f64,
}

impl<'a> Engine<'a> {
    pub fn new(body: &'a ConvexBody, target: &'a TargetSet, cfg: DerivativeConfig) -> Result<Self> {
        target.validate()?;
        if let Some(d) = target.dim() {
            if d != body.dim() {
                return Err(Error::invalid(format!(
                    "target dimension {d} does not match body dimension {}",
                    body.dim()
                )));
            }
        }
        if !(cfg.eta > 0.0 && cfg.eta < 1.0) {
            return Err(Error::invalid("eta must lie in (0, 1)"));
        }
        let n = target.len();
        let eps = target.eps;
        let neighbors = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && (&target.points[i] - &target.points[j]).norm() <= eps)
                    .collect()
            })
            .collect();
        Ok(Engine {
            body,
            target,
            gap_factor: body.circumradius() / body.inradius(),
            cfg,
            neighbors,
        })
    }

    pub fn target(&self) -> &TargetSet {
        self.target
    }

    pub fn body(&self) -> &ConvexBody {
        self.body
    }

    pub fn config(&self) -> &DerivativeConfig {
        &self.cfg
    }

    pub fn all_alive(&self) -> Vec<bool> {
        vec![true; self.target.len()]
    }

    /// `B(q)` and the verdict, with respect to the points flagged in `alive`.
    pub fn is_good_copy(&self, q: &Homothet, alive: &[bool]) -> GoodCopyCertificate {
        let eps = self.target.eps;
        let reach = q.scale * self.body.circumradius() + eps * (self.gap_factor + 2.0);
        let local: Vec<usize> = (0..self.target.len())
            .filter(|&i| alive[i] && (&self.target.points[i] - &q.center).norm() <= reach)
            .collect();
        self.certify(q, alive, &local)
    }

    fn certify(&self, q: &Homothet, alive: &[bool], local: &[usize]) -> GoodCopyCertificate {
        let eps = self.target.eps;
        let pts = &self.target.points;
        let mut sd = std::collections::HashMap::with_capacity(local.len());
        for &i in local {
            sd.insert(i, self.body.signed_distance(q, &pts[i]));
        }
        let band_of = |i: usize| sd.get(&i).is_some_and(|s: &f64| s.abs() <= eps);
        let deep_of = |i: usize| sd.get(&i).is_some_and(|s: &f64| *s <= -eps);
        let mut band = Vec::new();
        let mut hyperplanes = Vec::new();
        for &x in local {
            if !band_of(x) {
                continue;
            }
            let nbrs: Vec<usize> = self.neighbors[x].iter().copied().filter(|&j| alive[j]).collect();
            if nbrs.iter().any(|&y| deep_of(y)) {
                band.push(x);
                continue;
            }
            let planes = self.contact_planes(q, &pts[x]);
            let mut admitted = false;
            for h in &planes {
                if nbrs
                    .iter()
                    .any(|&y| band_of(y) && h.normal.dot(&(&pts[y] - &h.base)).abs() <= eps)
                {
                    if hyperplanes.len() < 8 {
                        hyperplanes.push(h.clone());
                    }
                    admitted = true;
                    break;
                }
            }
            if admitted {
                band.push(x);
            }
        }
        let cover_scale = if band.is_empty() {
            0.0
        } else {
            let bp: Vec<Vector> = band.iter().map(|&i| pts[i].clone()).collect();
            self.body.min_enclosing_homothet(&bp).map(|h| h.scale).unwrap_or(0.0)
        };
        let good = !band.is_empty() && cover_scale > (1.0 - self.cfg.eta) * q.scale;
        GoodCopyCertificate {
            copy: q.clone(),
            band,
            cover_scale,
            good,
            hyperplanes,
        }
    }

    /// Supporting hyperplanes of `q` at the boundary locus nearest `x`: the tangent at the
    /// radial projection for balls, the facets within `ε` of `x` for polyhedral bodies.
    fn contact_planes(&self, q: &Homothet, x: &Vector) -> Vec<HyperplaneAt> {
        let eps = self.target.eps;
        if self.body.is_ball() {
            match crate::linalg::unit(&(x - &q.center)) {
                Some(n) => vec![HyperplaneAt {
                    base: &q.center + &n * q.scale,
                    normal: n,
                }],
                None => Vec::new(),
            }
        } else {
            self.body
                .facets()
                .iter()
                .filter(|f| (f.normal.dot(&(x - &q.center)) - q.scale * f.offset).abs() <= eps)
                .map(|f| HyperplaneAt {
                    base: x - &f.normal * (f.normal.dot(&(x - &q.center)) - q.scale * f.offset),
                    normal: f.normal.clone(),
                })
                .collect()
        }
    }

    fn copy_in_ball(&self, q: &Homothet, c: &Vector, r: f64) -> bool {
        let tol = TAU * r.max(1.0);
        if self.body.is_ball() {
            (&q.center - c).norm() + q.scale <= r + tol
        } else {
            self.body.vertices().iter().all(|v| (q.apply(v) - c).norm() <= r + tol)
        }
    }

    /// Search the candidate copies inside the ball of radius `r` around point `center`.
    fn search_ball(
        &self,
        center: usize,
        r: f64,
        alive: &[bool],
    ) -> (Option<GoodCopyCertificate>, BallSearch, Vec<Homothet>) {
        let pts = &self.target.points;
        let c = &pts[center];
        let mut members: Vec<(f64, usize)> = (0..pts.len())
            .filter(|&i| alive[i])
            .map(|i| ((&pts[i] - c).norm(), i))
            .filter(|(d, _)| *d <= r)
            .collect();
        members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let members: Vec<usize> = members.into_iter().map(|(_, i)| i).collect();
        let mut search = BallSearch {
            center,
            radius: r,
            members: members.len(),
            pairs: 0,
            triples: 0,
            copies_tested: 0,
        };
        let mut refuted = Vec::new();
        if members.len() < 2 {
            return (None, search, refuted);
        }
        let reach = r + self.target.eps * (self.gap_factor + 2.0);
        let local: Vec<usize> = (0..pts.len())
            .filter(|&i| alive[i] && (&pts[i] - c).norm() <= reach)
            .collect();
        let np = members.len().min(self.cfg.pair_pool);
        let nt = members.len().min(self.cfg.triple_pool);
        let mut bases: Vec<Vec<usize>> = Vec::new();
        for j in 1..np {
            for i in 0..j {
                bases.push(vec![members[i], members[j]]);
            }
        }
        search.pairs = bases.len();
        for k in 2..nt {
            for j in 1..k {
                for i in 0..j {
                    bases.push(vec![members[i], members[j], members[k]]);
                }
            }
        }
        search.triples = bases.len() - search.pairs;
        for base in &bases {
            let bp: Vec<Vector> = base.iter().map(|&i| pts[i].clone()).collect();
            let Ok(h) = self.body.min_enclosing_homothet(&bp) else {
                continue;
            };
            if h.scale <= 0.0 {
                continue;
            }
            for &f in &self.cfg.scale_factors {
                let q = h.with_scale(h.scale * f);
                if !self.copy_in_ball(&q, c, r) {
                    continue;
                }
                search.copies_tested += 1;
                let cert = self.certify(&q, alive, &local);
                if cert.good {
                    return (Some(cert), search, refuted);
                }
                if refuted.len() < self.cfg.kept_refutations {
                    refuted.push(q);
                }
            }
        }
        (None, search, refuted)
    }

    /// One derivative step on the points flagged in `alive`.
    pub fn step(&self, alive: &[bool]) -> StepResult {
        let eps = self.target.eps;
        let diam = self.target.diameter().max(eps);
        let members: Vec<usize> = (0..self.target.len()).filter(|&i| alive[i]).collect();
        let verdicts: Vec<(usize, std::result::Result<GoodCopyCertificate, Removal>)> = members
            .par_iter()
            .map(|&x| {
                let (good, search, refuted) = self.search_ball(x, eps, alive);
                if let Some(cert) = good {
                    return (x, Ok(cert));
                }
                let mut removal = Removal {
                    index: x,
                    radius: eps,
                    search,
                    refuted,
                };
                let mut r = 2.0 * eps;
                while r <= 2.0 * diam {
                    let (good, search, refuted) = self.search_ball(x, r, alive);
                    if good.is_some() {
                        break;
                    }
                    removal = Removal {
                        index: x,
                        radius: r,
                        search,
                        refuted,
                    };
                    r *= 2.0;
                }
                (x, Err(removal))
            })
            .collect();
        let mut out = StepResult {
            kept: Vec::new(),
            removed: Vec::new(),
            retained: Vec::new(),
        };
        for (x, v) in verdicts {
            match v {
                Ok(witness) => {
                    out.kept.push(x);
                    out.retained.push(Retention { index: x, witness });
                }
                Err(rm) => out.removed.push(rm),
            }
        }
        out
    }

    pub fn rank_trace(&self, max_stages: usize) -> Result<DerivativeTrace> {
        if max_stages == 0 {
            return Err(Error::invalid("max_stages must be at least 1"));
        }
        let mut alive = self.all_alive();
        let mut stages = Vec::new();
        for _ in 0..max_stages {
            let members: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
            let step = self.step(&alive);
            let done = step.removed.is_empty();
            for r in &step.removed {
                alive[r.index] = false;
            }
            stages.push(Stage {
                members,
                removed: step.removed,
            });
            if done {
                let k = stages.len() - 1;
                return Ok(DerivativeTrace {
                    stages,
                    fixpoint_index: k,
                    complete: true,
                    eta: self.cfg.eta,
                });
            }
        }
        let members: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
        stages.push(Stage {
            members,
            removed: Vec::new(),
        });
        let k = stages.len() - 1;
        Ok(DerivativeTrace {
            stages,
            fixpoint_index: k,
            complete: false,
            eta: self.cfg.eta,
        })
    }

    /// Best good copy placed legally in `outer` minus `excluded`: inside `outer` and
    /// disjoint from `excluded`. Maximizes `|B|`, then the number of contained points.
    pub fn good_copy_search(
        &self,
        outer: Option<&Homothet>,
        excluded: Option<&Homothet>,
        alive: &[bool],
    ) -> Option<GoodCopyCertificate> {
        self.good_copies(outer, excluded, alive)
            .into_iter()
            .max_by(|a, b| (a.cert.band.len(), a.held).cmp(&(b.cert.band.len(), b.held)))
            .map(|r| r.cert)
    }

    /// Good copies among the legal candidates, in candidate order. Candidates are the
    /// minimal enclosing copies of pairs and triples of region points rescaled by
    /// `{1, 0.9, 0.75, 0.5}`; the 48 holding the most region points are certified.
    pub fn good_copies(
        &self,
        outer: Option<&Homothet>,
        excluded: Option<&Homothet>,
        alive: &[bool],
    ) -> Vec<RankedCopy> {
        let pts = &self.target.points;
        let inside: Vec<usize> = (0..pts.len())
            .filter(|&i| {
                alive[i]
                    && outer.map_or(true, |o| self.body.contains_point(o, &pts[i]))
                    && excluded.map_or(true, |e| self.body.signed_distance(e, &pts[i]) > e.tol())
            })
            .collect();
        if inside.len() < 2 {
            return Vec::new();
        }
        let legal = |q: &Homothet| {
            q.scale > 0.0
                && outer.map_or(true, |o| {
                    q.scale <= o.scale && self.body.containment_gap(o, q).0 <= -o.tol()
                })
                && excluded.map_or(true, |e| self.body.separation(q, e).0 > e.tol().max(q.tol()))
        };
        let mut candidates: Vec<(usize, Homothet)> = Vec::new();
        for base in search_bases(pts, &inside, 40, 12) {
            let bp: Vec<Vector> = base.iter().map(|&i| pts[i].clone()).collect();
            let Ok(h) = self.body.min_enclosing_homothet(&bp) else {
                continue;
            };
            if h.scale <= 0.0 {
                continue;
            }
            for f in [1.0, 0.9, 0.75, 0.5] {
                let q = h.with_scale(h.scale * f);
                if legal(&q) {
                    let held = inside
                        .iter()
                        .filter(|&&i| self.body.contains_point(&q, &pts[i]))
                        .count();
                    candidates.push((held, q));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.cmp(&a.0));
        candidates
            .into_iter()
            .take(48)
            .filter_map(|(held, q)| {
                let cert = self.is_good_copy(&q, alive);
                cert.good.then_some(RankedCopy { cert, held })
            })
            .collect()
    }
}

/// A certified good copy and the number of region points it holds.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedCopy {
    pub cert: GoodCopyCertificate,
    pub held: usize,
}

/// Pairs and triples of region points used by the good-copy search: all pairs among up
/// to `pair_cap` evenly spread anchors, triples among up to `triple_cap` anchors, and the
/// pairs of each point with its nearest region neighbours.
pub(crate) fn search_bases(pts: &[Vector], inside: &[usize], pair_cap: usize, triple_cap: usize) -> Vec<Vec<usize>> {
    let spread = |cap: usize| -> Vec<usize> {
        if inside.len() <= cap {
            inside.to_vec()
        } else {
            (0..cap).map(|k| inside[k * inside.len() / cap]).collect()
        }
    };
    let anchors = spread(pair_cap);
    let mut out = Vec::new();
    for j in 1..anchors.len() {
        for i in 0..j {
            out.push(vec![anchors[i], anchors[j]]);
        }
    }
    let t = spread(triple_cap);
    for k in 2..t.len() {
        for j in 1..k {
            for i in 0..j {
                out.push(vec![t[i], t[j], t[k]]);
            }
        }
    }
    for &i in inside {
        let mut near: Vec<(f64, usize)> = inside
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| ((&pts[i] - &pts[j]).norm(), j))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in near.iter().take(2) {
            if i < j {
                out.push(vec![i, j]);
            }
        }
    }
    out
}

/// `isGoodCopy` for a whole target.
pub fn is_good_copy(body: &ConvexBody, q: &Homothet, target: &TargetSet, eta: f64) -> Result<GoodCopyCertificate> {
    if !(q.scale > 0.0) {
        return Err(Error::invalid("good-copy test needs a copy of positive scale"));
    }
    let cfg = DerivativeConfig {
        eta,
        ..DerivativeConfig::default()
    };
    let engine = Engine::new(body, target, cfg)?;
    Ok(engine.is_good_copy(q, &engine.all_alive()))
}

/// One derivative step of a whole target.
pub fn derivative_step(body: &ConvexBody, target: &TargetSet, eta: f64) -> Result<(TargetSet, StepResult)> {
    if target.is_empty() {
        return Err(Error::invalid("derivative of an empty target"));
    }
    let cfg = DerivativeConfig {
        eta,
        ..DerivativeConfig::default()
    };
    let engine = Engine::new(body, target, cfg)?;
    let step = engine.step(&engine.all_alive());
    Ok((target.subset(&step.kept), step))
}

pub fn rank_trace(body: &ConvexBody, target: &TargetSet, eta: f64, max_stages: usize) -> Result<DerivativeTrace> {
    let cfg = DerivativeConfig {
        eta,
        ..DerivativeConfig::default()
    };
    Engine::new(body, target, cfg)?.rank_trace(max_stages)
}
