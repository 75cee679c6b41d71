//! Machine strategies. Every strategy is a pure function of the position and a seed;
//! `None` means the strategy has no move and forfeits.

use super::region::{default_opening, fallback_i, max_legal_scale, strictly_legal};
use super::{GameState, Move, Player};
use crate::bodies::{ConvexBody, Homothet};
use crate::derivative::{search_bases, DerivativeConfig, DerivativeTrace, Engine, TargetSet};
use crate::error::{Error, Result};
use crate::rng;
use crate::Vector;
use rand::Rng;

/// Canonical strategy tags.
pub const STRATEGY_TAGS: [&str; 4] = ["enumerate", "rank", "goodcopy", "random"];

/// Stages computed before a trace is declared incomplete.
const TRACE_STAGES: usize = 32;

/// Proposals per I-move of `randomLegal` before it forfeits.
const RANDOM_TRIES: usize = 1000;

/// Relative margin by which a covering move exceeds the cover it realizes.
const COVER_MARGIN: f64 = 1e-6;

/// Weight of a held point shallower than `ε` against a deep one.
const SHALLOW_PENALTY: i64 = 5;

pub trait Strategy: Send + Sync {
    fn tag(&self) -> &str;
    fn player(&self) -> Player;
    fn propose(&self, state: &GameState, seed: u64) -> Option<Move>;
}

/// Build a shipped strategy for `player`. Long names such as `rankReducer` are accepted.
pub fn strategy_by_tag(tag: &str, player: Player, body: &ConvexBody, target: &TargetSet) -> Result<Box<dyn Strategy>> {
    let canonical = match tag {
        "enumerate" | "enumerateDeleter" => "enumerate",
        "rank" | "rankReducer" => "rank",
        "goodcopy" | "goodCopyPlayer" => "goodcopy",
        "random" | "randomLegal" => "random",
        _ => {
            return Err(Error::invalid(format!(
                "unknown strategy '{tag}' (expected one of {})",
                STRATEGY_TAGS.join(", ")
            )))
        }
    };
    let wrong_side = |who: &str| Error::invalid(format!("strategy '{canonical}' plays only for player {who}"));
    Ok(match (canonical, player) {
        ("enumerate", Player::II) => Box::new(EnumerateDeleter),
        ("rank", Player::II) => Box::new(RankReducer::new(body, target)?),
        ("goodcopy", Player::I) => Box::new(GoodCopyPlayer::new(body, target)?),
        ("random", p) => Box::new(RandomLegal::new(p)),
        ("goodcopy", _) => return Err(wrong_side("I")),
        _ => return Err(wrong_side("II")),
    })
}

fn trace_for(body: &ConvexBody, target: &TargetSet) -> Result<DerivativeTrace> {
    Engine::new(body, target, DerivativeConfig::default())?.rank_trace(TRACE_STAGES)
}

fn last_i(state: &GameState) -> Option<Homothet> {
    state.last_i_move().map(Move::homothet)
}

/// The copy that kills survivor `i`: centered at it, scale `min(ρ/2, ε/4)`.
fn hole_at(state: &GameState, i: usize, rho: f64) -> Homothet {
    let s = (0.5 * rho).min(0.25 * state.target().eps);
    Homothet::new(state.target().points[i].clone(), s)
}

/// Player II: delete the survivors one at a time, lowest index first.
pub struct EnumerateDeleter;

impl EnumerateDeleter {
    fn next_move(state: &GameState, note: &str) -> Option<Move> {
        let p = last_i(state)?;
        Some(match state.survivors().first() {
            Some(&i) => Move::from_homothet(&hole_at(state, i, p.scale), format!("{note}delete {i}")),
            None => Move::from_homothet(&p.with_scale(0.5 * p.scale), format!("{note}shrink")),
        })
    }
}

impl Strategy for EnumerateDeleter {
    fn tag(&self) -> &str {
        "enumerate"
    }

    fn player(&self) -> Player {
        Player::II
    }

    fn propose(&self, state: &GameState, _seed: u64) -> Option<Move> {
        Self::next_move(state, "")
    }
}

/// Either player: rejection-sampled legal moves, scales log-uniform over three decades
/// below the last I-move. I's centers are uniform in the bounding box of its region;
/// II may play anywhere, and its centers are uniform in the bounding box of the opening
/// move, which contains all further play.
pub struct RandomLegal {
    player: Player,
}

impl RandomLegal {
    pub fn new(player: Player) -> Self {
        RandomLegal { player }
    }
}

fn sample_in_box(rng: &mut rng::Rng, lo: &Vector, hi: &Vector) -> Vector {
    Vector::from_iterator(lo.len(), (0..lo.len()).map(|k| rng.gen_range(lo[k]..=hi[k])))
}

impl Strategy for RandomLegal {
    fn tag(&self) -> &str {
        "random"
    }

    fn player(&self) -> Player {
        self.player
    }

    fn propose(&self, state: &GameState, seed: u64) -> Option<Move> {
        let mut rng = rng::stream(seed, 1);
        let Some(p) = last_i(state) else {
            return Some(Move::from_homothet(
                &default_opening(state.body(), state.target()),
                "opening",
            ));
        };
        match state.to_move() {
            Player::II => {
                let arena = state.moves()[0].homothet();
                let (lo, hi) = state.body().bounding_box(&arena);
                let u = 1.0 - rng.gen::<f64>();
                let c = sample_in_box(&mut rng, &lo, &hi);
                Some(Move::new(c, p.scale * 1e-3f64.powf(u), "random"))
            }
            Player::I => {
                let (outer, excl) = state.region_for_i();
                let (outer, excl) = (outer?, excl?);
                let (lo, hi) = state.body().bounding_box(&outer);
                for k in 0..RANDOM_TRIES {
                    let c = sample_in_box(&mut rng, &lo, &hi);
                    let t = outer.scale * 1e-3f64.powf(rng.gen::<f64>());
                    let q = Homothet::new(c, t);
                    if strictly_legal(state.body(), &outer, &excl, &q) {
                        return Some(Move::from_homothet(&q, format!("random try {}", k + 1)));
                    }
                }
                None
            }
        }
    }
}

/// `z + f(outer − z)` for the largest strictly legal `f < 1`, found by bisection.
fn largest_shrink_toward(body: &ConvexBody, outer: &Homothet, excl: &Homothet, z: &Vector) -> Option<Homothet> {
    let at = |f: f64| Homothet::new(z + (&outer.center - z) * f, outer.scale * f);
    let ok = |f: f64| strictly_legal(body, outer, excl, &at(f));
    let hi = 1.0 - 1e-6;
    if ok(hi) {
        return Some(at(hi));
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then(|| at(lo))
}

/// A candidate I-move with the survivors it holds.
struct Candidate {
    copy: Homothet,
    held: Vec<usize>,
    /// Held points minus a penalty for those shallower than `ε`. A copy whose boundary
    /// crosses the target at a shallow angle loses several points to each nested reply.
    score: i64,
}

/// Player I: play good copies for the fixpoint of the derivative (or for the whole
/// target when the fixpoint is empty).
pub struct GoodCopyPlayer {
    body: ConvexBody,
    target: TargetSet,
    focus: Vec<bool>,
    trace: DerivativeTrace,
}

impl GoodCopyPlayer {
    pub fn new(body: &ConvexBody, target: &TargetSet) -> Result<Self> {
        let trace = trace_for(body, target)?;
        let mut focus = vec![false; target.len()];
        if trace.fixpoint().is_empty() {
            focus.iter_mut().for_each(|f| *f = true);
        } else {
            for &i in trace.fixpoint() {
                focus[i] = true;
            }
        }
        Ok(GoodCopyPlayer {
            body: body.clone(),
            target: target.clone(),
            focus,
            trace,
        })
    }

    pub fn trace(&self) -> &DerivativeTrace {
        &self.trace
    }

    /// Legal copies holding at least two region points: minimal enclosing copies of
    /// pairs and triples (rescaled), the previous I-move shrunk toward a few anchors, and
    /// the largest legal copies at a few centers.
    fn candidates(&self, state: &GameState, alive: &[bool]) -> Vec<Candidate> {
        let body = &self.body;
        let pts = &self.target.points;
        let eps = self.target.eps;
        let (outer, excl) = state.region_for_i();
        let inside: Vec<usize> = (0..pts.len())
            .filter(|&i| {
                alive[i]
                    && outer.as_ref().map_or(true, |o| body.contains_point(o, &pts[i]))
                    && excl
                        .as_ref()
                        .map_or(true, |e| body.signed_distance(e, &pts[i]) > e.tol())
            })
            .collect();
        if inside.len() < 2 {
            return Vec::new();
        }
        let mut copies: Vec<Homothet> = Vec::new();
        for base in search_bases(pts, &inside, 40, 12) {
            let bp: Vec<Vector> = base.iter().map(|&i| pts[i].clone()).collect();
            let Ok(h) = body.min_enclosing_homothet(&bp) else {
                continue;
            };
            if h.scale > 0.0 {
                copies.extend([1.0, 0.9, 0.75].map(|f| h.with_scale(h.scale * f)));
            }
        }
        if let (Some(o), Some(e)) = (&outer, &excl) {
            let ip: Vec<Vector> = inside.iter().map(|&i| pts[i].clone()).collect();
            let mut anchors = vec![o.center.clone()];
            if let Ok(h) = body.min_enclosing_homothet(&ip) {
                anchors.push(h.center);
            }
            let step = inside.len().div_ceil(8);
            anchors.extend(inside.iter().step_by(step).map(|&i| pts[i].clone()));
            for z in &anchors {
                let t = max_legal_scale(body, o, Some(e), z);
                if t > 0.0 {
                    copies.extend([1.0, 0.8, 0.6].map(|f| Homothet::new(z.clone(), f * t)));
                }
            }
            anchors.extend(body.boundary_samples(16 * body.dim()).iter().map(|v| o.apply(v)));
            for z in &anchors {
                if let Some(q) = largest_shrink_toward(body, o, e, z) {
                    copies.push(q);
                }
            }
        }
        if outer.is_none() {
            let ip: Vec<Vector> = inside.iter().map(|&i| pts[i].clone()).collect();
            if let Ok(h) = body.min_enclosing_homothet(&ip) {
                let step = inside.len().div_ceil(16);
                for &i in inside.iter().step_by(step) {
                    for f in [0.8, 1.0, 1.2, 1.4, 1.6, 1.8] {
                        copies.push(Homothet::new(pts[i].clone(), f * h.scale));
                    }
                }
            }
        }
        let legal = |q: &Homothet| match (&outer, &excl) {
            (Some(o), Some(e)) => q.scale <= o.scale && strictly_legal(body, o, e, q),
            _ => q.scale > 0.0,
        };
        let mut out: Vec<Candidate> = copies
            .into_iter()
            .filter(|q| legal(q))
            .filter_map(|q| {
                let held: Vec<usize> = inside
                    .iter()
                    .copied()
                    .filter(|&i| body.contains_point(&q, &pts[i]))
                    .collect();
                let shallow = held
                    .iter()
                    .filter(|&&i| body.signed_distance(&q, &pts[i]) > -eps)
                    .count();
                let score = held.len() as i64 - SHALLOW_PENALTY * shallow as i64;
                (held.len() >= 2).then_some(Candidate { copy: q, held, score })
            })
            .collect();
        out.sort_by(|a, b| {
            (b.score, b.held.len())
                .cmp(&(a.score, a.held.len()))
                .then(b.copy.scale.total_cmp(&a.copy.scale))
        });
        out
    }
}

impl Strategy for GoodCopyPlayer {
    fn tag(&self) -> &str {
        "goodcopy"
    }

    fn player(&self) -> Player {
        Player::I
    }

    fn propose(&self, state: &GameState, _seed: u64) -> Option<Move> {
        let mut alive = self.focus.clone();
        let surv = state.survivors();
        for (i, a) in alive.iter_mut().enumerate() {
            *a = *a && surv.binary_search(&i).is_ok();
        }
        let candidates = self.candidates(state, &alive);
        let floor = candidates.first().map_or(0, |c| c.score - c.score.abs() / 10);
        if let Ok(engine) = Engine::new(&self.body, &self.target, DerivativeConfig::default()) {
            for c in candidates.iter().take_while(|c| c.score >= floor).take(64) {
                let cert = engine.is_good_copy(&c.copy, &alive);
                if cert.good {
                    let note = format!("good copy |B|={} holds {}", cert.band.len(), c.held.len());
                    return Some(Move::from_homothet(&c.copy, note));
                }
            }
        }
        if let Some(c) = candidates.first() {
            return Some(Move::from_homothet(
                &c.copy,
                format!("fallback: cluster of {}", c.held.len()),
            ));
        }
        let (outer, excl) = state.region_for_i();
        let (Some(outer), Some(excl)) = (outer, excl) else {
            return Some(Move::from_homothet(
                &default_opening(&self.body, &self.target),
                "opening",
            ));
        };
        let prefer: Vec<Vector> = surv.iter().map(|&i| self.target.points[i].clone()).take(64).collect();
        fallback_i(&self.body, &outer, &excl, &prefer).map(|q| Move::from_homothet(&q, "fallback: largest legal"))
    }
}

/// Player II: play down the derivative rank of the survivors.
///
/// In order of precedence: while fixpoint survivors remain (no stage certifies anything
/// about them), delete the survivor nearest the boundary of I's move; cover every survivor with one smaller copy when possible; otherwise leave a boundary strip thinner
/// than the certified bad-ball radius, then cover the band of I's reply with a shifted
/// shrunk copy, then delete the residual contact points.
pub struct RankReducer {
    body: ConvexBody,
    target: TargetSet,
    trace: DerivativeTrace,
    stage_of: Vec<Option<usize>>,
}

impl RankReducer {
    pub fn new(body: &ConvexBody, target: &TargetSet) -> Result<Self> {
        let trace = trace_for(body, target)?;
        let stage_of = (0..target.len()).map(|i| trace.removal_stage(i)).collect();
        Ok(RankReducer {
            body: body.clone(),
            target: target.clone(),
            trace,
            stage_of,
        })
    }

    pub fn trace(&self) -> &DerivativeTrace {
        &self.trace
    }

    fn points(&self, idx: &[usize]) -> Vec<Vector> {
        idx.iter().map(|&i| self.target.points[i].clone()).collect()
    }

    /// The survivor closest to the boundary of `p` (lowest index on ties).
    fn nearest_boundary(&self, p: &Homothet, surv: &[usize]) -> usize {
        let mut best = (f64::NEG_INFINITY, surv[0]);
        for &i in surv {
            let sd = self.body.signed_distance(p, &self.target.points[i]);
            if sd > best.0 {
                best = (sd, i);
            }
        }
        best.1
    }

    /// One copy of scale `< ρ` strictly covering all survivors, if their cover is smaller.
    fn direct_cover(&self, surv: &[usize], rho: f64) -> Option<Homothet> {
        let h = self.body.min_enclosing_homothet(&self.points(surv)).ok()?;
        if h.scale < rho * (1.0 - 10.0 * COVER_MARGIN) {
            Some(h.with_scale(0.5 * (h.scale + rho)))
        } else {
            None
        }
    }

    /// Strip move: concentric copy whose boundary strip is thinner than the smallest
    /// bad-ball radius among the survivors of the highest surviving stage.
    fn strip(&self, p: &Homothet, surv: &[usize]) -> Move {
        let alpha = surv.iter().filter_map(|&i| self.stage_of[i]).max().unwrap_or(0);
        let h = surv
            .iter()
            .filter(|&&i| self.stage_of[i] == Some(alpha))
            .filter_map(|&i| self.trace.removal(i).map(|r| r.radius))
            .fold(f64::INFINITY, f64::min);
        let h = if h.is_finite() { h } else { self.target.eps };
        let mut t = p.scale - h / self.body.circumradius();
        if !(t > 0.0) {
            t = 0.5 * p.scale;
        }
        Move::from_homothet(&p.with_scale(t), format!("strip stage {alpha} width {h:.3e}"))
    }

    /// Cover the band of I's reply and the deep survivors with a shifted shrunk copy.
    fn cover_band(&self, p: &Homothet, surv: &[usize]) -> Option<Move> {
        let engine = Engine::new(&self.body, &self.target, DerivativeConfig::default()).ok()?;
        let mut alive = vec![false; self.target.len()];
        for &i in surv {
            alive[i] = true;
        }
        let cert = engine.is_good_copy(p, &alive);
        let aim = if cert.band.is_empty() {
            p.center.clone()
        } else {
            self.body.min_enclosing_homothet(&self.points(&cert.band)).ok()?.center
        };
        let mut best: Option<(usize, Homothet, f64)> = None;
        for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let c = &p.center * (1.0 - f) + &aim * f;
            for g in [1e-3, 1e-2, 0.05, 0.1, 0.2] {
                let q = Homothet::new(c.clone(), p.scale * (1.0 - g));
                let covered = surv
                    .iter()
                    .filter(|&&i| self.body.signed_distance(&q, &self.target.points[i]) < -q.tol())
                    .count();
                if best.as_ref().map_or(true, |b| covered > b.0) {
                    best = Some((covered, q, f));
                }
            }
        }
        let (covered, q, f) = best?;
        if covered == 0 {
            return None;
        }
        let contact = self
            .body
            .boundary_contact(p, &q)
            .map(|c| c.pieces().to_string())
            .unwrap_or_else(|_| "n/a".into());
        Some(Move::from_homothet(
            &q,
            format!(
                "cover band |B|={} shift {f} residual {} contact pieces {contact}",
                cert.band.len(),
                surv.len() - covered
            ),
        ))
    }
}

impl Strategy for RankReducer {
    fn tag(&self) -> &str {
        "rank"
    }

    fn player(&self) -> Player {
        Player::II
    }

    fn propose(&self, state: &GameState, _seed: u64) -> Option<Move> {
        let p = last_i(state)?;
        let surv = state.survivors();
        if surv.is_empty() {
            return Some(Move::from_homothet(&p.with_scale(0.5 * p.scale), "shrink"));
        }
        if surv.iter().any(|&i| self.stage_of[i].is_none()) {
            let i = self.nearest_boundary(&p, surv);
            return Some(Move::from_homothet(
                &hole_at(state, i, p.scale),
                format!("contact delete {i} (fixpoint)"),
            ));
        }
        if let Some(q) = self.direct_cover(surv, p.scale) {
            return Some(Move::from_homothet(&q, format!("cover {} survivors", surv.len())));
        }
        let last = state.last_ii_move().map(|m| m.annotation.as_str()).unwrap_or("");
        if last.starts_with("strip") {
            return self
                .cover_band(&p, surv)
                .or_else(|| EnumerateDeleter::next_move(state, "fallback (band cover failed): "));
        }
        if last.starts_with("cover band") || last.starts_with("residual") {
            let i = surv[0];
            return Some(Move::from_homothet(
                &hole_at(state, i, p.scale),
                format!("residual delete {i}"),
            ));
        }
        Some(self.strip(&p, surv))
    }
}
