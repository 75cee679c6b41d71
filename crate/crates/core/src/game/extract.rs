//! Binary tree of disjoint I-moves forced out of a player-I strategy.
//!
//! At a node where I has just played `P_s`, player II probes twice. Child 0: II plays the
//! concentric copy of `P_s` at scale `0.6·ρ_s` and I's reply is `P_{s0}`. Child 1: II
//! plays `P_{s0}` itself, I replies `R`, II plays the concentric copy of `R` at scale
//! `0.6·ρ_R`, and I's reply is `P_{s1}`. Every reply avoids a concentric copy of at
//! least 0.6 times its container, so it lies in `P \ 0.6P` (in container coordinates)
//! and has scale at most 0.4 of the container; `P_{s1} ⊆ R` is disjoint from `P_{s0}`.

use super::strategies::Strategy;
use super::{GameState, Move, Player, Violation};
use crate::bodies::{ConvexBody, Homothet};
use crate::derivative::TargetSet;
use crate::error::Error;
use crate::rng;
use serde::Serialize;

pub const MAX_DEPTH: usize = 12;

/// II's concentric probe keeps this fraction of I's scale.
const PROBE: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionNode {
    pub copy: Homothet,
    /// Empty at leaves, otherwise `[child 0, child 1]`.
    pub children: Vec<ExtractionNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionTree {
    pub depth: usize,
    pub root: ExtractionNode,
}

impl ExtractionTree {
    pub fn leaves(&self) -> Vec<&Homothet> {
        fn walk<'a>(n: &'a ExtractionNode, out: &mut Vec<&'a Homothet>) {
            if n.children.is_empty() {
                out.push(&n.copy);
            }
            for c in &n.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn leaves_pairwise_disjoint(&self, body: &ConvexBody) -> bool {
        let leaves = self.leaves();
        (0..leaves.len()).all(|j| (0..j).all(|i| body.disjoint(leaves[i], leaves[j])))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtractionError {
    Invalid(Error),
    /// Player I broke a rule or had no reply; the transcript ends with the offending move.
    Aborted {
        message: String,
        transcript: Vec<Move>,
        violation: Option<Violation>,
    },
}

impl std::fmt::Display for ExtractionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtractionError::Invalid(e) => write!(f, "{e}"),
            ExtractionError::Aborted {
                message, transcript, ..
            } => {
                write!(f, "extraction aborted after {} moves: {message}", transcript.len())
            }
        }
    }
}

impl std::error::Error for ExtractionError {}

impl From<Error> for ExtractionError {
    fn from(e: Error) -> Self {
        ExtractionError::Invalid(e)
    }
}

type Outcome<T> = std::result::Result<T, ExtractionError>;

struct Extractor<'a> {
    si: &'a dyn Strategy,
    body: &'a ConvexBody,
    seed: u64,
    probes: u64,
}

impl Extractor<'_> {
    fn abort(state: &GameState, extra: Option<Move>, message: String, violation: Option<Violation>) -> ExtractionError {
        let mut transcript = state.moves().to_vec();
        transcript.extend(extra);
        ExtractionError::Aborted {
            message,
            transcript,
            violation,
        }
    }

    /// Ask player I for a reply and apply it.
    fn reply(&mut self, state: &mut GameState) -> Outcome<Homothet> {
        self.probes += 1;
        let Some(mv) = self.si.propose(state, rng::child_seed(self.seed, self.probes)) else {
            return Err(Self::abort(state, None, "player I has no reply".into(), None));
        };
        if let Err(v) = state.validate_move(&mv) {
            return Err(Self::abort(state, Some(mv), format!("illegal reply: {v}"), Some(v)));
        }
        let q = mv.homothet();
        state.apply_move(mv).expect("validated");
        Ok(q)
    }

    fn ii_plays(state: &mut GameState, q: &Homothet, note: &str) -> Outcome<()> {
        let mv = Move::from_homothet(q, note);
        state
            .apply_move(mv.clone())
            .map_err(|v| Self::abort(state, Some(mv), format!("probe rejected: {v}"), Some(v)))
    }

    /// The scaling observation for `child` inside `container \ 0.6·container`.
    fn check_scale(&self, state: &GameState, container: &Homothet, child: &Homothet) -> Outcome<()> {
        let pulled = Homothet::new(container.pull_back(&child.center), child.scale / container.scale);
        let fail = |msg: String| Err(Self::abort(state, None, msg, None));
        match self.body.scale_bound_check(&pulled, 1.0 - PROBE) {
            Ok(r) if r.holds => Ok(()),
            Ok(r) => fail(format!(
                "scaling bound violated: relative scale {} > {}",
                r.delta, r.eps
            )),
            Err(e) => fail(format!("reply outside the probe annulus: {e}")),
        }
    }

    fn expand(&mut self, state: &GameState, depth: usize) -> Outcome<ExtractionNode> {
        let p = state.last_i_move().expect("node after an I-move").homothet();
        if depth == 0 {
            return Ok(ExtractionNode {
                copy: p,
                children: Vec::new(),
            });
        }
        let mut s0 = state.clone();
        Self::ii_plays(&mut s0, &p.with_scale(PROBE * p.scale), "probe 0")?;
        let c0 = self.reply(&mut s0)?;
        self.check_scale(&s0, &p, &c0)?;

        let mut s1 = state.clone();
        Self::ii_plays(&mut s1, &c0, "replay child 0")?;
        let r = self.reply(&mut s1)?;
        Self::ii_plays(&mut s1, &r.with_scale(PROBE * r.scale), "probe 1")?;
        let c1 = self.reply(&mut s1)?;
        self.check_scale(&s1, &r, &c1)?;

        for c in [&c0, &c1] {
            if !(c.scale < 0.5 * p.scale) {
                return Err(Self::abort(
                    state,
                    None,
                    format!("child scale {} is not below half of {}", c.scale, p.scale),
                    None,
                ));
            }
        }
        if !self.body.disjoint(&c0, &c1) {
            return Err(Self::abort(&s1, None, "children overlap".into(), None));
        }
        let left = self.expand(&s0, depth - 1)?;
        let right = self.expand(&s1, depth - 1)?;
        Ok(ExtractionNode {
            copy: p,
            children: vec![left, right],
        })
    }
}

/// Build the depth-`depth` tree of I-moves forced out of `si`; its `2^depth` leaves are
/// pairwise disjoint and each has scale below `ρ_root / 2^depth`.
pub fn perfect_set_extract(
    si: &dyn Strategy,
    body: &ConvexBody,
    target: &TargetSet,
    depth: usize,
    seed: u64,
) -> Outcome<ExtractionTree> {
    if depth > MAX_DEPTH {
        return Err(Error::invalid(format!("depth must be at most {MAX_DEPTH}")).into());
    }
    if si.player() != Player::I {
        return Err(Error::invalid("extraction needs a player-I strategy").into());
    }
    let mut state = GameState::new(body.clone(), target.clone())?;
    state.set_play_on();
    let mut ex = Extractor {
        si,
        body,
        seed,
        probes: 0,
    };
    ex.reply(&mut state)?;
    let root = ex.expand(&state, depth)?;
    let tree = ExtractionTree { depth, root };
    if !tree.leaves_pairwise_disjoint(body) {
        return Err(ExtractionError::Aborted {
            message: "leaves are not pairwise disjoint".into(),
            transcript: Vec::new(),
            violation: None,
        });
    }
    Ok(tree)
}
