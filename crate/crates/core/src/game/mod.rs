//! The no-β McMullen game: positions, legality, outcomes, strategies and matches.
//!
//! Moves alternate, I first. Player I's move `P_{2n+2}` must lie in `P_{2n}` and be
//! disjoint from II's move `P_{2n+1}`; player II only has to shrink: `ρ_{2n+1} < ρ_{2n}`.
//! Survivors are the target points inside every I-move so far. Because I's moves are
//! nested, an empty survivor set is permanent, so II wins are certified at finite stages;
//! I wins are only ever reported as survivorship.

mod extract;
mod record;
mod region;
mod strategies;

pub use extract::{perfect_set_extract, ExtractionError, ExtractionNode, ExtractionTree, MAX_DEPTH};
pub(crate) use record::fallback;
pub use record::{play_match, Forfeit, MatchConfig, RecordedMove, RunRecord, RUN_SCHEMA};
pub use region::{default_opening, fallback_i, fallback_ii, max_legal_scale};
pub use strategies::{
    strategy_by_tag, EnumerateDeleter, GoodCopyPlayer, RandomLegal, RankReducer, Strategy, STRATEGY_TAGS,
};

use crate::bodies::{ConvexBody, Homothet};
use crate::derivative::TargetSet;
use crate::error::{Error, Result};
use crate::Vector;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn of_move(index: usize) -> Player {
        if index % 2 == 0 {
            Player::I
        } else {
            Player::II
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    #[serde(with = "crate::serde_vec")]
    pub center: Vector,
    pub scale: f64,
    #[serde(default)]
    pub annotation: String,
}

impl Move {
    pub fn new(center: Vector, scale: f64, annotation: impl Into<String>) -> Self {
        Move {
            center,
            scale,
            annotation: annotation.into(),
        }
    }

    pub fn from_homothet(h: &Homothet, annotation: impl Into<String>) -> Self {
        Move::new(h.center.clone(), h.scale, annotation)
    }

    pub fn homothet(&self) -> Homothet {
        Homothet::new(self.center.clone(), self.scale)
    }
}

/// A broken rule, with a witness point where one exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub message: String,
    pub witness: Option<Vec<f64>>,
}

impl Violation {
    fn new(rule: &str, message: impl Into<String>, witness: Option<&Vector>) -> Self {
        Violation {
            rule: rule.into(),
            message: message.into(),
            witness: witness.map(|w| w.iter().copied().collect()),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum Status {
    Ongoing,
    /// Survivors became empty after the I-move with this index.
    IiCertified {
        after_move: Option<usize>,
    },
    HorizonReached,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    /// II has won; `round` counts completed I-moves.
    IiCertified {
        round: usize,
    },
    Ongoing {
        survivors: Vec<usize>,
    },
    HorizonReached {
        survivors: Vec<usize>,
    },
}

/// A position of the game.
#[derive(Clone, Debug)]
pub struct GameState {
    body: ConvexBody,
    target: TargetSet,
    moves: Vec<Move>,
    survivors: Vec<usize>,
    status: Status,
    /// Keep accepting moves after II is certified (used by the perfect-set extraction).
    play_on: bool,
}

impl GameState {
    pub fn new(body: ConvexBody, target: TargetSet) -> Result<Self> {
        target.validate()?;
        if let Some(d) = target.dim() {
            if d != body.dim() {
                return Err(Error::invalid(format!(
                    "target dimension {d} does not match body dimension {}",
                    body.dim()
                )));
            }
        }
        let survivors: Vec<usize> = (0..target.len()).collect();
        let status = if survivors.is_empty() {
            Status::IiCertified { after_move: None }
        } else {
            Status::Ongoing
        };
        Ok(GameState {
            body,
            target,
            moves: Vec::new(),
            survivors,
            status,
            play_on: false,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn target(&self) -> &TargetSet {
        &self.target
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn to_move(&self) -> Player {
        Player::of_move(self.moves.len())
    }

    /// Number of completed I-moves.
    pub fn round(&self) -> usize {
        self.moves.len().div_ceil(2)
    }

    pub fn last_i_move(&self) -> Option<&Move> {
        let n = self.moves.len();
        if n == 0 {
            return None;
        }
        let i = if n % 2 == 1 { n - 1 } else { n - 2 };
        self.moves.get(i)
    }

    pub fn last_ii_move(&self) -> Option<&Move> {
        let n = self.moves.len();
        if n < 2 {
            return None;
        }
        let i = if n % 2 == 0 { n - 1 } else { n - 2 };
        self.moves.get(i)
    }

    /// I's legal region: `(outer, excluded)`; both `None` before the first move.
    pub fn region_for_i(&self) -> (Option<Homothet>, Option<Homothet>) {
        if self.moves.len() < 2 {
            return (None, None);
        }
        let n = self.moves.len();
        (Some(self.moves[n - 2].homothet()), Some(self.moves[n - 1].homothet()))
    }

    pub fn is_ongoing(&self) -> bool {
        self.status == Status::Ongoing
    }

    pub fn validate_move(&self, mv: &Move) -> std::result::Result<(), Violation> {
        if !self.is_ongoing() && !self.play_on {
            return Err(Violation::new("game-over", "the game is no longer ongoing", None));
        }
        if mv.center.len() != self.body.dim() {
            return Err(Violation::new(
                "dimension",
                format!(
                    "center has {} coordinates, body has dim {}",
                    mv.center.len(),
                    self.body.dim()
                ),
                None,
            ));
        }
        if !mv.center.iter().all(|v| v.is_finite()) || !mv.scale.is_finite() {
            return Err(Violation::new("malformed", "center and scale must be finite", None));
        }
        if !(mv.scale > 0.0) {
            return Err(Violation::new(
                "scale-not-positive",
                "scale must be positive",
                Some(&mv.center),
            ));
        }
        let q = mv.homothet();
        match self.to_move() {
            Player::II => {
                let prev = self.last_i_move().expect("II moves after I");
                if !(mv.scale < prev.scale) {
                    return Err(Violation::new(
                        "scale-not-smaller",
                        format!("scale {} is not strictly smaller than {}", mv.scale, prev.scale),
                        Some(&mv.center),
                    ));
                }
            }
            Player::I => {
                if let (Some(outer), Some(excl)) = self.region_for_i() {
                    let (gap, w) = self.body.containment_gap(&outer, &q);
                    if gap > outer.tol().max(q.tol()) {
                        return Err(Violation::new(
                            "not-nested",
                            format!("move leaves the previous I-move by {gap:e}"),
                            Some(&w),
                        ));
                    }
                    let (sep, w) = self.body.separation(&q, &excl);
                    if sep < -excl.tol().max(q.tol()) {
                        return Err(Violation::new(
                            "meets-excluded",
                            format!("move overlaps II's last move (separation {sep:e})"),
                            Some(&w),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply a legal move; an illegal one leaves the state unchanged.
    pub fn apply_move(&mut self, mv: Move) -> std::result::Result<(), Violation> {
        self.validate_move(&mv)?;
        let player = self.to_move();
        if player == Player::I {
            let q = mv.homothet();
            let pts = &self.target.points;
            let body = &self.body;
            self.survivors.retain(|&i| body.contains_point(&q, &pts[i]));
        }
        self.moves.push(mv);
        if player == Player::I && self.survivors.is_empty() && self.is_ongoing() {
            self.status = Status::IiCertified {
                after_move: Some(self.moves.len() - 1),
            };
        }
        Ok(())
    }

    pub(crate) fn set_play_on(&mut self) {
        self.play_on = true;
    }

    pub(crate) fn mark_horizon(&mut self) {
        if self.is_ongoing() {
            self.status = Status::HorizonReached;
        }
    }

    pub fn outcome(&self) -> Outcome {
        match &self.status {
            Status::IiCertified { .. } => Outcome::IiCertified { round: self.round() },
            Status::Ongoing => Outcome::Ongoing {
                survivors: self.survivors.clone(),
            },
            Status::HorizonReached => Outcome::HorizonReached {
                survivors: self.survivors.clone(),
            },
        }
    }
}
