//! Match runner and the replayable run record.

use super::region::{default_opening, fallback_i, fallback_ii};
use super::strategies::Strategy;
use super::{GameState, Move, Outcome, Player, Violation};
use crate::bodies::{BodySpec, ConvexBody};
use crate::derivative::TargetSet;
use crate::error::{Error, Result};
use crate::rng;
use crate::Vector;
use serde::{Deserialize, Serialize};

pub const RUN_SCHEMA: &str = "mcmullen-run/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchConfig {
    /// Number of rounds, each an I-move followed by a II-move.
    pub horizon: usize,
    pub seed: u64,
}

/// Why a strategy's move was replaced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forfeit {
    pub strategy: String,
    /// Present when the strategy proposed an illegal move; absent when it had none.
    pub violation: Option<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposed: Option<Move>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordedMove {
    pub index: usize,
    pub player: Player,
    #[serde(flatten)]
    pub mv: Move,
    /// Set when this is the deterministic fallback played after a forfeit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Forfeit>,
    /// Survivors after the move (unchanged by II-moves).
    pub survivors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub schema: String,
    pub body: BodySpec,
    pub target: TargetSet,
    pub strategy_i: String,
    pub strategy_ii: String,
    pub seed: u64,
    pub horizon: usize,
    pub moves: Vec<RecordedMove>,
    /// Survivor count after each I-move.
    pub survivors_timeline: Vec<usize>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<Forfeit>,
}

impl RunRecord {
    /// Re-apply the recorded moves to a fresh state.
    pub fn replay(&self) -> Result<GameState> {
        let body = ConvexBody::from_spec(&self.body)?;
        let mut state = GameState::new(body, self.target.clone())?;
        for m in &self.moves {
            state
                .apply_move(m.mv.clone())
                .map_err(|v| Error::precondition(format!("recorded move {} is illegal: {v}", m.index), v.witness))?;
        }
        if self.aborted.is_none() && state.is_ongoing() && state.round() >= self.horizon {
            state.mark_horizon();
        }
        Ok(state)
    }

    /// Whether replaying reproduces the recorded survivors and outcome exactly.
    pub fn replays_exactly(&self) -> bool {
        match self.replay() {
            Ok(s) => {
                let timeline: Vec<usize> = self
                    .moves
                    .iter()
                    .filter(|m| m.player == Player::I)
                    .map(|m| m.survivors)
                    .collect();
                s.outcome() == self.outcome && timeline == self.survivors_timeline
            }
            Err(_) => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run records serialize")
    }
}

pub(crate) fn fallback(state: &GameState) -> Option<Move> {
    match state.to_move() {
        Player::I => match state.region_for_i() {
            (Some(outer), Some(excl)) => {
                let prefer: Vec<Vector> = state
                    .survivors()
                    .iter()
                    .take(64)
                    .map(|&i| state.target().points[i].clone())
                    .collect();
                fallback_i(state.body(), &outer, &excl, &prefer).map(|q| Move::from_homothet(&q, "fallback"))
            }
            _ => Some(Move::from_homothet(
                &default_opening(state.body(), state.target()),
                "fallback opening",
            )),
        },
        Player::II => state
            .last_i_move()
            .map(|m| Move::from_homothet(&fallback_ii(&m.homothet()), "fallback")),
    }
}

/// Play `horizon` rounds between `si` (player I) and `sii` (player II). Illegal or
/// missing moves are recorded as forfeits and replaced by a deterministic fallback;
/// if the fallback fails too the record is aborted.
pub fn play_match(
    si: &dyn Strategy,
    sii: &dyn Strategy,
    body: &ConvexBody,
    target: &TargetSet,
    cfg: MatchConfig,
) -> Result<RunRecord> {
    if cfg.horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    if si.player() != Player::I || sii.player() != Player::II {
        return Err(Error::invalid("strategies are assigned to the wrong players"));
    }
    let mut state = GameState::new(body.clone(), target.clone())?;
    let mut moves = Vec::new();
    let mut aborted = None;
    'rounds: for _ in 0..cfg.horizon {
        for strategy in [si, sii] {
            if !state.is_ongoing() {
                break 'rounds;
            }
            let index = state.moves().len();
            let proposed = strategy.propose(&state, rng::child_seed(cfg.seed, index as u64));
            let mut forfeit = None;
            let mv = match proposed {
                Some(mv) => match state.validate_move(&mv) {
                    Ok(()) => mv,
                    Err(v) => {
                        forfeit = Some(Forfeit {
                            strategy: strategy.tag().into(),
                            violation: Some(v),
                            proposed: Some(mv),
                        });
                        match fallback(&state) {
                            Some(m) => m,
                            None => {
                                aborted = forfeit;
                                break 'rounds;
                            }
                        }
                    }
                },
                None => {
                    forfeit = Some(Forfeit {
                        strategy: strategy.tag().into(),
                        violation: None,
                        proposed: None,
                    });
                    match fallback(&state) {
                        Some(m) => m,
                        None => {
                            aborted = forfeit;
                            break 'rounds;
                        }
                    }
                }
            };
            if let Err(v) = state.apply_move(mv.clone()) {
                let mut f = forfeit.unwrap_or(Forfeit {
                    strategy: strategy.tag().into(),
                    violation: None,
                    proposed: None,
                });
                f.violation = Some(v);
                aborted = Some(f);
                break 'rounds;
            }
            moves.push(RecordedMove {
                index,
                player: Player::of_move(index),
                mv,
                forfeit,
                survivors: state.survivors().len(),
            });
        }
    }
    if aborted.is_none() {
        state.mark_horizon();
    }
    let survivors_timeline = moves
        .iter()
        .filter(|m: &&RecordedMove| m.player == Player::I)
        .map(|m| m.survivors)
        .collect();
    Ok(RunRecord {
        schema: RUN_SCHEMA.into(),
        body: body.to_spec(),
        target: target.clone(),
        strategy_i: si.tag().into(),
        strategy_ii: sii.tag().into(),
        seed: cfg.seed,
        horizon: cfg.horizon,
        moves,
        survivors_timeline,
        outcome: state.outcome(),
        aborted,
    })
}
