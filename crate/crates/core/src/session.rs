//! Live game sessions: a game between a human side and a machine strategy, with
//! revisions, move previews, undo, analysis overlays and JSON snapshots.
//!
//! The revision counts state changes. Clients poll with the last revision they saw and
//! receive the moves from the first index that changed since then.

use crate::bodies::{BodySpec, ConvexBody, Homothet};
use crate::cones::{max_angle_for_delta, refined_family_2d, ConeFamily};
use crate::derivative::{DerivativeConfig, Engine, TargetSet};
use crate::error::{Error, Result};
use crate::game::{
    self, strategy_by_tag, EnumerateDeleter, Forfeit, Move, Player, RandomLegal, RecordedMove, Status, Strategy,
    Violation,
};
use crate::{generators, rng, GameState};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{mpsc, Arc};
use std::time::Duration;

pub const SNAPSHOT_SCHEMA: &str = "mcmullen-session/1";

/// Default time allowed for a machine reply.
pub const MACHINE_BUDGET: Duration = Duration::from_secs(5);

/// Good copies listed in an overlay.
const OVERLAY_COPIES: usize = 8;

/// Stage cap for the rank overlay.
const OVERLAY_STAGES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HumanSide {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    /// Analysis board: no machine, either side may be submitted.
    None,
}

impl HumanSide {
    fn player(self) -> Option<Player> {
        match self {
            HumanSide::I => Some(Player::I),
            HumanSide::II => Some(Player::II),
            HumanSide::None => None,
        }
    }
}

/// A body given inline or by generator name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyInput {
    Named(String),
    Spec(BodySpec),
}

/// A target given inline or by generator name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetInput {
    Named(String),
    Set(TargetSet),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SessionSpec {
    pub body: BodyInput,
    pub target: TargetInput,
    pub human_side: HumanSide,
    /// Machine strategy tag; ignored on an analysis board.
    #[serde(default)]
    pub strategy: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    Invalid(Error),
    /// Not the human's turn, the game is over, or the request does not fit the session.
    Conflict {
        rule: String,
        message: String,
    },
    Illegal(Violation),
}

impl SessionError {
    fn conflict(rule: &str, message: impl Into<String>) -> Self {
        SessionError::Conflict {
            rule: rule.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::Invalid(e) => write!(f, "{e}"),
            SessionError::Conflict { message, .. } => write!(f, "{message}"),
            SessionError::Illegal(v) => write!(f, "illegal move: {v}"),
        }
    }
}

impl std::error::Error for SessionError {}

impl From<Error> for SessionError {
    fn from(e: Error) -> Self {
        SessionError::Invalid(e)
    }
}

/// Why a machine move is not the strategy's own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MachineNote {
    /// The strategy ran past the budget; a quick strategy replied instead.
    pub over_budget: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Forfeit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSummary {
    pub id: String,
    pub revision: u64,
    pub human_side: HumanSide,
    pub strategy: Option<String>,
    pub seed: u64,
    pub dim: usize,
    pub body: BodySpec,
    pub target: TargetSet,
    pub to_move: Player,
    pub status: Status,
}

/// Changes since a revision: drop local moves from index `from` on, then append `moves`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateDelta {
    pub revision: u64,
    pub since: u64,
    pub from: usize,
    pub moves: Vec<RecordedMove>,
    pub survivors: Vec<usize>,
    pub to_move: Player,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub revision: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmitResult {
    pub revision: u64,
    pub accepted: RecordedMove,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply: Option<RecordedMove>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub machine: Option<MachineNote>,
    pub survivors: Vec<usize>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OverlayKind {
    GoodCopies,
    Cones,
    Ranks,
}

impl OverlayKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "goodCopies" => Ok(OverlayKind::GoodCopies),
            "cones" => Ok(OverlayKind::Cones),
            "ranks" => Ok(OverlayKind::Ranks),
            _ => Err(Error::invalid(format!(
                "unknown overlay kind '{s}' (goodCopies, cones, ranks)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GoodCopyOverlay {
    pub copy: Homothet,
    pub band: Vec<usize>,
    pub cover_scale: f64,
    pub held: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeOverlay {
    pub delta: f64,
    pub max_angle: f64,
    pub family: ConeFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankOverlay {
    pub rank: usize,
    pub complete: bool,
    pub fixpoint_size: usize,
    /// Removal stage per target point; `None` for fixpoint points.
    pub stage: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Overlays {
    pub revision: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_copies: Option<Vec<GoodCopyOverlay>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cones: Option<ConeOverlay>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<RankOverlay>,
}

/// Persisted form of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub schema: String,
    pub id: String,
    pub spec: SessionSpec,
    pub revision: u64,
    pub moves: Vec<RecordedMove>,
    /// Move count at each revision.
    pub move_counts: Vec<usize>,
}

pub struct Session {
    id: String,
    spec: SessionSpec,
    body: ConvexBody,
    state: GameState,
    machine: Option<Arc<dyn Strategy>>,
    log: Vec<RecordedMove>,
    move_counts: Vec<usize>,
    budget: Duration,
    cones: Option<ConeOverlay>,
    ranks: Option<RankOverlay>,
    good_copies: HashMap<u64, Vec<GoodCopyOverlay>>,
}

fn resolve(spec: &SessionSpec) -> Result<(ConvexBody, TargetSet)> {
    let body = match &spec.body {
        BodyInput::Named(n) => generators::body_by_name(n, spec.seed)?,
        BodyInput::Spec(s) => ConvexBody::from_spec(s)?,
    };
    let target = match &spec.target {
        TargetInput::Named(n) => generators::target_by_name(n, spec.seed)?,
        TargetInput::Set(t) => t.clone(),
    };
    Ok((body, target))
}

impl Session {
    /// New session at revision 0. When the machine plays I, its opening is already on
    /// the board.
    pub fn create(id: impl Into<String>, spec: SessionSpec) -> std::result::Result<Self, SessionError> {
        let (body, target) = resolve(&spec)?;
        let state = GameState::new(body.clone(), target.clone())?;
        let machine: Option<Arc<dyn Strategy>> = match spec.human_side.player() {
            Some(h) => {
                let tag = spec
                    .strategy
                    .as_deref()
                    .ok_or_else(|| Error::invalid("a machine strategy is required when a human plays one side"))?;
                Some(Arc::from(strategy_by_tag(tag, h.other(), &body, &target)?))
            }
            None => None,
        };
        let mut s = Session {
            id: id.into(),
            spec,
            body,
            state,
            machine,
            log: Vec::new(),
            move_counts: vec![0],
            budget: MACHINE_BUDGET,
            cones: None,
            ranks: None,
            good_copies: HashMap::new(),
        };
        if s.spec.human_side == HumanSide::II && s.state.is_ongoing() {
            s.machine_moves();
            s.move_counts[0] = s.log.len();
        }
        Ok(s)
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.budget = budget;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn revision(&self) -> u64 {
        (self.move_counts.len() - 1) as u64
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn log(&self) -> &[RecordedMove] {
        &self.log
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            id: self.id.clone(),
            revision: self.revision(),
            human_side: self.spec.human_side,
            strategy: self.machine.as_ref().map(|m| m.tag().to_string()),
            seed: self.spec.seed,
            dim: self.body.dim(),
            body: self.body.to_spec(),
            target: self.state.target().clone(),
            to_move: self.state.to_move(),
            status: self.state.status().clone(),
        }
    }

    /// The full log, for a client that has seen nothing yet.
    pub fn full(&self) -> StateDelta {
        self.delta_from(0, 0)
    }

    fn delta_from(&self, since: u64, from: usize) -> StateDelta {
        StateDelta {
            revision: self.revision(),
            since,
            from,
            moves: self.log[from..].to_vec(),
            survivors: self.state.survivors().to_vec(),
            to_move: self.state.to_move(),
            status: self.state.status().clone(),
        }
    }

    pub fn delta(&self, since: u64) -> std::result::Result<StateDelta, SessionError> {
        let rev = self.revision();
        if since > rev {
            return Err(SessionError::conflict(
                "future-revision",
                format!("revision {since} is ahead of the session (at {rev})"),
            ));
        }
        let from = self.move_counts[since as usize..].iter().copied().min().unwrap_or(0);
        Ok(self.delta_from(since, from))
    }

    fn check_turn(&self) -> std::result::Result<(), SessionError> {
        if !self.state.is_ongoing() {
            return Err(SessionError::conflict("game-over", "the game is no longer ongoing"));
        }
        if let Some(h) = self.spec.human_side.player() {
            if self.state.to_move() != h {
                return Err(SessionError::conflict(
                    "wrong-turn",
                    format!("it is player {:?}'s turn", self.state.to_move()),
                ));
            }
        }
        Ok(())
    }

    /// Legality of `mv` for the human at the current revision, without changing anything.
    pub fn preview(&self, mv: &Move) -> Verdict {
        let violation = match self.check_turn() {
            Err(SessionError::Conflict { rule, message }) => Some(Violation {
                rule,
                message,
                witness: None,
            }),
            _ => self.state.validate_move(mv).err(),
        };
        Verdict {
            accepted: violation.is_none(),
            revision: self.revision(),
            violation,
        }
    }

    fn record(&mut self, mv: Move, forfeit: Option<Forfeit>) -> std::result::Result<RecordedMove, Violation> {
        let index = self.state.moves().len();
        self.state.apply_move(mv.clone())?;
        let rec = RecordedMove {
            index,
            player: Player::of_move(index),
            mv,
            forfeit,
            survivors: self.state.survivors().len(),
        };
        self.log.push(rec.clone());
        Ok(rec)
    }

    /// Apply the human move, then the machine's reply.
    pub fn submit(&mut self, mv: Move) -> std::result::Result<SubmitResult, SessionError> {
        self.check_turn()?;
        let accepted = self.record(mv, None).map_err(SessionError::Illegal)?;
        let before = self.log.len();
        let machine = self.machine_moves();
        let reply = self.log.get(before).cloned();
        self.move_counts.push(self.log.len());
        Ok(SubmitResult {
            revision: self.revision(),
            accepted,
            reply,
            machine,
            survivors: self.state.survivors().to_vec(),
            status: self.state.status().clone(),
        })
    }

    /// Play the machine's move if it is on turn. Over budget or on a forfeit, a quick
    /// deterministic move is played instead and noted.
    fn machine_moves(&mut self) -> Option<MachineNote> {
        let machine = self.machine.clone()?;
        if !self.state.is_ongoing() || Some(self.state.to_move()) == self.spec.human_side.player() {
            return None;
        }
        let index = self.state.moves().len() as u64;
        let seed = rng::child_seed(self.spec.seed, index);
        let (tx, rx) = mpsc::channel();
        let snapshot = self.state.clone();
        let worker = Arc::clone(&machine);
        std::thread::spawn(move || {
            let _ = tx.send(worker.propose(&snapshot, seed));
        });
        let mut note = MachineNote {
            over_budget: false,
            forfeit: None,
        };
        let proposed = match rx.recv_timeout(self.budget) {
            Ok(p) => p,
            Err(_) => {
                // The worker is abandoned; its late answer goes nowhere.
                note.over_budget = true;
                let quick: Box<dyn Strategy> = match self.state.to_move() {
                    Player::I => Box::new(RandomLegal::new(Player::I)),
                    Player::II => Box::new(EnumerateDeleter),
                };
                quick.propose(&self.state, seed)
            }
        };
        let mv = match proposed {
            Some(mv) => match self.state.validate_move(&mv) {
                Ok(()) => Some(mv),
                Err(v) => {
                    note.forfeit = Some(Forfeit {
                        strategy: machine.tag().into(),
                        violation: Some(v),
                        proposed: Some(mv),
                    });
                    None
                }
            },
            None => {
                note.forfeit = Some(Forfeit {
                    strategy: machine.tag().into(),
                    violation: None,
                    proposed: None,
                });
                None
            }
        };
        let mv = mv.or_else(|| game::fallback(&self.state))?;
        self.record(mv, note.forfeit.clone()).ok()?;
        (note.over_budget || note.forfeit.is_some()).then_some(note)
    }

    /// Return to the position of an earlier revision; the undo is itself a new revision.
    pub fn undo(&mut self, to: u64) -> std::result::Result<StateDelta, SessionError> {
        if self.machine.is_none() {
            return Err(SessionError::conflict(
                "undo-unavailable",
                "undo is only available against a machine",
            ));
        }
        let rev = self.revision();
        if to >= rev {
            return Err(SessionError::conflict(
                "bad-revision",
                format!("can only undo to a revision before {rev}"),
            ));
        }
        let keep = self.move_counts[to as usize];
        let mut state = GameState::new(self.body.clone(), self.state.target().clone())?;
        for m in &self.log[..keep] {
            state.apply_move(m.mv.clone()).expect("logged moves are legal");
        }
        self.state = state;
        self.log.truncate(keep);
        self.move_counts.push(keep);
        self.delta(rev)
    }

    pub fn overlays(&mut self, kinds: &[OverlayKind]) -> std::result::Result<Overlays, SessionError> {
        let mut out = Overlays {
            revision: self.revision(),
            ..Default::default()
        };
        for k in kinds {
            match k {
                OverlayKind::GoodCopies => out.good_copies = Some(self.good_copy_overlay()?),
                OverlayKind::Cones => out.cones = Some(self.cone_overlay()?),
                OverlayKind::Ranks => out.ranks = Some(self.rank_overlay()?),
            }
        }
        Ok(out)
    }

    /// Good copies legal for player I's next move among the current survivors.
    fn good_copy_overlay(&mut self) -> Result<Vec<GoodCopyOverlay>> {
        let rev = self.revision();
        if let Some(v) = self.good_copies.get(&rev) {
            return Ok(v.clone());
        }
        let target = self.state.target();
        let engine = Engine::new(&self.body, target, DerivativeConfig::default())?;
        let mut alive = vec![false; target.len()];
        for &i in self.state.survivors() {
            alive[i] = true;
        }
        let (outer, excl) = match self.state.to_move() {
            Player::I => self.state.region_for_i(),
            // Show what I could answer to a II-move that has not been made yet.
            Player::II => (self.state.last_i_move().map(Move::homothet), None),
        };
        let mut found = engine.good_copies(outer.as_ref(), excl.as_ref(), &alive);
        found.sort_by(|a, b| (b.cert.band.len(), b.held).cmp(&(a.cert.band.len(), a.held)));
        let v: Vec<GoodCopyOverlay> = found
            .into_iter()
            .take(OVERLAY_COPIES)
            .map(|r| GoodCopyOverlay {
                copy: r.cert.copy,
                band: r.cert.band,
                cover_scale: r.cert.cover_scale,
                held: r.held,
            })
            .collect();
        // Only the current revision is ever asked for again.
        self.good_copies.retain(|&r, _| r == rev);
        self.good_copies.insert(rev, v.clone());
        Ok(v)
    }

    fn cone_overlay(&mut self) -> Result<ConeOverlay> {
        if let Some(c) = &self.cones {
            return Ok(c.clone());
        }
        if self.body.dim() != 2 {
            return Err(Error::invalid("the cone overlay is planar"));
        }
        let delta = self.body.delta_global()?.value;
        let delta = if delta > 0.0 { delta } else { 1.0 };
        let max_angle = max_angle_for_delta(delta).min(std::f64::consts::FRAC_PI_2);
        let family = refined_family_2d(max_angle, &[])?;
        let c = ConeOverlay {
            delta,
            max_angle,
            family,
        };
        self.cones = Some(c.clone());
        Ok(c)
    }

    fn rank_overlay(&mut self) -> Result<RankOverlay> {
        if let Some(r) = &self.ranks {
            return Ok(r.clone());
        }
        let target = self.state.target();
        let trace = Engine::new(&self.body, target, DerivativeConfig::default())?.rank_trace(OVERLAY_STAGES)?;
        let r = RankOverlay {
            rank: trace.rank(),
            complete: trace.complete,
            fixpoint_size: trace.fixpoint().len(),
            stage: (0..target.len()).map(|i| trace.removal_stage(i)).collect(),
        };
        self.ranks = Some(r.clone());
        Ok(r)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            schema: SNAPSHOT_SCHEMA.into(),
            id: self.id.clone(),
            spec: self.spec.clone(),
            revision: self.revision(),
            moves: self.log.clone(),
            move_counts: self.move_counts.clone(),
        }
    }

    /// Rebuild a session from its snapshot by replaying the logged moves.
    pub fn restore(snap: Snapshot) -> std::result::Result<Self, SessionError> {
        if snap.schema != SNAPSHOT_SCHEMA {
            return Err(Error::invalid(format!("unknown snapshot schema '{}'", snap.schema)).into());
        }
        let (body, target) = resolve(&snap.spec)?;
        let mut state = GameState::new(body.clone(), target.clone())?;
        for m in &snap.moves {
            state
                .apply_move(m.mv.clone())
                .map_err(|v| Error::precondition(format!("snapshot move {} is illegal: {v}", m.index), v.witness))?;
        }
        let machine: Option<Arc<dyn Strategy>> = match (snap.spec.human_side.player(), &snap.spec.strategy) {
            (Some(h), Some(tag)) => Some(Arc::from(strategy_by_tag(tag, h.other(), &body, &target)?)),
            _ => None,
        };
        if snap.move_counts.len() as u64 != snap.revision + 1 || snap.move_counts.iter().any(|&c| c > snap.moves.len())
        {
            return Err(Error::invalid("snapshot revision history is inconsistent").into());
        }
        Ok(Session {
            id: snap.id,
            spec: snap.spec,
            body,
            state,
            machine,
            log: snap.moves,
            move_counts: snap.move_counts,
            budget: MACHINE_BUDGET,
            cones: None,
            ranks: None,
            good_copies: HashMap::new(),
        })
    }
}
