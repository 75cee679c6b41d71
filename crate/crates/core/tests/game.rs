use mcmullen_core::game::{
    perfect_set_extract, play_match, strategy_by_tag, EnumerateDeleter, ExtractionError, GoodCopyPlayer, MatchConfig,
    Outcome, RandomLegal, RankReducer, RunRecord, Strategy,
};
use mcmullen_core::{generators, vector, ConvexBody, GameState, Homothet, Move, Player, TargetSet};
use proptest::prelude::*;

fn run(
    si: &dyn Strategy,
    sii: &dyn Strategy,
    body: &ConvexBody,
    target: &TargetSet,
    horizon: usize,
    seed: u64,
) -> RunRecord {
    play_match(si, sii, body, target, MatchConfig { horizon, seed }).unwrap()
}

fn certified_round(r: &RunRecord) -> Option<usize> {
    match r.outcome {
        Outcome::IiCertified { round } => Some(round),
        _ => None,
    }
}

#[test]
fn enumerate_vs_random_seed_7_certifies_and_replays() {
    let body = generators::disk();
    let target = generators::scatter(10, 7, 2).unwrap();
    let si = RandomLegal::new(Player::I);
    let sii = EnumerateDeleter;
    let a = run(&si, &sii, &body, &target, 40, 7);
    assert!(certified_round(&a).is_some(), "{:?}", a.outcome);
    assert!(a.replays_exactly());
    let b = run(&si, &sii, &body, &target, 40, 7);
    assert_eq!(a.to_json(), b.to_json());
    let back: RunRecord = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn horizon_zero_is_rejected() {
    let body = generators::disk();
    let target = generators::scatter(3, 0, 2).unwrap();
    let err = play_match(
        &RandomLegal::new(Player::I),
        &EnumerateDeleter,
        &body,
        &target,
        MatchConfig { horizon: 0, seed: 0 },
    );
    assert!(matches!(err, Err(mcmullen_core::Error::InvalidArgument(_))));
}

#[test]
fn enumerate_shrinks_when_nothing_survives() {
    let body = generators::disk();
    let target = generators::scatter(3, 0, 2).unwrap();
    let mut s = GameState::new(body, target).unwrap();
    s.apply_move(Move::new(vector(&[50.0, 50.0]), 1.0, "")).unwrap();
    let m = EnumerateDeleter.propose(&s, 0).unwrap();
    assert_eq!(m.annotation, "shrink");
    assert!(m.scale < 1.0);
}

#[test]
fn one_point_target_falls_to_one_deletion() {
    let body = generators::disk();
    let target = TargetSet::new(vec![vector(&[0.3, 0.2])], 0.1, "single").unwrap();
    for seed in 0..10 {
        let r = run(
            &RandomLegal::new(Player::I),
            &EnumerateDeleter,
            &body,
            &target,
            10,
            seed,
        );
        let round = certified_round(&r).unwrap();
        let ii_moves = r.moves.iter().filter(|m| m.player == Player::II).count();
        assert!(ii_moves <= 1 && round <= 2, "seed {seed}: round {round}");
    }
}

#[test]
fn goodcopy_falls_back_on_a_scatter() {
    let body = generators::disk();
    let target = generators::scatter(10, 2, 2).unwrap();
    let g = GoodCopyPlayer::new(&body, &target).unwrap();
    let s = GameState::new(body, target).unwrap();
    let m = g.propose(&s, 0).unwrap();
    assert!(m.annotation.starts_with("fallback"), "{}", m.annotation);
}

#[test]
fn goodcopy_keeps_the_circle_alive_for_20_rounds() {
    let body = generators::disk();
    let target = generators::circle(200);
    let si = GoodCopyPlayer::new(&body, &target).unwrap();
    let r = run(&si, &RandomLegal::new(Player::II), &body, &target, 20, 0);
    let Outcome::HorizonReached { survivors } = &r.outcome else {
        panic!("{:?}", r.outcome)
    };
    // Pinned from the seeded run.
    assert_eq!(survivors.len(), 8);
    assert!(r.replays_exactly());
}

#[test]
fn rank_beats_enumerate_on_the_convergent_sequence() {
    let body = generators::disk();
    // Below the tail spacing every point is isolated and the fixpoint is empty.
    let target = generators::convergent(30, 5e-4);
    let si = GoodCopyPlayer::new(&body, &target).unwrap();
    let rank = RankReducer::new(&body, &target).unwrap();
    let (mut fast, mut slow) = (Vec::new(), Vec::new());
    for seed in 0..10 {
        fast.push(certified_round(&run(&si, &rank, &body, &target, 200, seed)).unwrap());
        slow.push(certified_round(&run(&si, &EnumerateDeleter, &body, &target, 200, seed)).unwrap());
    }
    assert!(fast.iter().zip(&slow).all(|(f, s)| f < s), "{fast:?} vs {slow:?}");
}

#[test]
fn band_cover_contacts_are_finite() {
    let body = generators::disk();
    for seed in 0..10 {
        let target = generators::scatter(20, seed, 2).unwrap();
        let rank = RankReducer::new(&body, &target).unwrap();
        let r = run(&RandomLegal::new(Player::I), &rank, &body, &target, 80, seed);
        for m in &r.moves {
            if let Some(rest) = m.mv.annotation.split("contact pieces ").nth(1) {
                let pieces: usize = rest.trim().parse().unwrap();
                assert!(pieces <= 1, "seed {seed}: {}", m.mv.annotation);
            }
        }
    }
}

#[test]
fn extraction_depth_3_gives_8_disjoint_small_leaves() {
    let body = generators::disk();
    let target = generators::circle(200);
    let si = GoodCopyPlayer::new(&body, &target).unwrap();
    let tree = perfect_set_extract(&si, &body, &target, 3, 0).unwrap();
    let leaves = tree.leaves();
    assert_eq!(leaves.len(), 8);
    assert!(tree.leaves_pairwise_disjoint(&body));
    let root = tree.root.copy.scale;
    assert!(leaves.iter().all(|l| l.scale < root / 8.0));
}

#[test]
fn extraction_depth_1_gives_two_disjoint_children() {
    let body = generators::square();
    let target = generators::circle(50);
    let tree = perfect_set_extract(&RandomLegal::new(Player::I), &body, &target, 1, 5).unwrap();
    let kids = &tree.root.children;
    assert_eq!(kids.len(), 2);
    assert!(body.disjoint(&kids[0].copy, &kids[1].copy));
}

/// Replies with the previous I-move itself, which is never disjoint from II's probe.
struct Stubborn;

impl Strategy for Stubborn {
    fn tag(&self) -> &str {
        "stubborn"
    }

    fn player(&self) -> Player {
        Player::I
    }

    fn propose(&self, state: &GameState, _seed: u64) -> Option<Move> {
        Some(match state.last_i_move() {
            Some(m) => Move::new(m.center.clone(), m.scale, "again"),
            None => Move::new(vector(&[0.0, 0.0]), 2.0, "open"),
        })
    }
}

#[test]
fn rule_breaking_strategy_aborts_extraction_with_transcript() {
    let body = generators::disk();
    let target = generators::circle(20);
    match perfect_set_extract(&Stubborn, &body, &target, 2, 0) {
        Err(ExtractionError::Aborted {
            transcript, violation, ..
        }) => {
            assert_eq!(transcript.len(), 3);
            assert_eq!(transcript[2].annotation, "again");
            assert_eq!(violation.unwrap().rule, "meets-excluded");
        }
        other => panic!("{other:?}"),
    }
    assert!(perfect_set_extract(&Stubborn, &body, &target, 13, 0).is_err());
}

#[test]
fn forfeits_are_recorded() {
    let body = generators::disk();
    let target = generators::circle(20);
    let r = run(&Stubborn, &EnumerateDeleter, &body, &target, 3, 0);
    let f = r.moves[2].forfeit.as_ref().unwrap();
    assert_eq!(f.strategy, "stubborn");
    assert_eq!(f.violation.as_ref().unwrap().rule, "meets-excluded");
    assert_eq!(r.moves[2].mv.annotation, "fallback");
    assert!(r.replays_exactly());
}

fn strategy_pair(i: usize, body: &ConvexBody, target: &TargetSet) -> (Box<dyn Strategy>, Box<dyn Strategy>) {
    let (a, b) = [
        ("random", "random"),
        ("random", "enumerate"),
        ("goodcopy", "rank"),
        ("random", "rank"),
    ][i % 4];
    (
        strategy_by_tag(a, Player::I, body, target).unwrap(),
        strategy_by_tag(b, Player::II, body, target).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_are_legal_nested_and_replayable(seed in 0u64..1000, pair in 0usize..4, n in 1usize..12, square in any::<bool>()) {
        let body = if square { generators::square() } else { generators::disk() };
        let target = generators::scatter(n, seed, 2).unwrap();
        let (si, sii) = strategy_pair(pair, &body, &target);
        let r = run(si.as_ref(), sii.as_ref(), &body, &target, 12, seed);
        prop_assert!(r.aborted.is_none());
        prop_assert!(r.replays_exactly());
        prop_assert_eq!(r.to_json(), run(si.as_ref(), sii.as_ref(), &body, &target, 12, seed).to_json());
        prop_assert!(r.survivors_timeline.windows(2).all(|w| w[1] <= w[0]));
        let i_moves: Vec<Homothet> = r.moves.iter().filter(|m| m.player == Player::I).map(|m| m.mv.homothet()).collect();
        for w in i_moves.windows(2) {
            prop_assert!(body.containment_gap(&w[0], &w[1]).0 <= w[0].tol().max(w[1].tol()));
        }
        for k in 1..r.moves.len() {
            let (prev, cur) = (&r.moves[k - 1], &r.moves[k]);
            if cur.player == Player::II {
                prop_assert!(cur.mv.scale < prev.mv.scale);
            } else {
                prop_assert!(body.separation(&cur.mv.homothet(), &prev.mv.homothet()).0 >= -prev.mv.homothet().tol().max(cur.mv.homothet().tol()));
            }
        }
        // Survivors are exactly the points inside every I-move.
        let state = r.replay().unwrap();
        let expect: Vec<usize> = (0..target.len())
            .filter(|&i| i_moves.iter().all(|q| body.contains_point(q, &target.points[i])))
            .collect();
        prop_assert_eq!(state.survivors(), &expect[..]);
        if let Some(round) = certified_round(&r) {
            prop_assert_eq!(r.survivors_timeline[round - 1], 0);
            prop_assert_eq!(round, r.survivors_timeline.len());
        }
    }

    #[test]
    fn a_certified_game_stays_won(seed in 0u64..500, u in 0.0f64..1.0, v in 0.0f64..1.0, f in 0.01f64..1.0) {
        let body = generators::disk();
        let target = generators::scatter(6, seed, 2).unwrap();
        let r = run(&RandomLegal::new(Player::I), &EnumerateDeleter, &body, &target, 40, seed);
        prop_assume!(certified_round(&r).is_some());
        let state = r.replay().unwrap();
        prop_assert!(state.survivors().is_empty());
        prop_assert!(state.validate_move(&Move::new(vector(&[0.0, 0.0]), 1e-3, "")).is_err());
        // Any later I-move nests in the certifying one, so it holds no target point either.
        let last = state.last_i_move().unwrap().homothet();
        let room = 1.0 - f;
        let angle = std::f64::consts::TAU * u;
        let offset = vector(&[angle.cos(), angle.sin()]) * (room * v);
        let q = Homothet::new(last.apply(&offset), last.scale * f);
        prop_assert!(body.contains_copy(&last, &q));
        prop_assert!(target.points.iter().all(|p| !body.contains_point(&q, p)));
    }

    #[test]
    fn strategies_are_pure(seed in 0u64..1000, pair in 0usize..4) {
        let body = generators::disk();
        let target = generators::scatter(8, seed, 2).unwrap();
        let (si, sii) = strategy_pair(pair, &body, &target);
        let r = run(si.as_ref(), sii.as_ref(), &body, &target, 6, seed);
        let mut state = GameState::new(body.clone(), target.clone()).unwrap();
        for m in &r.moves {
            let s: &dyn Strategy = if m.player == Player::I { si.as_ref() } else { sii.as_ref() };
            let seed_k = mcmullen_core::rng::child_seed(seed, m.index as u64);
            prop_assert_eq!(s.propose(&state, seed_k), s.propose(&state, seed_k));
            state.apply_move(m.mv.clone()).unwrap();
        }
    }
}
