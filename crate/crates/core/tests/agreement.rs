mod common;

use ckfriction::agreement::{four_state_dialogue_spec, posterior_dialogue, ProbFrame};
use ckfriction::bdtf::{BdtfSpec, SignalRule, TimingMode};
use ckfriction::rational::{int, ratio};
use ckfriction::{Algorithm, Error, Frame, PlayerId, Point, Profile};
use common::laws;
use proptest::prelude::*;

/// Two histories, weights 1/3 and 2/3. The first player learns the history
/// at time 1; the second never does.
fn uneven_coin() -> ProbFrame {
    let f = Frame::from_fn(vec!["heads".into(), "tails".into()], vec!["a".into(), "b".into()], 3, |p, pt| {
        match (p.0, pt.time) {
            (0, t) if t >= 1 => (t as i64) * 10 + pt.history.0 as i64,
            (_, t) => t as i64 * 10,
        }
    })
    .unwrap();
    ProbFrame::new(f, vec![ratio(1, 3), ratio(2, 3)]).unwrap()
}

#[test]
fn posteriors_of_trivial_events() {
    let pf = uneven_coin();
    let f = pf.frame();
    let heads = f.histories_event([ckfriction::HistoryId(0)]);
    for p in f.players() {
        for pt in f.full().points() {
            assert_eq!(pf.posterior(p, &f.full(), pt).unwrap(), int(1));
            assert_eq!(pf.posterior(p, &f.empty(), pt).unwrap(), int(0));
        }
    }
    assert_eq!(pf.posterior(PlayerId(1), &heads, Point::new(1, 2)).unwrap(), ratio(1, 3));
    assert_eq!(pf.posterior(PlayerId(0), &heads, Point::new(0, 0)).unwrap(), ratio(1, 3));
    assert_eq!(pf.posterior(PlayerId(0), &heads, Point::new(0, 1)).unwrap(), int(1));
    assert!(pf.posterior_event(PlayerId(1), &heads, &ratio(1, 2)).unwrap().event.is_empty());
    let sure = pf.posterior_event(PlayerId(0), &heads, &int(1)).unwrap().event;
    assert_eq!(sure, f.event_from_points([Point::new(0, 1), Point::new(0, 2)]).unwrap());
}

#[test]
fn symmetric_coin_gives_one_half() {
    let f = Frame::from_fn(vec!["h".into(), "t".into()], vec!["a".into()], 1, |_, _| 0).unwrap();
    let pf = ProbFrame::new(f, vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    let heads = pf.frame().histories_event([ckfriction::HistoryId(0)]);
    assert_eq!(pf.posterior(PlayerId(0), &heads, Point::new(1, 0)).unwrap(), ratio(1, 2));
}

fn time_profile(f: &Frame, t: [usize; 2]) -> Profile {
    let at = |t: usize| f.event_from_fn(|p| p.time == t);
    Profile::new(f, vec![(PlayerId(0), at(t[0])), (PlayerId(1), at(t[1]))]).unwrap()
}

#[test]
fn different_posteriors_are_never_common_knowledge() {
    let pf = uneven_coin();
    let f = pf.frame();
    let heads = f.histories_event([ckfriction::HistoryId(0)]);
    let profile = time_profile(f, [1, 1]);
    let r = pf.verify_agreement(&profile, &heads, [&int(1), &ratio(1, 3)], Algorithm::Kleene).unwrap();
    assert!(r.ck_event.is_empty() && !r.posteriors_equal && r.consistent());
    let sure = pf.verify_agreement(&profile, &f.full(), [&int(1), &int(1)], Algorithm::Reachability).unwrap();
    assert!(sure.ck_nonempty && sure.ck_event.is_full());
    let shifted =
        pf.verify_agreement(&time_profile(f, [2, 0]), &f.full(), [&int(1), &int(1)], Algorithm::Kleene).unwrap();
    assert!(shifted.ck_event.is_full());
}

#[test]
fn agreement_rejects_bad_profiles() {
    let pf = uneven_coin();
    let f = pf.frame();
    let one = Profile::new(f, vec![(PlayerId(0), f.event_from_fn(|p| p.time == 1))]).unwrap();
    assert!(matches!(
        pf.verify_agreement(&one, &f.full(), [&int(1), &int(1)], Algorithm::Kleene),
        Err(Error::InvalidSpec(_))
    ));
    let everywhere = Profile::new(f, vec![(PlayerId(0), f.full()), (PlayerId(1), f.full())]).unwrap();
    assert_eq!(
        pf.verify_agreement(&everywhere, &f.full(), [&int(1), &int(1)], Algorithm::Kleene).unwrap_err(),
        Error::NotSingular
    );
}

fn posterior_exchange(conditions: &[&str], alpha_cells: Vec<usize>, target: &[&str]) -> BdtfSpec {
    let target: Vec<String> = target.iter().map(|s| s.to_string()).collect();
    BdtfSpec {
        initial_conditions: conditions.iter().map(|s| s.to_string()).collect(),
        initial_partitions: [alpha_cells, vec![0; conditions.len()]],
        timing: TimingMode::SingleDimensional { round_trip: 3 },
        horizon: 16,
        signals: [SignalRule::Posterior { target: target.clone() }, SignalRule::Posterior { target }],
        timestamps: true,
        prior: None,
        margin: None,
    }
}

#[test]
fn informed_sender_settles_the_listener() {
    let spec = posterior_exchange(&["a", "b"], vec![0, 1], &["a"]);
    let report = posterior_dialogue(&spec, 1 << 12, 2, Algorithm::Reachability).unwrap();
    assert!(report.all_agree());
    for row in &report.rows {
        let expected = if row.history.starts_with('a') { int(1) } else { int(0) };
        assert_eq!(row.posteriors, vec![expected.clone(), expected]);
    }
}

#[test]
fn single_condition_exchange_is_certain() {
    let spec = posterior_exchange(&["o"], vec![0], &["o"]);
    let report = posterior_dialogue(&spec, 1 << 12, 2, Algorithm::Kleene).unwrap();
    assert!(report.all_agree());
    assert!(report.rows.iter().all(|r| r.posteriors == vec![int(1), int(1)]));
}

#[test]
fn four_state_exchange_reaches_equal_posteriors() {
    let report = posterior_dialogue(&four_state_dialogue_spec(20), 1 << 20, 2, Algorithm::Reachability).unwrap();
    assert!(report.all_agree());
    assert!(report.rows.iter().all(|r| r.traditional_ck_points == 0));
    assert!(report.rows.iter().any(|r| r.posteriors[0] == ratio(1, 2)));
}

#[test]
fn dialogue_needs_matching_posterior_signals() {
    let mut spec = four_state_dialogue_spec(12);
    spec.signals[1] = SignalRule::Heartbeat;
    assert!(matches!(posterior_dialogue(&spec, 1 << 12, 2, Algorithm::Kleene), Err(Error::InvalidSpec(_))));
    let mut spec = four_state_dialogue_spec(12);
    spec.timestamps = false;
    assert!(matches!(posterior_dialogue(&spec, 1 << 12, 2, Algorithm::Kleene), Err(Error::InvalidSpec(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn common_knowledge_of_posteriors_forces_agreement(seed in any::<u64>()) {
        laws::agreement_law(seed).map_err(TestCaseError::fail)?;
    }
}
