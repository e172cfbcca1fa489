mod common;

use ckfriction::bdtf::{ALPHA, BETA};
use ckfriction::{Algorithm, Error, Event, Frame, HistoryId, PlayerId, Profile};
use common::laws::{self, event_of};
use common::set;
use proptest::prelude::*;

struct Fixture {
    f: Frame,
    send: Event,
    recv: Event,
}

impl Fixture {
    fn profile(&self) -> Profile {
        Profile::new(&self.f, [(ALPHA, self.send.clone()), (BETA, self.recv.clone())]).unwrap()
    }
}

fn shifted_pair() -> Fixture {
    let f = common::shifted_pair_by_hand();
    let send = event_of(&f, &[(0, 0), (1, 0)]);
    let recv = event_of(&f, &[(0, 1), (1, 2)]);
    Fixture { f, send, recv }
}

/// The shifted pair plus a third history in which the message is lost:
/// `α` cannot tell it apart, `β` never hears anything.
fn lost_message() -> Fixture {
    let f = Frame::from_fn(
        vec!["w1".into(), "w2".into(), "lost".into()],
        vec!["alpha".into(), "beta".into()],
        6,
        |player, p| {
            if player.0 == 0 {
                return p.time as i64;
            }
            match p.history.0 {
                2 => -1,
                h => (p.time as i64 - [1, 2][h]).max(-1),
            }
        },
    )
    .unwrap();
    let send = event_of(&f, &[(0, 0), (1, 0), (2, 0)]);
    let recv = event_of(&f, &[(0, 1), (1, 2)]);
    Fixture { f, send, recv }
}

#[test]
fn receipt_makes_the_sent_message_anchored_common_knowledge() {
    let fx = shifted_pair();
    let (f, profile) = (&fx.f, fx.profile());
    let sent = fx.send.diamond();
    assert!(f.knows_at(BETA, &fx.recv, &sent).unwrap().is_full());
    assert!(f.everyone_at(&profile, &sent).unwrap().is_full());
    for alg in [Algorithm::Kleene, Algorithm::Reachability] {
        assert!(f.ck_at(&profile, &sent, alg).unwrap().is_full());
    }
    let oracle = common::ck_at(f, &common::profile_sets(&profile), &set(&sent));
    assert_eq!(oracle, common::all_points(f));
    assert_eq!(f.individualized(BETA, &profile, &sent).unwrap(), fx.recv);
    let later = f.event_from_fn(|p| p.time >= 1);
    assert!(f.ck_traditional(&[ALPHA, BETA], &(&sent & &later)).unwrap().is_empty());

    let ind = f.check_induction_rule(&profile, &sent, None).unwrap();
    assert!(ind.premise_holds && ind.conclusion_holds);
    let point = event_of(f, &[(0, 0)]);
    assert!(!f.check_induction_rule(&profile, &point, None).unwrap().premise_holds);
    let empty = f.check_induction_rule(&profile, &f.empty(), None).unwrap();
    assert!(empty.premise_holds && empty.conclusion_holds);

    let graph = f.reachability_graph(&profile).unwrap();
    assert!(graph.edges.contains_key(&(HistoryId(0), HistoryId(1))));
    assert_eq!(graph.components(), vec![vec![HistoryId(0), HistoryId(1)]]);
    let co = f.check_cooccurrence(&profile, &sent, ALPHA).unwrap();
    assert!(co.anchors_in_ck && co.co_occurs_everywhere);
}

#[test]
fn a_lost_message_breaks_co_occurrence() {
    let fx = lost_message();
    let (f, profile) = (&fx.f, fx.profile());
    let sent = fx.send.diamond();
    for alg in [Algorithm::Kleene, Algorithm::Reachability] {
        assert!(f.ck_at(&profile, &sent, alg).unwrap().is_empty());
    }
    assert!(common::ck_at(f, &common::profile_sets(&profile), &set(&sent)).is_empty());
    assert!(f.individualized(ALPHA, &profile, &sent).unwrap().is_empty());
    let all: Vec<HistoryId> = f.histories().collect();
    assert!(!profile.co_occurs(&all));
    let co = f.check_cooccurrence(&profile, &sent, ALPHA).unwrap();
    assert!(!co.anchors_in_ck && !co.co_occurs_everywhere);
    let report = f.ck_at_report(&profile, &sent).unwrap();
    assert_eq!(report.failures.len(), 3);
}

#[test]
fn disjoint_copies_form_separate_components() {
    let f = Frame::from_fn(
        (0..4).map(|k| format!("w{k}")).collect(),
        vec!["alpha".into(), "beta".into()],
        6,
        |player, p| {
            let copy = p.history.0 / 2;
            if player.0 == 0 {
                return (copy, p.time as i64);
            }
            (copy, (p.time as i64 - [1, 2][p.history.0 % 2]).max(-1))
        },
    )
    .unwrap();
    let send = event_of(&f, &[(0, 0), (1, 0), (2, 0), (3, 0)]);
    let recv = event_of(&f, &[(0, 1), (1, 2), (2, 1), (3, 2)]);
    let profile = Profile::new(&f, [(ALPHA, send), (BETA, recv)]).unwrap();
    let comps = f.reachability_graph(&profile).unwrap().components();
    assert_eq!(comps, vec![vec![HistoryId(0), HistoryId(1)], vec![HistoryId(2), HistoryId(3)]]);

    let idle = Profile::new(&f, [(ALPHA, f.empty()), (BETA, f.empty())]).unwrap();
    let graph = f.reachability_graph(&idle).unwrap();
    assert!(graph.edges.is_empty());
    assert_eq!(graph.components().len(), 4);
}

#[test]
fn trivial_anchored_cases() {
    let fx = shifted_pair();
    let (f, profile) = (&fx.f, fx.profile());
    let (all, none) = (f.full(), f.empty());
    assert!(f.knows_at(ALPHA, &none, &all).unwrap().is_empty());
    assert_eq!(f.knows_at(BETA, &fx.recv, &all).unwrap(), fx.recv.diamond());
    assert_eq!(f.everyone_at(&profile, &all).unwrap(), &fx.send.diamond() & &fx.recv.diamond());
    assert!(f.everyone_at(&profile, &none).unwrap().is_empty());
    assert!(f.individualized(ALPHA, &profile, &none).unwrap().is_empty());
    assert!(profile.co_occurs(&[]));
    let same = Profile::new(f, [(ALPHA, all.clone()), (BETA, all.clone())]).unwrap();
    assert!(same.co_occurs(&[HistoryId(0), HistoryId(1)]));
    let single = Profile::new(f, [(ALPHA, fx.send.clone())]).unwrap();
    let co = f.check_cooccurrence(&single, &all, ALPHA).unwrap();
    assert!(co.anchors_in_ck && co.co_occurs_everywhere);
}

#[test]
fn invalid_inputs_are_rejected() {
    let fx = shifted_pair();
    let f = &fx.f;
    let not_local = event_of(f, &[(0, 1)]);
    assert_eq!(Profile::new(f, [(BETA, not_local)]), Err(Error::NotLocal(BETA)));
    let single = Profile::new(f, [(ALPHA, fx.send.clone())]).unwrap();
    assert_eq!(f.individualized(BETA, &single, &f.full()), Err(Error::NotInProfile(BETA)));
    assert!(matches!(f.check_cooccurrence(&single, &f.empty(), ALPHA), Err(Error::Hypothesis(_))));
    assert!(matches!("both".parse::<Algorithm>(), Err(Error::UnknownAlgorithm(_))));
    assert!(matches!(f.knows_at(PlayerId(7), &fx.send, &f.full()), Err(Error::UnknownPlayer(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn anchored_laws_hold_on_random_profiles(seed in any::<u64>()) {
        laws::relaxed_laws(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn one_period_frames_coincide_with_traditional(seed in any::<u64>()) {
        laws::static_coincidence(seed).map_err(TestCaseError::fail)?;
    }
}
