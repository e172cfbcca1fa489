//! Naive reference implementations used as oracles. They work on plain point
//! sets and compare points pairwise through `ken_of`, so they share nothing
//! with the bitset operators under test except the frame itself.
#![allow(dead_code)]

pub mod laws;

use std::collections::BTreeSet;

use ckfriction::{Event, Frame, HistoryId, PlayerId, Point, Profile};

pub type Set = BTreeSet<(usize, usize)>;

pub fn set(e: &Event) -> Set {
    e.points().map(|p| (p.history.0, p.time)).collect()
}

pub fn all_points(f: &Frame) -> Set {
    f.histories().flat_map(|h| (0..f.horizon()).map(move |t| (h.0, t))).collect()
}

pub fn to_event(f: &Frame, s: &Set) -> Event {
    f.event_from_points(s.iter().map(|&(h, t)| Point::new(h, t))).unwrap()
}

fn same_ken(f: &Frame, p: PlayerId, a: (usize, usize), b: (usize, usize)) -> bool {
    f.ken_of(p, Point::new(a.0, a.1)) == f.ken_of(p, Point::new(b.0, b.1))
}

/// Points all of whose indistinguishable points lie in `phi`.
pub fn knows(f: &Frame, p: PlayerId, phi: &Set) -> Set {
    let all = all_points(f);
    all.iter().copied().filter(|&a| all.iter().all(|&b| !same_ken(f, p, a, b) || phi.contains(&b))).collect()
}

pub fn everyone_knows(f: &Frame, players: &[PlayerId], phi: &Set) -> Set {
    let mut out = all_points(f);
    for &p in players {
        out = out.intersection(&knows(f, p, phi)).copied().collect();
    }
    out
}

/// `⋂_m E^m φ`, iterating the layers until they stop changing.
pub fn ck_traditional(f: &Frame, players: &[PlayerId], phi: &Set) -> Set {
    let mut layer = everyone_knows(f, players, phi);
    let mut acc = layer.clone();
    loop {
        layer = everyone_knows(f, players, &layer);
        let next: Set = acc.intersection(&layer).copied().collect();
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

fn histories_of(s: &Set) -> BTreeSet<usize> {
    s.iter().map(|&(h, _)| h).collect()
}

pub fn diamond(f: &Frame, s: &Set) -> Set {
    let hs = histories_of(s);
    all_points(f).into_iter().filter(|(h, _)| hs.contains(h)).collect()
}

pub fn boxed(f: &Frame, s: &Set) -> Set {
    all_points(f).into_iter().filter(|&(h, _)| (0..f.horizon()).all(|t| s.contains(&(h, t)))).collect()
}

/// `⟐ψ ∩ ⊡(ψ → K φ)`.
pub fn knows_at(f: &Frame, p: PlayerId, psi: &Set, phi: &Set) -> Set {
    let k = knows(f, p, phi);
    let implication: Set = all_points(f).into_iter().filter(|a| !psi.contains(a) || k.contains(a)).collect();
    diamond(f, psi).intersection(&boxed(f, &implication)).copied().collect()
}

pub fn everyone_at(f: &Frame, profile: &[(PlayerId, Set)], phi: &Set) -> Set {
    let mut out = all_points(f);
    for (p, psi) in profile {
        out = out.intersection(&knows_at(f, *p, psi, phi)).copied().collect();
    }
    out
}

/// Intersection of the layers `E^m_{@ψ̄} φ`, each layer applied to the
/// previous one intersected with `phi`.
pub fn ck_at(f: &Frame, profile: &[(PlayerId, Set)], phi: &Set) -> Set {
    let mut acc = all_points(f);
    loop {
        let arg: Set = phi.intersection(&acc).copied().collect();
        let next: Set = acc.intersection(&everyone_at(f, profile, &arg)).copied().collect();
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

pub fn profile_sets(profile: &Profile) -> Vec<(PlayerId, Set)> {
    profile.iter().map(|(p, e)| (p, set(e))).collect()
}

/// The two-history frame of a single message: `α` always knows the time,
/// `β` is born at time 1 in the first history and at time 2 in the second
/// and cannot tell them apart at equal subjective times.
pub fn shifted_pair_by_hand() -> Frame {
    let horizon = 6;
    Frame::from_fn(
        vec!["o/z0,1/d2,1".into(), "o/z0,2/d1,2".into()],
        vec!["alpha".into(), "beta".into()],
        horizon,
        |player, p| {
            if player.0 == 0 {
                return p.time as i64;
            }
            let birth = [1, 2][p.history.0];
            (p.time as i64 - birth).max(-1)
        },
    )
    .unwrap()
}

pub fn hist(h: usize) -> HistoryId {
    HistoryId(h)
}
