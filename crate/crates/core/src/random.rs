//! Seeded generators for frames, events, profiles, exchange specs,
//! probability frames and small attack games. The same seed always yields
//! the same object.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agreement::ProbFrame;
use crate::attack::{AttackGameSpec, PriorRow, StateOfNature};
use crate::bdtf::{BdtfSpec, SignalRule, TimingMode};
use crate::event::Event;
use crate::frame::{Frame, KenId, PlayerId, Point};
use crate::rational::{ratio, Rational};
use crate::relaxed::Profile;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct FrameBounds {
    pub max_histories: usize,
    pub max_horizon: usize,
    pub max_players: usize,
}

impl Default for FrameBounds {
    fn default() -> Self {
        FrameBounds { max_histories: 6, max_horizon: 8, max_players: 3 }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// Arbitrary partitions: each point gets one of a random number of labels.
pub fn random_frame(r: &mut SeededRng, b: FrameBounds) -> Frame {
    let n = r.random_range(1..=b.max_histories);
    let h = r.random_range(1..=b.max_horizon);
    let players = r.random_range(1..=b.max_players);
    let kens: Vec<Vec<usize>> = (0..players)
        .map(|_| {
            let k = r.random_range(1..=n * h);
            (0..n * h).map(|_| r.random_range(0..k)).collect()
        })
        .collect();
    Frame::new(labels("w", n), labels("p", players), h, kens).expect("generated frame is valid")
}

/// Kens that never span two times, so every ken is singular.
pub fn random_clocked_frame(r: &mut SeededRng, b: FrameBounds) -> Frame {
    let n = r.random_range(1..=b.max_histories);
    let h = r.random_range(1..=b.max_horizon);
    let players = r.random_range(1..=b.max_players);
    let kens: Vec<Vec<(usize, usize)>> = (0..players)
        .map(|_| {
            let cells: Vec<usize> = (0..h).map(|_| r.random_range(1..=n)).collect();
            (0..n * h)
                .map(|idx| {
                    let t = idx % h;
                    (t, r.random_range(0..cells[t]))
                })
                .collect()
        })
        .collect();
    Frame::new(labels("w", n), labels("p", players), h, kens).expect("generated frame is valid")
}

pub fn random_event(r: &mut SeededRng, f: &Frame) -> Event {
    let density = r.random_range(0.0..1.0);
    f.event_from_fn(|_| r.random_bool(density))
}

pub fn random_time_invariant_event(r: &mut SeededRng, f: &Frame) -> Event {
    let hs: Vec<_> = f.histories().filter(|_| r.random_bool(0.5)).collect();
    f.histories_event(hs)
}

/// A union of randomly chosen kens of `player`.
pub fn random_local_event(r: &mut SeededRng, f: &Frame, player: PlayerId) -> Event {
    let density = r.random_range(0.0..1.0);
    let mut e = f.empty();
    for k in 0..f.n_kens(player) {
        if r.random_bool(density) {
            e = &e | &f.ken_event(player, KenId(k as u32));
        }
    }
    e
}

/// A union of singular kens that meets every history at most once.
pub fn random_singular_local_event(r: &mut SeededRng, f: &Frame, player: PlayerId) -> Event {
    let mut order: Vec<u32> = (0..f.n_kens(player) as u32).collect();
    order.shuffle(r);
    let take = r.random_range(0..=order.len());
    let mut e = f.empty();
    for &k in &order[..take] {
        let ken = f.ken_event(player, KenId(k));
        if !ken.is_singular() {
            continue;
        }
        let candidate = &e | &ken;
        if candidate.is_singular() {
            e = candidate;
        }
    }
    e
}

/// A profile over a random nonempty subset of players.
pub fn random_profile(r: &mut SeededRng, f: &Frame) -> Profile {
    let mut players: Vec<PlayerId> = f.players().collect();
    players.shuffle(r);
    let k = r.random_range(1..=players.len());
    let entries: Vec<_> = players[..k].iter().map(|&p| (p, random_local_event(r, f, p))).collect();
    Profile::new(f, entries).expect("union of kens is local")
}

/// Positive integer weights, normalized.
pub fn random_weights(r: &mut SeededRng, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| r.random_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

/// A two-player clocked frame with random weights.
pub fn random_prob_frame(r: &mut SeededRng) -> ProbFrame {
    let b = FrameBounds { max_histories: 6, max_horizon: 6, max_players: 2 };
    let mut f = random_clocked_frame(r, b);
    while f.n_players() < 2 {
        f = random_clocked_frame(r, b);
    }
    let w = random_weights(r, f.n_histories());
    ProbFrame::new(f, w).expect("weights are a distribution")
}

fn random_partition(r: &mut SeededRng, n: usize) -> Vec<usize> {
    let k = r.random_range(1..=n);
    (0..n).map(|_| r.random_range(0..k)).collect()
}

fn random_signal(r: &mut SeededRng, target: &[String], allow_posterior: bool) -> SignalRule {
    let choices: &[u8] = if allow_posterior { &[0, 1, 2, 3, 4] } else { &[0, 1, 2, 3] };
    match choices.choose(r).copied().unwrap_or(1) {
        0 => SignalRule::Silent,
        1 => SignalRule::Heartbeat,
        2 => SignalRule::KenLabel,
        3 => SignalRule::InitialCell,
        _ => SignalRule::Posterior { target: target.to_vec() },
    }
}

/// Round trip `3..=max_round_trip`, up to `max_conditions` initial
/// conditions, random partitions and signals.
pub fn random_single_dim_spec(
    r: &mut SeededRng,
    max_conditions: usize,
    max_round_trip: usize,
    horizon: usize,
    timestamps: bool,
) -> BdtfSpec {
    let n = r.random_range(1..=max_conditions);
    let conditions = labels("o", n);
    let target: Vec<String> = conditions.iter().filter(|_| r.random_bool(0.5)).cloned().collect();
    let prior = r.random_bool(0.5).then(|| random_weights(r, n));
    BdtfSpec {
        initial_partitions: [random_partition(r, n), random_partition(r, n)],
        initial_conditions: conditions,
        timing: TimingMode::SingleDimensional { round_trip: r.random_range(3..=max_round_trip.max(3)) },
        horizon,
        signals: [random_signal(r, &target, true), random_signal(r, &target, true)],
        timestamps,
        prior,
        margin: None,
    }
}

/// Births and delays drawn independently over small ranges.
pub fn random_full_spec(r: &mut SeededRng, max_conditions: usize, horizon: usize) -> BdtfSpec {
    let n = r.random_range(1..=max_conditions);
    let conditions = labels("o", n);
    BdtfSpec {
        initial_partitions: [random_partition(r, n), random_partition(r, n)],
        initial_conditions: conditions,
        timing: TimingMode::Full { max_birth: r.random_range(0..=1), max_delay: r.random_range(1..=2) },
        horizon,
        signals: [random_signal(r, &[], false), random_signal(r, &[], false)],
        timestamps: r.random_bool(0.5),
        prior: None,
        margin: None,
    }
}

/// A few states over a handful of periods, with delays drawn from
/// `{1, 2, never}` and births and observations early or never.
pub fn random_tiny_game(r: &mut SeededRng) -> AttackGameSpec {
    let n = r.random_range(3..=4);
    let n_states = r.random_range(2..=4);
    let mut states: Vec<StateOfNature> = Vec::new();
    while states.len() < n_states {
        let early_or_never = |r: &mut SeededRng| *[0, 0, 1, n].choose(r).unwrap();
        let birth = [early_or_never(r), early_or_never(r)];
        let observation = [0, 1].map(|i| if r.random_bool(0.3) { n } else { r.random_range(birth[i].min(n)..=n) });
        let delays = |r: &mut SeededRng| (0..n).map(|_| *[1, 2, n].choose(r).unwrap()).collect();
        let s = StateOfNature { prospect: r.random_range(0..=1), birth, observation, delay_to: [delays(r), delays(r)] };
        if !states.contains(&s) {
            states.push(s);
        }
    }
    let weights = random_weights(r, n_states);
    AttackGameSpec {
        periods: n,
        deadlines: [r.random_range(0..n), r.random_range(0..n)],
        prior: states.into_iter().zip(weights).map(|(state, weight)| PriorRow { state, weight }).collect(),
    }
}

/// A point drawn uniformly from the frame.
pub fn random_point(r: &mut SeededRng, f: &Frame) -> Point {
    f.point(r.random_range(0..f.n_points()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_frame() {
        let a = random_frame(&mut rng(7), FrameBounds::default());
        let b = random_frame(&mut rng(7), FrameBounds::default());
        assert_eq!(a, b);
    }

    #[test]
    fn clocked_kens_are_singular() {
        let mut r = rng(3);
        for _ in 0..20 {
            let f = random_clocked_frame(&mut r, FrameBounds::default());
            for p in f.players() {
                for k in 0..f.n_kens(p) {
                    assert!(f.ken_event(p, KenId(k as u32)).is_singular());
                }
                assert!(random_singular_local_event(&mut r, &f, p).is_singular());
            }
        }
    }
}
