//! The coordinated-attack game: states of nature, the frame induced by both
//! players forwarding everything they know every period, play and welfare,
//! and the strategy that attacks as soon as anchored common knowledge of a
//! feasible successful attack is reached.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bdtf::{ALPHA, BETA};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, KenId, PlayerId, Point};
use crate::rational::{self, ExtReal, Rational};
use crate::relaxed::{Algorithm, Profile};

/// One draw of nature. Birth and observation times equal to the number of
/// periods mean "never"; so does a delay that lands past the last period.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateOfNature {
    pub prospect: u8,
    pub birth: [usize; 2],
    pub observation: [usize; 2],
    /// `delay_to[i][t]`: periods a message sent at absolute time `t` takes
    /// to reach player `i`.
    pub delay_to: [Vec<usize>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorRow {
    pub state: StateOfNature,
    #[serde(with = "rational::fraction")]
    pub weight: Rational,
}

/// Success pays 1, a failed attack pays negative infinity, no attack pays 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackGameSpec {
    pub periods: usize,
    /// Latest absolute time at which each player may initiate.
    pub deadlines: [usize; 2],
    pub prior: Vec<PriorRow>,
}

impl AttackGameSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let n = self.periods;
        if n == 0 {
            return bad("a game needs at least one period".into());
        }
        if self.deadlines.iter().any(|&d| d >= n) {
            return bad(format!("deadlines {:?} must be below {n}", self.deadlines));
        }
        let weights: Vec<Rational> = self.prior.iter().map(|r| r.weight.clone()).collect();
        rational::check_distribution(&weights)?;
        let mut seen = HashSet::new();
        for (k, row) in self.prior.iter().enumerate() {
            let s = &row.state;
            if s.prospect > 1 {
                return bad(format!("state {k}: prospect must be 0 or 1"));
            }
            if s.birth.iter().chain(&s.observation).any(|&x| x > n) {
                return bad(format!("state {k}: birth and observation times must be at most {n}"));
            }
            for d in &s.delay_to {
                if d.len() != n {
                    return bad(format!("state {k}: expected {n} delays per player, got {}", d.len()));
                }
                if d.iter().any(|&x| x == 0 || x > n) {
                    return bad(format!("state {k}: delays must lie in 1..={n}"));
                }
            }
            if !seen.insert(s) {
                return bad(format!("state {k} is listed twice"));
            }
        }
        Ok(())
    }
}

/// What a born player has seen, keyed incrementally: two points share a key
/// exactly when the player's subjective time, received messages with their
/// receipt times, and observation of the prospect all agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum StateKey {
    Unborn,
    Born { arrivals: Vec<u32>, observed: Option<(i64, u8)> },
    Step { prev: u32, arrivals: Vec<u32>, observed: Option<(i64, u8)> },
}

#[derive(Clone, Debug)]
pub struct GameFrame {
    pub spec: AttackGameSpec,
    pub frame: Frame,
    pub weights: Vec<Rational>,
    pre_birth: [Option<KenId>; 2],
    parent: [Vec<Option<KenId>>; 2],
    /// `arrivals[i][point]`: kens of the other player whose messages reach
    /// `i` at that point. A message's content is the sender's ken.
    arrivals: [Vec<Vec<KenId>>; 2],
}

pub fn build_game_frame(spec: &AttackGameSpec, cap: u128) -> Result<GameFrame> {
    spec.validate()?;
    let n = spec.prior.len();
    if n as u128 > cap {
        return Err(Error::CapExceeded { needed: n as u128, cap });
    }
    let periods = spec.periods;
    let mut interned: [HashMap<StateKey, u32>; 2] = Default::default();
    let mut parent: [Vec<Option<KenId>>; 2] = Default::default();
    let mut labels: [Vec<u32>; 2] = [Vec::with_capacity(n * periods), Vec::with_capacity(n * periods)];
    let mut arrivals: [Vec<Vec<KenId>>; 2] = Default::default();
    for row in &spec.prior {
        let s = &row.state;
        let base = labels[0].len();
        for t in 0..periods {
            for i in [ALPHA, BETA] {
                let j = 1 - i.0;
                let z = s.birth[i.0];
                let (key, incoming) = if t < z {
                    (StateKey::Unborn, Vec::new())
                } else {
                    let mut incoming: Vec<u32> = (s.birth[j]..t)
                        .filter(|&sent| sent + s.delay_to[i.0][sent] == t)
                        .map(|sent| labels[j][base + sent])
                        .collect();
                    incoming.sort_unstable();
                    let observed =
                        (s.observation[i.0] <= t).then(|| (s.observation[i.0] as i64 - z as i64, s.prospect));
                    let key = if t == z {
                        StateKey::Born { arrivals: incoming.clone(), observed }
                    } else {
                        StateKey::Step { prev: labels[i.0][base + t - 1], arrivals: incoming.clone(), observed }
                    };
                    (key, incoming)
                };
                let next = interned[i.0].len() as u32;
                let id = *interned[i.0].entry(key.clone()).or_insert_with(|| {
                    parent[i.0].push(match &key {
                        StateKey::Step { prev, .. } => Some(KenId(*prev)),
                        _ => None,
                    });
                    next
                });
                labels[i.0].push(id);
                arrivals[i.0].push(incoming.into_iter().map(KenId).collect());
            }
        }
    }
    let pre_birth = [ALPHA, BETA].map(|i| interned[i.0].get(&StateKey::Unborn).map(|&k| KenId(k)));
    let history_labels = spec
        .prior
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let s = &r.state;
            format!("#{k} q{} z{},{} obs{},{}", s.prospect, s.birth[0], s.birth[1], s.observation[0], s.observation[1])
        })
        .collect();
    let [la, lb] = labels;
    let frame = Frame::new(history_labels, vec!["alpha".into(), "beta".into()], periods, vec![la.clone(), lb.clone()])?;
    // Interned ids are assigned in point order, which is how the frame
    // numbers kens, so the two coincide.
    for (i, l) in [(ALPHA, &la), (BETA, &lb)] {
        debug_assert!(l.iter().enumerate().all(|(idx, &k)| frame.ken_of_index(i, idx) == k));
    }
    Ok(GameFrame {
        spec: spec.clone(),
        weights: spec.prior.iter().map(|r| r.weight.clone()).collect(),
        frame,
        pre_birth,
        parent,
        arrivals,
    })
}

impl GameFrame {
    pub fn state(&self, h: HistoryId) -> &StateOfNature {
        &self.spec.prior[h.0].state
    }

    pub fn history_of_state(&self, o: &StateOfNature) -> Option<HistoryId> {
        self.spec.prior.iter().position(|r| &r.state == o).map(HistoryId)
    }

    pub fn pre_birth_ken(&self, player: PlayerId) -> Option<KenId> {
        self.pre_birth[player.0]
    }

    /// The ken the player was in one period earlier, for kens after birth.
    pub fn parent(&self, player: PlayerId, ken: KenId) -> Option<KenId> {
        self.parent[player.0][ken.0 as usize]
    }

    pub fn subjective_time(&self, player: PlayerId, p: Point) -> Option<usize> {
        p.time.checked_sub(self.state(p.history).birth[player.0])
    }

    /// Messages received so far, as (sender's ken, subjective receipt time).
    pub fn transcript(&self, player: PlayerId, p: Point) -> Vec<(KenId, usize)> {
        let z = self.state(p.history).birth[player.0];
        let mut out = Vec::new();
        for t in z..=p.time {
            let idx = self.frame.index(Point::new(p.history.0, t));
            out.extend(self.arrivals[player.0][idx].iter().map(|&k| (k, t - z)));
        }
        out
    }

    /// `[q = prospect]`.
    pub fn prospect_event(&self, prospect: u8) -> Event {
        self.frame.histories_event(self.frame.histories().filter(|&h| self.state(h).prospect == prospect))
    }

    /// Histories in which `psi` holds at some time no later than `deadline`.
    pub fn by_deadline(&self, psi: &Event, deadline: usize) -> Event {
        self.frame
            .histories_event(self.frame.histories().filter(|&h| psi.first_time_in(h).is_some_and(|t| t <= deadline)))
    }

    /// `[q = 1] ∩ [ψ_α by its deadline] ∩ [ψ_β by its deadline]`.
    pub fn attack_fact(&self, psi: [&Event; 2]) -> Event {
        let [da, db] = self.spec.deadlines;
        &(&self.prospect_event(1) & &self.by_deadline(psi[0], da)) & &self.by_deadline(psi[1], db)
    }

    pub fn strategy_event(&self, player: PlayerId, kens: &BTreeSet<KenId>) -> Event {
        let mut e = self.frame.empty();
        for &k in kens {
            for p in self.frame.ken_points(player, k) {
                e.insert_index(self.frame.index(p));
            }
        }
        e
    }

    fn check_strategies(&self, s: &AttackStrategyPair) -> Result<()> {
        for i in [ALPHA, BETA] {
            for &k in &s.initiate[i.0] {
                if k.0 as usize >= self.frame.n_kens(i) {
                    return Err(Error::InvalidSpec(format!("player {} has no ken {}", i.0, k.0)));
                }
                if Some(k) == self.pre_birth[i.0] {
                    return Err(Error::InvalidSpec(format!(
                        "player {} cannot act before birth",
                        self.frame.player_label(i)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Each player initiates at the first point whose ken is in its set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackStrategyPair {
    pub initiate: [BTreeSet<KenId>; 2],
}

impl AttackStrategyPair {
    pub fn never() -> Self {
        Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub attack_times: [Option<usize>; 2],
    pub success: bool,
    pub utility: ExtReal,
}

pub(crate) fn judge(g: &GameFrame, h: HistoryId, attack_times: [Option<usize>; 2]) -> Outcome {
    let [da, db] = g.spec.deadlines;
    let success = g.state(h).prospect == 1
        && attack_times[0].is_some_and(|t| t <= da)
        && attack_times[1].is_some_and(|t| t <= db);
    let utility = match (attack_times, success) {
        ([None, None], _) => ExtReal::zero(),
        (_, true) => ExtReal::one(),
        _ => ExtReal::NegInf,
    };
    Outcome { attack_times, success, utility }
}

pub fn attack_time(g: &GameFrame, player: PlayerId, kens: &BTreeSet<KenId>, h: HistoryId) -> Option<usize> {
    (0..g.frame.horizon()).find(|&t| kens.contains(&g.frame.ken_of(player, Point::new(h.0, t))))
}

pub fn play(g: &GameFrame, s: &AttackStrategyPair, h: HistoryId) -> Result<Outcome> {
    g.check_strategies(s)?;
    g.frame.check_history(h)?;
    let times = [ALPHA, BETA].map(|i| attack_time(g, i, &s.initiate[i.0], h));
    Ok(judge(g, h, times))
}

pub fn play_state(g: &GameFrame, s: &AttackStrategyPair, o: &StateOfNature) -> Result<Outcome> {
    let h = g.history_of_state(o).ok_or_else(|| Error::InvalidSpec("state is not in the prior's support".into()))?;
    play(g, s, h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WelfareReport {
    pub per_state: Vec<ExtReal>,
    /// Expected utility of each player; both players' utilities coincide.
    pub expected: ExtReal,
}

pub fn expected_welfare(g: &GameFrame, s: &AttackStrategyPair) -> Result<WelfareReport> {
    let per_state = g.frame.histories().map(|h| play(g, s, h).map(|o| o.utility)).collect::<Result<Vec<_>>>()?;
    let expected = per_state.iter().zip(&g.weights).fold(ExtReal::zero(), |acc, (u, w)| &acc + &u.scale(w));
    Ok(WelfareReport { per_state, expected })
}

pub fn verify_never_unsuccessful(g: &GameFrame, s: &AttackStrategyPair) -> Result<bool> {
    Ok(g.frame.histories().map(|h| play(g, s, h)).collect::<Result<Vec<_>>>()?.iter().all(|o| !o.utility.is_neg_inf()))
}

#[derive(Clone, Debug)]
pub struct SckResult {
    pub strategies: AttackStrategyPair,
    pub profile: Profile,
    /// First-initiation events, one per player.
    pub anchors: [Event; 2],
    pub fact: Event,
    pub ck: Event,
    pub elimination_rounds: usize,
}

/// The largest pair of ken sets that attack only when the prospect is 1,
/// only by the deadline, and always together, found by deleting kens that
/// touch a history where exactly one player would attack. The result is
/// checked against anchored common knowledge computed by fixed-point
/// iteration and by reachability.
pub fn compute_sck(g: &GameFrame) -> Result<SckResult> {
    let f = &g.frame;
    let good = g.prospect_event(1);
    let mut sets: [BTreeSet<KenId>; 2] = Default::default();
    for i in [ALPHA, BETA] {
        let known = f.knows(i, &good)?;
        let deadline = g.spec.deadlines[i.0];
        for k in 0..f.n_kens(i) {
            let ken = KenId(k as u32);
            if Some(ken) == g.pre_birth[i.0] {
                continue;
            }
            if f.ken_points(i, ken).all(|p| known.contains(p) && p.time <= deadline) {
                sets[i.0].insert(ken);
            }
        }
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let occurs = [ALPHA, BETA].map(|i| g.strategy_event(i, &sets[i.0]));
        let violating: HashSet<HistoryId> =
            f.histories().filter(|&h| occurs[0].occurs_in(h) != occurs[1].occurs_in(h)).collect();
        if violating.is_empty() {
            break;
        }
        for i in [ALPHA, BETA] {
            sets[i.0].retain(|&k| f.ken_points(i, k).all(|p| !violating.contains(&p.history)));
        }
    }
    let anchors = [ALPHA, BETA].map(|i| g.strategy_event(i, &sets[i.0]).first_points());
    let profile = Profile::new(f, [(ALPHA, anchors[0].clone()), (BETA, anchors[1].clone())])?;
    let fact = g.attack_fact([&anchors[0], &anchors[1]]);
    let ck = f.ck_at(&profile, &fact, Algorithm::Kleene)?;
    for i in [ALPHA, BETA] {
        let by_iteration = &anchors[i.0] & &ck;
        let by_reachability = f.individualized(i, &profile, &fact)?;
        if by_iteration != anchors[i.0] || by_reachability != anchors[i.0] {
            return Err(Error::CrossValidation(format!(
                "first-initiation points of {} differ from its part of anchored common knowledge",
                f.player_label(i)
            )));
        }
    }
    let strategies =
        AttackStrategyPair { initiate: [ALPHA, BETA].map(|i| anchors[i.0].points().map(|p| f.ken_of(i, p)).collect()) };
    Ok(SckResult { strategies, profile, anchors, fact, ck, elimination_rounds: rounds })
}

fn product_prior(states: Vec<StateOfNature>) -> Vec<PriorRow> {
    let w = rational::ratio(1, states.len() as i64);
    states.into_iter().map(|state| PriorRow { state, weight: w.clone() }).collect()
}

/// `α` born at 0 and observing at once; `β` born at 0 or 1, never
/// observing; `α`'s messages take `50 + z` periods, `β`'s take `51 − z`.
pub fn game_example1() -> AttackGameSpec {
    let n = 100;
    let mut states = Vec::new();
    for q in 0..=1 {
        for z in 0..=1 {
            states.push(StateOfNature {
                prospect: q,
                birth: [0, z],
                observation: [0, n],
                delay_to: [vec![51 - z; n], vec![50 + z; n]],
            });
        }
    }
    AttackGameSpec { periods: n, deadlines: [49, 99], prior: product_prior(states) }
}

/// As the first example, but `α`'s messages all take one common delay
/// `d ∈ 1..=100` and `β`'s take `3 − z`.
pub fn game_example2() -> AttackGameSpec {
    let n = 100;
    let mut states = Vec::new();
    for q in 0..=1 {
        for z in 0..=1 {
            for d in 1..=n {
                states.push(StateOfNature {
                    prospect: q,
                    birth: [0, z],
                    observation: [0, n],
                    delay_to: [vec![3 - z; n], vec![d; n]],
                });
            }
        }
    }
    AttackGameSpec { periods: n, deadlines: [49, 99], prior: product_prior(states) }
}

/// `β` is born at 0 or never; messages sent at the sender's subjective time
/// 0 take one period and all later ones are never delivered.
pub fn late_birth_game(periods: usize, deadlines: [usize; 2]) -> AttackGameSpec {
    let n = periods;
    let mut states = Vec::new();
    for q in 0..=1 {
        for z in [0, n] {
            let quick = |birth: usize| (0..n).map(|t| if t == birth { 1 } else { n }).collect();
            states.push(StateOfNature {
                prospect: q,
                birth: [0, z],
                observation: [0, n],
                delay_to: [quick(z), quick(0)],
            });
        }
    }
    AttackGameSpec { periods: n, deadlines, prior: product_prior(states) }
}

pub fn game_example3() -> AttackGameSpec {
    late_birth_game(100, [49, 99])
}

pub fn game_tiny() -> AttackGameSpec {
    late_birth_game(6, [2, 5])
}
