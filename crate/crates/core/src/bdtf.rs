//! Two-player frames with unknown birth dates and delivery delays.
//!
//! A history fixes an initial condition `o`, each player's birth date and
//! each player's incoming delay. Before birth a player only knows her
//! initial cell; at subjective time zero she wakes up knowing just that; at
//! every later subjective time she additionally perceives the signal the
//! other player sent `delay` periods earlier. Kens are the classes of equal
//! observation histories, computed by forward induction over absolute time.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, PlayerId, Point};
use crate::knowledge::CkLayers;
use crate::partition::HistoryPartition;
use crate::rational::{self, Rational};
use crate::relaxed::{Algorithm, Profile};

pub const ALPHA: PlayerId = PlayerId(0);
pub const BETA: PlayerId = PlayerId(1);

pub fn other(p: PlayerId) -> PlayerId {
    PlayerId(1 - p.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimingMode {
    /// Birth dates in `0..=max_birth`, delays in `1..=max_delay`, independently.
    Full { max_birth: usize, max_delay: usize },
    /// `α` born at 0, `β` born at `k`, delay into `β` equal to `k`, delay into
    /// `α` equal to `round_trip - k`, for `k` in `1..round_trip`.
    SingleDimensional { round_trip: usize },
}

impl TimingMode {
    pub fn max_birth(&self) -> usize {
        match *self {
            TimingMode::Full { max_birth, .. } => max_birth,
            TimingMode::SingleDimensional { round_trip } => round_trip.saturating_sub(1),
        }
    }

    pub fn max_delay(&self) -> usize {
        match *self {
            TimingMode::Full { max_delay, .. } => max_delay,
            TimingMode::SingleDimensional { round_trip } => round_trip.saturating_sub(1),
        }
    }

    fn timings(&self) -> Vec<([usize; 2], [usize; 2])> {
        match *self {
            TimingMode::Full { max_birth, max_delay } => {
                let mut out = Vec::new();
                for za in 0..=max_birth {
                    for zb in 0..=max_birth {
                        for da in 1..=max_delay {
                            for db in 1..=max_delay {
                                out.push(([za, zb], [da, db]));
                            }
                        }
                    }
                }
                out
            }
            TimingMode::SingleDimensional { round_trip } => {
                (1..round_trip).map(|k| ([0, k], [round_trip - k, k])).collect()
            }
        }
    }

    fn timing_count(&self) -> u128 {
        match *self {
            TimingMode::Full { max_birth, max_delay } => {
                let z = max_birth as u128 + 1;
                let d = max_delay as u128;
                z * z * d * d
            }
            TimingMode::SingleDimensional { round_trip } => round_trip.saturating_sub(1) as u128,
        }
    }
}

/// What a player sends, as a function of her current ken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SignalRule {
    /// Nothing beyond timestamps (and nothing at all without them).
    Silent,
    /// A constant token.
    Heartbeat,
    /// An identifier of the sender's current ken.
    KenLabel,
    /// The sender's initial cell.
    InitialCell,
    /// The sender's current posterior of the initial condition lying in `target`.
    Posterior { target: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BdtfSpec {
    pub initial_conditions: Vec<String>,
    /// Per player, the initial cell index of every initial condition.
    pub initial_partitions: [Vec<usize>; 2],
    pub timing: TimingMode,
    pub horizon: usize,
    pub signals: [SignalRule; 2],
    pub timestamps: bool,
    /// Prior over initial conditions; uniform when absent. Timing parameters
    /// are uniform and independent of the initial condition.
    #[serde(default, with = "rational::opt_fractions", skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<Rational>>,
    /// When set, the horizon must cover `max_birth + 3 * max_delay + margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BdtfHistory {
    pub o: usize,
    pub birth: [usize; 2],
    /// `delay[i]`: periods a signal takes to reach player `i`.
    pub delay: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Payload {
    Nothing,
    Token,
    Ken(u32),
    Cell(usize),
    Posterior(#[serde(with = "rational::fraction")] Rational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signal {
    pub payload: Payload,
    /// Sender's subjective send time.
    pub sent_at: Option<usize>,
    /// Sender-side subjective time quoted from the signal the sender had just
    /// perceived when sending.
    pub quoted: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum KenKey {
    Unborn(usize),
    Awake(usize),
    Step { tau: usize, prev: u32, received: Option<u32> },
}

#[derive(Clone, Debug)]
pub struct BdtfFrame {
    pub spec: BdtfSpec,
    pub frame: Frame,
    pub histories: Vec<BdtfHistory>,
    pub weights: Vec<Rational>,
    /// `sent[i][h][t]`: signal player `i` sends at absolute `t` (`None` = no signal).
    sent: [Vec<Vec<Option<Signal>>>; 2],
    /// `received[i][h][t]`: signal player `i` perceives at absolute `t`.
    received: [Vec<Vec<Option<Signal>>>; 2],
}

impl BdtfSpec {
    pub fn history_count(&self) -> u128 {
        self.initial_conditions.len() as u128 * self.timing.timing_count()
    }

    fn validate(&self) -> Result<()> {
        let n_o = self.initial_conditions.len();
        if n_o == 0 {
            return Err(Error::InvalidSpec("no initial conditions".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.initial_conditions.iter().all(|o| seen.insert(o)) {
            return Err(Error::InvalidSpec("duplicate initial condition label".into()));
        }
        for p in &self.initial_partitions {
            if p.len() != n_o {
                return Err(Error::InvalidSpec(format!(
                    "initial partition has {} entries for {} initial conditions",
                    p.len(),
                    n_o
                )));
            }
        }
        if self.horizon == 0 {
            return Err(Error::InvalidSpec("horizon must be at least 1".into()));
        }
        match self.timing {
            TimingMode::Full { max_delay: 0, .. } => return Err(Error::InvalidSpec("delays start at 1".into())),
            TimingMode::SingleDimensional { round_trip } if round_trip < 2 => {
                return Err(Error::InvalidSpec("round trip must be at least 2".into()))
            }
            _ => {}
        }
        if let Some(prior) = &self.prior {
            if prior.len() != n_o {
                return Err(Error::InvalidSpec("prior length differs from initial conditions".into()));
            }
            rational::check_distribution(prior)?;
        }
        for rule in &self.signals {
            if let SignalRule::Posterior { target } = rule {
                for o in target {
                    if !self.initial_conditions.contains(o) {
                        return Err(Error::InvalidSpec(format!("unknown initial condition `{o}`")));
                    }
                }
            }
        }
        if let Some(margin) = self.margin {
            let need = self.timing.max_birth() + 3 * self.timing.max_delay() + margin;
            if self.horizon < need {
                return Err(Error::HorizonTooShort(format!("horizon {} is below the required {}", self.horizon, need)));
            }
        }
        Ok(())
    }

    fn o_index(&self, label: &str) -> usize {
        self.initial_conditions.iter().position(|o| o == label).unwrap()
    }
}

/// Builds the frame generated by `spec`, refusing more than `cap` histories.
pub fn build_bdtf_frame(spec: &BdtfSpec, cap: u128) -> Result<BdtfFrame> {
    spec.validate()?;
    let needed = spec.history_count();
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let timings = spec.timing.timings();
    let n_timing = timings.len() as i64;
    let prior = spec.prior.clone().unwrap_or_else(|| {
        vec![rational::ratio(1, spec.initial_conditions.len() as i64); spec.initial_conditions.len()]
    });
    let mut histories = Vec::new();
    let mut weights = Vec::new();
    for (o, w) in prior.iter().enumerate() {
        for &(birth, delay) in &timings {
            histories.push(BdtfHistory { o, birth, delay });
            weights.push(w / rational::int(n_timing));
        }
    }
    Builder::new(spec, histories, weights).run()
}

struct Builder<'a> {
    spec: &'a BdtfSpec,
    histories: Vec<BdtfHistory>,
    weights: Vec<Rational>,
    /// Keys are computed beyond the horizon so that every history reaches
    /// each subjective time below the horizon.
    ext: usize,
    interners: [HashMap<KenKey, u32>; 2],
    ken: [Vec<Vec<u32>>; 2],
    received: [Vec<Vec<Option<u32>>>; 2],
    sent_memo: [Vec<Vec<Option<Option<u32>>>>; 2],
    signals: Vec<Signal>,
    signal_ids: HashMap<Signal, u32>,
    targets: [Option<Vec<bool>>; 2],
}

impl<'a> Builder<'a> {
    fn new(spec: &'a BdtfSpec, histories: Vec<BdtfHistory>, weights: Vec<Rational>) -> Self {
        let ext = spec.horizon + spec.timing.max_birth();
        let n = histories.len();
        let targets = [0, 1].map(|i| match &spec.signals[i] {
            SignalRule::Posterior { target } => {
                let mut mask = vec![false; spec.initial_conditions.len()];
                for o in target {
                    mask[spec.o_index(o)] = true;
                }
                Some(mask)
            }
            _ => None,
        });
        Builder {
            spec,
            ken: [vec![vec![0; ext]; n], vec![vec![0; ext]; n]],
            received: [vec![vec![None; ext]; n], vec![vec![None; ext]; n]],
            sent_memo: [vec![vec![None; ext]; n], vec![vec![None; ext]; n]],
            histories,
            weights,
            ext,
            interners: [HashMap::new(), HashMap::new()],
            signals: Vec::new(),
            signal_ids: HashMap::new(),
            targets,
        }
    }

    fn intern_ken(&mut self, i: usize, key: KenKey) -> u32 {
        let map = &mut self.interners[i];
        let next = map.len() as u32;
        *map.entry(key).or_insert(next)
    }

    fn intern_signal(&mut self, s: Signal) -> u32 {
        if let Some(&id) = self.signal_ids.get(&s) {
            return id;
        }
        let id = self.signals.len() as u32;
        self.signals.push(s.clone());
        self.signal_ids.insert(s, id);
        id
    }

    fn run(mut self) -> Result<BdtfFrame> {
        for t in 0..self.ext {
            for h in 0..self.histories.len() {
                for i in 0..2 {
                    self.assign(i, h, t)?;
                }
            }
        }
        self.finish()
    }

    fn assign(&mut self, i: usize, h: usize, t: usize) -> Result<()> {
        let hist = self.histories[h];
        let cell = self.spec.initial_partitions[i][hist.o];
        let tau = t as i64 - hist.birth[i] as i64;
        let key = if tau < 0 {
            KenKey::Unborn(cell)
        } else if tau == 0 {
            KenKey::Awake(cell)
        } else {
            let j = 1 - i;
            let sent = t as i64 - hist.delay[i] as i64;
            let received = if sent >= hist.birth[j] as i64 { self.sent_signal(j, h, sent as usize, t)? } else { None };
            self.received[i][h][t] = received;
            KenKey::Step { tau: tau as usize, prev: self.ken[i][h][t - 1], received }
        };
        self.ken[i][h][t] = self.intern_ken(i, key);
        Ok(())
    }

    /// Signal player `i` sends at absolute `s` in history `h`, needed at time `now`.
    fn sent_signal(&mut self, i: usize, h: usize, s: usize, now: usize) -> Result<Option<u32>> {
        if let Some(v) = self.sent_memo[i][h][s] {
            return Ok(v);
        }
        let hist = self.histories[h];
        let tau = s - hist.birth[i];
        let ken = self.ken[i][h][s];
        let payload = match &self.spec.signals[i] {
            SignalRule::Silent => Payload::Nothing,
            SignalRule::Heartbeat => Payload::Token,
            SignalRule::KenLabel => Payload::Ken(ken),
            SignalRule::InitialCell => Payload::Cell(self.spec.initial_partitions[i][hist.o]),
            SignalRule::Posterior { .. } => Payload::Posterior(self.posterior(i, ken, tau, now)?),
        };
        let value = if payload == Payload::Nothing && !self.spec.timestamps {
            None
        } else {
            let (sent_at, quoted) = if self.spec.timestamps {
                let quoted = self.received[i][h][s].and_then(|r| self.signals[r as usize].sent_at);
                (Some(tau), quoted)
            } else {
                (None, None)
            };
            Some(self.intern_signal(Signal { payload, sent_at, quoted }))
        };
        self.sent_memo[i][h][s] = Some(value);
        Ok(value)
    }

    /// Posterior of the target given the ken `ken` of player `i` at subjective
    /// time `tau`; every history must already have reached that subjective time.
    fn posterior(&self, i: usize, ken: u32, tau: usize, now: usize) -> Result<Rational> {
        let mask = self.targets[i].as_ref().unwrap();
        let mut total = Rational::zero();
        let mut hit = Rational::zero();
        for (h, hist) in self.histories.iter().enumerate() {
            let t = hist.birth[i] + tau;
            if t >= now {
                return Err(Error::InvalidSpec(format!(
                    "posterior signal at subjective time {tau} depends on kens not yet \
                     determined; posterior signals need single-dimensional timing"
                )));
            }
            if self.ken[i][h][t] == ken {
                total += &self.weights[h];
                if mask[hist.o] {
                    hit += &self.weights[h];
                }
            }
        }
        Ok(hit / total)
    }

    fn finish(mut self) -> Result<BdtfFrame> {
        let horizon = self.spec.horizon;
        let n = self.histories.len();
        // Make sure every signal sent inside the horizon is materialized.
        for i in 0..2 {
            for h in 0..n {
                for t in self.histories[h].birth[i]..horizon {
                    self.sent_signal(i, h, t, self.ext)?;
                }
            }
        }
        let labels: Vec<String> = self
            .histories
            .iter()
            .map(|w| {
                format!(
                    "{}/z{},{}/d{},{}",
                    self.spec.initial_conditions[w.o], w.birth[0], w.birth[1], w.delay[0], w.delay[1]
                )
            })
            .collect();
        let ken_labels: Vec<Vec<u32>> =
            (0..2).map(|i| (0..n).flat_map(|h| self.ken[i][h][..horizon].iter().copied()).collect()).collect();
        let frame = Frame::new(labels, vec!["alpha".into(), "beta".into()], horizon, ken_labels)?;
        let signals = &self.signals;
        let materialize = |grid: &Vec<Vec<Option<u32>>>| -> Vec<Vec<Option<Signal>>> {
            grid.iter()
                .map(|row| row[..horizon].iter().map(|s| s.map(|id| signals[id as usize].clone())).collect())
                .collect()
        };
        let sent_ids = |i: usize| -> Vec<Vec<Option<u32>>> {
            self.sent_memo[i].iter().map(|row| row.iter().map(|m| m.flatten()).collect()).collect()
        };
        let sent = [materialize(&sent_ids(0)), materialize(&sent_ids(1))];
        let received = [materialize(&self.received[0]), materialize(&self.received[1])];
        Ok(BdtfFrame {
            spec: self.spec.clone(),
            frame,
            histories: self.histories,
            weights: self.weights,
            sent,
            received,
        })
    }
}

impl BdtfFrame {
    pub fn history(&self, h: HistoryId) -> &BdtfHistory {
        &self.histories[h.0]
    }

    pub fn subjective_time(&self, player: PlayerId, p: Point) -> Option<usize> {
        p.time.checked_sub(self.histories[p.history.0].birth[player.0])
    }

    /// `[τ_i = tau]`: the points at which `player` has subjective time `tau`.
    pub fn subjective_event(&self, player: PlayerId, tau: usize) -> Event {
        self.frame.event_from_fn(|p| self.subjective_time(player, p) == Some(tau))
    }

    /// Time-invariant event of the histories satisfying `pred`.
    pub fn histories_where<F: Fn(&BdtfHistory) -> bool>(&self, pred: F) -> Event {
        self.frame.histories_event(self.frame.histories().filter(|h| pred(&self.histories[h.0])))
    }

    /// Signal sent by `player` at subjective time `tau`, if that is inside the horizon.
    pub fn sent_signal(&self, player: PlayerId, h: HistoryId, tau: usize) -> Option<&Signal> {
        let t = self.histories[h.0].birth[player.0] + tau;
        self.sent[player.0][h.0].get(t).and_then(Option::as_ref)
    }

    /// Signal `player` perceives at absolute time `t`.
    pub fn received_signal(&self, player: PlayerId, p: Point) -> Option<&Signal> {
        self.received[player.0][p.history.0][p.time].as_ref()
    }

    /// Signal `player` sends at absolute time `t`.
    pub fn sent_at_point(&self, player: PlayerId, p: Point) -> Option<&Signal> {
        self.sent[player.0][p.history.0][p.time].as_ref()
    }

    /// Largest subjective time of `player` reached in every history.
    pub fn common_subjective_horizon(&self, player: PlayerId) -> Option<usize> {
        let latest = self.histories.iter().map(|w| w.birth[player.0]).max()?;
        (self.spec.horizon - 1).checked_sub(latest)
    }

    pub fn slice(&self, player: PlayerId, tau: usize) -> Result<HistoryPartition> {
        Ok(self.frame.slice_partition(player, &self.subjective_event(player, tau))?.partition)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NoNewCkReport {
    /// Times at which the target is traditional common knowledge in the history.
    pub ck_times: Vec<usize>,
    /// First `t + 1` such that the target is common knowledge at `t + 1` but not at `t`.
    pub first_violation: Option<usize>,
}

/// Checks that common knowledge of `phi` never newly arises along history `h`.
/// Requires a round trip longer than two periods.
pub fn verify_no_new_ck(bf: &BdtfFrame, h: HistoryId, phi: &Event) -> Result<NoNewCkReport> {
    bf.frame.check_history(h)?;
    let w = bf.history(h);
    if w.delay[0] + w.delay[1] <= 2 {
        return Err(Error::Hypothesis(format!("round trip {} does not exceed 2", w.delay[0] + w.delay[1])));
    }
    let CkLayers { fixed_point, .. } = bf.frame.ck_traditional_layers(&[ALPHA, BETA], phi)?;
    let ck_times: Vec<usize> = fixed_point.times_in(h).collect();
    let first_violation = (1..bf.frame.horizon())
        .find(|&t| fixed_point.contains(Point::new(h.0, t)) && !fixed_point.contains(Point::new(h.0, t - 1)));
    Ok(NoNewCkReport { ck_times, first_violation })
}

#[derive(Clone, Debug)]
pub struct RoundtripReport {
    /// The player with the later (or equal) birth date, who sends first.
    pub initiator: PlayerId,
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
    pub z_bound: usize,
    pub profile: Profile,
    pub phi: Event,
    pub sigma_d: Event,
    pub sigma_z: Event,
    pub premise_holds: bool,
    pub ck_phi: bool,
    pub ck_sigma_d: bool,
    pub ck_sigma_z: bool,
}

impl RoundtripReport {
    pub fn responder(&self) -> PlayerId {
        other(self.initiator)
    }

    pub fn all_hold(&self) -> bool {
        self.premise_holds && self.ck_phi && self.ck_sigma_d && self.ck_sigma_z
    }
}

/// The round trip that starts with the later-born player's first signal in
/// history `h`, and the facts it makes anchored common knowledge.
pub fn roundtrip_ck_facts(bf: &BdtfFrame, h: HistoryId, algorithm: Algorithm) -> Result<RoundtripReport> {
    bf.frame.check_history(h)?;
    if !bf.spec.timestamps {
        return Err(Error::InvalidSpec("round-trip facts require timestamps".into()));
    }
    let w = *bf.history(h);
    let a = if w.birth[0] >= w.birth[1] { ALPHA } else { BETA };
    let b = other(a);
    let t1 = w.birth[a.0] - w.birth[b.0] + w.delay[b.0];
    let t2 = w.delay[0] + w.delay[1];
    let t3 = t1 + t2;
    let z_bound = t1.max(t2 - t1);
    let psi_a = bf.subjective_event(a, t2);
    let psi_b = bf.subjective_event(b, t3);
    for (p, e, tau) in [(a, &psi_a, t2), (b, &psi_b, t3)] {
        if e.histories_of().len() != bf.frame.n_histories() {
            return Err(Error::HorizonTooShort(format!(
                "subjective time {tau} of {} is not reached in every history",
                bf.frame.player_label(p)
            )));
        }
    }
    let profile = Profile::new(&bf.frame, [(a, psi_a), (b, psi_b)])?;
    let (ai, bi) = (a.0, b.0);
    let phi = bf.histories_where(|x| {
        x.birth[ai] as i64 - x.birth[bi] as i64 + x.delay[bi] as i64 == t1 as i64
            && x.birth[bi] as i64 - x.birth[ai] as i64 + x.delay[ai] as i64 == (t2 - t1) as i64
    });
    let sigma_d = bf.histories_where(|x| x.delay[0] + x.delay[1] == t2);
    let sigma_z = bf.histories_where(|x| x.birth[0].abs_diff(x.birth[1]) < z_bound);
    let premise_holds = phi.subset_of(&bf.frame.everyone_at(&profile, &phi)?);
    let here = Point::new(h.0, 0);
    let ck = |e: &Event| -> Result<bool> { Ok(bf.frame.ck_at(&profile, e, algorithm)?.contains(here)) };
    Ok(RoundtripReport {
        initiator: a,
        t1,
        t2,
        t3,
        z_bound,
        ck_phi: ck(&phi)?,
        ck_sigma_d: ck(&sigma_d)?,
        ck_sigma_z: ck(&sigma_z)?,
        premise_holds,
        profile,
        phi,
        sigma_d,
        sigma_z,
    })
}

#[derive(Clone, Debug)]
pub struct GetCkReport {
    pub roundtrip: RoundtripReport,
    /// Largest offset at which both shifted anchors occur in every history.
    pub max_offset: usize,
    /// Least offset after which the pair of slice partitions no longer
    /// changes on the history's component.
    pub stable_offset: usize,
    /// Anchor subjective times, indexed by player.
    pub t_hat: [usize; 2],
    /// Number of signals per player (from the anchor on) covered by the
    /// verification; `None` when the other player cannot observe any of them
    /// inside the horizon.
    pub window: [Option<usize>; 2],
    pub profile: Profile,
    pub signal_event: Event,
    pub verified: bool,
}

/// Finds anchors after which the partitions of both players stop refining on
/// the component of history `h`, and checks that the signals sent from then
/// on are anchored common knowledge.
pub fn getck_times(bf: &BdtfFrame, h: HistoryId, margin: usize, algorithm: Algorithm) -> Result<GetCkReport> {
    let rt = roundtrip_ck_facts(bf, h, algorithm)?;
    if !rt.all_hold() {
        return Err(Error::CrossValidation("round-trip facts are not anchored common knowledge".into()));
    }
    let (a, b) = (rt.initiator, rt.responder());
    let (t2, t3) = (rt.t2, rt.t3);
    let reach_a = bf.common_subjective_horizon(a).unwrap_or(0);
    let reach_b = bf.common_subjective_horizon(b).unwrap_or(0);
    let max_offset = (reach_a - t2).min(reach_b - t3);

    let meet = bf.slice(a, t2)?.meet(&bf.slice(b, t3)?)?;
    let component = meet.cell(h);
    let snapshots: Vec<(Vec<usize>, Vec<usize>)> = (0..=max_offset)
        .map(|l| Ok((bf.slice(a, t2 + l)?.restrict(&component), bf.slice(b, t3 + l)?.restrict(&component))))
        .collect::<Result<_>>()?;
    let last = snapshots.last().unwrap();
    let stable_offset = (0..=max_offset).rev().take_while(|&l| &snapshots[l] == last).last().unwrap();
    if max_offset - stable_offset < margin {
        return Err(Error::NoStabilization(format!(
            "partitions settle at offset {stable_offset} but only {max_offset} offsets fit"
        )));
    }
    let mut t_hat = [0; 2];
    t_hat[a.0] = t2 + stable_offset;
    t_hat[b.0] = t3 + stable_offset;
    let span = (max_offset - stable_offset) as i64;

    // A signal is covered when, in every history of the component, the other
    // player perceives it before her own last shifted anchor.
    let cover = |sender: PlayerId, recv_last: usize| -> Option<usize> {
        let r = other(sender);
        component
            .iter()
            .map(|&x| {
                let w = bf.history(x);
                let shift = w.birth[sender.0] as i64 - w.birth[r.0] as i64 + w.delay[r.0] as i64;
                recv_last as i64 - shift - t_hat[sender.0] as i64
            })
            .min()
            .map(|k| k.min(span))
            .filter(|&k| k >= 0)
            .map(|k| k as usize)
    };
    let mut window = [None; 2];
    window[a.0] = cover(a, t3 + max_offset);
    window[b.0] = cover(b, t2 + max_offset);

    let signal_event = bf.frame.histories_event(bf.frame.histories().filter(|&x| {
        [a, b].iter().all(|&p| match window[p.0] {
            None => true,
            Some(k) => (0..=k).all(|j| bf.sent_signal(p, x, t_hat[p.0] + j) == bf.sent_signal(p, h, t_hat[p.0] + j)),
        })
    }));
    let profile =
        Profile::new(&bf.frame, [(a, bf.subjective_event(a, t_hat[a.0])), (b, bf.subjective_event(b, t_hat[b.0]))])?;
    let verified = bf.frame.ck_at(&profile, &signal_event, algorithm)?.contains(Point::new(h.0, 0));
    Ok(GetCkReport { roundtrip: rt, max_offset, stable_offset, t_hat, window, profile, signal_event, verified })
}

/// The two-history frame with one initial condition, round trip 3 and
/// horizon 6, where `α` cannot tell the histories apart and `β`'s view is
/// shifted by one period.
pub fn shifted_pair_spec(timestamps: bool, horizon: usize) -> BdtfSpec {
    BdtfSpec {
        initial_conditions: vec!["o".into()],
        initial_partitions: [vec![0], vec![0]],
        timing: TimingMode::SingleDimensional { round_trip: 3 },
        horizon,
        signals: [SignalRule::Heartbeat, SignalRule::Heartbeat],
        timestamps,
        prior: None,
        margin: None,
    }
}
