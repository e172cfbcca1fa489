//! Common knowledge anchored at per-player local events.
//!
//! Each player `i` in a profile carries an `i`-local event `ψ_i`. The
//! anchored knowledge operator holds throughout a history when `ψ_i` occurs
//! somewhere in it and `i` knows `φ` at every point where `ψ_i` holds.
//! Common knowledge is the greatest fixed point of the resulting mutual
//! knowledge operator and is computed two ways: by downward iteration and by
//! connected components of a reachability graph over histories.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, KenId, PlayerId, Point};

/// One local event per player of a nonempty player set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    frame: u64,
    entries: Vec<(PlayerId, Event)>,
}

impl Profile {
    /// Fails unless every event is local to its player and bound to `frame`.
    pub fn new<I>(frame: &Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PlayerId, Event)>,
    {
        let mut entries: Vec<(PlayerId, Event)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::EmptyPlayerSet);
        }
        entries.sort_by_key(|(p, _)| *p);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidSpec(format!("player {:?} appears twice in the profile", w[0].0)));
            }
        }
        for (p, e) in &entries {
            if !frame.is_local(*p, e)? {
                return Err(Error::NotLocal(*p));
            }
        }
        Ok(Profile { frame: frame.id(), entries })
    }

    pub fn players(&self) -> Vec<PlayerId> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn event(&self, player: PlayerId) -> Result<&Event> {
        self.entries.iter().find(|(p, _)| *p == player).map(|(_, e)| e).ok_or(Error::NotInProfile(player))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlayerId, &Event)> {
        self.entries.iter().map(|(p, e)| (*p, e))
    }

    /// Within each listed history, either every anchor occurs or none does.
    pub fn co_occurs(&self, histories: &[HistoryId]) -> bool {
        histories.iter().all(|&h| {
            let first = self.entries[0].1.occurs_in(h);
            self.entries.iter().all(|(_, e)| e.occurs_in(h) == first)
        })
    }

    fn occurring(&self, h: HistoryId) -> impl Iterator<Item = PlayerId> + '_ {
        self.entries.iter().filter(move |(_, e)| e.occurs_in(h)).map(|(p, _)| *p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Kleene,
    #[default]
    Reachability,
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kleene" => Ok(Algorithm::Kleene),
            "reachability" => Ok(Algorithm::Reachability),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Kleene => "kleene",
            Algorithm::Reachability => "reachability",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeWitness {
    pub player: PlayerId,
    pub from: Point,
    pub to: Point,
}

/// Histories linked whenever one player's anchor points across them share a ken.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    n_histories: usize,
    /// Keyed by `(low, high)` history pair; self-loops use `(h, h)`.
    pub edges: BTreeMap<(HistoryId, HistoryId), EdgeWitness>,
}

impl ReachabilityGraph {
    /// Connected components, each sorted, numbered by smallest member.
    pub fn components(&self) -> Vec<Vec<HistoryId>> {
        let mut uf = UnionFind::<usize>::new(self.n_histories);
        for &(a, b) in self.edges.keys() {
            uf.union(a.0, b.0);
        }
        group_components(&mut uf, self.n_histories)
    }
}

fn group_components(uf: &mut UnionFind<usize>, n: usize) -> Vec<Vec<HistoryId>> {
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out: Vec<Vec<HistoryId>> = Vec::new();
    for h in 0..n {
        let root = uf.find_mut(h);
        let slot = *by_root.entry(root).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[slot].push(HistoryId(h));
    }
    out
}

/// Why a history is excluded from the anchored common-knowledge event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ReachabilityFailure {
    /// No anchor occurs in the history.
    NoOccurrence,
    /// Somewhere in the component one anchor occurs but another does not.
    CoOccurrence { history: HistoryId, present: PlayerId, missing: PlayerId },
    /// A reachable anchor point lies outside the target event.
    OutsideEvent { player: PlayerId, point: Point },
}

#[derive(Clone, Debug)]
pub struct CkReport {
    pub event: Event,
    pub failures: BTreeMap<HistoryId, ReachabilityFailure>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InductionReport {
    pub premise_holds: bool,
    pub conclusion_holds: bool,
    /// Present only when a witness event was supplied.
    pub witness_premise_holds: Option<bool>,
    pub witness_conclusion_holds: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CooccurrenceReport {
    pub anchors_in_ck: bool,
    pub co_occurs_everywhere: bool,
}

impl Frame {
    fn bind_profile(&self, profile: &Profile) -> Result<()> {
        if profile.frame == self.id() {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    /// `⟐ψ ∩ ⊡(ψ → K_i φ)`: the anchor occurs and whenever it holds the
    /// player knows `phi`.
    pub fn knows_at(&self, player: PlayerId, psi: &Event, phi: &Event) -> Result<Event> {
        self.bind_check(psi)?;
        self.bind_check(phi)?;
        if !self.is_local(player, psi)? {
            return Err(Error::NotLocal(player));
        }
        Ok(self.knows_at_unchecked(player, psi, phi))
    }

    fn knows_at_unchecked(&self, player: PlayerId, psi: &Event, phi: &Event) -> Event {
        let mut out = self.empty();
        // Anchor points whose ken is not inside phi spoil their whole history.
        let mut spoiled = vec![false; self.n_histories()];
        for idx in psi.indices() {
            let h = idx / self.horizon();
            if spoiled[h] {
                continue;
            }
            let ken = KenId(self.ken_of_index(player, idx));
            if !self.ken_members(player, ken).iter().all(|&m| phi.contains_index(m as usize)) {
                spoiled[h] = true;
            }
        }
        for h in psi.histories_of() {
            if !spoiled[h.0] {
                out.insert_column(h.0);
            }
        }
        out
    }

    /// Intersection of the anchored knowledge of every profile member.
    pub fn everyone_at(&self, profile: &Profile, phi: &Event) -> Result<Event> {
        self.bind_profile(profile)?;
        self.bind_check(phi)?;
        Ok(self.everyone_at_unchecked(profile, phi))
    }

    fn everyone_at_unchecked(&self, profile: &Profile, phi: &Event) -> Event {
        let mut acc = self.full();
        for (p, psi) in profile.iter() {
            acc = &acc & &self.knows_at_unchecked(p, psi, phi);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Successive layers `E^1 φ, E^2 φ, ...` of anchored mutual knowledge,
    /// stopping once their running intersection stops changing.
    pub fn everyone_at_layers(&self, profile: &Profile, phi: &Event) -> Result<Vec<Event>> {
        self.bind_profile(profile)?;
        self.bind_check(phi)?;
        let mut layers = vec![self.everyone_at_unchecked(profile, phi)];
        let mut running = layers[0].clone();
        loop {
            let next = self.everyone_at_unchecked(profile, layers.last().unwrap());
            let narrowed = &running & &next;
            layers.push(next);
            if narrowed == running {
                break;
            }
            running = narrowed;
        }
        Ok(layers)
    }

    /// Anchored common knowledge of `phi` for the profile.
    pub fn ck_at(&self, profile: &Profile, phi: &Event, algorithm: Algorithm) -> Result<Event> {
        match algorithm {
            Algorithm::Kleene => Ok(self.ck_at_kleene_trace(profile, phi)?.pop().unwrap()),
            Algorithm::Reachability => Ok(self.ck_at_report(profile, phi)?.event),
        }
    }

    /// Iterates `χ ← E(φ ∩ χ)` from the full event; returns every iterate
    /// after the start, the last one being the fixed point.
    pub fn ck_at_kleene_trace(&self, profile: &Profile, phi: &Event) -> Result<Vec<Event>> {
        self.bind_profile(profile)?;
        self.bind_check(phi)?;
        let mut trace: Vec<Event> = Vec::new();
        let mut chi = self.full();
        loop {
            let next = self.everyone_at_unchecked(profile, &(phi & &chi));
            let stable = next == chi;
            trace.push(next.clone());
            if stable {
                break;
            }
            // Every changing round removes at least one whole history.
            assert!(trace.len() <= self.n_histories() + 1, "anchored iteration exceeded its history budget");
            chi = next;
        }
        Ok(trace)
    }

    /// Evaluates anchored common knowledge through the reachability graph and
    /// reports, per excluded history, which condition failed.
    pub fn ck_at_report(&self, profile: &Profile, phi: &Event) -> Result<CkReport> {
        self.bind_profile(profile)?;
        self.bind_check(phi)?;
        let mut uf = UnionFind::<usize>::new(self.n_histories());
        self.for_each_anchor_ken(profile, |_, _, hs| {
            for h in &hs[1..] {
                uf.union(hs[0].0, h.0);
            }
        });
        let mut event = self.empty();
        let mut failures = BTreeMap::new();
        for comp in group_components(&mut uf, self.n_histories()) {
            let verdict = self.component_failure(profile, phi, &comp);
            for &h in &comp {
                let failure = if profile.occurring(h).next().is_none() {
                    Some(ReachabilityFailure::NoOccurrence)
                } else {
                    verdict.clone()
                };
                match failure {
                    None => event.insert_column(h.0),
                    Some(f) => {
                        failures.insert(h, f);
                    }
                }
            }
        }
        Ok(CkReport { event, failures })
    }

    fn component_failure(&self, profile: &Profile, phi: &Event, comp: &[HistoryId]) -> Option<ReachabilityFailure> {
        for &h in comp {
            let present: Vec<PlayerId> = profile.occurring(h).collect();
            if let Some(&first) = present.first() {
                if present.len() != profile.len() {
                    let missing = profile.players().into_iter().find(|p| !present.contains(p)).unwrap();
                    return Some(ReachabilityFailure::CoOccurrence { history: h, present: first, missing });
                }
            }
        }
        for &h in comp {
            for (p, psi) in profile.iter() {
                if let Some(t) = psi.times_in(h).find(|&t| !phi.contains(Point::new(h.0, t))) {
                    return Some(ReachabilityFailure::OutsideEvent { player: p, point: Point::new(h.0, t) });
                }
            }
        }
        None
    }

    /// Calls `f(player, ken, histories)` for every ken lying inside that
    /// player's anchor; `histories` lists each touched history once together
    /// with the first point of the ken in it.
    fn for_each_anchor_ken<F>(&self, profile: &Profile, mut f: F)
    where
        F: FnMut(PlayerId, &[u32], &[HistoryId]),
    {
        for (p, psi) in profile.iter() {
            for k in 0..self.n_kens(p) {
                let members = self.ken_members(p, KenId(k as u32));
                if !psi.contains_index(members[0] as usize) {
                    continue;
                }
                let mut hs: Vec<HistoryId> = members.iter().map(|&m| HistoryId(m as usize / self.horizon())).collect();
                hs.dedup();
                f(p, members, &hs);
            }
        }
    }

    pub fn reachability_graph(&self, profile: &Profile) -> Result<ReachabilityGraph> {
        self.bind_profile(profile)?;
        let mut edges = BTreeMap::new();
        self.for_each_anchor_ken(profile, |p, members, _| {
            let mut firsts: Vec<Point> = Vec::new();
            for &m in members {
                let pt = self.point(m as usize);
                match firsts.last() {
                    Some(last) if last.history == pt.history => {
                        // Second point in the same history: a proper self-loop.
                        edges.insert((pt.history, pt.history), EdgeWitness { player: p, from: *last, to: pt });
                    }
                    _ => firsts.push(pt),
                }
            }
            for (a, &x) in firsts.iter().enumerate() {
                edges.entry((x.history, x.history)).or_insert(EdgeWitness { player: p, from: x, to: x });
                for &y in &firsts[a + 1..] {
                    edges.entry((x.history, y.history)).or_insert(EdgeWitness { player: p, from: x, to: y });
                }
            }
        });
        Ok(ReachabilityGraph { n_histories: self.n_histories(), edges })
    }

    /// `ψ_i ∩ C(φ)`: the slice of anchored common knowledge player `i` inhabits.
    pub fn individualized(&self, player: PlayerId, profile: &Profile, phi: &Event) -> Result<Event> {
        let psi = profile.event(player)?;
        let ck = self.ck_at(profile, phi, Algorithm::Reachability)?;
        let out = psi & &ck;
        assert!(self.is_local(player, &out)?, "individualized event is not local");
        assert_eq!(out.histories_of(), ck.histories_of());
        assert!(out.subset_of(phi), "individualized event escapes its target");
        Ok(out)
    }

    pub fn check_induction_rule(
        &self,
        profile: &Profile,
        phi: &Event,
        witness: Option<&Event>,
    ) -> Result<InductionReport> {
        let ck = self.ck_at(profile, phi, Algorithm::Reachability)?;
        let premise_holds = phi.subset_of(&self.everyone_at(profile, phi)?);
        let conclusion_holds = phi.subset_of(&ck);
        let (witness_premise_holds, witness_conclusion_holds) = match witness {
            Some(xi) => {
                self.bind_check(xi)?;
                let e = self.everyone_at(profile, &(phi & xi))?;
                (Some(xi.subset_of(&e)), Some(xi.subset_of(&ck)))
            }
            None => (None, None),
        };
        Ok(InductionReport { premise_holds, conclusion_holds, witness_premise_holds, witness_conclusion_holds })
    }

    /// Evaluates both sides of the co-occurrence characterization. Requires
    /// `⟐ψ_anchor ⊆ φ` for the chosen profile member.
    pub fn check_cooccurrence(&self, profile: &Profile, phi: &Event, anchor: PlayerId) -> Result<CooccurrenceReport> {
        self.bind_check(phi)?;
        let psi = profile.event(anchor)?;
        if !psi.diamond().subset_of(phi) {
            return Err(Error::Hypothesis(format!(
                "histories of the anchor of player {} are not inside the target",
                anchor.0
            )));
        }
        let ck = self.ck_at(profile, phi, Algorithm::Reachability)?;
        let anchors_in_ck = profile.iter().all(|(_, e)| e.subset_of(&ck));
        let all: Vec<HistoryId> = self.histories().collect();
        Ok(CooccurrenceReport { anchors_in_ck, co_occurs_everywhere: profile.co_occurs(&all) })
    }
}
