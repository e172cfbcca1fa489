//! Exact probabilities over histories, posteriors at singular kens, and the
//! agreement check for posteriors that are anchored common knowledge.

use num_traits::Zero;
use serde::Serialize;

use crate::bdtf::{self, BdtfSpec, SignalRule};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, KenId, PlayerId, Point};
use crate::rational::{self, format_rational, Rational};
use crate::relaxed::{Algorithm, Profile};

/// A frame with a strictly positive probability per history.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbFrame {
    frame: Frame,
    weights: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct PosteriorEvent {
    pub event: Event,
    /// Points left out because their ken is not singular.
    pub excluded: Event,
}

#[derive(Clone, Debug)]
pub struct AgreementReport {
    pub ck_event: Event,
    pub ck_nonempty: bool,
    pub posteriors_equal: bool,
}

impl AgreementReport {
    /// Common knowledge of the two posteriors forces them to coincide.
    pub fn consistent(&self) -> bool {
        !self.ck_nonempty || self.posteriors_equal
    }
}

impl ProbFrame {
    pub fn new(frame: Frame, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != frame.n_histories() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} histories",
                weights.len(),
                frame.n_histories()
            )));
        }
        rational::check_distribution(&weights)?;
        Ok(ProbFrame { frame, weights })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn prob<I: IntoIterator<Item = HistoryId>>(&self, hs: I) -> Rational {
        hs.into_iter().map(|h| &self.weights[h.0]).sum()
    }

    fn ken_histories(&self, player: PlayerId, ken: KenId) -> Option<Vec<HistoryId>> {
        let mut hs: Vec<HistoryId> = self.frame.ken_points(player, ken).map(|p| p.history).collect();
        let n = hs.len();
        hs.dedup();
        (hs.len() == n).then_some(hs)
    }

    /// `Pr(Ω(φ) | Ω(κ))` for the ken `κ` of `player` at `at`.
    pub fn posterior(&self, player: PlayerId, phi: &Event, at: Point) -> Result<Rational> {
        self.frame.check_player(player)?;
        self.frame.bind_check(phi)?;
        self.frame.check_point(at)?;
        if !phi.is_time_invariant() {
            return Err(Error::NotTimeInvariant);
        }
        let hs = self.ken_histories(player, self.frame.ken_of(player, at)).ok_or(Error::NonSingularKen)?;
        Ok(self.conditional(phi, &hs))
    }

    fn conditional(&self, phi: &Event, hs: &[HistoryId]) -> Rational {
        let total = self.prob(hs.iter().copied());
        let hit = self.prob(hs.iter().copied().filter(|&h| phi.occurs_in(h)));
        hit / total
    }

    /// `[Pr_i(φ) = q]`, restricted to points with singular kens.
    pub fn posterior_event(&self, player: PlayerId, phi: &Event, q: &Rational) -> Result<PosteriorEvent> {
        self.frame.check_player(player)?;
        self.frame.bind_check(phi)?;
        if !phi.is_time_invariant() {
            return Err(Error::NotTimeInvariant);
        }
        let mut event = self.frame.empty();
        let mut excluded = self.frame.empty();
        for k in 0..self.frame.n_kens(player) {
            let ken = KenId(k as u32);
            let target = match self.ken_histories(player, ken) {
                Some(hs) => {
                    if &self.conditional(phi, &hs) != q {
                        continue;
                    }
                    &mut event
                }
                None => &mut excluded,
            };
            for p in self.frame.ken_points(player, ken) {
                target.insert_index(self.frame.index(p));
            }
        }
        debug_assert!(self.frame.is_local(player, &event)?);
        Ok(PosteriorEvent { event, excluded })
    }

    /// Anchored common knowledge of "player `i` holds posterior `q_i` at
    /// `ψ_i`" for a two-player profile of singular anchors.
    pub fn verify_agreement(
        &self,
        profile: &Profile,
        phi: &Event,
        q: [&Rational; 2],
        algorithm: Algorithm,
    ) -> Result<AgreementReport> {
        let players = profile.players();
        if players.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "agreement needs exactly two players, profile has {}",
                players.len()
            )));
        }
        let mut fact = self.frame.full();
        for (k, &p) in players.iter().enumerate() {
            let psi = profile.event(p)?;
            if !psi.is_singular() {
                return Err(Error::NotSingular);
            }
            let post = self.posterior_event(p, phi, q[k])?;
            fact = &fact & &(psi & &post.event).diamond();
        }
        let ck_event = self.frame.ck_at(profile, &fact, algorithm)?;
        Ok(AgreementReport { ck_nonempty: !ck_event.is_empty(), posteriors_equal: q[0] == q[1], ck_event })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DialogueRow {
    pub history: String,
    pub t_hat: [usize; 2],
    #[serde(with = "rational::fractions")]
    pub posteriors: Vec<Rational>,
    pub ck_nonempty: bool,
    pub posteriors_equal: bool,
    /// Points after time zero at which the posterior pair is traditional
    /// common knowledge.
    pub traditional_ck_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DialogueReport {
    pub rows: Vec<DialogueRow>,
    /// Posteriors each player announces over time in every history.
    pub transcript: Vec<Vec<[Option<String>; 2]>>,
}

impl DialogueReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.ck_nonempty && r.posteriors_equal && r.traditional_ck_points == 0)
    }
}

/// Builds the frame of a posterior-announcing exchange, finds the
/// stabilization anchors of every history and checks that the posteriors
/// there are equal and anchored common knowledge.
pub fn posterior_dialogue(spec: &BdtfSpec, cap: u128, margin: usize, algorithm: Algorithm) -> Result<DialogueReport> {
    let target = match &spec.signals {
        [SignalRule::Posterior { target: a }, SignalRule::Posterior { target: b }] if a == b => a.clone(),
        _ => return Err(Error::InvalidSpec("both players must announce posteriors of the same target".into())),
    };
    if !spec.timestamps {
        return Err(Error::InvalidSpec("posterior exchange requires timestamps".into()));
    }
    let bf = bdtf::build_bdtf_frame(spec, cap)?;
    let pf = ProbFrame::new(bf.frame.clone(), bf.weights.clone())?;
    let phi = bf.histories_where(|w| target.contains(&spec.initial_conditions[w.o]));
    let mut rows = Vec::new();
    for h in bf.frame.histories() {
        let g = bdtf::getck_times(&bf, h, margin, algorithm)?;
        let q: Vec<Rational> = [bdtf::ALPHA, bdtf::BETA]
            .iter()
            .map(|&p| {
                let t = bf.history(h).birth[p.0] + g.t_hat[p.0];
                pf.posterior(p, &phi, Point::new(h.0, t))
            })
            .collect::<Result<_>>()?;
        let report = pf.verify_agreement(&g.profile, &phi, [&q[0], &q[1]], algorithm)?;
        let mut fact = pf.frame().full();
        for (k, p) in [bdtf::ALPHA, bdtf::BETA].into_iter().enumerate() {
            fact = &fact & &pf.posterior_event(p, &phi, &q[k])?.event;
        }
        let traditional = pf.frame().ck_traditional(&[bdtf::ALPHA, bdtf::BETA], &fact)?;
        rows.push(DialogueRow {
            history: bf.frame.history_label(h).to_string(),
            t_hat: g.t_hat,
            posteriors: q,
            ck_nonempty: report.ck_event.contains(Point::new(h.0, 0)),
            posteriors_equal: report.posteriors_equal,
            traditional_ck_points: traditional.points().filter(|p| p.time > 0).count(),
        });
    }
    let transcript = bf
        .frame
        .histories()
        .map(|h| {
            (0..bf.frame.horizon())
                .map(|t| {
                    [bdtf::ALPHA, bdtf::BETA].map(|p| {
                        bf.sent_at_point(p, Point::new(h.0, t)).and_then(|s| match &s.payload {
                            bdtf::Payload::Posterior(r) => Some(format_rational(r)),
                            _ => None,
                        })
                    })
                })
                .collect()
        })
        .collect();
    Ok(DialogueReport { rows, transcript })
}

/// Four equally likely states, target `{1, 4}`, `α` told which half the
/// state lies in and `β` whether it is state 4, exchanged with round trip 3.
pub fn four_state_dialogue_spec(horizon: usize) -> BdtfSpec {
    let target = vec!["1".to_string(), "4".to_string()];
    BdtfSpec {
        initial_conditions: ["1", "2", "3", "4"].map(String::from).to_vec(),
        initial_partitions: [vec![0, 0, 1, 1], vec![0, 0, 0, 1]],
        timing: bdtf::TimingMode::SingleDimensional { round_trip: 3 },
        horizon,
        signals: [SignalRule::Posterior { target: target.clone() }, SignalRule::Posterior { target }],
        timestamps: true,
        prior: None,
        margin: None,
    }
}

/// Sum over the singular kens inside `class` of `Pr(κ) · posterior`.
pub fn total_probability(pf: &ProbFrame, player: PlayerId, phi: &Event, class: &[HistoryId]) -> Option<Rational> {
    let f = pf.frame();
    let mut acc = Rational::zero();
    let mut seen = std::collections::HashSet::new();
    for &h in class {
        let ken = f.ken_of(player, Point::new(h.0, 0));
        if !seen.insert(ken) {
            continue;
        }
        let hs = pf.ken_histories(player, ken)?;
        acc += pf.prob(hs.iter().copied()) * pf.conditional(phi, &hs);
    }
    Some(acc)
}
