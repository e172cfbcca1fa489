//! JSON scenario files: a model (frame, exchange spec, probability frame or
//! attack game), named events built from an expression tree, and queries
//! with optional expected results.
//!
//! Exact rationals are `"p/q"` strings. Events are written as a map from
//! history label to the sorted times at which the event holds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::agreement::{self, ProbFrame};
use crate::attack::{self, AttackGameSpec, AttackStrategyPair, GameFrame};
use crate::bdtf::{self, BdtfFrame, BdtfSpec};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, PlayerId, Point};
use crate::frontier;
use crate::rational::{self, format_rational, Rational};
use crate::relaxed::{Algorithm, Profile};

/// A frame as plain data: `kens[player][history][time]` is a ken label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub histories: Vec<String>,
    pub players: Vec<String>,
    pub horizon: usize,
    pub kens: Vec<Vec<Vec<u32>>>,
}

impl FrameDoc {
    pub fn from_frame(f: &Frame) -> Self {
        FrameDoc {
            histories: f.history_labels().to_vec(),
            players: f.player_labels().to_vec(),
            horizon: f.horizon(),
            kens: f
                .players()
                .map(|p| {
                    f.histories()
                        .map(|h| (0..f.horizon()).map(|t| f.ken_of(p, Point::new(h.0, t)).0).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Frame> {
        let mut labels = Vec::with_capacity(self.kens.len());
        for (p, rows) in self.kens.iter().enumerate() {
            if rows.len() != self.histories.len() || rows.iter().any(|r| r.len() != self.horizon) {
                return Err(Error::InvalidFrame(format!(
                    "kens of player {p} must list {} histories of {} times",
                    self.histories.len(),
                    self.horizon
                )));
            }
            labels.push(rows.concat());
        }
        Frame::new(self.histories.clone(), self.players.clone(), self.horizon, labels)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbFrameDoc {
    pub frame: FrameDoc,
    #[serde(with = "rational::fractions")]
    pub weights: Vec<Rational>,
}

impl ProbFrameDoc {
    pub fn from_prob_frame(pf: &ProbFrame) -> Self {
        ProbFrameDoc { frame: FrameDoc::from_frame(pf.frame()), weights: pf.weights().to_vec() }
    }

    pub fn build(&self) -> Result<ProbFrame> {
        ProbFrame::new(self.frame.build()?, self.weights.clone())
    }
}

/// Either a named built-in fixture or an inline document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Fixture { fixture: String },
    Inline(T),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Frame { frame: Source<FrameDoc> },
    Bdtf { spec: Source<BdtfSpec> },
    Dialogue { spec: Source<BdtfSpec> },
    Agreement { prob_frame: Source<ProbFrameDoc> },
    AttackGame { game: Source<AttackGameSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventExpr {
    All,
    Empty,
    Ref(String),
    Points(BTreeMap<String, Vec<usize>>),
    Histories(Vec<String>),
    /// Every point whose time lies in `from..=to`.
    Times {
        from: usize,
        to: Option<usize>,
    },
    Ken {
        player: String,
        history: String,
        time: usize,
    },
    Complement(Box<EventExpr>),
    Union(Vec<EventExpr>),
    Intersect(Vec<EventExpr>),
    Difference(Box<EventExpr>, Box<EventExpr>),
    Implies(Box<EventExpr>, Box<EventExpr>),
    Diamond(Box<EventExpr>),
    Boxed(Box<EventExpr>),
    FirstPoints(Box<EventExpr>),
    Knows {
        player: String,
        event: Box<EventExpr>,
    },
    EveryoneKnows {
        players: Vec<String>,
        event: Box<EventExpr>,
    },
    Ck {
        players: Vec<String>,
        event: Box<EventExpr>,
    },
    KnowsAt {
        player: String,
        anchor: Box<EventExpr>,
        event: Box<EventExpr>,
    },
    CkAt {
        profile: BTreeMap<String, EventExpr>,
        event: Box<EventExpr>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryDoc {
    pub op: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub args: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub model: Model,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub events: BTreeMap<String, EventExpr>,
    #[serde(default)]
    pub queries: Vec<QueryDoc>,
}

type ProfileDoc = BTreeMap<String, EventExpr>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyDoc {
    /// `"sck"` or `"never"`.
    Named(String),
    /// Per player, an event whose kens are the initiate kens.
    Kens(BTreeMap<String, EventExpr>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    /// Labels, horizon and ken counts of the underlying frame.
    Describe,
    Event {
        event: EventExpr,
    },
    Knows {
        player: String,
        event: EventExpr,
    },
    IsLocal {
        player: String,
        event: EventExpr,
    },
    EveryoneKnows {
        players: Vec<String>,
        event: EventExpr,
    },
    CkTraditional {
        players: Vec<String>,
        event: EventExpr,
    },
    CkAt {
        profile: ProfileDoc,
        event: EventExpr,
    },
    Individualized {
        player: String,
        profile: ProfileDoc,
        event: EventExpr,
    },
    Reachability {
        profile: ProfileDoc,
        event: EventExpr,
    },
    Induction {
        profile: ProfileDoc,
        event: EventExpr,
        witness: Option<EventExpr>,
    },
    Cooccurrence {
        profile: ProfileDoc,
        event: EventExpr,
        anchor: String,
    },
    #[serde(rename = "roundtrip")]
    RoundTrip {
        history: String,
    },
    #[serde(rename = "getck")]
    GetCk {
        history: String,
        margin: Option<usize>,
    },
    NoNewCk {
        history: String,
        event: EventExpr,
    },
    Dialogue {
        margin: Option<usize>,
    },
    Posterior {
        player: String,
        event: EventExpr,
        history: String,
        time: usize,
    },
    PosteriorEvent {
        player: String,
        event: EventExpr,
        q: String,
    },
    Agreement {
        profile: ProfileDoc,
        event: EventExpr,
        q: BTreeMap<String, String>,
    },
    Sck,
    Welfare {
        strategy: StrategyDoc,
    },
    NeverUnsuccessful {
        strategy: StrategyDoc,
    },
    Play {
        strategy: StrategyDoc,
        history: String,
    },
    Frontier {
        cap: Option<u64>,
    },
}

impl Op {
    fn parse(q: &QueryDoc) -> std::result::Result<Op, String> {
        let mut obj = serde_json::Map::new();
        obj.insert("op".into(), Value::String(q.op.clone()));
        if !q.args.is_null() {
            obj.insert("args".into(), q.args.clone());
        }
        let first = serde_json::from_value(Value::Object(obj.clone()));
        match first {
            Err(_) if q.args.is_null() => {
                // Struct ops whose arguments are all optional may omit `args`.
                obj.insert("args".into(), json!({}));
                serde_json::from_value(Value::Object(obj))
            }
            other => other,
        }
        .map_err(|e| format!("query `{}`: {e}", q.op))
    }

    fn allowed_in(&self, kind: &str) -> bool {
        use Op::*;
        match self {
            RoundTrip { .. } | GetCk { .. } | NoNewCk { .. } => kind == "bdtf",
            Dialogue { .. } => kind == "dialogue",
            Posterior { .. } | PosteriorEvent { .. } | Agreement { .. } => kind == "agreement",
            Sck | Welfare { .. } | NeverUnsuccessful { .. } | Play { .. } | Frontier { .. } => kind == "attack_game",
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Kleene,
    Reachability,
    #[default]
    Both,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub algorithm: AlgorithmChoice,
    pub cap: u128,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { algorithm: AlgorithmChoice::Both, cap: 1 << 20 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("execution error: {0}")]
    Execution(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse(_) | ScenarioError::Schema(_) => 2,
            ScenarioError::Execution(_) => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryResult {
    pub op: String,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Value>,
    /// `None` when nothing was expected.
    pub matched: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub algorithm: AlgorithmChoice,
    pub queries: Vec<QueryResult>,
    pub matched: usize,
    pub mismatched: usize,
}

impl Report {
    pub fn all_matched(&self) -> bool {
        self.mismatched == 0
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} scenario, {} queries: {} matched, {} mismatched, {} unchecked\n",
            self.kind,
            self.queries.len(),
            self.matched,
            self.mismatched,
            self.queries.len() - self.matched - self.mismatched
        );
        for (k, q) in self.queries.iter().enumerate() {
            let status = match q.matched {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "-",
            };
            s.push_str(&format!("  [{k}] {:<18} {status}\n", q.op));
        }
        s
    }
}

pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, ScenarioError> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            ScenarioError::Parse(e.to_string())
        } else {
            ScenarioError::Schema(e.to_string())
        }
    })
}

pub fn frame_fixture(name: &str) -> Result<Frame> {
    Ok(match name {
        "shifted_pair" => bdtf::build_bdtf_frame(&bdtf_fixture(name)?, 1 << 20)?.frame,
        _ => return Err(Error::InvalidSpec(format!("unknown frame fixture `{name}`"))),
    })
}

pub fn bdtf_fixture(name: &str) -> Result<BdtfSpec> {
    Ok(match name {
        "shifted_pair" => bdtf::shifted_pair_spec(false, 6),
        "shifted_pair_timestamped" => bdtf::shifted_pair_spec(true, 14),
        "four_state" => agreement::four_state_dialogue_spec(20),
        _ => return Err(Error::InvalidSpec(format!("unknown exchange fixture `{name}`"))),
    })
}

pub fn prob_frame_fixture(name: &str) -> Result<ProbFrame> {
    let spec = bdtf_fixture(name)?;
    let bf = bdtf::build_bdtf_frame(&spec, 1 << 20)?;
    ProbFrame::new(bf.frame, bf.weights)
}

pub fn game_fixture(name: &str) -> Result<AttackGameSpec> {
    Ok(match name {
        "example1" => attack::game_example1(),
        "example2" => attack::game_example2(),
        "example3" => attack::game_example3(),
        "tiny" => attack::game_tiny(),
        _ => return Err(Error::InvalidSpec(format!("unknown game fixture `{name}`"))),
    })
}

fn resolve<T: Clone>(s: &Source<T>, fixture: impl Fn(&str) -> Result<T>) -> Result<T> {
    match s {
        Source::Fixture { fixture: name } => fixture(name),
        Source::Inline(t) => Ok(t.clone()),
    }
}

enum Engine {
    Frame(Frame),
    Bdtf(Box<BdtfFrame>),
    Dialogue(BdtfSpec, Frame),
    Agreement(ProbFrame),
    Game(Box<GameFrame>),
}

impl Engine {
    fn frame(&self) -> &Frame {
        match self {
            Engine::Frame(f) | Engine::Dialogue(_, f) => f,
            Engine::Bdtf(b) => &b.frame,
            Engine::Agreement(p) => p.frame(),
            Engine::Game(g) => &g.frame,
        }
    }
}

struct Ctx<'a> {
    engine: &'a Engine,
    exprs: &'a BTreeMap<String, EventExpr>,
    builtin: BTreeMap<String, Event>,
    resolving: BTreeSet<String>,
    opts: &'a RunOptions,
}

fn exec<E: std::fmt::Display>(e: E) -> ScenarioError {
    ScenarioError::Execution(e.to_string())
}

impl<'a> Ctx<'a> {
    fn frame(&self) -> &Frame {
        self.engine.frame()
    }

    fn player(&self, label: &str) -> Result<PlayerId> {
        self.frame().player_by_label(label).ok_or_else(|| Error::InvalidSpec(format!("unknown player `{label}`")))
    }

    fn players(&self, labels: &[String]) -> Result<Vec<PlayerId>> {
        labels.iter().map(|l| self.player(l)).collect()
    }

    fn history(&self, label: &str) -> Result<HistoryId> {
        self.frame().history_by_label(label).ok_or_else(|| Error::InvalidSpec(format!("unknown history `{label}`")))
    }

    fn ck_at(&self, profile: &Profile, phi: &Event) -> Result<Event> {
        let f = self.frame();
        match self.opts.algorithm {
            AlgorithmChoice::Kleene => f.ck_at(profile, phi, Algorithm::Kleene),
            AlgorithmChoice::Reachability => f.ck_at(profile, phi, Algorithm::Reachability),
            AlgorithmChoice::Both => {
                let a = f.ck_at(profile, phi, Algorithm::Kleene)?;
                let b = f.ck_at(profile, phi, Algorithm::Reachability)?;
                if a != b {
                    return Err(Error::CrossValidation("fixed-point iteration and reachability disagree".into()));
                }
                Ok(a)
            }
        }
    }

    fn algorithm(&self) -> Algorithm {
        match self.opts.algorithm {
            AlgorithmChoice::Kleene => Algorithm::Kleene,
            _ => Algorithm::Reachability,
        }
    }

    fn profile(&mut self, doc: &ProfileDoc) -> Result<Profile> {
        let mut entries = Vec::new();
        for (label, e) in doc {
            let p = self.player(label)?;
            entries.push((p, self.eval(e)?));
        }
        Profile::new(self.frame(), entries)
    }

    fn eval(&mut self, e: &EventExpr) -> Result<Event> {
        use EventExpr as X;
        let f: &'a Frame = self.engine.frame();
        Ok(match e {
            X::All => f.full(),
            X::Empty => f.empty(),
            X::Ref(name) => {
                if let Some(ev) = self.builtin.get(name) {
                    return Ok(ev.clone());
                }
                let expr =
                    self.exprs.get(name).ok_or_else(|| Error::InvalidSpec(format!("no event named `{name}`")))?;
                if !self.resolving.insert(name.clone()) {
                    return Err(Error::InvalidSpec(format!("event `{name}` refers to itself")));
                }
                let out = self.eval(expr);
                self.resolving.remove(name);
                out?
            }
            X::Points(map) => {
                let mut pts = Vec::new();
                for (label, times) in map {
                    let h = self.history(label)?;
                    pts.extend(times.iter().map(|&t| Point { history: h, time: t }));
                }
                f.event_from_points(pts)?
            }
            X::Histories(labels) => {
                let hs = labels.iter().map(|l| self.history(l)).collect::<Result<Vec<_>>>()?;
                f.histories_event(hs)
            }
            X::Times { from, to } => {
                let to = to.unwrap_or(usize::MAX);
                f.event_from_fn(|p| p.time >= *from && p.time <= to)
            }
            X::Ken { player, history, time } => {
                let p = self.player(player)?;
                let pt = Point { history: self.history(history)?, time: *time };
                f.check_point(pt)?;
                f.ken_event_at(p, pt)
            }
            X::Complement(a) => self.eval(a)?.complement(),
            X::Union(xs) => xs.iter().try_fold(f.empty(), |acc, x| acc.union(&self.eval(x)?))?,
            X::Intersect(xs) => xs.iter().try_fold(f.full(), |acc, x| acc.intersect(&self.eval(x)?))?,
            X::Difference(a, b) => self.eval(a)?.difference(&self.eval(b)?)?,
            X::Implies(a, b) => self.eval(a)?.implies(&self.eval(b)?)?,
            X::Diamond(a) => self.eval(a)?.diamond(),
            X::Boxed(a) => self.eval(a)?.boxed(),
            X::FirstPoints(a) => self.eval(a)?.first_points(),
            X::Knows { player, event } => {
                let p = self.player(player)?;
                f.knows(p, &self.eval(event)?)?
            }
            X::EveryoneKnows { players, event } => {
                let ps = self.players(players)?;
                f.everyone_knows(&ps, &self.eval(event)?)?
            }
            X::Ck { players, event } => {
                let ps = self.players(players)?;
                f.ck_traditional(&ps, &self.eval(event)?)?
            }
            X::KnowsAt { player, anchor, event } => {
                let p = self.player(player)?;
                f.knows_at(p, &self.eval(anchor)?, &self.eval(event)?)?
            }
            X::CkAt { profile, event } => {
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                self.ck_at(&prof, &phi)?
            }
        })
    }

    fn strategy(&mut self, doc: &StrategyDoc) -> Result<AttackStrategyPair> {
        let Engine::Game(g) = self.engine else {
            return Err(Error::InvalidSpec("strategies need an attack game".into()));
        };
        match doc {
            StrategyDoc::Named(n) if n == "sck" => Ok(attack::compute_sck(g)?.strategies),
            StrategyDoc::Named(n) if n == "never" => Ok(AttackStrategyPair::never()),
            StrategyDoc::Named(n) => Err(Error::InvalidSpec(format!("unknown strategy `{n}`"))),
            StrategyDoc::Kens(map) => {
                let mut s = AttackStrategyPair::never();
                for (label, e) in map {
                    let p = self.player(label)?;
                    let ev = self.eval(e)?;
                    s.initiate[p.0] = ev.points().map(|pt| g.frame.ken_of(p, pt)).collect();
                }
                Ok(s)
            }
        }
    }

    fn run(&mut self, op: &Op) -> Result<Value> {
        let f: &'a Frame = self.engine.frame();
        let ev = |e: &Event| event_json(f, e);
        Ok(match op {
            Op::Describe => json!({
                "histories": f.history_labels(),
                "players": f.player_labels(),
                "horizon": f.horizon(),
                "kens": player_map(f, f.players().map(|p| f.n_kens(p)).collect()),
            }),
            Op::Event { event } => ev(&self.eval(event)?),
            Op::Knows { player, event } => {
                let p = self.player(player)?;
                ev(&f.knows(p, &self.eval(event)?)?)
            }
            Op::IsLocal { player, event } => {
                let p = self.player(player)?;
                json!({ "value": f.is_local(p, &self.eval(event)?)? })
            }
            Op::EveryoneKnows { players, event } => {
                let ps = self.players(players)?;
                ev(&f.everyone_knows(&ps, &self.eval(event)?)?)
            }
            Op::CkTraditional { players, event } => {
                let ps = self.players(players)?;
                let layers = f.ck_traditional_layers(&ps, &self.eval(event)?)?;
                let mut v = ev(&layers.fixed_point);
                v["layers"] = json!(layers.layers.len());
                v
            }
            Op::CkAt { profile, event } => {
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                ev(&self.ck_at(&prof, &phi)?)
            }
            Op::Individualized { player, profile, event } => {
                let p = self.player(player)?;
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                let ck = self.ck_at(&prof, &phi)?;
                ev(&(prof.event(p)? & &ck))
            }
            Op::Reachability { profile, event } => {
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                let report = f.ck_at_report(&prof, &phi)?;
                let graph = f.reachability_graph(&prof)?;
                let label = |h: &HistoryId| f.history_label(*h).to_string();
                json!({
                    "event": ev(&report.event),
                    "components": graph.components().iter()
                        .map(|c| c.iter().map(label).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "failures": report.failures.iter()
                        .map(|(h, fail)| (label(h), serde_json::to_value(fail).unwrap()))
                        .collect::<BTreeMap<_, _>>(),
                })
            }
            Op::Induction { profile, event, witness } => {
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                let w = witness.as_ref().map(|w| self.eval(w)).transpose()?;
                serde_json::to_value(f.check_induction_rule(&prof, &phi, w.as_ref())?).unwrap()
            }
            Op::Cooccurrence { profile, event, anchor } => {
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                let a = self.player(anchor)?;
                serde_json::to_value(f.check_cooccurrence(&prof, &phi, a)?).unwrap()
            }
            Op::RoundTrip { history } => {
                let Engine::Bdtf(bf) = self.engine else { unreachable!() };
                let h = self.history(history)?;
                roundtrip_json(f, &bdtf::roundtrip_ck_facts(bf, h, self.algorithm())?)
            }
            Op::GetCk { history, margin } => {
                let Engine::Bdtf(bf) = self.engine else { unreachable!() };
                let h = self.history(history)?;
                let margin = margin.or(bf.spec.margin).unwrap_or(2);
                let g = bdtf::getck_times(bf, h, margin, self.algorithm())?;
                json!({
                    "roundtrip": roundtrip_json(f, &g.roundtrip),
                    "max_offset": g.max_offset,
                    "stable_offset": g.stable_offset,
                    "t_hat": player_map(f, g.t_hat.to_vec()),
                    "window": player_map(f, g.window.to_vec()),
                    "signal_event": ev(&g.signal_event),
                    "verified": g.verified,
                })
            }
            Op::NoNewCk { history, event } => {
                let Engine::Bdtf(bf) = self.engine else { unreachable!() };
                let h = self.history(history)?;
                let phi = self.eval(event)?;
                let r = bdtf::verify_no_new_ck(bf, h, &phi)?;
                json!({ "ck_times": r.ck_times, "first_violation": r.first_violation })
            }
            Op::Dialogue { margin } => {
                let Engine::Dialogue(spec, _) = self.engine else { unreachable!() };
                let margin = margin.or(spec.margin).unwrap_or(2);
                let r = agreement::posterior_dialogue(spec, self.opts.cap, margin, self.algorithm())?;
                let mut v = serde_json::to_value(&r).unwrap();
                v["all_agree"] = json!(r.all_agree());
                v
            }
            Op::Posterior { player, event, history, time } => {
                let Engine::Agreement(pf) = self.engine else { unreachable!() };
                let p = self.player(player)?;
                let pt = Point { history: self.history(history)?, time: *time };
                let q = pf.posterior(p, &self.eval(event)?, pt)?;
                json!({ "value": format_rational(&q) })
            }
            Op::PosteriorEvent { player, event, q } => {
                let Engine::Agreement(pf) = self.engine else { unreachable!() };
                let p = self.player(player)?;
                let q = rational::parse_rational(q)?;
                let r = pf.posterior_event(p, &self.eval(event)?, &q)?;
                json!({ "event": ev(&r.event), "excluded": ev(&r.excluded) })
            }
            Op::Agreement { profile, event, q } => {
                let Engine::Agreement(pf) = self.engine else { unreachable!() };
                let prof = self.profile(profile)?;
                let phi = self.eval(event)?;
                let mut qs = Vec::new();
                for p in prof.players() {
                    let text = q
                        .get(f.player_label(p))
                        .ok_or_else(|| Error::InvalidSpec(format!("no posterior given for `{}`", f.player_label(p))))?;
                    qs.push(rational::parse_rational(text)?);
                }
                if qs.len() != 2 {
                    return Err(Error::InvalidSpec("agreement needs a two-player profile".into()));
                }
                let r = pf.verify_agreement(&prof, &phi, [&qs[0], &qs[1]], self.algorithm())?;
                json!({
                    "ck_event": ev(&r.ck_event),
                    "ck_nonempty": r.ck_nonempty,
                    "posteriors_equal": r.posteriors_equal,
                    "consistent": r.consistent(),
                })
            }
            Op::Sck => {
                let Engine::Game(g) = self.engine else { unreachable!() };
                let sck = attack::compute_sck(g)?;
                let welfare = attack::expected_welfare(g, &sck.strategies)?;
                json!({
                    "anchors": player_map(f, sck.anchors.iter().map(ev).collect()),
                    "ck": ev(&sck.ck),
                    "elimination_rounds": sck.elimination_rounds,
                    "attacks": game_table(g, &sck.strategies)?,
                    "expected_welfare": welfare.expected,
                    "never_unsuccessful": attack::verify_never_unsuccessful(g, &sck.strategies)?,
                })
            }
            Op::Welfare { strategy } => {
                let Engine::Game(g) = self.engine else { unreachable!() };
                let s = self.strategy(strategy)?;
                let w = attack::expected_welfare(g, &s)?;
                json!({
                    "expected": w.expected,
                    "per_state": f.histories()
                        .map(|h| (f.history_label(h).to_string(), w.per_state[h.0].to_string()))
                        .collect::<BTreeMap<_, _>>(),
                })
            }
            Op::NeverUnsuccessful { strategy } => {
                let Engine::Game(g) = self.engine else { unreachable!() };
                let s = self.strategy(strategy)?;
                json!({ "value": attack::verify_never_unsuccessful(g, &s)? })
            }
            Op::Play { strategy, history } => {
                let Engine::Game(g) = self.engine else { unreachable!() };
                let s = self.strategy(strategy)?;
                let h = self.history(history)?;
                serde_json::to_value(attack::play(g, &s, h)?).unwrap()
            }
            Op::Frontier { cap } => {
                let Engine::Game(g) = self.engine else { unreachable!() };
                let cap = cap.map_or(self.opts.cap, u128::from);
                let r = frontier::brute_force_frontier(g, cap)?;
                let mut v = serde_json::to_value(&r).unwrap();
                v["profiles"] = json!(r.profiles.to_string());
                v["ck_iff_positive_equilibrium"] = json!(r.ck_iff_positive_equilibrium());
                v["all_hold"] = json!(r.all_hold());
                v
            }
        })
    }
}

/// Sorted times per history label, omitting histories the event misses.
pub fn event_json(f: &Frame, e: &Event) -> Value {
    let points: BTreeMap<String, Vec<usize>> = f
        .histories()
        .filter(|&h| e.occurs_in(h))
        .map(|h| (f.history_label(h).to_string(), e.times_in(h).collect()))
        .collect();
    json!({ "points": points, "size": e.len(), "empty": e.is_empty(), "full": e.is_full() })
}

fn player_map<T: Serialize>(f: &Frame, values: Vec<T>) -> Value {
    let m: serde_json::Map<String, Value> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| (f.player_label(PlayerId(i)).to_string(), serde_json::to_value(v).unwrap()))
        .collect();
    Value::Object(m)
}

pub fn roundtrip_json(f: &Frame, r: &bdtf::RoundtripReport) -> Value {
    json!({
        "initiator": f.player_label(r.initiator),
        "t1": r.t1,
        "t2": r.t2,
        "t3": r.t3,
        "z_bound": r.z_bound,
        "premise_holds": r.premise_holds,
        "ck_phi": r.ck_phi,
        "ck_sigma_d": r.ck_sigma_d,
        "ck_sigma_z": r.ck_sigma_z,
        "all_hold": r.all_hold(),
    })
}

fn game_table(g: &GameFrame, s: &AttackStrategyPair) -> Result<Value> {
    let f = &g.frame;
    let mut rows = BTreeMap::new();
    for h in f.histories() {
        rows.insert(f.history_label(h).to_string(), serde_json::to_value(attack::play(g, s, h)?).unwrap());
    }
    Ok(json!(rows))
}

/// Whether every key of `expected` appears in `actual` with a matching
/// value; arrays and scalars must be equal.
pub fn partial_match(expected: &Value, actual: &Value) -> bool {
    match (expected, actual) {
        (Value::Object(e), Value::Object(a)) => e.iter().all(|(k, v)| a.get(k).is_some_and(|av| partial_match(v, av))),
        (Value::Array(e), Value::Array(a)) => e.len() == a.len() && e.iter().zip(a).all(|(x, y)| partial_match(x, y)),
        _ => expected == actual,
    }
}

fn build_engine(model: &Model, cap: u128) -> Result<Engine> {
    Ok(match model {
        Model::Frame { frame } => Engine::Frame(match frame {
            Source::Fixture { fixture } => frame_fixture(fixture)?,
            Source::Inline(doc) => doc.build()?,
        }),
        Model::Bdtf { spec } => {
            let spec = resolve(spec, bdtf_fixture)?;
            Engine::Bdtf(Box::new(bdtf::build_bdtf_frame(&spec, cap)?))
        }
        Model::Dialogue { spec } => {
            let spec = resolve(spec, bdtf_fixture)?;
            let frame = bdtf::build_bdtf_frame(&spec, cap)?.frame;
            Engine::Dialogue(spec, frame)
        }
        Model::Agreement { prob_frame } => Engine::Agreement(match prob_frame {
            Source::Fixture { fixture } => prob_frame_fixture(fixture)?,
            Source::Inline(doc) => doc.build()?,
        }),
        Model::AttackGame { game } => {
            let spec = resolve(game, game_fixture)?;
            Engine::Game(Box::new(attack::build_game_frame(&spec, cap)?))
        }
    })
}

fn kind_name(model: &Model) -> &'static str {
    match model {
        Model::Frame { .. } => "frame",
        Model::Bdtf { .. } => "bdtf",
        Model::Dialogue { .. } => "dialogue",
        Model::Agreement { .. } => "agreement",
        Model::AttackGame { .. } => "attack_game",
    }
}

/// Validates every query, builds the model, then runs the queries in order.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> std::result::Result<Report, ScenarioError> {
    let kind = kind_name(&s.model);
    let ops = s
        .queries
        .iter()
        .map(|q| {
            let op = Op::parse(q).map_err(ScenarioError::Schema)?;
            if !op.allowed_in(kind) {
                return Err(ScenarioError::Schema(format!("query `{}` is not available for {kind} scenarios", q.op)));
            }
            Ok(op)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let engine = build_engine(&s.model, opts.cap).map_err(|e| match e {
        Error::CapExceeded { .. } => exec(e),
        e => ScenarioError::Schema(e.to_string()),
    })?;
    let mut builtin = BTreeMap::new();
    if let Engine::Game(g) = &engine {
        builtin.insert("prospect_1".to_string(), g.prospect_event(1));
        builtin.insert("prospect_0".to_string(), g.prospect_event(0));
    }
    let mut ctx = Ctx { engine: &engine, exprs: &s.events, builtin, resolving: BTreeSet::new(), opts };
    let mut queries = Vec::new();
    let (mut matched, mut mismatched) = (0, 0);
    for (q, op) in s.queries.iter().zip(&ops) {
        let result = ctx.run(op).map_err(|e| exec(format!("query `{}`: {e}", q.op)))?;
        let ok = q.expect.as_ref().map(|e| partial_match(e, &result));
        match ok {
            Some(true) => matched += 1,
            Some(false) => mismatched += 1,
            None => {}
        }
        queries.push(QueryResult { op: q.op.clone(), result, expect: q.expect.clone(), matched: ok });
    }
    Ok(Report { kind: kind.to_string(), algorithm: opts.algorithm, queries, matched, mismatched })
}

/// Scenario files shipped with the crate.
pub const SHIPPED: [(&str, &str); 2] = [
    ("message_paradox", include_str!("../scenarios/message_paradox.json")),
    ("example1", include_str!("../scenarios/example1.json")),
];

/// Inline documents for the built-in fixtures, as scenarios without queries.
pub fn fixture_scenarios() -> Result<Vec<(String, Scenario)>> {
    let bare = |model| Scenario { model, events: BTreeMap::new(), queries: Vec::new() };
    let mut out = vec![(
        "shifted_pair".to_string(),
        bare(Model::Frame { frame: Source::Inline(FrameDoc::from_frame(&frame_fixture("shifted_pair")?)) }),
    )];
    out.push((
        "shifted_pair_timestamped".into(),
        bare(Model::Bdtf { spec: Source::Inline(bdtf_fixture("shifted_pair_timestamped")?) }),
    ));
    out.push(("four_state".into(), bare(Model::Dialogue { spec: Source::Inline(bdtf_fixture("four_state")?) })));
    for (name, game) in [("g_ex1", "example1"), ("g_ex2", "example2"), ("g_ex3", "example3"), ("g_tiny", "tiny")] {
        out.push((name.into(), bare(Model::AttackGame { game: Source::Inline(game_fixture(game)?) })));
    }
    Ok(out)
}
