//! Python bindings: frames and events, anchored common knowledge, exchanges
//! with timing frictions, posteriors and the coordinated-attack game.
//! Structured results come back as plain dicts and lists.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::{json, Value};

use ckfriction::agreement::{self, ProbFrame as CoreProbFrame};
use ckfriction::attack::{self, AttackStrategyPair, GameFrame};
use ckfriction::bdtf::{self, BdtfFrame, BdtfSpec};
use ckfriction::frontier;
use ckfriction::rational::{format_rational, parse_rational};
use ckfriction::scenario::{self, AlgorithmChoice, FrameDoc, RunOptions, ScenarioError};
use ckfriction::{Algorithm, Error, Event as CoreEvent, Frame as CoreFrame, HistoryId, PlayerId, Point, Profile};

const DEFAULT_CAP: u128 = 1 << 20;

fn err(e: Error) -> PyErr {
    match e {
        Error::CapExceeded { .. } | Error::CrossValidation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scenario_err(e: ScenarioError) -> PyErr {
    match e {
        ScenarioError::Execution(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(|_| PyValueError::new_err(format!("unknown algorithm `{name}`")))
}

fn player(f: &CoreFrame, label: &str) -> PyResult<PlayerId> {
    f.player_by_label(label).ok_or_else(|| PyValueError::new_err(format!("unknown player `{label}`")))
}

fn history(f: &CoreFrame, label: &str) -> PyResult<HistoryId> {
    f.history_by_label(label).ok_or_else(|| PyValueError::new_err(format!("unknown history `{label}`")))
}

/// A finite frame: labelled histories, players, a horizon and each player's
/// knowledge partition.
#[pyclass(module = "ckfriction_py", frozen, from_py_object)]
#[derive(Clone)]
struct Frame {
    inner: Arc<CoreFrame>,
}

/// A set of points of one frame.
#[pyclass(module = "ckfriction_py", frozen, from_py_object)]
#[derive(Clone)]
struct Event {
    frame: Arc<CoreFrame>,
    inner: CoreEvent,
}

impl Frame {
    fn wrap(&self, e: CoreEvent) -> Event {
        Event { frame: self.inner.clone(), inner: e }
    }

    fn own<'a>(&self, e: &'a Event) -> PyResult<&'a CoreEvent> {
        if Arc::ptr_eq(&self.inner, &e.frame) || *self.inner == *e.frame {
            Ok(&e.inner)
        } else {
            Err(PyValueError::new_err("event belongs to a different frame"))
        }
    }

    fn profile(&self, anchors: &BTreeMap<String, Event>) -> PyResult<Profile> {
        let mut entries = Vec::new();
        for (label, e) in anchors {
            entries.push((player(&self.inner, label)?, self.own(e)?.clone()));
        }
        Profile::new(&self.inner, entries).map_err(err)
    }

    fn players_of(&self, labels: &[String]) -> PyResult<Vec<PlayerId>> {
        labels.iter().map(|l| player(&self.inner, l)).collect()
    }
}

#[pymethods]
impl Frame {
    /// `kens[player][history][time]` is any integer label of the ken.
    #[new]
    fn new(histories: Vec<String>, players: Vec<String>, horizon: usize, kens: Vec<Vec<Vec<u32>>>) -> PyResult<Self> {
        let doc = FrameDoc { histories, players, horizon, kens };
        Ok(Frame { inner: Arc::new(doc.build().map_err(err)?) })
    }

    /// One of the built-in frames, e.g. `"shifted_pair"`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(Frame { inner: Arc::new(scenario::frame_fixture(name).map_err(err)?) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: FrameDoc = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Frame { inner: Arc::new(doc.build().map_err(err)?) })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&FrameDoc::from_frame(&self.inner)).expect("serializable")
    }

    #[getter]
    fn histories(&self) -> Vec<String> {
        self.inner.history_labels().to_vec()
    }

    #[getter]
    fn players(&self) -> Vec<String> {
        self.inner.player_labels().to_vec()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn full(&self) -> Event {
        self.wrap(self.inner.full())
    }

    fn empty(&self) -> Event {
        self.wrap(self.inner.empty())
    }

    /// Points given as `{history label: [times]}`.
    fn event(&self, points: BTreeMap<String, Vec<usize>>) -> PyResult<Event> {
        let mut pts = Vec::new();
        for (label, times) in &points {
            let h = history(&self.inner, label)?;
            pts.extend(times.iter().map(|&t| Point { history: h, time: t }));
        }
        Ok(self.wrap(self.inner.event_from_points(pts).map_err(err)?))
    }

    /// Every point with `start <= time`, and `time <= end` when given.
    #[pyo3(signature = (start, end = None))]
    fn times(&self, start: usize, end: Option<usize>) -> Event {
        self.wrap(self.inner.event_from_fn(|p| p.time >= start && end.is_none_or(|e| p.time <= e)))
    }

    fn history_event(&self, labels: Vec<String>) -> PyResult<Event> {
        let hs = labels.iter().map(|l| history(&self.inner, l)).collect::<PyResult<Vec<_>>>()?;
        Ok(self.wrap(self.inner.histories_event(hs)))
    }

    /// The ken of `player` containing the given point.
    fn ken(&self, player_label: &str, history_label: &str, time: usize) -> PyResult<Event> {
        let p = player(&self.inner, player_label)?;
        let pt = Point { history: history(&self.inner, history_label)?, time };
        self.inner.check_point(pt).map_err(err)?;
        Ok(self.wrap(self.inner.ken_event_at(p, pt)))
    }

    fn knows(&self, player_label: &str, event: &Event) -> PyResult<Event> {
        let p = player(&self.inner, player_label)?;
        Ok(self.wrap(self.inner.knows(p, self.own(event)?).map_err(err)?))
    }

    fn is_local(&self, player_label: &str, event: &Event) -> PyResult<bool> {
        let p = player(&self.inner, player_label)?;
        self.inner.is_local(p, self.own(event)?).map_err(err)
    }

    fn everyone_knows(&self, players: Vec<String>, event: &Event) -> PyResult<Event> {
        let ps = self.players_of(&players)?;
        Ok(self.wrap(self.inner.everyone_knows(&ps, self.own(event)?).map_err(err)?))
    }

    fn ck_traditional(&self, players: Vec<String>, event: &Event) -> PyResult<Event> {
        let ps = self.players_of(&players)?;
        Ok(self.wrap(self.inner.ck_traditional(&ps, self.own(event)?).map_err(err)?))
    }

    /// Whether `player` knows `event` whenever `anchor` occurs, in the
    /// histories where it does occur.
    fn knows_at(&self, player_label: &str, anchor: &Event, event: &Event) -> PyResult<Event> {
        let p = player(&self.inner, player_label)?;
        let e = self.inner.knows_at(p, self.own(anchor)?, self.own(event)?).map_err(err)?;
        Ok(self.wrap(e))
    }

    /// Anchored common knowledge; `profile` maps player labels to local events.
    #[pyo3(signature = (profile, event, algorithm = "reachability"))]
    fn ck_at(&self, profile: BTreeMap<String, Event>, event: &Event, algorithm: &str) -> PyResult<Event> {
        let prof = self.profile(&profile)?;
        let alg = self::algorithm(algorithm)?;
        Ok(self.wrap(self.inner.ck_at(&prof, self.own(event)?, alg).map_err(err)?))
    }

    fn individualized(&self, player_label: &str, profile: BTreeMap<String, Event>, event: &Event) -> PyResult<Event> {
        let p = player(&self.inner, player_label)?;
        let prof = self.profile(&profile)?;
        Ok(self.wrap(self.inner.individualized(p, &prof, self.own(event)?).map_err(err)?))
    }

    /// Histories grouped by the reachability graph of the profile.
    fn components(&self, profile: BTreeMap<String, Event>) -> PyResult<Vec<Vec<String>>> {
        let prof = self.profile(&profile)?;
        let graph = self.inner.reachability_graph(&prof).map_err(err)?;
        Ok(graph
            .components()
            .iter()
            .map(|c| c.iter().map(|&h| self.inner.history_label(h).to_string()).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Frame({} histories, players {:?}, horizon {})",
            self.inner.n_histories(),
            self.inner.player_labels(),
            self.inner.horizon()
        )
    }

    fn __eq__(&self, other: &Frame) -> bool {
        *self.inner == *other.inner
    }
}

impl Event {
    fn pair(&self, other: &Event, op: fn(&CoreEvent, &CoreEvent) -> ckfriction::Result<CoreEvent>) -> PyResult<Event> {
        let inner = op(&self.inner, &other.inner).map_err(err)?;
        Ok(Event { frame: self.frame.clone(), inner })
    }

    fn with(&self, inner: CoreEvent) -> Event {
        Event { frame: self.frame.clone(), inner }
    }
}

#[pymethods]
impl Event {
    /// `{history label: [times]}` for the histories the event touches.
    fn points(&self) -> BTreeMap<String, Vec<usize>> {
        self.frame
            .histories()
            .filter(|&h| self.inner.occurs_in(h))
            .map(|h| (self.frame.history_label(h).to_string(), self.inner.times_in(h).collect()))
            .collect()
    }

    fn histories(&self) -> Vec<String> {
        self.inner.histories_of().into_iter().map(|h| self.frame.history_label(h).to_string()).collect()
    }

    fn contains(&self, history_label: &str, time: usize) -> PyResult<bool> {
        let pt = Point { history: history(&self.frame, history_label)?, time };
        self.frame.check_point(pt).map_err(err)?;
        Ok(self.inner.contains(pt))
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    fn is_full(&self) -> bool {
        self.inner.is_full()
    }

    fn is_time_invariant(&self) -> bool {
        self.inner.is_time_invariant()
    }

    fn is_singular(&self) -> bool {
        self.inner.is_singular()
    }

    fn is_subset(&self, other: &Event) -> PyResult<bool> {
        self.inner.is_subset(&other.inner).map_err(err)
    }

    /// The histories in which the event occurs at some time.
    fn diamond(&self) -> Event {
        self.with(self.inner.diamond())
    }

    /// The histories in which the event holds at every time.
    fn boxed(&self) -> Event {
        self.with(self.inner.boxed())
    }

    fn first_points(&self) -> Event {
        self.with(self.inner.first_points())
    }

    fn implies(&self, other: &Event) -> PyResult<Event> {
        self.pair(other, CoreEvent::implies)
    }

    fn __or__(&self, other: &Event) -> PyResult<Event> {
        self.pair(other, CoreEvent::union)
    }

    fn __and__(&self, other: &Event) -> PyResult<Event> {
        self.pair(other, CoreEvent::intersect)
    }

    fn __sub__(&self, other: &Event) -> PyResult<Event> {
        self.pair(other, CoreEvent::difference)
    }

    fn __invert__(&self) -> Event {
        self.with(self.inner.complement())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Event) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Event({:?})", self.points())
    }
}

/// A frame with an exact probability for each history. Weights are
/// fractions written as strings, e.g. `"1/3"`.
#[pyclass(module = "ckfriction_py", frozen)]
struct ProbFrame {
    frame: Frame,
    inner: CoreProbFrame,
}

#[pymethods]
impl ProbFrame {
    #[new]
    fn new(frame: &Frame, weights: Vec<String>) -> PyResult<Self> {
        let w = weights.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let inner = CoreProbFrame::new((*frame.inner).clone(), w).map_err(err)?;
        Ok(ProbFrame { frame: frame.clone(), inner })
    }

    #[getter]
    fn frame(&self) -> Frame {
        self.frame.clone()
    }

    /// Probability of the histories of `event` given the player's ken at the point.
    fn posterior(&self, player_label: &str, event: &Event, history_label: &str, time: usize) -> PyResult<String> {
        let f = &self.frame.inner;
        let pt = Point { history: history(f, history_label)?, time };
        let q = self.inner.posterior(player(f, player_label)?, self.frame.own(event)?, pt).map_err(err)?;
        Ok(format_rational(&q))
    }

    /// Points at which the player's posterior of `event` equals `q`.
    fn posterior_event(&self, player_label: &str, event: &Event, q: &str) -> PyResult<Event> {
        let f = &self.frame.inner;
        let q = parse_rational(q).map_err(err)?;
        let r = self.inner.posterior_event(player(f, player_label)?, self.frame.own(event)?, &q).map_err(err)?;
        Ok(self.frame.wrap(r.event))
    }

    /// Anchored common knowledge of the two players holding posteriors `q`.
    #[pyo3(signature = (profile, event, q, algorithm = "reachability"))]
    fn agreement<'py>(
        &self,
        py: Python<'py>,
        profile: BTreeMap<String, Event>,
        event: &Event,
        q: BTreeMap<String, String>,
        algorithm: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = &self.frame.inner;
        let prof = self.frame.profile(&profile)?;
        let mut qs = Vec::new();
        for p in prof.players() {
            let label = f.player_label(p);
            let text =
                q.get(label).ok_or_else(|| PyValueError::new_err(format!("no posterior given for `{label}`")))?;
            qs.push(parse_rational(text).map_err(err)?);
        }
        if qs.len() != 2 {
            return Err(PyValueError::new_err("agreement needs a two-player profile"));
        }
        let r = self
            .inner
            .verify_agreement(&prof, self.frame.own(event)?, [&qs[0], &qs[1]], self::algorithm(algorithm)?)
            .map_err(err)?;
        let v = json!({
            "ck_event": scenario::event_json(f, &r.ck_event),
            "ck_nonempty": r.ck_nonempty,
            "posteriors_equal": r.posteriors_equal,
            "consistent": r.consistent(),
        });
        to_py(py, &v)
    }
}

/// Two players with unknown birth dates and delays exchanging signals.
#[pyclass(module = "ckfriction_py", frozen)]
struct Exchange {
    inner: BdtfFrame,
    frame: Frame,
}

impl Exchange {
    fn build(spec: &BdtfSpec, cap: u128) -> PyResult<Self> {
        let inner = bdtf::build_bdtf_frame(spec, cap).map_err(err)?;
        let frame = Frame { inner: Arc::new(inner.frame.clone()) };
        Ok(Exchange { inner, frame })
    }
}

#[pymethods]
impl Exchange {
    /// `"shifted_pair"`, `"shifted_pair_timestamped"` or `"four_state"`.
    #[staticmethod]
    #[pyo3(signature = (name, cap = DEFAULT_CAP))]
    fn fixture(name: &str, cap: u128) -> PyResult<Self> {
        Self::build(&scenario::bdtf_fixture(name).map_err(err)?, cap)
    }

    #[staticmethod]
    #[pyo3(signature = (text, cap = DEFAULT_CAP))]
    fn from_json(text: &str, cap: u128) -> PyResult<Self> {
        let spec: BdtfSpec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::build(&spec, cap)
    }

    fn spec_json(&self) -> String {
        serde_json::to_string(&self.inner.spec).expect("serializable")
    }

    #[getter]
    fn frame(&self) -> Frame {
        self.frame.clone()
    }

    #[pyo3(signature = (history_label, algorithm = "kleene"))]
    fn roundtrip<'py>(&self, py: Python<'py>, history_label: &str, algorithm: &str) -> PyResult<Bound<'py, PyAny>> {
        let f = &self.inner.frame;
        let r = bdtf::roundtrip_ck_facts(&self.inner, history(f, history_label)?, self::algorithm(algorithm)?)
            .map_err(err)?;
        to_py(py, &scenario::roundtrip_json(f, &r))
    }

    #[pyo3(signature = (history_label, margin = 2, algorithm = "reachability"))]
    fn getck<'py>(
        &self,
        py: Python<'py>,
        history_label: &str,
        margin: usize,
        algorithm: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = &self.inner.frame;
        let g = bdtf::getck_times(&self.inner, history(f, history_label)?, margin, self::algorithm(algorithm)?)
            .map_err(err)?;
        let labels = f.player_labels();
        let v = json!({
            "roundtrip": scenario::roundtrip_json(f, &g.roundtrip),
            "stable_offset": g.stable_offset,
            "t_hat": {labels[0].clone(): g.t_hat[0], labels[1].clone(): g.t_hat[1]},
            "signal_event": scenario::event_json(f, &g.signal_event),
            "verified": g.verified,
        });
        to_py(py, &v)
    }

    /// Times at which `event` is common knowledge along the history, and the
    /// first time it became so after time 0, if any.
    fn no_new_ck<'py>(&self, py: Python<'py>, history_label: &str, event: &Event) -> PyResult<Bound<'py, PyAny>> {
        let f = &self.inner.frame;
        let r = bdtf::verify_no_new_ck(&self.inner, history(f, history_label)?, self.frame.own(event)?).map_err(err)?;
        to_py(py, &json!({ "ck_times": r.ck_times, "first_violation": r.first_violation }))
    }
}

/// The coordinated-attack game.
#[pyclass(module = "ckfriction_py", frozen)]
struct AttackGame {
    inner: GameFrame,
    frame: Frame,
}

impl AttackGame {
    fn build(spec: &attack::AttackGameSpec, cap: u128) -> PyResult<Self> {
        let inner = attack::build_game_frame(spec, cap).map_err(err)?;
        let frame = Frame { inner: Arc::new(inner.frame.clone()) };
        Ok(AttackGame { inner, frame })
    }

    fn strategy(&self, name: &str) -> PyResult<AttackStrategyPair> {
        match name {
            "sck" => Ok(attack::compute_sck(&self.inner).map_err(err)?.strategies),
            "never" => Ok(AttackStrategyPair::never()),
            _ => Err(PyValueError::new_err(format!("unknown strategy `{name}`, expected sck or never"))),
        }
    }
}

#[pymethods]
impl AttackGame {
    /// `"example1"`, `"example2"`, `"example3"` or `"tiny"`.
    #[staticmethod]
    #[pyo3(signature = (name, cap = DEFAULT_CAP))]
    fn fixture(name: &str, cap: u128) -> PyResult<Self> {
        Self::build(&scenario::game_fixture(name).map_err(err)?, cap)
    }

    #[staticmethod]
    #[pyo3(signature = (text, cap = DEFAULT_CAP))]
    fn from_json(text: &str, cap: u128) -> PyResult<Self> {
        let spec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::build(&spec, cap)
    }

    fn spec_json(&self) -> String {
        serde_json::to_string(&self.inner.spec).expect("serializable")
    }

    #[getter]
    fn frame(&self) -> Frame {
        self.frame.clone()
    }

    /// Where each player first initiates under the common-knowledge strategy.
    fn sck_anchors(&self) -> PyResult<BTreeMap<String, Event>> {
        let sck = attack::compute_sck(&self.inner).map_err(err)?;
        let f = &self.inner.frame;
        Ok(sck
            .anchors
            .into_iter()
            .enumerate()
            .map(|(i, e)| (f.player_label(PlayerId(i)).to_string(), self.frame.wrap(e)))
            .collect())
    }

    /// Attack times, success and utility per history label.
    #[pyo3(signature = (strategy = "sck"))]
    fn play<'py>(&self, py: Python<'py>, strategy: &str) -> PyResult<Bound<'py, PyDict>> {
        let s = self.strategy(strategy)?;
        let out = PyDict::new(py);
        for h in self.inner.frame.histories() {
            let o = attack::play(&self.inner, &s, h).map_err(err)?;
            out.set_item(self.inner.frame.history_label(h), to_py(py, &serde_json::to_value(o).unwrap())?)?;
        }
        Ok(out)
    }

    /// Expected utility as a fraction, or `"-inf"`.
    #[pyo3(signature = (strategy = "sck"))]
    fn welfare(&self, strategy: &str) -> PyResult<String> {
        let s = self.strategy(strategy)?;
        Ok(attack::expected_welfare(&self.inner, &s).map_err(err)?.expected.to_string())
    }

    #[pyo3(signature = (strategy = "sck"))]
    fn never_unsuccessful(&self, strategy: &str) -> PyResult<bool> {
        let s = self.strategy(strategy)?;
        attack::verify_never_unsuccessful(&self.inner, &s).map_err(err)
    }

    /// Exhaustive comparison against every pure strategy pair.
    #[pyo3(signature = (cap = DEFAULT_CAP))]
    fn frontier<'py>(&self, py: Python<'py>, cap: u128) -> PyResult<Bound<'py, PyAny>> {
        let r = frontier::brute_force_frontier(&self.inner, cap).map_err(err)?;
        let mut v = serde_json::to_value(&r).unwrap();
        v["profiles"] = json!(r.profiles.to_string());
        v["ck_iff_positive_equilibrium"] = json!(r.ck_iff_positive_equilibrium());
        v["all_hold"] = json!(r.all_hold());
        to_py(py, &v)
    }
}

/// Runs a scenario document and returns its report.
#[pyfunction]
#[pyo3(signature = (text, algorithm = "both", cap = DEFAULT_CAP))]
fn run_scenario<'py>(py: Python<'py>, text: &str, algorithm: &str, cap: u128) -> PyResult<Bound<'py, PyAny>> {
    let algorithm = match algorithm {
        "kleene" => AlgorithmChoice::Kleene,
        "reachability" => AlgorithmChoice::Reachability,
        "both" => AlgorithmChoice::Both,
        other => return Err(PyValueError::new_err(format!("unknown algorithm `{other}`"))),
    };
    let s = scenario::parse_scenario(text).map_err(scenario_err)?;
    let report = scenario::run_scenario(&s, &RunOptions { algorithm, cap }).map_err(scenario_err)?;
    to_py(py, &serde_json::to_value(&report).unwrap())
}

/// The posterior-announcing exchange on a fixture, with the agreement
/// check at each history's stabilization anchors.
#[pyfunction]
#[pyo3(signature = (fixture = "four_state", margin = 2, cap = DEFAULT_CAP))]
fn dialogue<'py>(py: Python<'py>, fixture: &str, margin: usize, cap: u128) -> PyResult<Bound<'py, PyAny>> {
    let spec = scenario::bdtf_fixture(fixture).map_err(err)?;
    let r = agreement::posterior_dialogue(&spec, cap, margin, Algorithm::Reachability).map_err(err)?;
    let mut v = serde_json::to_value(&r).unwrap();
    v["all_agree"] = json!(r.all_agree());
    to_py(py, &v)
}

#[pymodule]
fn ckfriction_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_class::<Event>()?;
    m.add_class::<ProbFrame>()?;
    m.add_class::<Exchange>()?;
    m.add_class::<AttackGame>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(dialogue, m)?)?;
    Ok(())
}
