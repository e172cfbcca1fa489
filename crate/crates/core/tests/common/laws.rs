//! Property checks shared by the per-module suites and the acceptance run.
//! Each takes a seed, builds its inputs with the seeded generators and
//! returns a description of the first violated law.

use std::collections::{BTreeMap, BTreeSet};

use ckfriction::random::{self, FrameBounds};
use ckfriction::{Algorithm, Event, Frame, HistoryId, PlayerId, Point, Profile};
use rand::Rng;

use super::{set, Set};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Components of the finest partition coarser than every player's kens.
fn common_cells(f: &Frame) -> Vec<Set> {
    let all: Vec<(usize, usize)> = super::all_points(f).into_iter().collect();
    let idx = |p: (usize, usize)| p.0 * f.horizon() + p.1;
    let mut parent: Vec<usize> = (0..all.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for &a in &all {
        for &b in &all {
            if f.players().any(|p| f.ken_of(p, Point::new(a.0, a.1)) == f.ken_of(p, Point::new(b.0, b.1))) {
                let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
                parent[ra] = rb;
            }
        }
    }
    let mut cells: BTreeMap<usize, Set> = BTreeMap::new();
    for &a in &all {
        let r = find(&mut parent, idx(a));
        cells.entry(r).or_default().insert(a);
    }
    cells.into_values().collect()
}

pub fn kernel_laws(seed: u64) -> Check {
    let mut r = random::rng(seed);
    let f = random::random_frame(&mut r, FrameBounds::default());
    let phi = random::random_event(&mut r, &f);
    let chi = random::random_event(&mut r, &f);
    let players: Vec<PlayerId> = f.players().collect();
    for &p in &players {
        let k = f.knows(p, &phi).unwrap();
        ensure!(set(&k) == super::knows(&f, p, &set(&phi)), "knowledge differs from the pointwise oracle");
        ensure!(k.is_subset(&phi).unwrap(), "truth axiom");
        ensure!(f.knows(p, &k).unwrap() == k, "idempotence");
        let both = &phi & &chi;
        ensure!(f.knows(p, &both).unwrap() == &k & &f.knows(p, &chi).unwrap(), "distribution");
        let wider = &phi | &chi;
        ensure!(k.is_subset(&f.knows(p, &wider).unwrap()).unwrap(), "monotonicity");
        ensure!(
            f.is_local(p, &phi).unwrap() == f.is_local(p, &phi.complement()).unwrap(),
            "locality closure under complement"
        );
        let local = random::random_local_event(&mut r, &f, p);
        ensure!(f.is_local(p, &local).unwrap() && f.is_local(p, &(!&local)).unwrap(), "ken unions are local");
    }
    let layers = f.ck_traditional_layers(&players, &phi).unwrap();
    let ck = layers.fixed_point.clone();
    ensure!(
        set(&ck) == super::ck_traditional(&f, &players, &set(&phi)),
        "common knowledge differs from the layered oracle"
    );
    let total_kens: usize = players.iter().map(|&p| f.n_kens(p)).sum();
    ensure!(layers.layers.len() <= total_kens + 1, "elimination took more rounds than there are kens");
    ensure!(ck.is_subset(&phi).unwrap(), "common knowledge escapes its target");
    for &p in &players {
        ensure!(f.is_local(p, &ck).unwrap(), "common knowledge is not local to {p:?}");
    }
    let mut candidate = Set::new();
    for cell in common_cells(&f) {
        if cell.is_subset(&set(&phi)) && r.random_bool(0.5) {
            candidate.extend(cell);
        }
    }
    let candidate = super::to_event(&f, &candidate);
    for &p in &players {
        ensure!(f.is_local(p, &candidate).unwrap(), "common cell union not local");
    }
    ensure!(
        candidate.is_subset(&ck).unwrap(),
        "a commonly local subset of the target is missing from common knowledge"
    );
    ensure!(phi.boxed() == phi.complement().diamond().complement(), "box/diamond duality");
    ensure!(set(&phi.boxed()) == super::boxed(&f, &set(&phi)), "box differs from oracle");
    ensure!(set(&phi.diamond()) == super::diamond(&f, &set(&phi)), "diamond differs from oracle");
    ensure!(phi.boxed().is_subset(&phi).unwrap() && phi.is_subset(&phi.diamond()).unwrap(), "box ⊆ event ⊆ diamond");
    ensure!(phi.is_time_invariant() == (phi == phi.diamond()), "time invariance flag");
    let singular = f.histories().all(|h| phi.times_in(h).count() <= 1);
    ensure!(phi.is_singular() == singular, "singularity flag");
    Ok(())
}

fn naive_edges(f: &Frame, profile: &Profile) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (p, psi) in profile.iter() {
        let pts: Vec<Point> = psi.points().collect();
        for a in &pts {
            for b in &pts {
                if f.ken_of(p, *a) == f.ken_of(p, *b) {
                    let (x, y) = (a.history.0.min(b.history.0), a.history.0.max(b.history.0));
                    out.insert((x, y));
                }
            }
        }
    }
    out
}

/// Anchored common knowledge on one random frame, profile and target.
pub fn relaxed_laws(seed: u64) -> Check {
    let mut r = random::rng(seed);
    let f = random::random_frame(&mut r, FrameBounds::default());
    let profile = random::random_profile(&mut r, &f);
    let phi = random::random_event(&mut r, &f);
    let sets = super::profile_sets(&profile);

    let kleene = f.ck_at(&profile, &phi, Algorithm::Kleene).unwrap();
    let reach = f.ck_at(&profile, &phi, Algorithm::Reachability).unwrap();
    ensure!(kleene == reach, "fixed-point iteration and reachability disagree");
    ensure!(set(&kleene) == super::ck_at(&f, &sets, &set(&phi)), "anchored CK differs from the layered oracle");
    ensure!(kleene.is_time_invariant(), "anchored CK is not time-invariant");
    let trace = f.ck_at_kleene_trace(&profile, &phi).unwrap();
    ensure!(trace.len() <= f.n_histories() + 1, "iteration exceeded its history budget");

    let everyone = f.everyone_at(&profile, &phi).unwrap();
    ensure!(set(&everyone) == super::everyone_at(&f, &sets, &set(&phi)), "everyone-at differs from oracle");
    for (p, psi) in profile.iter() {
        let ka = f.knows_at(p, psi, &phi).unwrap();
        ensure!(set(&ka) == super::knows_at(&f, p, &set(psi), &set(&phi)), "knows-at differs from oracle");
        ensure!(ka.is_time_invariant(), "knows-at is not time-invariant");
    }

    let fixed = f.everyone_at(&profile, &(&phi & &kleene)).unwrap();
    ensure!(fixed == kleene, "anchored CK is not a fixed point");

    let sigma = &phi & &random::random_event(&mut r, &f);
    let smaller = f.ck_at(&profile, &sigma, Algorithm::Reachability).unwrap();
    ensure!(smaller.is_subset(&kleene).unwrap(), "monotonicity");

    for p in profile.players() {
        let ind = f.individualized(p, &profile, &phi).unwrap();
        ensure!(ind.histories_of() == kleene.histories_of(), "individualized event changes the histories");
        ensure!(ind.is_subset(&phi).unwrap(), "individualized event escapes the target");
        ensure!(f.is_local(p, &ind).unwrap(), "individualized event is not local");
        ensure!(ind == profile.event(p).unwrap() & &kleene, "individualized is not anchor ∩ CK");
    }

    let witness = random::random_event(&mut r, &f);
    let ind = f.check_induction_rule(&profile, &phi, Some(&witness)).unwrap();
    ensure!(!ind.premise_holds || ind.conclusion_holds, "induction rule premise without conclusion");
    ensure!(
        ind.witness_premise_holds != Some(true) || ind.witness_conclusion_holds == Some(true),
        "induction with a witness: premise without conclusion"
    );
    let self_supporting = kleene.clone();
    let ind = f.check_induction_rule(&profile, &self_supporting, None).unwrap();
    ensure!(!ind.premise_holds || ind.conclusion_holds, "induction rule on the fixed point");

    let anchor = profile.players()[r.random_range(0..profile.len())];
    let target = &phi | &profile.event(anchor).unwrap().diamond();
    let co = f.check_cooccurrence(&profile, &target, anchor).unwrap();
    let all: Vec<HistoryId> = f.histories().collect();
    ensure!(co.co_occurs_everywhere == profile.co_occurs(&all), "co-occurrence flag");
    ensure!(co.anchors_in_ck == co.co_occurs_everywhere, "co-occurrence characterization fails");

    let graph = f.reachability_graph(&profile).unwrap();
    let edges: BTreeSet<(usize, usize)> = graph.edges.keys().map(|(a, b)| (a.0, b.0)).collect();
    ensure!(edges == naive_edges(&f, &profile), "reachability edges differ from the pairwise oracle");
    for (&(a, b), w) in &graph.edges {
        let psi = profile.event(w.player).unwrap();
        ensure!(
            w.from.history == a
                && w.to.history == b
                && psi.contains(w.from)
                && psi.contains(w.to)
                && f.ken_of(w.player, w.from) == f.ken_of(w.player, w.to),
            "edge witness does not justify the edge"
        );
    }
    let comps = graph.components();
    let firsts: Vec<usize> = comps.iter().map(|c| c[0].0).collect();
    ensure!(firsts.windows(2).all(|w| w[0] < w[1]), "components not numbered by smallest history");
    Ok(())
}

/// On one-period frames with full anchors, anchored and traditional common
/// knowledge coincide.
pub fn static_coincidence(seed: u64) -> Check {
    let mut r = random::rng(seed);
    let b = FrameBounds { max_histories: 6, max_horizon: 1, max_players: 3 };
    let f = random::random_frame(&mut r, b);
    let phi = random::random_event(&mut r, &f);
    let players: Vec<PlayerId> = f.players().collect();
    let profile = Profile::new(&f, players.iter().map(|&p| (p, f.full()))).unwrap();
    let relaxed = f.ck_at(&profile, &phi, Algorithm::Kleene).unwrap();
    ensure!(relaxed == f.ck_traditional(&players, &phi).unwrap(), "static coincidence fails");
    Ok(())
}

pub fn event_of(f: &Frame, list: &[(usize, usize)]) -> Event {
    f.event_from_points(list.iter().map(|&(h, t)| Point::new(h, t))).unwrap()
}

use ckfriction::bdtf::{self, BdtfFrame, ALPHA, BETA};

/// Subjective-time separation, one-step recall, refining slices, and
/// histories with equal condition, delays and birth gap sharing slices.
pub fn bdtf_structure(bf: &BdtfFrame) -> Check {
    let f = &bf.frame;
    let pts: Vec<Point> = (0..f.n_points()).map(|k| f.point(k)).collect();
    for i in [ALPHA, BETA] {
        for &a in &pts {
            for &b in &pts {
                if f.ken_of(i, a) != f.ken_of(i, b) {
                    continue;
                }
                let (sa, sb) = (bf.subjective_time(i, a), bf.subjective_time(i, b));
                if let (Some(x), Some(y)) = (sa, sb) {
                    ensure!(x == y, "{i:?} confuses subjective times {x} and {y}");
                    if x > 0 {
                        let (pa, pb) = (Point::new(a.history.0, a.time - 1), Point::new(b.history.0, b.time - 1));
                        ensure!(f.ken_of(i, pa) == f.ken_of(i, pb), "{i:?} forgets at subjective time {x}");
                    }
                }
            }
        }
        let Some(top) = bf.common_subjective_horizon(i) else { continue };
        let mut prev = bf.slice(i, 0).map_err(|e| e.to_string())?;
        for tau in 0..=top {
            let cur = bf.slice(i, tau).map_err(|e| e.to_string())?;
            ensure!(cur.refines(&prev), "{i:?} slice at {tau} does not refine the previous one");
            for h in f.histories() {
                for g in f.histories() {
                    let (x, y) = (bf.history(h), bf.history(g));
                    let gap = |w: &bdtf::BdtfHistory| w.birth[0] as i64 - w.birth[1] as i64;
                    if x.o == y.o && x.delay == y.delay && gap(x) == gap(y) {
                        ensure!(cur.same_cell(h, g), "equal timing classes split at {tau}");
                    }
                }
            }
            prev = cur;
        }
    }
    Ok(())
}

/// No target gains traditional common knowledge along any history of a
/// random single-dimensional exchange with round trip above two.
pub fn no_new_common_knowledge(seed: u64) -> Check {
    let mut r = random::rng(seed);
    let horizon = r.random_range(6..=12);
    let timestamps = r.random_bool(0.5);
    let spec = random::random_single_dim_spec(&mut r, 3, 5, horizon, timestamps);
    let bf = bdtf::build_bdtf_frame(&spec, 1 << 12).map_err(|e| e.to_string())?;
    bdtf_structure(&bf)?;
    let f = &bf.frame;
    let players = [ALPHA, BETA];
    let mut targets = vec![random::random_time_invariant_event(&mut r, f), random::random_event(&mut r, f)];
    let o = r.random_range(0..spec.initial_conditions.len());
    targets.push(bf.histories_where(|w| w.o == o));
    for phi in &targets {
        let ck = f.ck_traditional(&players, phi).unwrap();
        for h in f.histories() {
            let report = bdtf::verify_no_new_ck(&bf, h, phi).map_err(|e| e.to_string())?;
            ensure!(report.first_violation.is_none(), "new common knowledge at {:?} in {h:?}", report.first_violation);
            let oracle: Vec<usize> = ck.times_in(h).collect();
            ensure!(report.ck_times == oracle, "reported times differ from the fixed point");
        }
    }
    Ok(())
}

/// Round-trip times from the history parameters directly.
pub fn round_trip_oracle(w: &bdtf::BdtfHistory) -> (PlayerId, usize, usize, usize, usize) {
    let initiator = if w.birth[1] > w.birth[0] { BETA } else { ALPHA };
    let (i, j) = (initiator.0, 1 - initiator.0);
    let t1 = w.birth[i] - w.birth[j] + w.delay[j];
    let t2 = w.delay[0] + w.delay[1];
    (initiator, t1, t2, t1 + t2, t1.max(t2 - t1))
}

/// Round trip and stabilization anchors on a random timestamped exchange.
pub fn getck_pipeline(seed: u64) -> Check {
    let mut r = random::rng(seed);
    let spec = if r.random_bool(0.7) {
        random::random_single_dim_spec(&mut r, 4, 5, 24, true)
    } else {
        let mut s = random::random_full_spec(&mut r, 4, 16);
        s.timestamps = true;
        s
    };
    let bf = bdtf::build_bdtf_frame(&spec, 1 << 12).map_err(|e| e.to_string())?;
    for h in bf.frame.histories() {
        let rt = bdtf::roundtrip_ck_facts(&bf, h, Algorithm::Kleene).map_err(|e| e.to_string())?;
        let (init, t1, t2, t3, z) = round_trip_oracle(bf.history(h));
        ensure!(
            (rt.initiator, rt.t1, rt.t2, rt.t3, rt.z_bound) == (init, t1, t2, t3, z),
            "round-trip table differs from the formulas in {h:?}"
        );
        ensure!(rt.all_hold(), "round-trip facts fail in {h:?}: {rt:?}");
        let g = bdtf::getck_times(&bf, h, 2, Algorithm::Reachability).map_err(|e| e.to_string())?;
        ensure!(g.verified, "future signals are not anchored common knowledge in {h:?}");
        ensure!(g.t_hat[init.0] == t2 + g.stable_offset, "anchor of the initiator");
        ensure!(g.t_hat[1 - init.0] == t3 + g.stable_offset, "anchor of the responder");
    }
    Ok(())
}

use ckfriction::agreement::{self, ProbFrame};
use ckfriction::rational::Rational;

/// Posterior from the weights, collecting the ken's histories pairwise.
pub fn posterior_oracle(pf: &ProbFrame, p: PlayerId, phi: &Set, at: (usize, usize)) -> Option<Rational> {
    let f = pf.frame();
    let ken: Vec<(usize, usize)> = super::all_points(f)
        .into_iter()
        .filter(|&b| f.ken_of(p, Point::new(b.0, b.1)) == f.ken_of(p, Point::new(at.0, at.1)))
        .collect();
    let hs: BTreeSet<usize> = ken.iter().map(|&(h, _)| h).collect();
    if hs.len() != ken.len() {
        return None;
    }
    let hit: BTreeSet<usize> = phi.iter().map(|&(h, _)| h).collect();
    let w = |h: &usize| pf.weights()[*h].clone();
    let total: Rational = hs.iter().map(w).sum();
    let inside: Rational = hs.iter().filter(|h| hit.contains(h)).map(w).sum();
    Some(inside / total)
}

/// Agreement on a random two-player frame with random singular anchors.
/// Returns how many posterior pairs were anchored common knowledge, so
/// callers can tell a vacuous run from a real one.
pub fn agreement_law(seed: u64) -> Result<usize, String> {
    let mut r = random::rng(seed);
    let pf = random::random_prob_frame(&mut r);
    let f = pf.frame();
    let phi = random::random_time_invariant_event(&mut r, f);
    let phi_set = set(&phi);
    let players = [PlayerId(0), PlayerId(1)];
    let mut achieved: [BTreeSet<Rational>; 2] = Default::default();
    for (k, &p) in players.iter().enumerate() {
        for a in super::all_points(f) {
            let got = pf.posterior(p, &phi, Point::new(a.0, a.1)).ok();
            ensure!(got == posterior_oracle(&pf, p, &phi_set, a), "posterior differs from the oracle at {a:?}");
            achieved[k].extend(got);
        }
        let class: Vec<HistoryId> = f.histories().collect();
        let total = agreement::total_probability(&pf, p, &phi, &class);
        ensure!(total == Some(pf.prob(phi.histories_of())), "law of total probability fails for {p:?}");
    }
    let anchors: Vec<_> = players.iter().map(|&p| (p, random::random_singular_local_event(&mut r, f, p))).collect();
    let profile = Profile::new(f, anchors.clone()).map_err(|e| e.to_string())?;
    let oracle_profile = super::profile_sets(&profile);
    let mut nonempty = 0;
    for qa in &achieved[0] {
        for qb in &achieved[1] {
            let report =
                pf.verify_agreement(&profile, &phi, [qa, qb], Algorithm::Reachability).map_err(|e| e.to_string())?;
            ensure!(report.consistent(), "anchored common knowledge of {qa} and {qb}");
            let mut fact = super::all_points(f);
            for ((p, psi), q) in anchors.iter().zip([qa, qb]) {
                let post: Set = super::all_points(f)
                    .into_iter()
                    .filter(|&a| posterior_oracle(&pf, *p, &phi_set, a).as_ref() == Some(q))
                    .collect();
                let here: Set = set(psi).intersection(&post).copied().collect();
                fact = fact.intersection(&super::diamond(f, &here)).copied().collect();
            }
            ensure!(
                set(&report.ck_event) == super::ck_at(f, &oracle_profile, &fact),
                "agreement event differs from the oracle"
            );
            nonempty += usize::from(report.ck_nonempty);
        }
    }
    Ok(nonempty)
}

use ckfriction::attack::{self, GameFrame};
use ckfriction::frontier;
use ckfriction::{ExtReal, KenId};

/// Kens a player can act on, in id order.
fn acting_kens(g: &GameFrame, p: PlayerId) -> Vec<KenId> {
    (0..g.frame.n_kens(p) as u32).map(KenId).filter(|&k| Some(k) != g.pre_birth_ken(p)).collect()
}

/// First time each history meets a ken in the subset `mask` of `kens`.
fn first_times(g: &GameFrame, p: PlayerId, kens: &[KenId], mask: u32) -> Vec<Option<usize>> {
    g.frame
        .histories()
        .map(|h| {
            (0..g.frame.horizon()).find(|&t| {
                let k = g.frame.ken_of(p, Point::new(h.0, t));
                kens.iter().position(|&x| x == k).is_some_and(|i| mask >> i & 1 == 1)
            })
        })
        .collect()
}

/// Per-history payoff: `None` for a failed attack, `Some(true)` for success.
fn payoffs(g: &GameFrame, a: &[Option<usize>], b: &[Option<usize>]) -> Vec<Option<bool>> {
    let [da, db] = g.spec.deadlines;
    g.frame
        .histories()
        .map(|h| {
            let success =
                g.state(h).prospect == 1 && a[h.0].is_some_and(|t| t <= da) && b[h.0].is_some_and(|t| t <= db);
            match (a[h.0], b[h.0], success) {
                (None, None, _) => Some(false),
                (_, _, true) => Some(true),
                _ => None,
            }
        })
        .collect()
}

fn welfare(g: &GameFrame, pay: &[Option<bool>]) -> ExtReal {
    let mut sum = Rational::from_integer(0.into());
    for (h, x) in pay.iter().enumerate() {
        match x {
            None => return ExtReal::NegInf,
            Some(true) => sum += &g.weights[h],
            Some(false) => {}
        }
    }
    ExtReal::Finite(sum)
}

pub struct GameCheck {
    /// The attack strategy was also compared against every pair of ken sets.
    pub exhaustive: bool,
}

/// Properties of the attack strategy on a random tiny game. When both
/// players have few enough kens every pair of ken sets is enumerated
/// directly, without the antichain reduction the frontier search uses.
pub fn game_law(seed: u64) -> Result<GameCheck, String> {
    let mut r = random::rng(seed);
    let spec = random::random_tiny_game(&mut r);
    let g = attack::build_game_frame(&spec, 1 << 10).map_err(|e| e.to_string())?;
    let sck = attack::compute_sck(&g).map_err(|e| e.to_string())?;
    let f = &g.frame;
    ensure!(attack::verify_never_unsuccessful(&g, &sck.strategies).unwrap(), "the attack strategy fails somewhere");
    let known = super::knows(f, ALPHA, &set(&g.prospect_event(1)));
    let known_b = super::knows(f, BETA, &set(&g.prospect_event(1)));
    for (i, known) in [(ALPHA, &known), (BETA, &known_b)] {
        for p in sck.anchors[i.0].points() {
            ensure!(known.contains(&(p.history.0, p.time)), "{i:?} attacks without knowing the prospect");
            ensure!(p.time <= spec.deadlines[i.0], "{i:?} attacks after the deadline");
        }
    }
    let report = frontier::brute_force_frontier(&g, 1 << 22).map_err(|e| e.to_string())?;
    ensure!(report.all_hold(), "frontier check fails: {report:?}");
    ensure!(
        report.sck_welfare == attack::expected_welfare(&g, &sck.strategies).unwrap().expected,
        "frontier and direct welfare differ"
    );

    let kens = [acting_kens(&g, ALPHA), acting_kens(&g, BETA)];
    if kens.iter().any(|k| k.len() > 8) {
        return Ok(GameCheck { exhaustive: false });
    }
    let sck_times: [Vec<Option<usize>>; 2] = [ALPHA, BETA]
        .map(|i| f.histories().map(|h| attack::attack_time(&g, i, &sck.strategies.initiate[i.0], h)).collect());
    let sck_pay = payoffs(&g, &sck_times[0], &sck_times[1]);
    let sck_welfare = welfare(&g, &sck_pay);
    ensure!(sck_welfare == report.sck_welfare, "welfare oracle differs from the frontier");
    let times: [Vec<Vec<Option<usize>>>; 2] =
        [ALPHA, BETA].map(|i| (0..1u32 << kens[i.0].len()).map(|m| first_times(&g, i, &kens[i.0], m)).collect());
    let all_welfare: Vec<Vec<ExtReal>> =
        times[0].iter().map(|a| times[1].iter().map(|b| welfare(&g, &payoffs(&g, a, b))).collect()).collect();
    for a in &times[0] {
        for b in &times[1] {
            let pay = payoffs(&g, a, b);
            if pay.iter().all(Option::is_some) {
                let dominated = pay.iter().zip(&sck_pay).all(|(x, s)| x <= s);
                ensure!(dominated, "a never-unsuccessful pair beats the attack strategy in some state");
            }
        }
    }
    for a in &times[0] {
        ensure!(welfare(&g, &payoffs(&g, a, &sck_times[1])) <= sck_welfare, "α gains by deviating");
    }
    for b in &times[1] {
        ensure!(welfare(&g, &payoffs(&g, &sck_times[0], b)) <= sck_welfare, "β gains by deviating");
    }
    let zero = ExtReal::zero();
    let positive_equilibrium = (0..times[0].len()).any(|ia| {
        (0..times[1].len()).any(|ib| {
            let w = &all_welfare[ia][ib];
            *w > zero
                && (0..times[0].len()).all(|ja| &all_welfare[ja][ib] <= w)
                && (0..times[1].len()).all(|jb| &all_welfare[ia][jb] <= w)
        })
    });
    ensure!(
        positive_equilibrium == report.positive_welfare_equilibrium,
        "equilibrium search disagrees with the exhaustive one"
    );
    Ok(GameCheck { exhaustive: true })
}
