//! Exhaustive checks of the attack-game strategy on small games.
//!
//! Kens after birth form a forest per player (each ken has the ken of the
//! previous period as parent), and the histories through a ken are the same
//! as those through any of its descendants. A set of initiate kens behaves
//! exactly like its minimal elements, so distinct behaviours correspond to
//! antichains of that forest and enumerating antichains covers every pure
//! attack strategy.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::attack::{self, GameFrame};
use crate::bdtf::{ALPHA, BETA};
use crate::error::{Error, Result};
use crate::frame::{KenId, PlayerId};
use crate::rational::ExtReal;
use crate::relaxed::{Algorithm, Profile};

#[derive(Clone, Debug, Serialize)]
pub struct FrontierReport {
    pub strategies: [usize; 2],
    pub profiles: u128,
    pub never_unsuccessful_profiles: usize,
    pub sck_welfare: ExtReal,
    pub sck_never_unsuccessful: bool,
    /// Weakly better in every state than every never-unsuccessful profile.
    pub sck_pareto_dominates: bool,
    pub sck_is_nash: bool,
    /// No profile with nonempty anchored common knowledge attacks earlier,
    /// or in a history the strategy skips.
    pub sck_is_earliest: bool,
    pub positive_welfare_equilibrium: bool,
    pub ck_nonempty_for_some_profile: bool,
}

impl FrontierReport {
    pub fn ck_iff_positive_equilibrium(&self) -> bool {
        self.positive_welfare_equilibrium == self.ck_nonempty_for_some_profile
    }

    pub fn all_hold(&self) -> bool {
        self.sck_never_unsuccessful
            && self.sck_pareto_dominates
            && self.sck_is_nash
            && self.sck_is_earliest
            && self.ck_iff_positive_equilibrium()
    }
}

/// All antichains of one player's ken forest, pre-birth ken excluded.
pub fn antichains(g: &GameFrame, player: PlayerId, cap: u128) -> Result<Vec<Vec<KenId>>> {
    let f = &g.frame;
    let n = f.n_kens(player);
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for k in 0..n {
        let ken = KenId(k as u32);
        if Some(ken) == g.pre_birth_ken(player) {
            continue;
        }
        match g.parent(player, ken) {
            Some(p) => children[p.0 as usize].push(ken),
            None => roots.push(ken),
        }
    }
    fn count(k: KenId, children: &[Vec<KenId>]) -> u128 {
        1 + children[k.0 as usize].iter().fold(1u128, |acc, &c| acc.saturating_mul(count(c, children)))
    }
    let total = roots.iter().fold(1u128, |acc, &r| acc.saturating_mul(count(r, &children)));
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    // Antichains of a subtree, the empty one included.
    fn expand(k: KenId, children: &[Vec<KenId>]) -> Vec<Vec<KenId>> {
        let mut out = vec![vec![k]];
        out.extend(forest(&children[k.0 as usize], children));
        out
    }
    fn forest(roots: &[KenId], children: &[Vec<KenId>]) -> Vec<Vec<KenId>> {
        let mut acc: Vec<Vec<KenId>> = vec![Vec::new()];
        for &r in roots {
            let options = expand(r, children);
            acc = acc
                .iter()
                .flat_map(|a| {
                    options.iter().map(move |o| {
                        let mut v = a.clone();
                        v.extend(o);
                        v
                    })
                })
                .collect();
        }
        acc
    }
    Ok(forest(&roots, &children))
}

fn attack_times(g: &GameFrame, player: PlayerId, kens: &[KenId]) -> Vec<Option<usize>> {
    let mut times = vec![None; g.frame.n_histories()];
    for &k in kens {
        for p in g.frame.ken_points(player, k) {
            assert!(times[p.history.0].is_none(), "antichain meets a history twice");
            times[p.history.0] = Some(p.time);
        }
    }
    times
}

/// Outcome of a profile as (some attack failed, bitmask of successes).
fn outcome(g: &GameFrame, a: &[Option<usize>], b: &[Option<usize>]) -> (bool, u64) {
    let mut failed = false;
    let mut mask = 0u64;
    for h in g.frame.histories() {
        let o = attack::judge(g, h, [a[h.0], b[h.0]]);
        if o.success {
            mask |= 1 << h.0;
        } else if o.utility.is_neg_inf() {
            failed = true;
        }
    }
    (failed, mask)
}

pub fn brute_force_frontier(g: &GameFrame, cap: u128) -> Result<FrontierReport> {
    let f = &g.frame;
    if f.n_histories() > 64 {
        return Err(Error::InvalidSpec("exhaustive search supports at most 64 histories".into()));
    }
    let chains = [antichains(g, ALPHA, cap)?, antichains(g, BETA, cap)?];
    let profiles = chains[0].len() as u128 * chains[1].len() as u128;
    if profiles > cap {
        return Err(Error::CapExceeded { needed: profiles, cap });
    }
    let times: [Vec<Vec<Option<usize>>>; 2] =
        [ALPHA, BETA].map(|i| chains[i.0].iter().map(|c| attack_times(g, i, c)).collect());

    let sck = attack::compute_sck(g)?;
    let sck_times: [Vec<Option<usize>>; 2] = [ALPHA, BETA]
        .map(|i| f.histories().map(|h| attack::attack_time(g, i, &sck.strategies.initiate[i.0], h)).collect());
    let (sck_failed, sck_mask) = outcome(g, &sck_times[0], &sck_times[1]);
    let sck_welfare = attack::expected_welfare(g, &sck.strategies)?.expected;

    // Rank distinct outcomes by welfare so the table holds small integers.
    let mut value_cache: HashMap<(bool, u64), ExtReal> = HashMap::new();
    let mut value = |o: (bool, u64)| -> ExtReal {
        value_cache
            .entry(o)
            .or_insert_with(|| {
                if o.0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::Finite(f.histories().filter(|h| o.1 >> h.0 & 1 == 1).map(|h| g.weights[h.0].clone()).sum())
                }
            })
            .clone()
    };
    let (na, nb) = (chains[0].len(), chains[1].len());
    let mut table = Vec::with_capacity(na * nb);
    let mut never_unsuccessful_profiles = 0;
    let mut sck_pareto_dominates = true;
    for a in &times[0] {
        for b in &times[1] {
            let o = outcome(g, a, b);
            if !o.0 {
                never_unsuccessful_profiles += 1;
                sck_pareto_dominates &= !sck_failed && o.1 & !sck_mask == 0;
            }
            table.push(o);
        }
    }
    let mut distinct: Vec<(bool, u64)> = table.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    distinct.sort_by_cached_key(|&o| value(o));
    let mut rank = HashMap::new();
    let mut r = 0u32;
    for (k, &o) in distinct.iter().enumerate() {
        if k > 0 && value(o) != value(distinct[k - 1]) {
            r += 1;
        }
        rank.insert(o, r);
    }
    let ranked: Vec<u32> = table.iter().map(|o| rank[o]).collect();
    let row_best: Vec<u32> = (0..na).map(|a| (0..nb).map(|b| ranked[a * nb + b]).max().unwrap()).collect();
    let col_best: Vec<u32> = (0..nb).map(|b| (0..na).map(|a| ranked[a * nb + b]).max().unwrap()).collect();
    let zero = ExtReal::zero();
    let positive_welfare_equilibrium = (0..na).any(|a| {
        (0..nb).any(|b| {
            let u = ranked[a * nb + b];
            u == row_best[a] && u == col_best[b] && value(table[a * nb + b]) > zero
        })
    });

    let sck_is_nash = times[0].iter().all(|a| value(outcome(g, a, &sck_times[1])) <= sck_welfare)
        && times[1].iter().all(|b| value(outcome(g, &sck_times[0], b)) <= sck_welfare);

    let mut ck_nonempty_for_some_profile = false;
    let mut sck_is_earliest = true;
    let events: [Vec<_>; 2] = [ALPHA, BETA]
        .map(|i| chains[i.0].iter().map(|c| g.strategy_event(i, &c.iter().copied().collect())).collect::<Vec<_>>());
    for (ea, ta) in events[0].iter().zip(&times[0]) {
        for (eb, tb) in events[1].iter().zip(&times[1]) {
            let profile = Profile::new(f, [(ALPHA, ea.clone()), (BETA, eb.clone())])?;
            let fact = g.attack_fact([ea, eb]);
            let ck = f.ck_at(&profile, &fact, Algorithm::Reachability)?;
            if ck.is_empty() {
                continue;
            }
            ck_nonempty_for_some_profile = true;
            for h in ck.histories_of() {
                let own = [ta[h.0], tb[h.0]];
                for i in 0..2 {
                    sck_is_earliest &= match (sck_times[i][h.0], own[i]) {
                        (Some(s), Some(t)) => s <= t,
                        _ => false,
                    };
                }
            }
        }
    }

    Ok(FrontierReport {
        strategies: [na, nb],
        profiles,
        never_unsuccessful_profiles,
        sck_welfare,
        sck_never_unsuccessful: !sck_failed,
        sck_pareto_dominates,
        sck_is_nash,
        sck_is_earliest,
        positive_welfare_equilibrium,
        ck_nonempty_for_some_profile,
    })
}
