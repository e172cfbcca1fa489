//! Classical knowledge operators over a frame's ken partitions.

use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, KenId, PlayerId};

/// Result of the traditional common-knowledge elimination together with the
/// successive mutual-knowledge layers `E^1 φ, E^2 φ, ...` up to stabilization.
#[derive(Clone, Debug)]
pub struct CkLayers {
    pub layers: Vec<Event>,
    pub fixed_point: Event,
}

impl Frame {
    /// Union of the kens of `player` that lie entirely inside `phi`.
    pub fn knows(&self, player: PlayerId, phi: &Event) -> Result<Event> {
        self.check_player(player)?;
        self.bind_check(phi)?;
        let mut out = self.empty();
        for k in 0..self.n_kens(player) {
            let members = self.ken_members(player, KenId(k as u32));
            if members.iter().all(|&i| phi.contains_index(i as usize)) {
                for &i in members {
                    out.insert_index(i as usize);
                }
            }
        }
        Ok(out)
    }

    /// Whether `phi` is a union of kens of `player`.
    pub fn is_local(&self, player: PlayerId, phi: &Event) -> Result<bool> {
        self.check_player(player)?;
        self.bind_check(phi)?;
        // A ken is either wholly in or wholly out; compare each member
        // against the ken's first member.
        for k in 0..self.n_kens(player) {
            let members = self.ken_members(player, KenId(k as u32));
            let first = phi.contains_index(members[0] as usize);
            if members[1..].iter().any(|&i| phi.contains_index(i as usize) != first) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `E_I φ`: intersection of `knows(i, φ)` over the players.
    pub fn everyone_knows(&self, players: &[PlayerId], phi: &Event) -> Result<Event> {
        if players.is_empty() {
            return Err(Error::EmptyPlayerSet);
        }
        self.bind_check(phi)?;
        let mut acc = phi.clone();
        for &p in players {
            acc = &acc & &self.knows(p, phi)?;
        }
        Ok(acc)
    }

    /// Traditional common knowledge among `players`: the largest subset of
    /// `phi` that is local to every player in the set.
    pub fn ck_traditional(&self, players: &[PlayerId], phi: &Event) -> Result<Event> {
        Ok(self.ck_traditional_layers(players, phi)?.fixed_point)
    }

    pub fn ck_traditional_layers(&self, players: &[PlayerId], phi: &Event) -> Result<CkLayers> {
        if players.is_empty() {
            return Err(Error::EmptyPlayerSet);
        }
        self.bind_check(phi)?;
        for &p in players {
            self.check_player(p)?;
        }
        let budget: usize = players.iter().map(|&p| self.n_kens(p)).sum();
        let mut layers = Vec::new();
        let mut current = phi.clone();
        loop {
            let next = self.everyone_knows(players, &current)?;
            let stable = next == current;
            layers.push(next.clone());
            if stable {
                break;
            }
            // Each non-final round drops at least one whole ken of some player.
            assert!(layers.len() <= budget + 1, "elimination did not stabilize within the ken budget");
            current = next;
        }
        Ok(CkLayers { layers, fixed_point: current })
    }
}
