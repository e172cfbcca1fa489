//! Partitions of the history set, including the subjective slices a player's
//! kens induce at a singular local anchor, and their meet.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::event::Event;
use crate::frame::{Frame, HistoryId, PlayerId};

/// A partition of histories, stored as canonical cell labels (numbered by
/// first appearance), so structural equality is partition equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HistoryPartition {
    cell_of: Vec<usize>,
}

impl HistoryPartition {
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let cell_of = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        HistoryPartition { cell_of }
    }

    pub fn n_histories(&self) -> usize {
        self.cell_of.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cell_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn cell_index(&self, h: HistoryId) -> usize {
        self.cell_of[h.0]
    }

    pub fn same_cell(&self, a: HistoryId, b: HistoryId) -> bool {
        self.cell_of[a.0] == self.cell_of[b.0]
    }

    pub fn cell(&self, h: HistoryId) -> Vec<HistoryId> {
        let c = self.cell_of[h.0];
        (0..self.cell_of.len()).filter(|&x| self.cell_of[x] == c).map(HistoryId).collect()
    }

    pub fn cells(&self) -> Vec<Vec<HistoryId>> {
        let mut out = vec![Vec::new(); self.n_cells()];
        for (h, &c) in self.cell_of.iter().enumerate() {
            out[c].push(HistoryId(h));
        }
        out
    }

    /// Finest common coarsening.
    pub fn meet(&self, other: &HistoryPartition) -> Result<HistoryPartition> {
        if self.n_histories() != other.n_histories() {
            return Err(Error::InvalidSpec("partitions cover different history sets".into()));
        }
        let n = self.n_histories();
        let mut uf = UnionFind::<usize>::new(n);
        for p in [self, other] {
            let mut rep = vec![usize::MAX; p.n_cells()];
            for h in 0..n {
                let c = p.cell_of[h];
                if rep[c] == usize::MAX {
                    rep[c] = h;
                } else {
                    uf.union(rep[c], h);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|h| uf.find_mut(h)).collect();
        Ok(HistoryPartition::from_labels(&roots))
    }

    /// The partition induced on a subset, with cells relabeled over the subset.
    pub fn restrict(&self, subset: &[HistoryId]) -> Vec<usize> {
        let labels: Vec<usize> = subset.iter().map(|h| self.cell_of[h.0]).collect();
        HistoryPartition::from_labels(&labels).cell_of
    }

    /// Whether every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &HistoryPartition) -> bool {
        let mut image = vec![usize::MAX; self.n_cells()];
        self.cell_of.iter().zip(&coarser.cell_of).all(|(&a, &b)| {
            if image[a] == usize::MAX {
                image[a] = b;
            }
            image[a] == b
        })
    }
}

/// A player's view of the histories at a singular anchor that occurs in every
/// history: two histories share a cell when the player cannot tell them apart
/// at their respective anchor points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePartition {
    pub player: PlayerId,
    pub anchor_times: Vec<usize>,
    pub partition: HistoryPartition,
}

impl Frame {
    pub fn slice_partition(&self, player: PlayerId, anchor: &Event) -> Result<SlicePartition> {
        self.bind_check(anchor)?;
        if !anchor.is_singular() {
            return Err(Error::NotSingular);
        }
        if !self.is_local(player, anchor)? {
            return Err(Error::NotLocal(player));
        }
        let mut anchor_times = Vec::with_capacity(self.n_histories());
        let mut labels = Vec::with_capacity(self.n_histories());
        for h in self.histories() {
            let t = anchor.first_time_in(h).ok_or(Error::NotEverywhereOccurring)?;
            anchor_times.push(t);
            labels.push(self.ken_of(player, crate::frame::Point { history: h, time: t }));
        }
        Ok(SlicePartition { player, anchor_times, partition: HistoryPartition::from_labels(&labels) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meet_merges_overlapping_cells() {
        let p = HistoryPartition::from_labels(&[0, 0, 1, 2]);
        let q = HistoryPartition::from_labels(&[5, 6, 6, 7]);
        let m = p.meet(&q).unwrap();
        assert_eq!(m, HistoryPartition::from_labels(&[0, 0, 0, 1]));
        assert_eq!(p.meet(&p).unwrap(), p);
        assert!(p.refines(&m) && q.refines(&m));
        assert!(!m.refines(&p));
    }

    #[test]
    fn restriction_relabels_within_the_subset() {
        let p = HistoryPartition::from_labels(&[3, 1, 3, 2]);
        assert_eq!(p.restrict(&[HistoryId(1), HistoryId(2), HistoryId(0)]), vec![0, 1, 1]);
    }
}
