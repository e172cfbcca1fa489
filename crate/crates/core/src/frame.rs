//! Finite history–time frames.
//!
//! A frame is a finite set of histories, each observed over the same
//! bounded horizon `0..H`, together with one knowledge partition per
//! player over the resulting grid of points. Cells of these partitions are
//! called kens.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::Event;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlayerId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HistoryId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KenId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub history: HistoryId,
    pub time: usize,
}

impl Point {
    pub fn new(history: usize, time: usize) -> Self {
        Point { history: HistoryId(history), time }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.history.0, self.time)
    }
}

static NEXT_FRAME_ID: AtomicU64 = AtomicU64::new(1);

/// One player's partition of the point grid.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    /// Ken id per point index.
    ken_of: Vec<u32>,
    /// Inverted index: ken id -> sorted point indices.
    members: Vec<Vec<u32>>,
}

impl Partition {
    /// Renumbers arbitrary labels by order of first appearance so that ken
    /// ids are contiguous from zero and canonical.
    fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids: HashMap<L, u32> = HashMap::new();
        let mut ken_of = Vec::with_capacity(labels.len());
        let mut members: Vec<Vec<u32>> = Vec::new();
        for (idx, label) in labels.iter().enumerate() {
            let next = ids.len() as u32;
            let id = *ids.entry(label.clone()).or_insert(next);
            if id as usize == members.len() {
                members.push(Vec::new());
            }
            members[id as usize].push(idx as u32);
            ken_of.push(id);
        }
        Partition { ken_of, members }
    }
}

/// A finite frame: `histories × 0..horizon` with one partition per player.
///
/// Frames are immutable once built. Every frame carries a process-unique
/// identity that events use to detect cross-frame mixing; clones share it.
#[derive(Clone, Debug)]
pub struct Frame {
    id: u64,
    history_labels: Vec<String>,
    player_labels: Vec<String>,
    horizon: usize,
    partitions: Vec<Partition>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.history_labels == other.history_labels
            && self.player_labels == other.player_labels
            && self.horizon == other.horizon
            && self.partitions.iter().zip(&other.partitions).all(|(a, b)| a.ken_of == b.ken_of)
    }
}

impl Eq for Frame {}

impl Frame {
    /// Builds a frame from per-player ken labels, given row-major per point
    /// (`history * horizon + time`). Labels may be any hashable value; they
    /// are renumbered into contiguous ken ids.
    pub fn new<L: Eq + std::hash::Hash + Clone>(
        history_labels: Vec<String>,
        player_labels: Vec<String>,
        horizon: usize,
        ken_labels: Vec<Vec<L>>,
    ) -> Result<Self> {
        if history_labels.is_empty() {
            return Err(Error::InvalidFrame("at least one history is required".into()));
        }
        if player_labels.is_empty() {
            return Err(Error::InvalidFrame("at least one player is required".into()));
        }
        if horizon == 0 {
            return Err(Error::InvalidFrame("horizon must be at least 1".into()));
        }
        if ken_labels.len() != player_labels.len() {
            return Err(Error::InvalidFrame(format!(
                "{} partitions for {} players",
                ken_labels.len(),
                player_labels.len()
            )));
        }
        check_unique(&history_labels, "history")?;
        check_unique(&player_labels, "player")?;
        let n_points = history_labels.len() * horizon;
        let mut partitions = Vec::with_capacity(ken_labels.len());
        for (p, labels) in ken_labels.iter().enumerate() {
            if labels.len() != n_points {
                return Err(Error::InvalidFrame(format!(
                    "partition of player `{}` covers {} points, frame has {}",
                    player_labels[p],
                    labels.len(),
                    n_points
                )));
            }
            partitions.push(Partition::from_labels(labels));
        }
        Ok(Frame {
            id: NEXT_FRAME_ID.fetch_add(1, Ordering::Relaxed),
            history_labels,
            player_labels,
            horizon,
            partitions,
        })
    }

    /// Builds a frame by evaluating a ken-label function at every point.
    pub fn from_fn<L, F>(
        history_labels: Vec<String>,
        player_labels: Vec<String>,
        horizon: usize,
        mut label: F,
    ) -> Result<Self>
    where
        L: Eq + std::hash::Hash + Clone,
        F: FnMut(PlayerId, Point) -> L,
    {
        let n_hist = history_labels.len();
        let ken_labels = (0..player_labels.len())
            .map(|p| {
                let mut v = Vec::with_capacity(n_hist * horizon);
                for h in 0..n_hist {
                    for t in 0..horizon {
                        v.push(label(PlayerId(p), Point::new(h, t)));
                    }
                }
                v
            })
            .collect();
        Frame::new(history_labels, player_labels, horizon, ken_labels)
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_histories(&self) -> usize {
        self.history_labels.len()
    }

    pub fn n_players(&self) -> usize {
        self.player_labels.len()
    }

    pub fn n_points(&self) -> usize {
        self.history_labels.len() * self.horizon
    }

    pub fn histories(&self) -> impl Iterator<Item = HistoryId> + '_ {
        (0..self.n_histories()).map(HistoryId)
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        (0..self.n_players()).map(PlayerId)
    }

    pub fn history_label(&self, h: HistoryId) -> &str {
        &self.history_labels[h.0]
    }

    pub fn history_labels(&self) -> &[String] {
        &self.history_labels
    }

    pub fn player_label(&self, p: PlayerId) -> &str {
        &self.player_labels[p.0]
    }

    pub fn player_labels(&self) -> &[String] {
        &self.player_labels
    }

    pub fn history_by_label(&self, label: &str) -> Option<HistoryId> {
        self.history_labels.iter().position(|l| l == label).map(HistoryId)
    }

    pub fn player_by_label(&self, label: &str) -> Option<PlayerId> {
        self.player_labels.iter().position(|l| l == label).map(PlayerId)
    }

    pub fn check_player(&self, p: PlayerId) -> Result<()> {
        if p.0 < self.n_players() {
            Ok(())
        } else {
            Err(Error::UnknownPlayer(p))
        }
    }

    pub fn check_history(&self, h: HistoryId) -> Result<()> {
        if h.0 < self.n_histories() {
            Ok(())
        } else {
            Err(Error::UnknownHistory(h))
        }
    }

    pub fn index(&self, p: Point) -> usize {
        p.history.0 * self.horizon + p.time
    }

    pub fn point(&self, index: usize) -> Point {
        Point::new(index / self.horizon, index % self.horizon)
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        if p.history.0 < self.n_histories() && p.time < self.horizon {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { history: p.history.0, time: p.time })
        }
    }

    pub fn ken_of(&self, player: PlayerId, p: Point) -> KenId {
        KenId(self.partitions[player.0].ken_of[self.index(p)])
    }

    pub(crate) fn ken_of_index(&self, player: PlayerId, idx: usize) -> u32 {
        self.partitions[player.0].ken_of[idx]
    }

    pub fn n_kens(&self, player: PlayerId) -> usize {
        self.partitions[player.0].members.len()
    }

    /// Point indices of a ken, ascending.
    pub(crate) fn ken_members(&self, player: PlayerId, ken: KenId) -> &[u32] {
        &self.partitions[player.0].members[ken.0 as usize]
    }

    pub fn ken_points(&self, player: PlayerId, ken: KenId) -> impl Iterator<Item = Point> + '_ {
        self.ken_members(player, ken).iter().map(move |&i| self.point(i as usize))
    }

    pub fn ken_event(&self, player: PlayerId, ken: KenId) -> Event {
        let mut e = self.empty();
        for &i in self.ken_members(player, ken) {
            e.insert_index(i as usize);
        }
        e
    }

    /// The ken of `p` as an event.
    pub fn ken_event_at(&self, player: PlayerId, p: Point) -> Event {
        self.ken_event(player, self.ken_of(player, p))
    }

    /// Ken label per point for one player, row-major.
    pub fn ken_assignment(&self, player: PlayerId) -> &[u32] {
        &self.partitions[player.0].ken_of
    }

    pub fn empty(&self) -> Event {
        Event::empty_for(self)
    }

    pub fn full(&self) -> Event {
        !&self.empty()
    }

    pub fn event_from_points<I: IntoIterator<Item = Point>>(&self, points: I) -> Result<Event> {
        let mut e = self.empty();
        for p in points {
            self.check_point(p)?;
            e.insert_index(self.index(p));
        }
        Ok(e)
    }

    pub fn event_from_fn<F: FnMut(Point) -> bool>(&self, mut pred: F) -> Event {
        let mut e = self.empty();
        for idx in 0..self.n_points() {
            if pred(self.point(idx)) {
                e.insert_index(idx);
            }
        }
        e
    }

    /// The time-invariant event consisting of whole columns for the given histories.
    pub fn histories_event<I: IntoIterator<Item = HistoryId>>(&self, hs: I) -> Event {
        let mut e = self.empty();
        for h in hs {
            e.insert_column(h.0);
        }
        e
    }

    pub(crate) fn bind_check(&self, e: &Event) -> Result<()> {
        if e.frame_id() == self.id {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidFrame(format!("duplicate {what} label `{l}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn renumbers_kens_by_first_appearance() {
        let f = Frame::new(labels("w", 2), labels("p", 1), 2, vec![vec![7, 3, 7, 9]]).unwrap();
        assert_eq!(f.ken_assignment(PlayerId(0)), &[0, 1, 0, 2]);
        assert_eq!(f.n_kens(PlayerId(0)), 3);
        let pts: Vec<_> = f.ken_points(PlayerId(0), KenId(0)).collect();
        assert_eq!(pts, vec![Point::new(0, 0), Point::new(1, 0)]);
    }

    #[test]
    fn rejects_degenerate_frames() {
        let no_hist = Frame::new(vec![], labels("p", 1), 1, vec![Vec::<u32>::new()]);
        assert!(matches!(no_hist, Err(Error::InvalidFrame(_))));
        let no_time = Frame::new(labels("w", 1), labels("p", 1), 0, vec![Vec::<u32>::new()]);
        assert!(matches!(no_time, Err(Error::InvalidFrame(_))));
        let short = Frame::new(labels("w", 2), labels("p", 1), 2, vec![vec![0u32; 3]]);
        assert!(matches!(short, Err(Error::InvalidFrame(_))));
        let dup = Frame::new(vec!["a".into(), "a".into()], labels("p", 1), 1, vec![vec![0u32; 2]]);
        assert!(matches!(dup, Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn equality_ignores_identity_and_label_values() {
        let a = Frame::new(labels("w", 1), labels("p", 1), 3, vec![vec!["x", "y", "x"]]).unwrap();
        let b = Frame::new(labels("w", 1), labels("p", 1), 3, vec![vec![5, 1, 5]]).unwrap();
        assert_ne!(a.id(), b.id());
        assert_eq!(a, b);
    }
}
