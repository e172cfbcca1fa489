//! Events as bitsets over the points of one frame, plus the column-wise
//! temporal operators (`box`, `diamond`) that only depend on the grid shape.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::frame::{Frame, HistoryId, Point};

/// A set of points of a specific frame.
///
/// The binary operators (`|`, `&`, `-`, `!`) panic when their operands
/// belong to different frames; the named methods return
/// [`Error::FrameMismatch`] instead.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event {
    frame: u64,
    histories: usize,
    horizon: usize,
    bits: FixedBitSet,
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points()).finish()
    }
}

impl Event {
    pub(crate) fn empty_for(frame: &Frame) -> Self {
        Event {
            frame: frame.id(),
            histories: frame.n_histories(),
            horizon: frame.horizon(),
            bits: FixedBitSet::with_capacity(frame.n_points()),
        }
    }

    pub(crate) fn frame_id(&self) -> u64 {
        self.frame
    }

    pub fn same_frame(&self, other: &Event) -> bool {
        self.frame == other.frame
    }

    fn check(&self, other: &Event) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub(crate) fn insert_index(&mut self, idx: usize) {
        self.bits.insert(idx);
    }

    pub(crate) fn contains_index(&self, idx: usize) -> bool {
        self.bits.contains(idx)
    }

    pub(crate) fn insert_column(&mut self, h: usize) {
        self.bits.insert_range(h * self.horizon..(h + 1) * self.horizon);
    }

    pub(crate) fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.history.0 < self.histories && p.time < self.horizon && self.bits.contains(p.history.0 * self.horizon + p.time)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.histories * self.horizon
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let horizon = self.horizon;
        self.bits.ones().map(move |i| Point::new(i / horizon, i % horizon))
    }

    /// Member times in one history, ascending.
    pub fn times_in(&self, h: HistoryId) -> impl Iterator<Item = usize> + '_ {
        let start = h.0 * self.horizon;
        (0..self.horizon).filter(move |t| self.bits.contains(start + t))
    }

    pub fn first_time_in(&self, h: HistoryId) -> Option<usize> {
        self.times_in(h).next()
    }

    pub fn complement(&self) -> Event {
        !self
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self | other)
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self & other)
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self - other)
    }

    /// `(self -> other)`, i.e. the complement of `self \ other`.
    pub fn implies(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(!&(self - other))
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    pub(crate) fn subset_of(&self, other: &Event) -> bool {
        assert!(self.same_frame(other), "events are bound to different frames");
        self.bits.is_subset(&other.bits)
    }

    fn column_range(&self, h: usize) -> std::ops::Range<usize> {
        h * self.horizon..(h + 1) * self.horizon
    }

    pub fn occurs_in(&self, h: HistoryId) -> bool {
        self.bits.contains_any_in_range(self.column_range(h.0))
    }

    /// `Ω(φ)`: histories in which the event occurs at least once.
    pub fn histories_of(&self) -> Vec<HistoryId> {
        (0..self.histories).filter(|&h| self.bits.contains_any_in_range(self.column_range(h))).map(HistoryId).collect()
    }

    /// Union of the whole columns of histories in which the event occurs.
    pub fn diamond(&self) -> Event {
        let mut out = self.cleared();
        for h in 0..self.histories {
            if self.bits.contains_any_in_range(self.column_range(h)) {
                out.insert_column(h);
            }
        }
        out
    }

    /// Union of the whole columns entirely contained in the event.
    pub fn boxed(&self) -> Event {
        let mut out = self.cleared();
        for h in 0..self.histories {
            if self.bits.contains_all_in_range(self.column_range(h)) {
                out.insert_column(h);
            }
        }
        out
    }

    pub fn is_time_invariant(&self) -> bool {
        (0..self.histories).all(|h| {
            let r = self.column_range(h);
            let all = self.bits.contains_all_in_range(r.clone());
            all || !self.bits.contains_any_in_range(r)
        })
    }

    /// At most one member per history.
    pub fn is_singular(&self) -> bool {
        (0..self.histories).all(|h| self.bits.count_ones(self.column_range(h)) <= 1)
    }

    /// Keeps only the earliest member in each history.
    pub fn first_points(&self) -> Event {
        let mut out = self.cleared();
        for h in 0..self.histories {
            if let Some(t) = self.first_time_in(HistoryId(h)) {
                out.insert_index(h * self.horizon + t);
            }
        }
        out
    }

    fn cleared(&self) -> Event {
        Event {
            frame: self.frame,
            histories: self.histories,
            horizon: self.horizon,
            bits: FixedBitSet::with_capacity(self.bits.len()),
        }
    }
}

impl BitOr for &Event {
    type Output = Event;
    fn bitor(self, rhs: &Event) -> Event {
        assert!(self.same_frame(rhs), "events are bound to different frames");
        let mut out = self.clone();
        out.bits.union_with(&rhs.bits);
        out
    }
}

impl BitAnd for &Event {
    type Output = Event;
    fn bitand(self, rhs: &Event) -> Event {
        assert!(self.same_frame(rhs), "events are bound to different frames");
        let mut out = self.clone();
        out.bits.intersect_with(&rhs.bits);
        out
    }
}

impl Sub for &Event {
    type Output = Event;
    fn sub(self, rhs: &Event) -> Event {
        assert!(self.same_frame(rhs), "events are bound to different frames");
        let mut out = self.clone();
        out.bits.difference_with(&rhs.bits);
        out
    }
}

impl Not for &Event {
    type Output = Event;
    fn not(self) -> Event {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraOp {
    Complement,
    Implies,
    Intersect,
    Union,
    Difference,
}

impl FromStr for AlgebraOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "complement" => AlgebraOp::Complement,
            "implies" => AlgebraOp::Implies,
            "intersect" => AlgebraOp::Intersect,
            "union" => AlgebraOp::Union,
            "difference" => AlgebraOp::Difference,
            other => return Err(Error::InvalidSpec(format!("unknown event operation `{other}`"))),
        })
    }
}

/// Applies a set operation to its operands. `complement` is unary,
/// `implies` and `difference` binary, `union`/`intersect` take one or more.
pub fn event_algebra(op: AlgebraOp, operands: &[&Event]) -> Result<Event> {
    let arity = |expected: &'static str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::Arity {
                op: match op {
                    AlgebraOp::Complement => "complement",
                    AlgebraOp::Implies => "implies",
                    AlgebraOp::Intersect => "intersect",
                    AlgebraOp::Union => "union",
                    AlgebraOp::Difference => "difference",
                },
                expected,
                got: operands.len(),
            })
        }
    };
    match op {
        AlgebraOp::Complement => {
            arity("1", operands.len() == 1)?;
            Ok(operands[0].complement())
        }
        AlgebraOp::Implies => {
            arity("2", operands.len() == 2)?;
            operands[0].implies(operands[1])
        }
        AlgebraOp::Difference => {
            arity("2", operands.len() == 2)?;
            operands[0].difference(operands[1])
        }
        AlgebraOp::Union | AlgebraOp::Intersect => {
            arity("at least 1", !operands.is_empty())?;
            let mut acc = operands[0].clone();
            for e in &operands[1..] {
                acc = if op == AlgebraOp::Union { acc.union(e)? } else { acc.intersect(e)? };
            }
            Ok(acc)
        }
    }
}
