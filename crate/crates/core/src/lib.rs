//! Exact model checking of common knowledge on finite history–time frames,
//! including knowledge anchored at per-player local events, frames generated
//! by two-player message exchange with unknown birth dates and delays,
//! posterior agreement, and a coordinated-attack game.

pub mod agreement;
pub mod attack;
pub mod bdtf;
pub mod error;
pub mod event;
pub mod frame;
pub mod frontier;
pub mod knowledge;
pub mod partition;
pub mod random;
pub mod rational;
pub mod relaxed;
pub mod scenario;

pub use error::{Error, Result};
pub use event::{event_algebra, AlgebraOp, Event};
pub use frame::{Frame, HistoryId, KenId, PlayerId, Point};
pub use knowledge::CkLayers;
pub use partition::{HistoryPartition, SlicePartition};
pub use rational::{ExtReal, Rational};
pub use relaxed::{
    Algorithm, CkReport, CooccurrenceReport, EdgeWitness, InductionReport, Profile, ReachabilityFailure,
    ReachabilityGraph,
};
