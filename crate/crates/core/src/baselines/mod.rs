//! Comparison strategies: min-hop routing on the current snapshot (OSPF),
//! per-snapshot min-delay routing (SPR) and earliest-arrival contact graph
//! routing (CGR). All are checked against the same resource ledger.

mod cgr;
mod ospf;
mod replay;
mod snapshot;
mod spr;

pub use cgr::{cgr_route, earliest_arrival};
pub use ospf::{min_hop_path, ospf_route};
pub use replay::{immediate_hops, replay, Hop, Leg, StaticRoute};
pub use snapshot::{derive_snapshots, snapshot_at, Snapshot, SnapshotLink};
pub use spr::{min_delay_path, spr_route};

use thiserror::Error;

use crate::contact_plan::SatId;
use crate::time::Micros;
use crate::traffic::DemandError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Rejection {
    #[error("no path")]
    NoPath,
    #[error("link u{from}->u{to} down at {at} us")]
    LinkDown { from: SatId, to: SatId, at: Micros },
    #[error("insufficient link or buffer capacity")]
    Capacity,
    #[error("delay {delay} us exceeds the bound")]
    DelayBound { delay: Micros },
    #[error("path outlives its snapshot")]
    SnapshotEnds,
    #[error("departure past the plan horizon")]
    Horizon,
    #[error(transparent)]
    Invalid(DemandError),
}
