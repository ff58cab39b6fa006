//! Minimum-delay time-featured routing over an ETEG with online
//! per-cycle resource reservation.

mod ledger;
mod path;
mod search;

pub use ledger::{LedgerError, Reservation, ResourceLedger};
pub use path::{reserve, validate_path, HopEdge, PathHop, PathViolation, TimeFeaturedPath};
pub use search::{shortest_time_featured_path, DijkstraState, SearchError, Step};

use thiserror::Error;

use crate::contact_plan::ContactPlan;
use crate::eteg::{build_eteg, EtegError};
use crate::traffic::TrafficDemand;
use crate::time::Micros;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetrError {
    #[error(transparent)]
    Eteg(#[from] EtegError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Builds the ETEG for `f`, routes it and reserves the path on success.
pub fn route_and_reserve(
    plan: &ContactPlan,
    ledger: &mut ResourceLedger<'_>,
    f: &TrafficDemand,
    cycle_len: Micros,
) -> Result<Option<TimeFeaturedPath>, DetrError> {
    let g = build_eteg(plan, ledger, f, cycle_len)?;
    let Some(path) = shortest_time_featured_path(&g, f)? else {
        return Ok(None);
    };
    debug_assert!(validate_path(&path, &g, f).is_ok());
    reserve(ledger, &path, f, g.grid())?;
    Ok(Some(path))
}
