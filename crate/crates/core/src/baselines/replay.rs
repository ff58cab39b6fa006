use alloc::vec::Vec;

use crate::contact_plan::{ContactPlan, SatId};
use crate::detr::{Reservation, ResourceLedger};
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::Rejection;

/// One hop of a static route with actual timing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Leg {
    pub from: SatId,
    pub to: SatId,
    pub depart: Micros,
    pub arrive: Micros,
}

/// A fixed-path route replayed against the plan and a ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRoute {
    pub legs: Vec<Leg>,
    /// Arrival at the destination minus `t_f`.
    pub delay: Micros,
    pub reservations: Vec<(Reservation, f64)>,
}

impl StaticRoute {
    pub fn satellites(&self) -> Vec<SatId> {
        let mut out: Vec<SatId> = self.legs.first().map(|l| l.from).into_iter().collect();
        out.extend(self.legs.iter().map(|l| l.to));
        out
    }
}

/// Requested departure rule for one hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub from: SatId,
    pub to: SatId,
    /// Earliest departure; the packet leaves at `max(arrival, not_before)`.
    pub not_before: Micros,
}

/// Walks `hops` from `t_f`: waiting at a node charges its buffer for every
/// global cycle boundary crossed, each transmission needs a contact
/// covering the departure instant and `A_f` of residual volume in the
/// departure cycle. Nothing is committed.
pub fn replay(
    plan: &ContactPlan,
    ledger: &ResourceLedger<'_>,
    f: &TrafficDemand,
    hops: &[Hop],
) -> Result<StaticRoute, Rejection> {
    if hops.is_empty() {
        return Err(Rejection::NoPath);
    }
    let mut t = f.t_f;
    let mut legs = Vec::with_capacity(hops.len());
    let mut res = Vec::new();
    let mut at = f.source;
    for h in hops {
        if h.from != at {
            return Err(Rejection::NoPath);
        }
        let dep = t.max(h.not_before);
        for cycle in ledger.cycle_at(t)..ledger.cycle_at(dep) {
            res.push((Reservation::Buffer { node: h.from, cycle }, f.size_mb));
        }
        if dep >= plan.horizon() {
            return Err(Rejection::Horizon);
        }
        let Some(c) = plan.contact_at(h.from, h.to, dep) else {
            return Err(Rejection::LinkDown { from: h.from, to: h.to, at: dep });
        };
        res.push((Reservation::Link { from: h.from, to: h.to, cycle: ledger.cycle_at(dep) }, f.size_mb));
        let arrive = dep + c.delay;
        legs.push(Leg { from: h.from, to: h.to, depart: dep, arrive });
        t = arrive;
        at = h.to;
    }
    if at != f.sink {
        return Err(Rejection::NoPath);
    }
    let delay = t - f.t_f;
    if delay > f.bound {
        return Err(Rejection::DelayBound { delay });
    }
    ledger.check_all(&res).map_err(|_| Rejection::Capacity)?;
    Ok(StaticRoute { legs, delay, reservations: res })
}

/// Immediate forwarding along `sats`, leaving the source no earlier than `start`.
pub fn immediate_hops(sats: &[SatId], start: Micros) -> Vec<Hop> {
    sats.windows(2)
        .enumerate()
        .map(|(k, w)| Hop { from: w[0], to: w[1], not_before: if k == 0 { start } else { 0 } })
        .collect()
}
