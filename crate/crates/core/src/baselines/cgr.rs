use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::contact_plan::ContactPlan;
use crate::detr::ResourceLedger;
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::replay::{replay, Hop, StaticRoute};
use super::Rejection;

/// Earliest-arrival search over contacts with unconstrained waiting. A
/// contact is usable when the packet can leave before it closes and its
/// mean bandwidth covers `A_f / T_f`. Returns hops with their departure
/// instants and the arrival time at the destination.
pub fn earliest_arrival(plan: &ContactPlan, f: &TrafficDemand) -> Option<(Vec<Hop>, Micros)> {
    let n = plan.node_count();
    let rate = f.size_mb * 1e6 / f.period as f64;
    let mut arr = vec![Micros::MAX; n];
    let mut pred: Vec<Option<Hop>> = vec![None; n];
    let mut done = vec![false; n];
    let mut q = BinaryHeap::new();
    arr[f.source] = f.t_f;
    q.push(Reverse((f.t_f, f.source)));
    while let Some(Reverse((t, u))) = q.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == f.sink {
            break;
        }
        for c in plan.contacts_from(u) {
            if c.t_end <= t || c.t_start > f.t_f + f.bound || c.mean_bandwidth() < rate {
                continue;
            }
            let dep = t.max(c.t_start);
            let a = dep + c.delay;
            if a < arr[c.to] {
                arr[c.to] = a;
                pred[c.to] = Some(Hop { from: u, to: c.to, not_before: dep });
                q.push(Reverse((a, c.to)));
            }
        }
    }
    if arr[f.sink] == Micros::MAX {
        return None;
    }
    let mut hops = Vec::new();
    let mut at = f.sink;
    while let Some(h) = pred[at] {
        hops.push(h);
        at = h.from;
    }
    hops.reverse();
    Some((hops, arr[f.sink]))
}

/// Contact graph routing: accept on the search's arrival time, then replay
/// against the ledger, which may still reject for capacity or buffer.
pub fn cgr_route(plan: &ContactPlan, ledger: &ResourceLedger<'_>, f: &TrafficDemand) -> Result<StaticRoute, Rejection> {
    f.check_against(plan).map_err(Rejection::Invalid)?;
    let (hops, arrive) = earliest_arrival(plan, f).ok_or(Rejection::NoPath)?;
    if arrive - f.t_f > f.bound {
        return Err(Rejection::DelayBound { delay: arrive - f.t_f });
    }
    replay(plan, ledger, f, &hops)
}
