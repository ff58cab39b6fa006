use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::contact_plan::{ContactPlan, SatId};
use crate::detr::ResourceLedger;
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::replay::{immediate_hops, replay, StaticRoute};
use super::snapshot::Snapshot;
use super::Rejection;

/// Minimum-delay path on a static snapshot, ties by node id. Returns the
/// node sequence and its delay.
pub fn min_delay_path(snap: &Snapshot, from: SatId, to: SatId) -> Option<(Vec<SatId>, Micros)> {
    let n = snap.adjacency.len();
    let mut d = vec![Micros::MAX; n];
    let mut p = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut q = BinaryHeap::new();
    d[from] = 0;
    q.push(Reverse((0, from)));
    while let Some(Reverse((du, u))) = q.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == to {
            break;
        }
        for l in &snap.adjacency[u] {
            let nd = du + l.delay;
            if nd < d[l.to] {
                d[l.to] = nd;
                p[l.to] = u;
                q.push(Reverse((nd, l.to)));
            }
        }
    }
    if d[to] == Micros::MAX {
        return None;
    }
    let mut path = vec![to];
    while *path.last().expect("nonempty") != from {
        path.push(p[*path.last().expect("nonempty")]);
    }
    path.reverse();
    Some((path, d[to]))
}

/// Tries each snapshot overlapping `[t_f, t_f + B_f]` in time order and
/// accepts the first min-delay path that completes inside its snapshot and
/// passes replay.
pub fn spr_route(
    plan: &ContactPlan,
    snaps: &[Snapshot],
    ledger: &ResourceLedger<'_>,
    f: &TrafficDemand,
) -> Result<StaticRoute, Rejection> {
    f.check_against(plan).map_err(Rejection::Invalid)?;
    let end = f.t_f + f.bound;
    let first = snaps.partition_point(|s| s.t_end <= f.t_f);
    let mut last = Rejection::NoPath;
    for s in snaps[first..].iter().take_while(|s| s.t_start <= end) {
        let dep = f.t_f.max(s.t_start);
        let Some((path, delay)) = min_delay_path(s, f.source, f.sink) else { continue };
        let arrive = dep + delay;
        if arrive > s.t_end {
            last = Rejection::SnapshotEnds;
            continue;
        }
        if arrive - f.t_f > f.bound {
            last = Rejection::DelayBound { delay: arrive - f.t_f };
            continue;
        }
        match replay(plan, ledger, f, &immediate_hops(&path, dep)) {
            Ok(r) => return Ok(r),
            Err(e) => last = e,
        }
    }
    Err(last)
}
