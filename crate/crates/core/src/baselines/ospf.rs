use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::contact_plan::{ContactPlan, SatId};
use crate::detr::ResourceLedger;
use crate::traffic::TrafficDemand;

use super::replay::{immediate_hops, replay, StaticRoute};
use super::snapshot::{snapshot_at, Snapshot};
use super::Rejection;

/// Minimum-hop path on `snap`; among equal-hop paths the lexicographically
/// smallest node sequence.
pub fn min_hop_path(snap: &Snapshot, from: SatId, to: SatId) -> Option<Vec<SatId>> {
    let n = snap.adjacency.len();
    let mut rev: Vec<Vec<SatId>> = vec![Vec::new(); n];
    for (u, adj) in snap.adjacency.iter().enumerate() {
        for l in adj {
            rev[l.to].push(u);
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut q = VecDeque::from([to]);
    while let Some(v) = q.pop_front() {
        for &u in &rev[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    if dist[from] == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut at = from;
    while at != to {
        at = snap.adjacency[at].iter().map(|l| l.to).find(|&w| dist[w] + 1 == dist[at])?;
        path.push(at);
    }
    Some(path)
}

/// Min-hop routing on the snapshot containing `t_f`, departing immediately.
pub fn ospf_route(
    plan: &ContactPlan,
    snaps: &[Snapshot],
    ledger: &ResourceLedger<'_>,
    f: &TrafficDemand,
) -> Result<StaticRoute, Rejection> {
    f.check_against(plan).map_err(Rejection::Invalid)?;
    let k = snapshot_at(snaps, f.t_f).ok_or(Rejection::NoPath)?;
    let path = min_hop_path(&snaps[k], f.source, f.sink).ok_or(Rejection::NoPath)?;
    replay(plan, ledger, f, &immediate_hops(&path, f.t_f))
}
