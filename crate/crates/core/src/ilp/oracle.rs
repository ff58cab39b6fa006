use alloc::vec;
use alloc::vec::Vec;

use crate::detr::{HopEdge, PathHop, TimeFeaturedPath};
use crate::eteg::{arrival_cycle, EdgeIx, EdgeKind, Eteg, EtegNode, NodeIx};
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::IlpError;

/// Largest `N * H` accepted by [`brute_force_min_delay`].
pub const ENUMERATION_BUDGET: usize = 64;

struct Dfs<'g> {
    g: &'g Eteg,
    size_mb: f64,
    bound: Micros,
    visited: Vec<bool>,
    best: Option<Micros>,
}

impl Dfs<'_> {
    fn go(&mut self, u: NodeIx, d: Micros) {
        let g = self.g;
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            if edge.capacity < self.size_mb {
                continue;
            }
            let nd = d + edge.latency;
            if nd > self.bound || self.best.is_some_and(|b| nd >= b) {
                continue;
            }
            if edge.kind == EdgeKind::Aggregation {
                self.best = Some(nd);
                continue;
            }
            let Some(r) = arrival_cycle(d, edge.latency, g.grid()) else { continue };
            let v = g.index(g.node(edge.head).sat().expect("satellite head"), r);
            if self.visited[v] {
                continue;
            }
            self.visited[v] = true;
            self.go(v, nd);
            self.visited[v] = false;
        }
    }
}

/// Minimum delay over all node-simple time-featured paths whose edges all
/// carry at least `A_f`, by exhaustive depth-first enumeration.
pub fn brute_force_min_delay(eteg: &Eteg, f: &TrafficDemand) -> Result<Option<Micros>, IlpError> {
    if eteg.demand() != f {
        return Err(IlpError::DemandMismatch);
    }
    let size = eteg.sat_count() * eteg.grid().cycles() as usize;
    if size > ENUMERATION_BUDGET {
        return Err(IlpError::EnumerationBudget { size, limit: ENUMERATION_BUDGET });
    }
    let mut dfs = Dfs { g: eteg, size_mb: f.size_mb, bound: f.bound, visited: vec![false; eteg.node_count()], best: None };
    let s = eteg.source();
    dfs.visited[s] = true;
    dfs.go(s, 0);
    Ok(dfs.best)
}

/// Why a set of selected edges is not a single time-featured walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkBreak {
    /// No selected edge leaves the node reached so far.
    Stuck { at: EtegNode, delay: Micros },
    /// More than one selected edge leaves the same node.
    Branch { at: EtegNode },
    /// The walk reached the sink but some selected edges were never used.
    Leftover { edges: Vec<EdgeIx> },
    /// A traversal lands past the last cycle.
    PastHorizon { edge: EdgeIx },
}

/// Orders `selected` into a walk from `u_a^1` to the sink, landing each
/// traversal at its arrival cycle.
pub fn route_as_walk(eteg: &Eteg, selected: &[EdgeIx]) -> Result<TimeFeaturedPath, WalkBreak> {
    let mut used = vec![false; selected.len()];
    let mut at = eteg.source();
    let mut d: Micros = 0;
    let mut hops = vec![PathHop { node: eteg.node(at), edge: None, delay: 0 }];
    while at != eteg.sink() {
        let mut out = selected.iter().enumerate().filter(|&(k, &e)| !used[k] && eteg.edge(e).tail == at);
        let Some((k, &e)) = out.next() else {
            return Err(WalkBreak::Stuck { at: eteg.node(at), delay: d });
        };
        if out.next().is_some() {
            return Err(WalkBreak::Branch { at: eteg.node(at) });
        }
        used[k] = true;
        let edge = eteg.edge(e);
        at = match edge.kind {
            EdgeKind::Aggregation => edge.head,
            _ => {
                let r = arrival_cycle(d, edge.latency, eteg.grid()).ok_or(WalkBreak::PastHorizon { edge: e })?;
                eteg.index(eteg.node(edge.head).sat().expect("satellite head"), r)
            }
        };
        d += edge.latency;
        hops.push(PathHop { node: eteg.node(at), edge: Some(HopEdge::from_eteg(eteg, edge)), delay: d });
    }
    let left: Vec<EdgeIx> = selected.iter().zip(&used).filter(|(_, &u)| !u).map(|(&e, _)| e).collect();
    if left.is_empty() {
        Ok(TimeFeaturedPath { hops, total_delay: d })
    } else {
        Err(WalkBreak::Leftover { edges: left })
    }
}
