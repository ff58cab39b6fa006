use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use thiserror::Error;

use crate::eteg::{arrival_cycle, EdgeIx, EdgeKind, Eteg, EtegNode, NodeIx};
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::path::{HopEdge, PathHop, TimeFeaturedPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("graph was built for demand {built}, queried with {queried}")]
    DemandMismatch { built: u32, queried: u32 },
}

/// Heap key: `(d, cycle, satellite, node)`; the sink sorts after every
/// satellite copy at equal `d`.
type Key = (Micros, u32, usize, NodeIx);

/// Labels of Alg. 1, advanced one pop at a time.
#[derive(Debug, Clone)]
pub struct DijkstraState<'g> {
    eteg: &'g Eteg,
    size_mb: f64,
    bound: Micros,
    d: Vec<Option<Micros>>,
    p: Vec<Option<(NodeIx, EdgeIx)>>,
    settled: Vec<bool>,
    queue: BinaryHeap<Reverse<Key>>,
    done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// A node was settled and its out-edges relaxed.
    Settled(NodeIx),
    /// The sink was popped.
    Reached,
    /// The queue ran dry without reaching the sink.
    Exhausted,
}

impl<'g> DijkstraState<'g> {
    pub fn new(eteg: &'g Eteg, f: &TrafficDemand) -> Result<Self, SearchError> {
        let built = eteg.demand();
        if built != f {
            return Err(SearchError::DemandMismatch { built: built.id, queried: f.id });
        }
        let n = eteg.node_count();
        let mut s = Self {
            eteg,
            size_mb: f.size_mb,
            bound: f.bound,
            d: vec![None; n],
            p: vec![None; n],
            settled: vec![false; n],
            queue: BinaryHeap::new(),
            done: false,
        };
        let a = eteg.source();
        s.d[a] = Some(0);
        s.queue.push(Reverse(s.key(a, 0)));
        Ok(s)
    }

    fn key(&self, ix: NodeIx, d: Micros) -> Key {
        match self.eteg.node(ix) {
            EtegNode::Sat { sat, cycle } => (d, cycle, sat, ix),
            EtegNode::Sink => (d, u32::MAX, usize::MAX, ix),
        }
    }

    /// Current label of `node`; `None` is `+∞`.
    pub fn label(&self, node: EtegNode) -> Option<Micros> {
        self.d[self.eteg.index_of(node)]
    }

    pub fn predecessor(&self, node: EtegNode) -> Option<EtegNode> {
        self.p[self.eteg.index_of(node)].map(|(u, _)| self.eteg.node(u))
    }

    pub fn is_settled(&self, node: EtegNode) -> bool {
        self.settled[self.eteg.index_of(node)]
    }

    pub fn step(&mut self) -> Step {
        if self.done {
            return if self.settled[self.eteg.sink()] { Step::Reached } else { Step::Exhausted };
        }
        let g = self.eteg;
        let u = loop {
            let Some(Reverse((d, _, _, u))) = self.queue.pop() else {
                self.done = true;
                return Step::Exhausted;
            };
            if !self.settled[u] && self.d[u] == Some(d) {
                break u;
            }
        };
        self.settled[u] = true;
        if u == g.sink() {
            self.done = true;
            return Step::Reached;
        }
        let du = self.d[u].expect("settled nodes are labelled");
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            if edge.capacity < self.size_mb {
                continue;
            }
            let nd = du + edge.latency;
            let landing = match edge.kind {
                EdgeKind::Aggregation => {
                    if nd > self.bound {
                        continue;
                    }
                    edge.head
                }
                _ => {
                    let Some(r) = arrival_cycle(du, edge.latency, g.grid()) else { continue };
                    let sat = g.node(edge.head).sat().expect("non-aggregation heads are satellites");
                    g.index(sat, r)
                }
            };
            if self.settled[landing] {
                continue;
            }
            if self.d[landing].is_none_or(|old| nd < old) {
                self.d[landing] = Some(nd);
                self.p[landing] = Some((u, e));
                self.queue.push(Reverse(self.key(landing, nd)));
            }
        }
        Step::Settled(u)
    }

    /// Runs to completion and backtracks from the sink.
    pub fn finish(mut self) -> Option<TimeFeaturedPath> {
        loop {
            match self.step() {
                Step::Settled(_) => {}
                Step::Reached => break,
                Step::Exhausted => return None,
            }
        }
        Some(self.backtrack())
    }

    fn backtrack(&self) -> TimeFeaturedPath {
        let g = self.eteg;
        let mut hops = Vec::new();
        let mut cur = g.sink();
        loop {
            let delay = self.d[cur].expect("backtracked nodes are labelled");
            let edge = self.p[cur].map(|(_, e)| HopEdge::from_eteg(g, g.edge(e)));
            hops.push(PathHop { node: g.node(cur), edge, delay });
            match self.p[cur] {
                Some((prev, _)) => cur = prev,
                None => break,
            }
        }
        hops.reverse();
        let total_delay = hops.last().map_or(0, |h| h.delay);
        TimeFeaturedPath { hops, total_delay }
    }
}

/// Minimum-delay time-featured path from `u_a^1` to the virtual sink, using
/// only edges with capacity at least `A_f`. `Ok(None)` means no route.
pub fn shortest_time_featured_path(eteg: &Eteg, f: &TrafficDemand) -> Result<Option<TimeFeaturedPath>, SearchError> {
    Ok(DijkstraState::new(eteg, f)?.finish())
}
