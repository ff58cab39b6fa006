use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::eteg::{CycleGrid, EdgeKind, Eteg, EtegEdge, EtegNode};
use crate::time::Micros;
use crate::traffic::TrafficDemand;

use super::ledger::{LedgerError, Reservation, ResourceLedger};

/// The ETEG edge used to reach a hop. `head` is the edge's own head, which
/// may sit in an earlier cycle than the hop node for cross-cycle traversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopEdge {
    pub kind: EdgeKind,
    pub tail: EtegNode,
    pub head: EtegNode,
    pub capacity: f64,
    pub latency: Micros,
}

impl HopEdge {
    pub fn from_eteg(g: &Eteg, e: &EtegEdge) -> Self {
        Self { kind: e.kind, tail: g.node(e.tail), head: g.node(e.head), capacity: e.capacity, latency: e.latency }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathHop {
    pub node: EtegNode,
    /// `None` on the first hop.
    pub edge: Option<HopEdge>,
    /// Cumulative delay on arrival.
    pub delay: Micros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeFeaturedPath {
    pub hops: Vec<PathHop>,
    pub total_delay: Micros,
}

impl TimeFeaturedPath {
    pub fn nodes(&self) -> impl Iterator<Item = EtegNode> + '_ {
        self.hops.iter().map(|h| h.node)
    }

    pub fn edges(&self) -> impl Iterator<Item = &HopEdge> + '_ {
        self.hops.iter().filter_map(|h| h.edge.as_ref())
    }

    /// Satellites visited, with consecutive duplicates (storage) collapsed.
    pub fn satellites(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for s in self.nodes().filter_map(|n| n.sat()) {
            if out.last() != Some(&s) {
                out.push(s);
            }
        }
        out
    }

    /// `u0^1>u2^2>...>sink`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, n) in self.nodes().enumerate() {
            if k > 0 {
                s.push('>');
            }
            fmt::write(&mut s, format_args!("{n}")).expect("writing to a String");
        }
        s
    }

    /// Ledger entries charged by this path.
    pub fn reservations(&self, grid: &CycleGrid, size_mb: f64) -> Vec<(Reservation, f64)> {
        self.edges()
            .filter_map(|e| match (e.kind, e.tail, e.head) {
                (EdgeKind::Transmission, EtegNode::Sat { sat: from, cycle }, EtegNode::Sat { sat: to, .. }) => {
                    Some(Reservation::Link { from, to, cycle: grid.global_cycle(cycle) })
                }
                (EdgeKind::Storage, EtegNode::Sat { sat, cycle }, _) => {
                    Some(Reservation::Buffer { node: sat, cycle: grid.global_cycle(cycle) })
                }
                _ => None,
            })
            .map(|r| (r, size_mb))
            .collect()
    }
}

impl fmt::Display for TimeFeaturedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathViolation {
    Empty,
    WrongSource(EtegNode),
    WrongSink(EtegNode),
    NonMonotoneCycles { at: usize },
    MissingEdge { at: usize },
    UnknownEdge { at: usize },
    Capacity { at: usize, capacity: f64, required: f64 },
    DelayMismatch { at: usize },
    DelayBound { delay: Micros, bound: Micros },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathViolation::Empty => f.write_str("empty path"),
            PathViolation::WrongSource(n) => write!(f, "path starts at {n}"),
            PathViolation::WrongSink(n) => write!(f, "path ends at {n}"),
            PathViolation::NonMonotoneCycles { at } => write!(f, "non-monotone cycles at hop {at}"),
            PathViolation::MissingEdge { at } => write!(f, "no edge into hop {at}"),
            PathViolation::UnknownEdge { at } => write!(f, "edge into hop {at} not in graph"),
            PathViolation::Capacity { at, capacity, required } => {
                write!(f, "capacity {capacity} Mb below {required} Mb at hop {at}")
            }
            PathViolation::DelayMismatch { at } => write!(f, "cumulative delay inconsistent at hop {at}"),
            PathViolation::DelayBound { delay, bound } => write!(f, "delay bound exceeded: {delay} us > {bound} us"),
        }
    }
}

/// Checks cycle ordering, edge existence and capacity, cumulative delay,
/// endpoints and the delay bound. Returns every violation found.
pub fn validate_path(path: &TimeFeaturedPath, eteg: &Eteg, f: &TrafficDemand) -> Result<(), Vec<PathViolation>> {
    let mut v = Vec::new();
    let Some(first) = path.hops.first() else {
        return Err(alloc::vec![PathViolation::Empty]);
    };
    let source = EtegNode::Sat { sat: f.source, cycle: 1 };
    if first.node != source {
        v.push(PathViolation::WrongSource(first.node));
    }
    let last = path.hops.last().expect("nonempty").node;
    if last != EtegNode::Sink {
        v.push(PathViolation::WrongSink(last));
    }
    let mut acc: Micros = 0;
    for (at, pair) in path.hops.windows(2).enumerate() {
        let (prev, hop) = (pair[0], pair[1]);
        let at = at + 1;
        if let (Some(h), Some(w)) = (prev.node.cycle(), hop.node.cycle()) {
            if w < h {
                v.push(PathViolation::NonMonotoneCycles { at });
            }
        }
        let Some(e) = hop.edge else {
            v.push(PathViolation::MissingEdge { at });
            continue;
        };
        let lands = e.tail == prev.node
            && e.head.sat() == hop.node.sat()
            && match (e.head.cycle(), hop.node.cycle()) {
                (Some(l), Some(w)) => l <= w,
                (None, None) => true,
                _ => false,
            };
        let known = eteg
            .find_edge(eteg.index_of(e.tail), eteg.index_of(e.head))
            .map(|ix| eteg.edge(ix))
            .is_some_and(|g| g.kind == e.kind && g.latency == e.latency && g.capacity == e.capacity);
        if !lands {
            v.push(PathViolation::MissingEdge { at });
        } else if !known {
            v.push(PathViolation::UnknownEdge { at });
        }
        if e.capacity < f.size_mb {
            v.push(PathViolation::Capacity { at, capacity: e.capacity, required: f.size_mb });
        }
        acc += e.latency;
        if hop.delay != acc {
            v.push(PathViolation::DelayMismatch { at });
        }
    }
    if path.total_delay != acc {
        v.push(PathViolation::DelayMismatch { at: path.hops.len() - 1 });
    }
    if acc > f.bound {
        v.push(PathViolation::DelayBound { delay: acc, bound: f.bound });
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Charges `A_f` on every transmission and storage edge of `path`. Atomic.
pub fn reserve(
    ledger: &mut ResourceLedger<'_>,
    path: &TimeFeaturedPath,
    f: &TrafficDemand,
    grid: &CycleGrid,
) -> Result<(), LedgerError> {
    ledger.reserve_all(&path.reservations(grid, f.size_mb))
}
