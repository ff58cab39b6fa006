//! Extended time-expanded graph.
//!
//! Each satellite is replicated once per cycle of the demand's planning
//! horizon (`u_i^h`). Transmission edges connect satellites within one
//! cycle, storage edges carry a packet from `u_i^h` to `u_i^{h+1}`, and
//! aggregation edges lead from the sink copies `u_z^h`, `h <= ceil(B_f/|τ|)`,
//! into a virtual sink. Cycles are 1-based: relative time `t` lies in cycle
//! `floor(t/|τ|) + 1`.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::contact_plan::{ContactPlan, SatId};
use crate::detr::ResourceLedger;
use crate::time::Micros;
use crate::traffic::{DemandError, TrafficDemand};

pub type NodeIx = usize;
pub type EdgeIx = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EtegError {
    #[error("cycle length must be positive")]
    ZeroCycle,
    #[error("demand planning window [{start}, {end}) us exceeds the plan horizon")]
    OutsideHorizon { start: Micros, end: Micros },
    #[error("ledger cycle length {ledger} us differs from {requested} us")]
    LedgerGrid { ledger: Micros, requested: Micros },
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error("satellite {0} is outside the graph")]
    UnknownSatellite(SatId),
    #[error("cycle {0} is outside 1..=H")]
    UnknownCycle(u32),
    #[error("duplicate {0:?} edge")]
    DuplicateEdge(EdgeKind),
    #[error("aggregation edge at cycle {cycle} beyond ceil(B_f/|τ|) = {limit}")]
    AggregationBeyondBound { cycle: u32, limit: u32 },
    #[error("negative or non-finite capacity")]
    InvalidCapacity,
}

/// The cycle structure of one planning horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleGrid {
    cycle_len: Micros,
    origin: Micros,
    cycles: u32,
}

impl CycleGrid {
    /// `H = ceil(period / cycle_len)` cycles starting at `origin`.
    pub fn new(cycle_len: Micros, origin: Micros, period: Micros) -> Result<Self, EtegError> {
        if cycle_len == 0 {
            return Err(EtegError::ZeroCycle);
        }
        let cycles = period.div_ceil(cycle_len).max(1) as u32;
        Ok(Self { cycle_len, origin, cycles })
    }

    /// Grid for a demand, anchored on the global cycle grid at or after `t_f`.
    pub fn for_demand(demand: &TrafficDemand, cycle_len: Micros) -> Result<Self, EtegError> {
        if cycle_len == 0 {
            return Err(EtegError::ZeroCycle);
        }
        Self::new(cycle_len, demand.t_f.div_ceil(cycle_len) * cycle_len, demand.period)
    }

    pub fn cycle_len(&self) -> Micros {
        self.cycle_len
    }

    pub fn origin(&self) -> Micros {
        self.origin
    }

    /// `H`.
    pub fn cycles(&self) -> u32 {
        self.cycles
    }

    pub fn span(&self) -> Micros {
        self.cycles as Micros * self.cycle_len
    }

    /// Absolute `[start, end)` of cycle `h`.
    pub fn bounds(&self, h: u32) -> (Micros, Micros) {
        let start = self.origin + (h as Micros - 1) * self.cycle_len;
        (start, start + self.cycle_len)
    }

    /// Index of cycle `h` on the epoch-anchored global grid (0-based).
    pub fn global_cycle(&self, h: u32) -> u64 {
        self.origin / self.cycle_len + h as u64 - 1
    }

    /// Cycle containing relative time `t`, or `None` past the horizon.
    pub fn cycle_of(&self, t: Micros) -> Option<u32> {
        let h = t / self.cycle_len + 1;
        (h <= self.cycles as u64).then_some(h as u32)
    }

    /// `ceil(B_f / |τ|)`: number of sink copies with an aggregation edge.
    pub fn aggregation_limit(&self, bound: Micros) -> u32 {
        (bound.div_ceil(self.cycle_len) as u32).min(self.cycles)
    }
}

/// Cycle reached after traversing latency `l` from relative time `d`:
/// `floor((d + l)/|τ|) + 1`, or `None` when that falls beyond cycle `H`.
pub fn arrival_cycle(d: Micros, l: Micros, grid: &CycleGrid) -> Option<u32> {
    grid.cycle_of(d + l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EtegNode {
    Sat { sat: SatId, cycle: u32 },
    Sink,
}

impl EtegNode {
    pub fn cycle(&self) -> Option<u32> {
        match *self {
            EtegNode::Sat { cycle, .. } => Some(cycle),
            EtegNode::Sink => None,
        }
    }

    pub fn sat(&self) -> Option<SatId> {
        match *self {
            EtegNode::Sat { sat, .. } => Some(sat),
            EtegNode::Sink => None,
        }
    }
}

impl fmt::Display for EtegNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtegNode::Sat { sat, cycle } => write!(f, "u{sat}^{cycle}"),
            EtegNode::Sink => f.write_str("sink"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Transmission,
    Storage,
    Aggregation,
}

impl EdgeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeKind::Transmission => "transmission",
            EdgeKind::Storage => "storage",
            EdgeKind::Aggregation => "aggregation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtegEdge {
    pub tail: NodeIx,
    pub head: NodeIx,
    pub kind: EdgeKind,
    /// Mb.
    pub capacity: f64,
    pub latency: Micros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eteg {
    grid: CycleGrid,
    sats: usize,
    demand: TrafficDemand,
    edges: Vec<EtegEdge>,
    out: Vec<Vec<EdgeIx>>,
}

impl Eteg {
    pub fn grid(&self) -> &CycleGrid {
        &self.grid
    }

    pub fn demand(&self) -> &TrafficDemand {
        &self.demand
    }

    pub fn sat_count(&self) -> usize {
        self.sats
    }

    /// `N * H + 1`.
    pub fn node_count(&self) -> usize {
        self.sats * self.grid.cycles as usize + 1
    }

    pub fn sink(&self) -> NodeIx {
        self.sats * self.grid.cycles as usize
    }

    /// `u_a^1`.
    pub fn source(&self) -> NodeIx {
        self.index(self.demand.source, 1)
    }

    pub fn index(&self, sat: SatId, cycle: u32) -> NodeIx {
        debug_assert!(sat < self.sats && cycle >= 1 && cycle <= self.grid.cycles);
        (cycle as usize - 1) * self.sats + sat
    }

    pub fn index_of(&self, node: EtegNode) -> NodeIx {
        match node {
            EtegNode::Sat { sat, cycle } => self.index(sat, cycle),
            EtegNode::Sink => self.sink(),
        }
    }

    pub fn node(&self, ix: NodeIx) -> EtegNode {
        if ix == self.sink() {
            EtegNode::Sink
        } else {
            EtegNode::Sat { sat: ix % self.sats, cycle: (ix / self.sats) as u32 + 1 }
        }
    }

    pub fn edges(&self) -> &[EtegEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeIx) -> &EtegEdge {
        &self.edges[e]
    }

    pub fn out_edges(&self, ix: NodeIx) -> &[EdgeIx] {
        &self.out[ix]
    }

    pub fn find_edge(&self, tail: NodeIx, head: NodeIx) -> Option<EdgeIx> {
        self.out[tail].iter().copied().find(|&e| self.edges[e].head == head)
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }
}

/// Incremental constructor enforcing the graph invariants.
#[derive(Debug, Clone)]
pub struct EtegBuilder {
    graph: Eteg,
}

impl EtegBuilder {
    pub fn new(sats: usize, grid: CycleGrid, demand: TrafficDemand) -> Result<Self, EtegError> {
        demand.validate()?;
        for s in [demand.source, demand.sink] {
            if s >= sats {
                return Err(EtegError::UnknownSatellite(s));
            }
        }
        let nodes = sats * grid.cycles as usize + 1;
        Ok(Self {
            graph: Eteg {
                grid,
                sats,
                demand,
                edges: Vec::new(),
                out: (0..nodes).map(|_| Vec::new()).collect(),
            },
        })
    }

    fn check(&self, sat: SatId, cycle: u32) -> Result<(), EtegError> {
        if sat >= self.graph.sats {
            return Err(EtegError::UnknownSatellite(sat));
        }
        if cycle == 0 || cycle > self.graph.grid.cycles {
            return Err(EtegError::UnknownCycle(cycle));
        }
        Ok(())
    }

    fn push(&mut self, edge: EtegEdge) -> Result<EdgeIx, EtegError> {
        if !(edge.capacity.is_finite() && edge.capacity >= 0.0) {
            return Err(EtegError::InvalidCapacity);
        }
        if self.graph.find_edge(edge.tail, edge.head).is_some() {
            return Err(EtegError::DuplicateEdge(edge.kind));
        }
        let ix = self.graph.edges.len();
        self.graph.out[edge.tail].push(ix);
        self.graph.edges.push(edge);
        Ok(ix)
    }

    /// `(u_i^h, u_j^h)`.
    pub fn transmission(
        &mut self,
        from: SatId,
        to: SatId,
        cycle: u32,
        capacity: f64,
        latency: Micros,
    ) -> Result<EdgeIx, EtegError> {
        self.check(from, cycle)?;
        self.check(to, cycle)?;
        if from == to {
            return Err(EtegError::UnknownSatellite(to));
        }
        let (tail, head) = (self.graph.index(from, cycle), self.graph.index(to, cycle));
        self.push(EtegEdge { tail, head, kind: EdgeKind::Transmission, capacity, latency })
    }

    /// `(u_i^h, u_i^{h+1})` with latency `|τ|`.
    pub fn storage(&mut self, sat: SatId, cycle: u32, capacity: f64) -> Result<EdgeIx, EtegError> {
        self.check(sat, cycle)?;
        self.check(sat, cycle + 1)?;
        let (tail, head) = (self.graph.index(sat, cycle), self.graph.index(sat, cycle + 1));
        let latency = self.graph.grid.cycle_len;
        self.push(EtegEdge { tail, head, kind: EdgeKind::Storage, capacity, latency })
    }

    /// `(u_z^h, ŝ)` with capacity `A_f` and zero latency.
    pub fn aggregation(&mut self, cycle: u32) -> Result<EdgeIx, EtegError> {
        let d = self.graph.demand;
        self.check(d.sink, cycle)?;
        let limit = self.graph.grid.aggregation_limit(d.bound);
        if cycle > limit {
            return Err(EtegError::AggregationBeyondBound { cycle, limit });
        }
        let tail = self.graph.index(d.sink, cycle);
        let head = self.graph.sink();
        self.push(EtegEdge { tail, head, kind: EdgeKind::Aggregation, capacity: d.size_mb, latency: 0 })
    }

    pub fn build(self) -> Eteg {
        self.graph
    }
}

/// Builds the ETEG of `demand` against the residual resources in `ledger`.
pub fn build_eteg(
    plan: &ContactPlan,
    ledger: &ResourceLedger<'_>,
    demand: &TrafficDemand,
    cycle_len: Micros,
) -> Result<Eteg, EtegError> {
    demand.check_against(plan)?;
    if ledger.cycle_len() != cycle_len {
        return Err(EtegError::LedgerGrid { ledger: ledger.cycle_len(), requested: cycle_len });
    }
    let grid = CycleGrid::for_demand(demand, cycle_len)?;
    let end = grid.origin() + grid.span();
    if end > plan.horizon() {
        return Err(EtegError::OutsideHorizon { start: grid.origin(), end });
    }
    let n = plan.node_count();
    let mut b = EtegBuilder::new(n, grid, *demand)?;
    let links: Vec<(SatId, SatId)> = plan.links().collect();
    for h in 1..=grid.cycles() {
        let (t0, t1) = grid.bounds(h);
        for &(i, j) in &links {
            // first contact touching the cycle supplies the latency
            if let Some(c) = plan.contacts_between(i, j).find(|c| c.overlaps(t0, t1)) {
                let cap = cycle_capacity(ledger, i, j, h, &grid);
                b.transmission(i, j, h, cap, c.delay)?;
            }
        }
        if h < grid.cycles() {
            for i in 0..n {
                b.storage(i, h, ledger.buffer_residual(i, grid.global_cycle(h)))?;
            }
        }
    }
    for h in 1..=grid.aggregation_limit(demand.bound) {
        b.aggregation(h)?;
    }
    Ok(b.build())
}

/// Residual capacity of `i -> j` in cycle `h`: `∫_{τ_h} W(t) dt` minus
/// reservations, floored at zero.
pub fn cycle_capacity(ledger: &ResourceLedger<'_>, i: SatId, j: SatId, h: u32, grid: &CycleGrid) -> f64 {
    debug_assert_eq!(ledger.cycle_len(), grid.cycle_len());
    ledger.link_residual(i, j, grid.global_cycle(h))
}
