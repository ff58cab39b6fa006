//! Time-critical traffic demands `{u_a, u_z, t_f, T_f, A_f, B_f}`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::contact_plan::{ContactPlan, SatId};
use crate::time::{ms, Micros};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemandError {
    #[error("demand {0}: source and sink must differ")]
    SameEndpoints(u32),
    #[error("demand {0}: period must be positive")]
    EmptyPeriod(u32),
    #[error("demand {0}: packet size must be positive and finite")]
    InvalidSize(u32),
    #[error("demand {0}: delay bound must satisfy 0 < B_f <= T_f")]
    InvalidBound(u32),
    #[error("demand {0}: endpoint outside the plan")]
    UnknownNode(u32),
    #[error("demand {0}: [t_f, t_f + T_f] exceeds the plan horizon")]
    OutsideHorizon(u32),
    #[error("plan horizon is shorter than the traffic period")]
    HorizonTooShort,
    #[error("invalid generator argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficDemand {
    pub id: u32,
    pub source: SatId,
    pub sink: SatId,
    /// Earliest sending time, relative to the plan epoch.
    pub t_f: Micros,
    pub period: Micros,
    /// Packet size in Mb.
    pub size_mb: f64,
    /// End-to-end delay bound.
    pub bound: Micros,
}

impl TrafficDemand {
    pub fn new(
        id: u32,
        source: SatId,
        sink: SatId,
        t_f: Micros,
        period: Micros,
        size_mb: f64,
        bound: Micros,
    ) -> Result<Self, DemandError> {
        let d = Self { id, source, sink, t_f, period, size_mb, bound };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), DemandError> {
        if self.source == self.sink {
            return Err(DemandError::SameEndpoints(self.id));
        }
        if self.period == 0 {
            return Err(DemandError::EmptyPeriod(self.id));
        }
        if !(self.size_mb.is_finite() && self.size_mb > 0.0) {
            return Err(DemandError::InvalidSize(self.id));
        }
        if self.bound == 0 || self.bound > self.period {
            return Err(DemandError::InvalidBound(self.id));
        }
        Ok(())
    }

    pub fn check_against(&self, plan: &ContactPlan) -> Result<(), DemandError> {
        self.validate()?;
        if self.source >= plan.node_count() || self.sink >= plan.node_count() {
            return Err(DemandError::UnknownNode(self.id));
        }
        if self.t_f + self.period > plan.horizon() {
            return Err(DemandError::OutsideHorizon(self.id));
        }
        Ok(())
    }
}

/// Parameters of the random workload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandConfig {
    pub period_ms: u64,
    pub size_mb: (f64, f64),
    pub bound_ms: (u64, u64),
    /// `t_f` is drawn on this grid (the global cycle length).
    pub quantum_ms: u64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        Self { period_ms: 100, size_mb: (2.0, 10.0), bound_ms: (20, 100), quantum_ms: 10 }
    }
}

/// Draws `n` demands in generation order, ids `0..n`. Drawing `m > n`
/// demands with the same seed yields the same first `n`.
pub fn draw_demands(
    n: usize,
    plan: &ContactPlan,
    cfg: &DemandConfig,
    seed: u64,
) -> Result<Vec<TrafficDemand>, DemandError> {
    let nodes = plan.node_count();
    if nodes < 2 {
        return Err(DemandError::InvalidArgument("plan needs at least 2 nodes"));
    }
    if cfg.period_ms == 0 || cfg.quantum_ms == 0 {
        return Err(DemandError::InvalidArgument("period and quantum must be positive"));
    }
    let (s_lo, s_hi) = cfg.size_mb;
    if !(s_lo.is_finite() && s_hi.is_finite() && s_lo > 0.0 && s_lo <= s_hi) {
        return Err(DemandError::InvalidArgument("empty or invalid size range"));
    }
    let (b_lo, b_hi) = cfg.bound_ms;
    if b_lo == 0 || b_lo > b_hi || b_hi > cfg.period_ms {
        return Err(DemandError::InvalidArgument("delay bounds must satisfy 0 < lo <= hi <= period"));
    }
    let period = ms(cfg.period_ms);
    if plan.horizon() < period {
        return Err(DemandError::HorizonTooShort);
    }
    let quantum = ms(cfg.quantum_ms);
    let slots = (plan.horizon() - period) / quantum;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for id in 0..n {
        let source = rng.gen_range(0..nodes);
        let mut sink = rng.gen_range(0..nodes - 1);
        if sink >= source {
            sink += 1;
        }
        let t_f = rng.gen_range(0..=slots) * quantum;
        let size_mb = rng.gen_range(s_lo..=s_hi);
        let bound = ms(rng.gen_range(b_lo..=b_hi));
        out.push(TrafficDemand { id: id as u32, source, sink, t_f, period, size_mb, bound });
    }
    Ok(out)
}

/// Online arrival order: ascending `t_f`, ties by id.
pub fn sort_by_arrival(demands: &mut [TrafficDemand]) {
    demands.sort_by_key(|d| (d.t_f, d.id));
}

pub fn generate_demands(
    n: usize,
    plan: &ContactPlan,
    cfg: &DemandConfig,
    seed: u64,
) -> Result<Vec<TrafficDemand>, DemandError> {
    let mut out = draw_demands(n, plan, cfg, seed)?;
    sort_by_arrival(&mut out);
    Ok(out)
}
