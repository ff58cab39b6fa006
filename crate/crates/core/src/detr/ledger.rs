use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::contact_plan::{ContactPlan, SatId};
use crate::time::Micros;

/// A single resource touched by a reservation, on the global cycle grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reservation {
    Link { from: SatId, to: SatId, cycle: u64 },
    Buffer { node: SatId, cycle: u64 },
}

impl fmt::Display for Reservation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reservation::Link { from, to, cycle } => write!(f, "link u{from}->u{to} in global cycle {cycle}"),
            Reservation::Buffer { node, cycle } => write!(f, "buffer of u{node} in global cycle {cycle}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LedgerError {
    #[error("cycle length must be positive")]
    ZeroCycle,
    #[error("reservation conflict on {what}: requested {requested} Mb, residual {residual} Mb")]
    Shortfall { what: Reservation, requested: f64, residual: f64 },
    #[error("invalid reservation amount {0}")]
    InvalidAmount(f64),
}

/// Residual per-(link, cycle) transmission volume and per-(node, cycle)
/// buffer, shared by all demands routed against one plan.
#[derive(Debug, Clone)]
pub struct ResourceLedger<'p> {
    plan: &'p ContactPlan,
    cycle_len: Micros,
    links: BTreeMap<(SatId, SatId, u64), f64>,
    buffers: BTreeMap<(SatId, u64), f64>,
}

impl<'p> ResourceLedger<'p> {
    pub fn new(plan: &'p ContactPlan, cycle_len: Micros) -> Result<Self, LedgerError> {
        if cycle_len == 0 {
            return Err(LedgerError::ZeroCycle);
        }
        Ok(Self { plan, cycle_len, links: BTreeMap::new(), buffers: BTreeMap::new() })
    }

    pub fn plan(&self) -> &'p ContactPlan {
        self.plan
    }

    pub fn cycle_len(&self) -> Micros {
        self.cycle_len
    }

    /// Global cycle containing absolute time `t`.
    pub fn cycle_at(&self, t: Micros) -> u64 {
        t / self.cycle_len
    }

    pub fn initial(&self, r: Reservation) -> f64 {
        match r {
            Reservation::Link { from, to, cycle } => {
                let a = cycle * self.cycle_len;
                self.plan.volume(from, to, a, a + self.cycle_len)
            }
            Reservation::Buffer { .. } => self.plan.buffer_mb(),
        }
    }

    pub fn used(&self, r: Reservation) -> f64 {
        match r {
            Reservation::Link { from, to, cycle } => self.links.get(&(from, to, cycle)).copied(),
            Reservation::Buffer { node, cycle } => self.buffers.get(&(node, cycle)).copied(),
        }
        .unwrap_or(0.0)
    }

    pub fn residual(&self, r: Reservation) -> f64 {
        let left = self.initial(r) - self.used(r);
        if left > 0.0 {
            left
        } else {
            0.0
        }
    }

    pub fn link_residual(&self, from: SatId, to: SatId, cycle: u64) -> f64 {
        self.residual(Reservation::Link { from, to, cycle })
    }

    pub fn buffer_residual(&self, node: SatId, cycle: u64) -> f64 {
        self.residual(Reservation::Buffer { node, cycle })
    }

    pub fn reserve(&mut self, what: Reservation, amount: f64) -> Result<(), LedgerError> {
        self.reserve_all(&[(what, amount)])
    }

    fn totals(&self, items: &[(Reservation, f64)]) -> Result<BTreeMap<Reservation, f64>, LedgerError> {
        let mut total: BTreeMap<Reservation, f64> = BTreeMap::new();
        for &(r, amount) in items {
            if !(amount.is_finite() && amount >= 0.0) {
                return Err(LedgerError::InvalidAmount(amount));
            }
            *total.entry(r).or_insert(0.0) += amount;
        }
        for (&what, &requested) in &total {
            let residual = self.residual(what);
            if residual < requested {
                return Err(LedgerError::Shortfall { what, requested, residual });
            }
        }
        Ok(total)
    }

    /// Whether [`reserve_all`](Self::reserve_all) would succeed.
    pub fn check_all(&self, items: &[(Reservation, f64)]) -> Result<(), LedgerError> {
        self.totals(items).map(|_| ())
    }

    /// Applies every reservation or none. Repeated keys are summed first.
    pub fn reserve_all(&mut self, items: &[(Reservation, f64)]) -> Result<(), LedgerError> {
        let total = self.totals(items)?;
        for (what, amount) in total {
            match what {
                Reservation::Link { from, to, cycle } => *self.links.entry((from, to, cycle)).or_insert(0.0) += amount,
                Reservation::Buffer { node, cycle } => *self.buffers.entry((node, cycle)).or_insert(0.0) += amount,
            }
        }
        Ok(())
    }

    /// All resources with a nonzero reservation.
    pub fn touched(&self) -> Vec<Reservation> {
        let links = self.links.keys().map(|&(from, to, cycle)| Reservation::Link { from, to, cycle });
        let bufs = self.buffers.keys().map(|&(node, cycle)| Reservation::Buffer { node, cycle });
        links.chain(bufs).collect()
    }
}
