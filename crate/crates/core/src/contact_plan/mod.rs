//! Time-varying topology: satellites, directed contacts with piecewise
//! constant bandwidth, propagation delays and on-board buffers.

mod walker;

pub use walker::{generate_walker_constellation, DelayMode, WalkerConfig};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::time::{overlap, Micros};

/// Index of a satellite in [`ContactPlan::nodes`].
pub type SatId = usize;

/// Satellite buffer from the reference scenario: 500 MB.
pub const DEFAULT_BUFFER_MB: f64 = 4000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("a contact plan needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("contact {contact}: unknown node id {node}")]
    UnknownNode { contact: usize, node: SatId },
    #[error("contact {contact}: self-loop on node {node}")]
    SelfLoop { contact: usize, node: SatId },
    #[error("contact {contact}: t_start must be before t_end")]
    EmptyInterval { contact: usize },
    #[error("contact {contact}: interval exceeds the plan horizon")]
    OutsideHorizon { contact: usize },
    #[error("contact {contact}: bandwidth segments must tile the contact interval")]
    SegmentTiling { contact: usize },
    #[error("contact {contact}: bandwidth must be finite and non-negative")]
    InvalidBandwidth { contact: usize },
    #[error("contact {contact}: propagation delay must be positive")]
    NonPositiveDelay { contact: usize },
    #[error("contacts {first} and {second} overlap on link {from}->{to}")]
    Overlap { from: SatId, to: SatId, first: usize, second: usize },
    #[error("horizon must be positive")]
    EmptyHorizon,
    #[error("buffer capacity must be finite and non-negative")]
    InvalidBuffer,
    #[error("unknown node id {0}")]
    UnknownQueryNode(SatId),
    #[error("time {0} us lies outside the plan horizon")]
    OutOfHorizon(Micros),
    #[error("invalid generator argument: {0}")]
    InvalidArgument(&'static str),
}

/// A `[t_from, t_to)` slice of a contact with constant rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSegment {
    pub t_from: Micros,
    pub t_to: Micros,
    pub mbps: f64,
}

/// One directed link availability window.
#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub from: SatId,
    pub to: SatId,
    pub t_start: Micros,
    pub t_end: Micros,
    pub delay: Micros,
    pub bandwidth: Vec<BandwidthSegment>,
}

impl Contact {
    #[inline]
    pub fn covers(&self, t: Micros) -> bool {
        self.t_start <= t && t < self.t_end
    }

    #[inline]
    pub fn overlaps(&self, a: Micros, b: Micros) -> bool {
        self.t_start < b && a < self.t_end
    }

    pub fn bandwidth_at(&self, t: Micros) -> f64 {
        self.bandwidth
            .iter()
            .find(|s| s.t_from <= t && t < s.t_to)
            .map_or(0.0, |s| s.mbps)
    }

    /// Transferable volume in Mb over `[a, b)`.
    pub fn volume(&self, a: Micros, b: Micros) -> f64 {
        self.bandwidth
            .iter()
            .map(|s| s.mbps * overlap(s.t_from, s.t_to, a, b) as f64 / 1e6)
            .sum()
    }

    /// Time-averaged bandwidth over the whole contact.
    pub fn mean_bandwidth(&self) -> f64 {
        let len = self.t_end - self.t_start;
        self.volume(self.t_start, self.t_end) * 1e6 / len as f64
    }
}

/// Immutable, validated contact plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPlan {
    nodes: Vec<String>,
    contacts: Vec<Contact>,
    epoch_ms: i64,
    horizon: Micros,
    buffer_mb: f64,
    by_link: BTreeMap<(SatId, SatId), Vec<usize>>,
    neighbors: Vec<Vec<SatId>>,
}

impl ContactPlan {
    pub fn new(
        nodes: Vec<String>,
        contacts: Vec<Contact>,
        epoch_ms: i64,
        horizon: Micros,
        buffer_mb: f64,
    ) -> Result<Self, PlanError> {
        let n = nodes.len();
        if n < 2 {
            return Err(PlanError::TooFewNodes(n));
        }
        if horizon == 0 {
            return Err(PlanError::EmptyHorizon);
        }
        if !buffer_mb.is_finite() || buffer_mb < 0.0 {
            return Err(PlanError::InvalidBuffer);
        }
        let mut by_link: BTreeMap<(SatId, SatId), Vec<usize>> = BTreeMap::new();
        for (idx, c) in contacts.iter().enumerate() {
            validate_contact(idx, c, n, horizon)?;
            by_link.entry((c.from, c.to)).or_default().push(idx);
        }
        for (&(from, to), list) in by_link.iter_mut() {
            list.sort_by_key(|&i| (contacts[i].t_start, i));
            for w in list.windows(2) {
                if contacts[w[0]].t_end > contacts[w[1]].t_start {
                    return Err(PlanError::Overlap { from, to, first: w[0], second: w[1] });
                }
            }
        }
        let mut neighbors = vec_of_empty(n);
        for &(from, to) in by_link.keys() {
            neighbors[from].push(to);
        }
        Ok(Self { nodes, contacts, epoch_ms, horizon, buffer_mb, by_link, neighbors })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contacts(&self) -> &[Contact] {
        &self.contacts
    }

    pub fn epoch_ms(&self) -> i64 {
        self.epoch_ms
    }

    pub fn horizon(&self) -> Micros {
        self.horizon
    }

    pub fn buffer_mb(&self) -> f64 {
        self.buffer_mb
    }

    /// Directed links that have at least one contact, in `(from, to)` order.
    pub fn links(&self) -> impl Iterator<Item = (SatId, SatId)> + '_ {
        self.by_link.keys().copied()
    }

    /// Sorted out-neighbours of `from` over the whole horizon.
    pub fn neighbors(&self, from: SatId) -> &[SatId] {
        &self.neighbors[from]
    }

    /// Contacts on `from -> to`, ordered by start time.
    pub fn contacts_between(&self, from: SatId, to: SatId) -> impl Iterator<Item = &Contact> + '_ {
        self.by_link
            .get(&(from, to))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.contacts[i])
    }

    /// Contacts leaving `from`, grouped by neighbour.
    pub fn contacts_from(&self, from: SatId) -> impl Iterator<Item = &Contact> + '_ {
        self.neighbors[from].iter().flat_map(move |&to| self.contacts_between(from, to))
    }

    pub fn contact_at(&self, from: SatId, to: SatId, t: Micros) -> Option<&Contact> {
        self.contacts_between(from, to).find(|c| c.covers(t))
    }

    /// Instantaneous bandwidth `W(t)` on `from -> to`; zero when no contact covers `t`.
    pub fn bandwidth_at(&self, from: SatId, to: SatId, t: Micros) -> Result<f64, PlanError> {
        self.check_node(from)?;
        self.check_node(to)?;
        if t > self.horizon {
            return Err(PlanError::OutOfHorizon(t));
        }
        Ok(self.contact_at(from, to, t).map_or(0.0, |c| c.bandwidth_at(t)))
    }

    /// Exact integral of `W(t)` over `[a, b)` in Mb.
    pub fn volume(&self, from: SatId, to: SatId, a: Micros, b: Micros) -> f64 {
        self.contacts_between(from, to)
            .filter(|c| c.overlaps(a, b))
            .map(|c| c.volume(a, b))
            .sum()
    }

    fn check_node(&self, id: SatId) -> Result<(), PlanError> {
        if id < self.nodes.len() {
            Ok(())
        } else {
            Err(PlanError::UnknownQueryNode(id))
        }
    }
}

fn vec_of_empty(n: usize) -> Vec<Vec<SatId>> {
    (0..n).map(|_| Vec::new()).collect()
}

fn validate_contact(idx: usize, c: &Contact, n: usize, horizon: Micros) -> Result<(), PlanError> {
    for node in [c.from, c.to] {
        if node >= n {
            return Err(PlanError::UnknownNode { contact: idx, node });
        }
    }
    if c.from == c.to {
        return Err(PlanError::SelfLoop { contact: idx, node: c.from });
    }
    if c.t_start >= c.t_end {
        return Err(PlanError::EmptyInterval { contact: idx });
    }
    if c.t_end > horizon {
        return Err(PlanError::OutsideHorizon { contact: idx });
    }
    if c.delay == 0 {
        return Err(PlanError::NonPositiveDelay { contact: idx });
    }
    let mut cursor = c.t_start;
    for s in &c.bandwidth {
        if s.t_from != cursor || s.t_to <= s.t_from {
            return Err(PlanError::SegmentTiling { contact: idx });
        }
        if !s.mbps.is_finite() || s.mbps < 0.0 {
            return Err(PlanError::InvalidBandwidth { contact: idx });
        }
        cursor = s.t_to;
    }
    if cursor != c.t_end {
        return Err(PlanError::SegmentTiling { contact: idx });
    }
    Ok(())
}
