//! Deterministic routing for non-terrestrial networks.
//!
//! The crate models a time-varying satellite topology as a contact plan,
//! expands it per traffic demand into an extended time-expanded graph
//! (ETEG) and finds minimum-delay time-featured paths with per-cycle
//! resource reservation. An ILP formulation of the same problem and a
//! brute-force enumerator are provided as optimality oracles, together with
//! OSPF, snapshot and contact-graph baselines.
//!
//! Everything here is `no_std` + `alloc`; file formats, the exact ILP
//! solver backend and the experiment harness live in the `detroute` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod contact_plan;
pub mod detr;
pub mod eteg;
pub mod fixtures;
pub mod ilp;
pub mod route;
pub mod time;
pub mod traffic;

pub use contact_plan::{BandwidthSegment, Contact, ContactPlan, SatId};
pub use detr::{shortest_time_featured_path, ResourceLedger, TimeFeaturedPath};
pub use eteg::{build_eteg, CycleGrid, Eteg, EtegNode};
pub use route::{Accepted, RoutePath, Strategy};
pub use time::Micros;
pub use traffic::TrafficDemand;
