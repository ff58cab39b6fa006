//! Uniform routing interface over DetR and the baselines.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::baselines::{cgr_route, derive_snapshots, ospf_route, spr_route, Rejection, Snapshot, StaticRoute};
use crate::contact_plan::{ContactPlan, SatId};
use crate::detr::{reserve, shortest_time_featured_path, DetrError, ResourceLedger, TimeFeaturedPath};
use crate::eteg::{build_eteg, CycleGrid};
use crate::time::Micros;
use crate::traffic::TrafficDemand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Detr,
    Ospf,
    Spr,
    Cgr,
    Ilps,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Strategy::Detr, Strategy::Ospf, Strategy::Spr, Strategy::Cgr, Strategy::Ilps];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Detr => "detr",
            Strategy::Ospf => "ospf",
            Strategy::Spr => "spr",
            Strategy::Cgr => "cgr",
            Strategy::Ilps => "ilps",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown strategy `{0}` (expected detr, ospf, spr, cgr or ilps)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownStrategy(String::from(s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoutePath {
    TimeFeatured(TimeFeaturedPath),
    Static(StaticRoute),
}

impl RoutePath {
    pub fn render(&self) -> String {
        match self {
            RoutePath::TimeFeatured(p) => p.render(),
            RoutePath::Static(r) => {
                let names: Vec<String> = r.satellites().iter().map(|s| alloc::format!("u{s}")).collect();
                names.join(">")
            }
        }
    }

    pub fn satellites(&self) -> Vec<SatId> {
        match self {
            RoutePath::TimeFeatured(p) => p.satellites(),
            RoutePath::Static(r) => r.satellites(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accepted {
    pub delay: Micros,
    pub path: RoutePath,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouteError {
    #[error(transparent)]
    Detr(#[from] DetrError),
    #[error("strategy {0} needs an external solver")]
    Unsupported(Strategy),
}

/// Plan-level state shared by all demands: the plan, its snapshots and the
/// cycle length.
#[derive(Debug, Clone)]
pub struct RoutingContext<'p> {
    pub plan: &'p ContactPlan,
    pub snapshots: Vec<Snapshot>,
    pub cycle_len: Micros,
}

impl<'p> RoutingContext<'p> {
    pub fn new(plan: &'p ContactPlan, cycle_len: Micros) -> Self {
        Self { plan, snapshots: derive_snapshots(plan), cycle_len }
    }

    /// Routes `f` against the current ledger without committing. `Ok(None)`
    /// is a rejection.
    pub fn evaluate(
        &self,
        strategy: Strategy,
        ledger: &ResourceLedger<'_>,
        f: &TrafficDemand,
    ) -> Result<Option<Accepted>, RouteError> {
        let static_route = |r: Result<StaticRoute, Rejection>| {
            r.ok().map(|r| Accepted { delay: r.delay, path: RoutePath::Static(r) })
        };
        Ok(match strategy {
            Strategy::Detr => {
                let g = build_eteg(self.plan, ledger, f, self.cycle_len).map_err(DetrError::from)?;
                shortest_time_featured_path(&g, f)
                    .map_err(DetrError::from)?
                    .map(|p| Accepted { delay: p.total_delay, path: RoutePath::TimeFeatured(p) })
            }
            Strategy::Ospf => static_route(ospf_route(self.plan, &self.snapshots, ledger, f)),
            Strategy::Spr => static_route(spr_route(self.plan, &self.snapshots, ledger, f)),
            Strategy::Cgr => static_route(cgr_route(self.plan, ledger, f)),
            Strategy::Ilps => return Err(RouteError::Unsupported(strategy)),
        })
    }

    /// Routes `f` and, on acceptance, reserves its resources.
    pub fn route(
        &self,
        strategy: Strategy,
        ledger: &mut ResourceLedger<'_>,
        f: &TrafficDemand,
    ) -> Result<Option<Accepted>, RouteError> {
        let out = self.evaluate(strategy, ledger, f)?;
        if let Some(a) = &out {
            commit(ledger, f, a, self.cycle_len)?;
        }
        Ok(out)
    }
}

/// Reserves an accepted route on `ledger`.
pub fn commit(
    ledger: &mut ResourceLedger<'_>,
    f: &TrafficDemand,
    a: &Accepted,
    cycle_len: Micros,
) -> Result<(), DetrError> {
    match &a.path {
        RoutePath::TimeFeatured(p) => {
            let grid = CycleGrid::for_demand(f, cycle_len)?;
            reserve(ledger, p, f, &grid)?;
        }
        RoutePath::Static(r) => ledger.reserve_all(&r.reservations)?,
    }
    Ok(())
}
