//! Linearized integer program for one demand, its LP text export, and an
//! exhaustive path-enumeration oracle.
//!
//! The exact solver lives in the std companion crate.

mod linearize;
mod lp;
mod model;
mod oracle;

pub use linearize::{
    chi_rows, cycle_relation_holds, floor_rows, holds, product_rows, Sense, Template, FLOOR_MARGIN_MS, ROW_TOL,
};
pub use lp::export_lp;
pub use model::{build_model, CycleExpressions, Family, IlpModel, Row, Var, DEFAULT_EPSILON};
pub use oracle::{brute_force_min_delay, route_as_walk, WalkBreak, ENUMERATION_BUDGET};

use alloc::vec::Vec;

use thiserror::Error;

use crate::detr::TimeFeaturedPath;
use crate::eteg::{EdgeIx, Eteg};

/// Largest `|E|` the exact solver accepts by default.
pub const DEFAULT_EDGE_BUDGET: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlpError {
    #[error("epsilon {0} outside (0, 1)")]
    Epsilon(f64),
    #[error("graph has no cycles")]
    NoCycles,
    #[error("graph was built for a different demand")]
    DemandMismatch,
    #[error("enumeration budget exceeded: N*H = {size} > {limit}")]
    EnumerationBudget { size: usize, limit: usize },
}

/// ETEG edge indices traversed by `path`.
pub fn path_edges(eteg: &Eteg, path: &TimeFeaturedPath) -> Vec<EdgeIx> {
    path.edges()
        .filter_map(|e| eteg.find_edge(eteg.index_of(e.tail), eteg.index_of(e.head)))
        .collect()
}
