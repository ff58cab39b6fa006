//! File formats, exact ILP solving, and the experiment harness on top of
//! `detroute-core`.

pub mod solver;
pub mod harness;
pub mod io;
