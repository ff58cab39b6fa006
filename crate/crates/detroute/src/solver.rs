//! Exact solution of the linearized program with HiGHS.

use std::num::NonZeroU32;

use detroute_core::eteg::EdgeIx;
use detroute_core::ilp::{IlpModel, Sense, DEFAULT_EDGE_BUDGET};
use detroute_core::Micros;
use highs::{HighsModelStatus, RowProblem};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("model has {edges} edges, budget is {limit}")]
    BudgetExceeded { edges: usize, limit: usize },
    #[error("solver stopped with status {0}")]
    Solver(String),
    #[error("rounded solution violates rows {0:?}")]
    Inconsistent(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IlpSolution {
    Optimal {
        /// Objective in µs, recomputed from the rounded x variables.
        delay: Micros,
        selected: Vec<EdgeIx>,
        values: Vec<f64>,
    },
    Infeasible,
}

impl IlpSolution {
    pub fn delay(&self) -> Option<Micros> {
        match self {
            IlpSolution::Optimal { delay, .. } => Some(*delay),
            IlpSolution::Infeasible => None,
        }
    }
}

/// Solves `model` to proven optimality. Models with more than `edge_budget`
/// ETEG edges are refused.
pub fn solve_exact_with_budget(model: &IlpModel, edge_budget: usize) -> Result<IlpSolution, SolveError> {
    if model.edge_count() > edge_budget {
        return Err(SolveError::BudgetExceeded { edges: model.edge_count(), limit: edge_budget });
    }
    let mut obj = vec![0.0; model.var_count()];
    for &(v, c) in &model.objective {
        obj[v] += c;
    }
    let mut pb = RowProblem::default();
    let cols: Vec<_> = obj.iter().map(|&c| pb.add_integer_column(c, 0..=1)).collect();
    for row in &model.rows {
        let terms: Vec<_> = row.terms.iter().map(|&(v, c)| (cols[v], c)).collect();
        match row.sense {
            Sense::Le => pb.add_row(..=row.rhs, &terms),
            Sense::Ge => pb.add_row(row.rhs.., &terms),
            Sense::Eq => pb.add_row(row.rhs..=row.rhs, &terms),
        }
    }
    let mut m = pb.optimise(highs::Sense::Minimise);
    m.make_quiet();
    m.set_option("mip_rel_gap", 0.0);
    m.set_option("mip_abs_gap", 1e-9);
    m.set_threads(NonZeroU32::new(1).expect("nonzero"));
    let solved = m.solve();
    match solved.status() {
        HighsModelStatus::Optimal => {}
        HighsModelStatus::Infeasible => return Ok(IlpSolution::Infeasible),
        other => return Err(SolveError::Solver(format!("{other:?}"))),
    }
    let values: Vec<f64> = solved.get_solution().columns().iter().map(|v| v.round()).collect();
    let bad = model.violations(&values);
    if !bad.is_empty() {
        return Err(SolveError::Inconsistent(bad.into_iter().map(|r| model.rows[r].name.clone()).collect()));
    }
    let selected: Vec<EdgeIx> = (0..model.edge_count()).filter(|&e| values[model.x(e)] > 0.5).collect();
    Ok(IlpSolution::Optimal { delay: model.delay_of(&values), selected, values })
}

pub fn solve_exact(model: &IlpModel) -> Result<IlpSolution, SolveError> {
    solve_exact_with_budget(model, DEFAULT_EDGE_BUDGET)
}
