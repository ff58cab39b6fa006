//! Online experiment runs: route demands per strategy, aggregate α/β/γ and
//! write plot-ready reports.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use detroute_core::detr::{DetrError, ResourceLedger};
use detroute_core::eteg::{build_eteg, EtegError};
use detroute_core::ilp::{build_model, route_as_walk, IlpError, DEFAULT_EDGE_BUDGET, DEFAULT_EPSILON};
use detroute_core::route::{commit, RouteError, RoutingContext, UnknownStrategy};
use detroute_core::time::as_ms;
use detroute_core::traffic::{draw_demands, sort_by_arrival, DemandConfig, DemandError};
use detroute_core::{Accepted, ContactPlan, Micros, RoutePath, Strategy, TrafficDemand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{write_text, IoError};
use crate::solver::{solve_exact_with_budget, IlpSolution, SolveError};

pub const SEED_ENV: &str = "DETROUTE_SEED";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Strategy(#[from] UnknownStrategy),
    #[error("no strategies given")]
    NoStrategies,
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Eteg(#[from] EtegError),
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Commit(#[from] DetrError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{strategy}: {got} results for {expected} demands")]
    ResultCount { strategy: Strategy, got: usize, expected: usize },
    #[error("{var} = `{value}` is not an integer seed")]
    SeedEnv { var: &'static str, value: String },
}

pub fn parse_strategies(list: &str) -> Result<Vec<Strategy>, HarnessError> {
    let mut out = Vec::new();
    for s in list.split(',').filter(|s| !s.trim().is_empty()) {
        let s: Strategy = s.parse()?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(HarnessError::NoStrategies);
    }
    Ok(out)
}

/// `DETROUTE_SEED` if set, else `fallback`.
pub fn effective_seed(fallback: u64) -> Result<u64, HarnessError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| HarnessError::SeedEnv { var: SEED_ENV, value: v }),
        Err(_) => Ok(fallback),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub demand_id: u32,
    pub strategy: Strategy,
    pub accepted: bool,
    pub delay: Option<Micros>,
    pub path: Option<RoutePath>,
    pub query_time: Duration,
}

/// Outcome of one routing call.
#[derive(Debug, Clone, PartialEq)]
pub enum Routed {
    Done(Option<Accepted>),
    BudgetExceeded,
}

/// Routing front end over [`RoutingContext`] that also runs the exact
/// ILP strategy.
#[derive(Debug, Clone)]
pub struct Router<'p> {
    pub ctx: RoutingContext<'p>,
    pub edge_budget: usize,
}

impl<'p> Router<'p> {
    pub fn new(plan: &'p ContactPlan, cycle_len: Micros) -> Self {
        Self { ctx: RoutingContext::new(plan, cycle_len), edge_budget: DEFAULT_EDGE_BUDGET }
    }

    fn solve_ilp(&self, ledger: &ResourceLedger<'_>, f: &TrafficDemand) -> Result<Routed, HarnessError> {
        let g = build_eteg(self.ctx.plan, ledger, f, self.ctx.cycle_len)?;
        if g.edges().len() > self.edge_budget {
            return Ok(Routed::BudgetExceeded);
        }
        let model = build_model(&g, f, DEFAULT_EPSILON)?;
        match solve_exact_with_budget(&model, self.edge_budget) {
            Ok(IlpSolution::Infeasible) => Ok(Routed::Done(None)),
            // An optimum that is not a walk cannot be reserved.
            Ok(IlpSolution::Optimal { delay, selected, .. }) => Ok(Routed::Done(
                route_as_walk(&g, &selected).ok().map(|p| Accepted { delay, path: RoutePath::TimeFeatured(p) }),
            )),
            Err(SolveError::BudgetExceeded { .. }) => Ok(Routed::BudgetExceeded),
            Err(e) => Err(e.into()),
        }
    }

    pub fn evaluate(&self, s: Strategy, ledger: &ResourceLedger<'_>, f: &TrafficDemand) -> Result<Routed, HarnessError> {
        match s {
            Strategy::Ilps => self.solve_ilp(ledger, f),
            _ => Ok(Routed::Done(self.ctx.evaluate(s, ledger, f)?)),
        }
    }

    /// Routes and commits one demand, timing the whole call.
    pub fn route(
        &self,
        s: Strategy,
        ledger: &mut ResourceLedger<'_>,
        f: &TrafficDemand,
    ) -> Result<(Routed, Duration), HarnessError> {
        let t0 = Instant::now();
        let out = self.evaluate(s, ledger, f)?;
        if let Routed::Done(Some(a)) = &out {
            commit(ledger, f, a, self.ctx.cycle_len)?;
        }
        Ok((out, t0.elapsed()))
    }
}

/// Results of one strategy over one workload.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRun {
    pub strategy: Strategy,
    pub results: Vec<RouteResult>,
    /// Set when some demand exceeded the solver budget; `results` then stops
    /// at that demand.
    pub budget_exceeded: bool,
}

/// Routes `demands` in the given order on a fresh ledger.
pub fn route_all(router: &Router<'_>, s: Strategy, demands: &[TrafficDemand]) -> Result<StrategyRun, HarnessError> {
    let mut ledger = ResourceLedger::new(router.ctx.plan, router.ctx.cycle_len).map_err(DetrError::from)?;
    let mut results = Vec::with_capacity(demands.len());
    for f in demands {
        let (out, query_time) = router.route(s, &mut ledger, f)?;
        let a = match out {
            Routed::Done(a) => a,
            Routed::BudgetExceeded => return Ok(StrategyRun { strategy: s, results, budget_exceeded: true }),
        };
        results.push(RouteResult {
            demand_id: f.id,
            strategy: s,
            accepted: a.is_some(),
            delay: a.as_ref().map(|a| a.delay),
            path: a.map(|a| a.path),
            query_time,
        });
    }
    Ok(StrategyRun { strategy: s, results, budget_exceeded: false })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyMetrics {
    pub strategy: String,
    /// Total accepted size, Mb.
    pub alpha_mb: Option<f64>,
    /// Mean delay over the common acceptance set, ms.
    pub beta_ms: Option<f64>,
    /// Total routing time, ms.
    pub gamma_ms: Option<f64>,
    pub budget_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub n_demands: usize,
    /// Size of the common acceptance set, averaged over repetitions.
    pub common_set: f64,
    pub strategies: Vec<StrategyMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub repetitions: usize,
    pub cycle_ms: f64,
    pub points: Vec<PointMetrics>,
}

/// Ids accepted by every strategy that finished.
pub fn common_acceptance(runs: &[StrategyRun]) -> BTreeSet<u32> {
    let mut finished = runs.iter().filter(|r| !r.budget_exceeded);
    let Some(first) = finished.next() else { return BTreeSet::new() };
    let mut common: BTreeSet<u32> = first.results.iter().filter(|r| r.accepted).map(|r| r.demand_id).collect();
    for run in finished {
        let acc: BTreeSet<u32> = run.results.iter().filter(|r| r.accepted).map(|r| r.demand_id).collect();
        common.retain(|id| acc.contains(id));
    }
    common
}

/// Metrics of one repetition at one workload size.
pub fn compute_metrics(runs: &[StrategyRun], demands: &[TrafficDemand]) -> Result<PointMetrics, HarnessError> {
    for run in runs.iter().filter(|r| !r.budget_exceeded) {
        if run.results.len() != demands.len() {
            return Err(HarnessError::ResultCount {
                strategy: run.strategy,
                got: run.results.len(),
                expected: demands.len(),
            });
        }
    }
    let common = common_acceptance(runs);
    let size = |id: u32| demands.iter().find(|d| d.id == id).map_or(0.0, |d| d.size_mb);
    let strategies = runs
        .iter()
        .map(|run| {
            if run.budget_exceeded {
                return StrategyMetrics {
                    strategy: run.strategy.to_string(),
                    alpha_mb: None,
                    beta_ms: None,
                    gamma_ms: None,
                    budget_exceeded: true,
                };
            }
            let accepted = run.results.iter().filter(|r| r.accepted);
            let alpha: f64 = accepted.clone().map(|r| size(r.demand_id)).sum();
            let on_common: Vec<f64> = accepted
                .filter(|r| common.contains(&r.demand_id))
                .filter_map(|r| r.delay.map(as_ms))
                .collect();
            let beta = (!on_common.is_empty()).then(|| on_common.iter().sum::<f64>() / on_common.len() as f64);
            let gamma: Duration = run.results.iter().map(|r| r.query_time).sum();
            StrategyMetrics {
                strategy: run.strategy.to_string(),
                alpha_mb: Some(alpha),
                beta_ms: beta,
                gamma_ms: Some(gamma.as_secs_f64() * 1e3),
                budget_exceeded: false,
            }
        })
        .collect();
    Ok(PointMetrics { n_demands: demands.len(), common_set: common.len() as f64, strategies })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Averages per-repetition metrics of one point.
fn average(reps: &[PointMetrics]) -> PointMetrics {
    let first = &reps[0];
    let strategies = (0..first.strategies.len())
        .map(|k| {
            let col: Vec<&StrategyMetrics> = reps.iter().map(|r| &r.strategies[k]).collect();
            let exceeded = col.iter().any(|m| m.budget_exceeded);
            let pick = |f: fn(&StrategyMetrics) -> Option<f64>| {
                if exceeded {
                    None
                } else {
                    mean(&col.iter().filter_map(|m| f(m)).collect::<Vec<_>>())
                }
            };
            StrategyMetrics {
                strategy: first.strategies[k].strategy.clone(),
                alpha_mb: pick(|m| m.alpha_mb),
                beta_ms: pick(|m| m.beta_ms),
                gamma_ms: pick(|m| m.gamma_ms),
                budget_exceeded: exceeded,
            }
        })
        .collect();
    PointMetrics {
        n_demands: first.n_demands,
        common_set: reps.iter().map(|r| r.common_set).sum::<f64>() / reps.len() as f64,
        strategies,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    /// Demands from a traffic file, in file order.
    Fixed(Vec<TrafficDemand>),
    /// Redrawn for every repetition.
    Generated(DemandConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub strategies: Vec<Strategy>,
    pub cycle_len: Micros,
    pub repetitions: usize,
    pub seed: u64,
    /// Demand counts; each point routes the first `n` demands.
    pub points: Vec<usize>,
    pub edge_budget: usize,
}

pub fn rep_seed(seed: u64, rep: usize) -> u64 {
    seed ^ (rep as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every strategy on every point and repetition, each on a fresh ledger.
pub fn run_experiment(
    plan: &ContactPlan,
    workload: &Workload,
    cfg: &ExperimentConfig,
) -> Result<MetricsReport, HarnessError> {
    if cfg.strategies.is_empty() {
        return Err(HarnessError::NoStrategies);
    }
    let points = match (&cfg.points[..], workload) {
        ([], Workload::Fixed(d)) => vec![d.len()],
        ([], Workload::Generated(_)) => return Err(DemandError::InvalidArgument("no demand counts given").into()),
        (p, _) => p.to_vec(),
    };
    let max_n = points.iter().copied().max().unwrap_or(0);
    let mut router = Router::new(plan, cfg.cycle_len);
    router.edge_budget = cfg.edge_budget;
    let reps = cfg.repetitions.max(1);
    let mut per_point: Vec<Vec<PointMetrics>> = vec![Vec::with_capacity(reps); points.len()];
    for rep in 0..reps {
        let pool = match workload {
            Workload::Fixed(d) => d.clone(),
            Workload::Generated(dc) => draw_demands(max_n, plan, dc, rep_seed(cfg.seed, rep))?,
        };
        for (k, &n) in points.iter().enumerate() {
            let mut demands = pool[..n.min(pool.len())].to_vec();
            sort_by_arrival(&mut demands);
            let runs = cfg
                .strategies
                .iter()
                .map(|&s| route_all(&router, s, &demands))
                .collect::<Result<Vec<_>, _>>()?;
            per_point[k].push(compute_metrics(&runs, &demands)?);
        }
    }
    Ok(MetricsReport {
        seed: cfg.seed,
        repetitions: reps,
        cycle_ms: as_ms(cfg.cycle_len),
        points: per_point.iter().map(|r| average(r)).collect(),
    })
}

/// A demand routed by DetR and a set of baselines against one shared ledger
/// that only DetR commits to.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedOutcome {
    pub demand_id: u32,
    pub detr: Option<Micros>,
    pub others: Vec<(Strategy, Option<Micros>)>,
}

pub fn paired_comparison(
    router: &Router<'_>,
    demands: &[TrafficDemand],
    baselines: &[Strategy],
) -> Result<Vec<PairedOutcome>, HarnessError> {
    let mut ledger = ResourceLedger::new(router.ctx.plan, router.ctx.cycle_len).map_err(DetrError::from)?;
    let mut out = Vec::with_capacity(demands.len());
    for f in demands {
        let mut others = Vec::with_capacity(baselines.len());
        for &s in baselines {
            let d = match router.evaluate(s, &ledger, f)? {
                Routed::Done(a) => a.map(|a| a.delay),
                Routed::BudgetExceeded => None,
            };
            others.push((s, d));
        }
        let (detr, _) = router.route(Strategy::Detr, &mut ledger, f)?;
        let detr = match detr {
            Routed::Done(a) => a.map(|a| a.delay),
            Routed::BudgetExceeded => None,
        };
        out.push(PairedOutcome { demand_id: f.id, detr, others });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    strategy: String,
    n_demands: usize,
    alpha_mb: Option<f64>,
    beta_ms: Option<f64>,
    gamma_ms: Option<f64>,
}

/// One row per (strategy, point), strategy-major.
pub fn report_csv(report: &MetricsReport) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let names: Vec<&str> = report
        .points
        .first()
        .map(|p| p.strategies.iter().map(|s| s.strategy.as_str()).collect())
        .unwrap_or_default();
    for (k, name) in names.iter().enumerate() {
        for p in &report.points {
            let m = &p.strategies[k];
            w.serialize(CsvRow {
                strategy: name.to_string(),
                n_demands: p.n_demands,
                alpha_mb: m.alpha_mb,
                beta_ms: m.beta_ms,
                gamma_ms: m.gamma_ms,
            })
            .map_err(IoError::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| IoError::from(csv::Error::from(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn report_json(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_report_json(json: &str) -> Result<MetricsReport, HarnessError> {
    Ok(serde_json::from_str(json).map_err(IoError::from)?)
}

pub fn write_report(report: &MetricsReport, format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let text = match format {
        ReportFormat::Csv => report_csv(report)?,
        ReportFormat::Json => report_json(report),
    };
    Ok(write_text(path, &text)?)
}
