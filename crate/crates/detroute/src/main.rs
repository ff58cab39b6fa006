use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use detroute::harness::{
    effective_seed, parse_strategies, route_all, run_experiment, write_report, ExperimentConfig, HarnessError,
    ReportFormat, Router, Workload,
};
use detroute::io::{
    eteg_to_json, find_demand, load_plan, load_traffic, save_plan, save_traffic, write_results, write_text, IoError,
    ResultRow,
};
use detroute::solver::{solve_exact_with_budget, IlpSolution};
use detroute_core::contact_plan::{generate_walker_constellation, DelayMode, WalkerConfig, DEFAULT_BUFFER_MB};
use detroute_core::detr::ResourceLedger;
use detroute_core::eteg::build_eteg;
use detroute_core::ilp::{build_model, export_lp, route_as_walk, DEFAULT_EDGE_BUDGET, DEFAULT_EPSILON};
use detroute_core::time::{as_ms, ms};
use detroute_core::traffic::{generate_demands, DemandConfig};
use detroute_core::Strategy;

#[derive(Parser)]
#[command(name = "detroute", version, about = "Deterministic routing over time-expanded satellite contact plans")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a Walker-delta contact plan.
    GenPlan(GenPlan),
    /// Draw random traffic demands for a plan.
    GenTraffic(GenTraffic),
    /// Route a traffic file online with one strategy.
    Route(RouteCmd),
    /// Compare strategies over demand-count points and repetitions.
    Experiment(ExperimentCmd),
    /// Build the integer program for one demand.
    Ilp(IlpCmd),
    /// Write the extended time-expanded graph of one demand as JSON.
    DumpEteg(DumpEteg),
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

#[derive(Args)]
struct GenPlan {
    #[arg(long, default_value_t = 12)]
    planes: usize,
    #[arg(long, default_value_t = 14)]
    sats_per_plane: usize,
    #[arg(long, default_value_t = 550.0)]
    altitude_km: f64,
    #[arg(long, default_value_t = 53.0)]
    inclination_deg: f64,
    #[arg(long, default_value_t = 300_000)]
    horizon_ms: u64,
    #[arg(long, value_parser = parse_range, default_value = "500:2000")]
    bandwidth_mbps: (f64, f64),
    /// MIN:MAX in ms, or `geometric` for distance over light speed.
    #[arg(long, default_value = "5:15")]
    delay_ms: String,
    #[arg(long, default_value_t = DEFAULT_BUFFER_MB)]
    buffer_mb: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenTraffic {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    period_ms: u64,
    #[arg(long, value_parser = parse_range, default_value = "2:10")]
    size_mb: (f64, f64),
    #[arg(long, value_parser = parse_range, default_value = "20:100")]
    bound_ms: (f64, f64),
    #[arg(long, default_value_t = 10)]
    quantum_ms: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RouteCmd {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long, default_value = "detr")]
    strategy: Strategy,
    #[arg(long, default_value_t = 10)]
    cycle_ms: u64,
    #[arg(long, default_value_t = DEFAULT_EDGE_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentCmd {
    #[arg(long)]
    plan: PathBuf,
    /// Fixed workload; without it demands are drawn per repetition.
    #[arg(long)]
    traffic: Option<PathBuf>,
    #[arg(long, default_value = "detr,ospf,spr,cgr")]
    strategies: String,
    #[arg(long, default_value_t = 10)]
    cycle_ms: u64,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    points: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_EDGE_BUDGET)]
    budget: usize,
    /// `.json` writes JSON, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IlpCmd {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long)]
    demand: u32,
    #[arg(long, default_value_t = 10)]
    cycle_ms: u64,
    #[arg(long)]
    export: Option<PathBuf>,
    #[arg(long)]
    solve: bool,
    #[arg(long, default_value_t = DEFAULT_EDGE_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct DumpEteg {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long)]
    demand: u32,
    #[arg(long, default_value_t = 10)]
    cycle_ms: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
}

fn gen_plan(a: GenPlan) -> Result<(), CliError> {
    let delay = if a.delay_ms.trim().eq_ignore_ascii_case("geometric") {
        DelayMode::Geometric
    } else {
        let (min_ms, max_ms) = parse_range(&a.delay_ms).map_err(CliError::Usage)?;
        DelayMode::Sampled { min_ms, max_ms }
    };
    let cfg = WalkerConfig {
        planes: a.planes,
        sats_per_plane: a.sats_per_plane,
        altitude_km: a.altitude_km,
        inclination_deg: a.inclination_deg,
        horizon_ms: a.horizon_ms,
        bandwidth_mbps: a.bandwidth_mbps,
        delay,
        buffer_mb: a.buffer_mb,
        seed: effective_seed(a.seed)?,
    };
    let plan = generate_walker_constellation(&cfg).map_err(IoError::from)?;
    save_plan(&plan, &a.out)?;
    Ok(())
}

fn gen_traffic(a: GenTraffic) -> Result<(), CliError> {
    let plan = load_plan(&a.plan)?;
    let cfg = DemandConfig {
        period_ms: a.period_ms,
        size_mb: a.size_mb,
        bound_ms: (a.bound_ms.0 as u64, a.bound_ms.1 as u64),
        quantum_ms: a.quantum_ms,
    };
    let demands = generate_demands(a.n, &plan, &cfg, effective_seed(a.seed)?).map_err(IoError::from)?;
    save_traffic(&plan, &demands, &a.out)?;
    Ok(())
}

fn route(a: RouteCmd) -> Result<(), CliError> {
    let plan = load_plan(&a.plan)?;
    let mut demands = load_traffic(&plan, &a.traffic)?;
    detroute_core::traffic::sort_by_arrival(&mut demands);
    let mut router = Router::new(&plan, ms(a.cycle_ms));
    router.edge_budget = a.budget;
    let run = route_all(&router, a.strategy, &demands)?;
    if run.budget_exceeded {
        eprintln!("warning: solver budget exceeded after {} demands", run.results.len());
    }
    let rows: Vec<ResultRow> = run
        .results
        .iter()
        .map(|r| ResultRow {
            demand_id: r.demand_id,
            accepted: r.accepted,
            delay_ms: r.delay.map(as_ms),
            path: r.path.as_ref().map(|p| p.render()).unwrap_or_default(),
        })
        .collect();
    let file = std::fs::File::create(&a.out).map_err(|source| IoError::File { path: a.out.clone(), source })?;
    write_results(&rows, file)?;
    let accepted = rows.iter().filter(|r| r.accepted).count();
    println!("{}: accepted {accepted}/{}", a.strategy, rows.len());
    Ok(())
}

fn experiment(a: ExperimentCmd) -> Result<(), CliError> {
    let strategies = parse_strategies(&a.strategies)?;
    let plan = load_plan(&a.plan)?;
    let workload = match &a.traffic {
        Some(p) => Workload::Fixed(load_traffic(&plan, p)?),
        None => Workload::Generated(DemandConfig::default()),
    };
    let cfg = ExperimentConfig {
        strategies,
        cycle_len: ms(a.cycle_ms),
        repetitions: a.reps,
        seed: effective_seed(a.seed)?,
        points: a.points,
        edge_budget: a.budget,
    };
    let report = run_experiment(&plan, &workload, &cfg)?;
    write_report(&report, format_of(&a.out), &a.out)?;
    Ok(())
}

fn format_of(path: &Path) -> ReportFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
        _ => ReportFormat::Csv,
    }
}

fn ilp(a: IlpCmd) -> Result<(), CliError> {
    if a.export.is_none() && !a.solve {
        return Err(CliError::Usage("nothing to do: pass --export FILE and/or --solve".into()));
    }
    let plan = load_plan(&a.plan)?;
    let f = find_demand(&load_traffic(&plan, &a.traffic)?, a.demand)?;
    let ledger = ResourceLedger::new(&plan, ms(a.cycle_ms)).map_err(|e| HarnessError::Commit(e.into()))?;
    let g = build_eteg(&plan, &ledger, &f, ms(a.cycle_ms)).map_err(HarnessError::from)?;
    let model = build_model(&g, &f, DEFAULT_EPSILON).map_err(HarnessError::from)?;
    if let Some(path) = &a.export {
        write_text(path, &export_lp(&model))?;
    }
    if a.solve {
        match solve_exact_with_budget(&model, a.budget).map_err(HarnessError::from)? {
            IlpSolution::Infeasible => println!("infeasible"),
            IlpSolution::Optimal { delay, selected, .. } => {
                println!("objective {} ms", as_ms(delay));
                match route_as_walk(&g, &selected) {
                    Ok(p) => println!("path {}", p.render()),
                    Err(b) => println!("selection is not a walk: {b:?}"),
                }
            }
        }
    }
    Ok(())
}

fn dump_eteg(a: DumpEteg) -> Result<(), CliError> {
    let plan = load_plan(&a.plan)?;
    let f = find_demand(&load_traffic(&plan, &a.traffic)?, a.demand)?;
    let ledger = ResourceLedger::new(&plan, ms(a.cycle_ms)).map_err(|e| HarnessError::Commit(e.into()))?;
    let g = build_eteg(&plan, &ledger, &f, ms(a.cycle_ms)).map_err(HarnessError::from)?;
    write_text(&a.out, &eteg_to_json(&g))?;
    Ok(())
}

fn main() -> ExitCode {
    let out = match Cli::parse().cmd {
        Cmd::GenPlan(a) => gen_plan(a),
        Cmd::GenTraffic(a) => gen_traffic(a),
        Cmd::Route(a) => route(a),
        Cmd::Experiment(a) => experiment(a),
        Cmd::Ilp(a) => ilp(a),
        Cmd::DumpEteg(a) => dump_eteg(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
