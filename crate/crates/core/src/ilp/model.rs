use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::eteg::{EdgeIx, EdgeKind, Eteg, EtegNode};
use crate::time::{as_ms, Micros};
use crate::traffic::TrafficDemand;

use super::linearize::{chi_rows, floor_rows, holds, product_rows, Sense, Template};
use super::IlpError;

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X { edge: EdgeIx },
    Chi { sat: usize, cycle: u32 },
    Xt { sat: usize, edge: EdgeIx },
    Delta { sat: usize },
}

/// Constraint families of the linearized program, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Source,
    Sink,
    DelayBound,
    Capacity,
    Conservation,
    ChiLower,
    ChiUpper,
    ProductUpper,
    ProductChi,
    ProductX,
    FloorLower,
    FloorUpper,
    CycleUpper,
    CycleLower,
}

impl Family {
    /// Equation number of the family in the published formulation.
    pub fn equation(&self) -> &'static str {
        match self {
            Family::Source | Family::Sink => "2",
            Family::DelayBound => "3",
            Family::Capacity => "4",
            Family::Conservation => "5",
            Family::ChiLower => "7",
            Family::ChiUpper => "8",
            Family::ProductUpper => "10",
            Family::ProductChi => "11",
            Family::ProductX => "12",
            Family::FloorLower | Family::FloorUpper => "13",
            Family::CycleUpper | Family::CycleLower => "14",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Family::Source => "single edge leaves the source copy",
            Family::Sink => "single aggregation edge enters the sink",
            Family::DelayBound => "end-to-end delay bound",
            Family::Capacity => "edge capacity covers the demand",
            Family::Conservation => "lossless forwarding",
            Family::ChiLower => "cycle indicator lower bound",
            Family::ChiUpper => "cycle indicator upper bound",
            Family::ProductUpper => "product lower bound",
            Family::ProductChi => "product below indicator",
            Family::ProductX => "product below edge variable",
            Family::FloorLower => "leaving cycle matches accumulated delay (lower)",
            Family::FloorUpper => "leaving cycle matches accumulated delay (upper)",
            Family::CycleUpper => "entering and leaving cycles agree (upper)",
            Family::CycleLower => "entering and leaving cycles agree (lower)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub family: Family,
    pub name: String,
    /// Sorted by variable index, no duplicates.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn holds(&self, values: &[f64]) -> bool {
        holds(self.lhs(values), self.sense, self.rhs)
    }
}

type Expr = Vec<(usize, f64)>;

/// `g1(u_k)` and `g2(u_k)` as linear expressions over the x variables.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleExpressions {
    pub entering: Vec<(usize, f64)>,
    pub leaving: Vec<(usize, f64)>,
}

impl CycleExpressions {
    pub fn eval(&self, values: &[f64]) -> (f64, f64) {
        let ev = |e: &Expr| e.iter().map(|&(v, c)| c * values[v]).sum::<f64>();
        (ev(&self.entering), ev(&self.leaving))
    }
}

#[derive(Debug, Clone)]
pub struct IlpModel {
    pub epsilon: f64,
    pub demand: TrafficDemand,
    pub vars: Vec<Var>,
    pub names: Vec<String>,
    /// Objective coefficients (ms) per variable index.
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
    sats: usize,
    cycles: u32,
    edge_count: usize,
    xt_slot: Vec<Option<usize>>,
    xt_per_sat: usize,
    latency: Vec<Micros>,
    tail_cycle: Vec<u32>,
    cycle_exprs: Vec<CycleExpressions>,
}

fn edge_name(g: &Eteg, e: EdgeIx) -> String {
    let edge = g.edge(e);
    match (g.node(edge.tail), g.node(edge.head)) {
        (EtegNode::Sat { sat: i, cycle: h }, EtegNode::Sat { sat: j, cycle: w }) => format!("{i}_{j}_{h}_{w}"),
        (EtegNode::Sat { sat: i, cycle: h }, EtegNode::Sink) => format!("{i}_s_{h}"),
        _ => unreachable!("edges never leave the sink"),
    }
}

fn push_scaled(out: &mut BTreeMap<usize, f64>, expr: &[(usize, f64)], k: f64) {
    if k == 0.0 {
        return;
    }
    for &(v, c) in expr {
        *out.entry(v).or_insert(0.0) += c * k;
    }
}

impl IlpModel {
    pub fn sat_count(&self) -> usize {
        self.sats
    }

    pub fn cycles(&self) -> u32 {
        self.cycles
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn x(&self, e: EdgeIx) -> usize {
        e
    }

    pub fn chi(&self, sat: usize, cycle: u32) -> usize {
        self.edge_count + sat * self.cycles as usize + cycle as usize - 1
    }

    pub fn xt(&self, sat: usize, e: EdgeIx) -> Option<usize> {
        self.xt_slot[e].map(|s| self.edge_count + self.sats * self.cycles as usize + sat * self.xt_per_sat + s)
    }

    pub fn delta(&self, sat: usize) -> usize {
        self.vars.len() - self.sats + sat
    }

    pub fn cycle_expressions(&self, sat: usize) -> &CycleExpressions {
        &self.cycle_exprs[sat]
    }

    pub fn rows_of(&self, family: Family) -> impl Iterator<Item = &Row> + '_ {
        self.rows.iter().filter(move |r| r.family == family)
    }

    /// Objective of an assignment in µs, from the selected x variables.
    pub fn delay_of(&self, values: &[f64]) -> Micros {
        (0..self.edge_count).filter(|&e| values[e] > 0.5).map(|e| self.latency[e]).sum()
    }

    /// Indices of rows violated by `values`.
    pub fn violations(&self, values: &[f64]) -> Vec<usize> {
        (0..self.rows.len()).filter(|&r| !self.rows[r].holds(values)).collect()
    }

    /// Extends a set of selected edges to a full assignment: `χ^h = [h <= g2 - 1]`,
    /// `xt = χ x`, and the first `δ ∈ {0, 1}` that satisfies the floor rows.
    pub fn complete_assignment(&self, selected: &[EdgeIx]) -> Vec<f64> {
        let mut v = vec![0.0; self.vars.len()];
        for &e in selected {
            v[e] = 1.0;
        }
        for k in 0..self.sats {
            let (_, g2) = self.cycle_exprs[k].eval(&v);
            for h in 1..=self.cycles {
                if (h as f64) <= g2 - 1.0 {
                    v[self.chi(k, h)] = 1.0;
                }
            }
            for e in 0..self.edge_count {
                if let Some(t) = self.xt(k, e) {
                    v[t] = v[self.chi(k, self.tail_cycle[e])] * v[e];
                }
            }
            let dk = self.delta(k);
            let sat_rows: Vec<&Row> = self.rows.iter().filter(|r| r.terms.iter().any(|&(var, _)| var == dk)).collect();
            if !sat_rows.iter().all(|r| r.holds(&v)) {
                v[dk] = 1.0;
            }
        }
        v
    }
}

/// Builds the linearized program for the demand of `eteg`.
pub fn build_model(eteg: &Eteg, f: &TrafficDemand, epsilon: f64) -> Result<IlpModel, IlpError> {
    if eteg.demand() != f {
        return Err(IlpError::DemandMismatch);
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(IlpError::Epsilon(epsilon));
    }
    let cycles = eteg.grid().cycles();
    if cycles < 1 {
        return Err(IlpError::NoCycles);
    }
    let sats = eteg.sat_count();
    let edges = eteg.edges();
    let m = edges.len();

    let mut xt_slot = vec![None; m];
    let mut next = 0;
    for (e, edge) in edges.iter().enumerate() {
        if edge.kind != EdgeKind::Aggregation {
            xt_slot[e] = Some(next);
            next += 1;
        }
    }
    let tail_cycle: Vec<u32> = edges.iter().map(|e| eteg.node(e.tail).cycle().expect("tails are satellites")).collect();

    let mut model = IlpModel {
        epsilon,
        demand: *f,
        vars: Vec::new(),
        names: Vec::new(),
        objective: Vec::new(),
        rows: Vec::new(),
        sats,
        cycles,
        edge_count: m,
        xt_slot,
        xt_per_sat: next,
        latency: edges.iter().map(|e| e.latency).collect(),
        tail_cycle,
        cycle_exprs: Vec::new(),
    };

    for e in 0..m {
        model.vars.push(Var::X { edge: e });
        model.names.push(format!("x_{}", edge_name(eteg, e)));
    }
    for k in 0..sats {
        for h in 1..=cycles {
            model.vars.push(Var::Chi { sat: k, cycle: h });
            model.names.push(format!("chi_{k}_{h}"));
        }
    }
    for k in 0..sats {
        for e in 0..m {
            if model.xt_slot[e].is_some() {
                model.vars.push(Var::Xt { sat: k, edge: e });
                model.names.push(format!("xt_{k}_{}", edge_name(eteg, e)));
            }
        }
    }
    for k in 0..sats {
        model.vars.push(Var::Delta { sat: k });
        model.names.push(format!("delta_{k}"));
    }
    model.objective = (0..m).map(|e| (e, as_ms(edges[e].latency))).collect();

    let mut leaving_count: Vec<Expr> = vec![Vec::new(); sats];
    for k in 0..sats {
        let mut entering = Vec::new();
        let mut leaving = Vec::new();
        for (e, edge) in edges.iter().enumerate() {
            let tail = eteg.node(edge.tail);
            let h = model.tail_cycle[e] as f64;
            match edge.kind {
                EdgeKind::Transmission => {
                    if tail.sat() == Some(k) {
                        leaving.push((e, h));
                        leaving_count[k].push((e, 1.0));
                    }
                    if eteg.node(edge.head).sat() == Some(k) {
                        entering.push((e, h));
                    }
                }
                EdgeKind::Aggregation if k == f.sink => {
                    leaving.push((e, h));
                    leaving_count[k].push((e, 1.0));
                }
                _ => {}
            }
        }
        model.cycle_exprs.push(CycleExpressions { entering, leaving });
    }

    let mut rows: Vec<Row> = Vec::new();
    let mut add = |family: Family, name: String, terms: BTreeMap<usize, f64>, sense: Sense, rhs: f64| {
        let mut terms: Vec<(usize, f64)> = terms.into_iter().filter(|&(_, c)| c != 0.0).collect();
        if terms.is_empty() {
            terms.push((0, 0.0));
        }
        rows.push(Row { family, name, terms, sense, rhs });
    };
    let collect = |it: &mut dyn Iterator<Item = (usize, f64)>| -> BTreeMap<usize, f64> {
        let mut m = BTreeMap::new();
        for (v, c) in it {
            *m.entry(v).or_insert(0.0) += c;
        }
        m
    };

    let src = eteg.source();
    let src_terms = collect(&mut eteg.out_edges(src).iter().map(|&e| (e, 1.0)));
    add(Family::Source, String::from("src"), src_terms, Sense::Eq, 1.0);
    let agg = collect(&mut (0..m).filter(|&e| edges[e].kind == EdgeKind::Aggregation).map(|e| (e, 1.0)));
    add(Family::Sink, String::from("sink"), agg, Sense::Eq, 1.0);
    let delay = collect(&mut model.objective.iter().copied());
    add(Family::DelayBound, String::from("bound"), delay, Sense::Le, as_ms(f.bound));
    for e in 0..m {
        let t = collect(&mut core::iter::once((e, edges[e].capacity - f.size_mb)));
        add(Family::Capacity, format!("cap_{}", edge_name(eteg, e)), t, Sense::Ge, 0.0);
    }
    for k in 0..sats {
        if k == f.source || k == f.sink {
            continue;
        }
        let mut t = BTreeMap::new();
        for (e, edge) in edges.iter().enumerate() {
            if edge.kind != EdgeKind::Transmission {
                continue;
            }
            if eteg.node(edge.head).sat() == Some(k) {
                *t.entry(e).or_insert(0.0) += 1.0;
            }
            if eteg.node(edge.tail).sat() == Some(k) {
                *t.entry(e).or_insert(0.0) -= 1.0;
            }
        }
        add(Family::Conservation, format!("flow_{k}"), t, Sense::Eq, 0.0);
    }
    for k in 0..sats {
        let g2 = &model.cycle_exprs[k].leaving;
        for h in 1..=cycles {
            let [lo, hi] = chi_rows(h, cycles, epsilon);
            for (family, tpl) in [(Family::ChiLower, lo), (Family::ChiUpper, hi)] {
                let mut t = BTreeMap::new();
                push_scaled(&mut t, g2, tpl.coef[0]);
                push_scaled(&mut t, &[(model.chi(k, h), 1.0)], tpl.coef[1]);
                push_scaled(&mut t, &leaving_count[k], tpl.coef[2]);
                let tag = if family == Family::ChiLower { "chilo" } else { "chihi" };
                add(family, format!("{tag}_{k}_{h}"), t, tpl.sense, tpl.rhs);
            }
        }
    }
    let prod = product_rows();
    for k in 0..sats {
        for e in 0..m {
            let Some(xt) = model.xt(k, e) else { continue };
            let chi = model.chi(k, model.tail_cycle[e]);
            for (family, tpl, tag) in [
                (Family::ProductUpper, prod[0], "prod"),
                (Family::ProductChi, prod[1], "prodchi"),
                (Family::ProductX, prod[2], "prodx"),
            ] {
                let t = expand3(&tpl, [&[(chi, 1.0)], &[(e, 1.0)], &[(xt, 1.0)]]);
                add(family, format!("{tag}_{k}_{}", edge_name(eteg, e)), t, tpl.sense, tpl.rhs);
            }
        }
    }
    let tau = as_ms(eteg.grid().cycle_len());
    let fl = floor_rows(cycles, tau, as_ms(f.bound));
    for k in 0..sats {
        let s: Expr = (0..m).filter_map(|e| model.xt(k, e).map(|v| (v, as_ms(edges[e].latency)))).collect();
        let ce = &model.cycle_exprs[k];
        let d: Expr = vec![(model.delta(k), 1.0)];
        for (family, tpl, tag) in [
            (Family::FloorLower, fl[0], "floorlo"),
            (Family::FloorUpper, fl[1], "floorhi"),
            (Family::CycleUpper, fl[2], "cyclehi"),
            (Family::CycleLower, fl[3], "cyclelo"),
        ] {
            let mut t = BTreeMap::new();
            for (slot, expr) in [&s, &ce.leaving, &ce.entering, &d].into_iter().enumerate() {
                push_scaled(&mut t, expr, tpl.coef[slot]);
            }
            add(family, format!("{tag}_{k}"), t, tpl.sense, tpl.rhs);
        }
    }
    rows.sort_by_key(|r| r.family);
    model.rows = rows;
    Ok(model)
}

fn expand3(tpl: &Template<3>, slots: [&[(usize, f64)]; 3]) -> BTreeMap<usize, f64> {
    let mut t = BTreeMap::new();
    for (i, expr) in slots.into_iter().enumerate() {
        push_scaled(&mut t, expr, tpl.coef[i]);
    }
    t
}
