use alloc::string::String;
use core::fmt::Write;

use super::model::{Family, IlpModel, Row};

const WRAP: usize = 240;

fn fmt_num(v: f64) -> String {
    let mut s = String::new();
    if v == libm::trunc(v) && v.abs() < 1e15 {
        write!(s, "{}", v as i64).unwrap();
    } else {
        write!(s, "{v}").unwrap();
    }
    s
}

fn push_terms(out: &mut String, model: &IlpModel, terms: &[(usize, f64)], indent: &str) {
    let mut line = String::new();
    for (k, &(v, c)) in terms.iter().enumerate() {
        let mut term = String::new();
        let sign = if c < 0.0 { "-" } else { "+" };
        if k > 0 || c < 0.0 {
            term.push_str(sign);
            term.push(' ');
        }
        let mag = c.abs();
        if mag != 1.0 {
            term.push_str(&fmt_num(mag));
            term.push(' ');
        }
        term.push_str(&model.names[v]);
        if line.len() + term.len() + 1 > WRAP {
            out.push_str(&line);
            out.push('\n');
            line.clear();
            line.push_str(indent);
        } else if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(&term);
    }
    out.push_str(&line);
}

fn push_row(out: &mut String, model: &IlpModel, row: &Row) {
    write!(out, " {}: ", row.name).unwrap();
    push_terms(out, model, &row.terms, "   ");
    writeln!(out, " {} {}", row.sense.as_lp(), fmt_num(row.rhs)).unwrap();
}

/// CPLEX LP text of the model: ASCII, `\n` line endings, deterministic.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let d = &model.demand;
    writeln!(out, "\\ deterministic routing, demand {} (u{} -> u{})", d.id, d.source, d.sink).unwrap();
    writeln!(out, "\\ objective and coefficients in ms").unwrap();
    out.push_str("Minimize\n obj: ");
    push_terms(&mut out, model, &model.objective, "   ");
    out.push_str("\nSubject To\n");
    let mut last: Option<Family> = None;
    for row in &model.rows {
        if last != Some(row.family) {
            writeln!(out, "\\ ({}) {}", row.family.equation(), row.family.describe()).unwrap();
            last = Some(row.family);
        }
        push_row(&mut out, model, row);
    }
    out.push_str("Binary\n");
    for name in &model.names {
        writeln!(out, " {name}").unwrap();
    }
    out.push_str("End\n");
    out
}
