//! JSON contact plans, CSV traffic files, route result tables and ETEG dumps.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use detroute_core::contact_plan::PlanError;
use detroute_core::time::{as_ms, from_ms_f64, ms, US_PER_MS};
use detroute_core::traffic::DemandError;
use detroute_core::{BandwidthSegment, Contact, ContactPlan, Eteg, Micros, TrafficDemand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("plan file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid plan: {0}")]
    Plan(#[from] PlanError),
    #[error("invalid demand: {0}")]
    Demand(#[from] DemandError),
    #[error("contact {contact}: unknown node `{name}` in field `{field}`")]
    UnknownNode { contact: usize, field: &'static str, name: String },
    #[error("traffic row {row}: unknown node `{name}` in field `{field}`")]
    UnknownEndpoint { row: usize, field: &'static str, name: String },
    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),
    #[error("contact {contact}: field `delay_ms` must be finite and positive")]
    Delay { contact: usize },
    #[error("demand {id}: field `{field}` is not a whole number of ms")]
    NotWholeMs { id: u32, field: &'static str },
    #[error("demand {0} not found")]
    NoSuchDemand(u32),
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path).map(BufReader::new).map_err(|source| IoError::File { path: path.into(), source })
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|source| IoError::File { path: path.into(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| IoError::File { path: path.into(), source })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDto {
    pub t_from_ms: u64,
    pub t_to_ms: u64,
    pub mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactDto {
    pub from: String,
    pub to: String,
    pub t_start_ms: u64,
    pub t_end_ms: u64,
    pub delay_ms: f64,
    pub bandwidth: Vec<SegmentDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDto {
    pub epoch_ms: i64,
    pub horizon_ms: u64,
    pub buffer_mb: f64,
    pub nodes: Vec<String>,
    pub contacts: Vec<ContactDto>,
}

fn name_index(nodes: &[String]) -> Result<HashMap<&str, usize>, IoError> {
    let mut idx = HashMap::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        if idx.insert(n.as_str(), i).is_some() {
            return Err(IoError::DuplicateNode(n.clone()));
        }
    }
    Ok(idx)
}

impl PlanDto {
    pub fn from_plan(plan: &ContactPlan) -> Self {
        let name = |i: usize| plan.nodes()[i].clone();
        let contacts = plan
            .contacts()
            .iter()
            .map(|c| ContactDto {
                from: name(c.from),
                to: name(c.to),
                t_start_ms: c.t_start / US_PER_MS,
                t_end_ms: c.t_end / US_PER_MS,
                delay_ms: as_ms(c.delay),
                bandwidth: c
                    .bandwidth
                    .iter()
                    .map(|s| SegmentDto { t_from_ms: s.t_from / US_PER_MS, t_to_ms: s.t_to / US_PER_MS, mbps: s.mbps })
                    .collect(),
            })
            .collect();
        Self {
            epoch_ms: plan.epoch_ms(),
            horizon_ms: plan.horizon() / US_PER_MS,
            buffer_mb: plan.buffer_mb(),
            nodes: plan.nodes().to_vec(),
            contacts,
        }
    }

    pub fn into_plan(self) -> Result<ContactPlan, IoError> {
        let idx = name_index(&self.nodes)?;
        let lookup = |contact: usize, field: &'static str, name: &str| {
            idx.get(name).copied().ok_or_else(|| IoError::UnknownNode { contact, field, name: name.into() })
        };
        let mut contacts = Vec::with_capacity(self.contacts.len());
        for (k, c) in self.contacts.iter().enumerate() {
            if !(c.delay_ms.is_finite() && c.delay_ms > 0.0) {
                return Err(IoError::Delay { contact: k });
            }
            contacts.push(Contact {
                from: lookup(k, "from", &c.from)?,
                to: lookup(k, "to", &c.to)?,
                t_start: ms(c.t_start_ms),
                t_end: ms(c.t_end_ms),
                delay: from_ms_f64(c.delay_ms).max(1),
                bandwidth: c
                    .bandwidth
                    .iter()
                    .map(|s| BandwidthSegment { t_from: ms(s.t_from_ms), t_to: ms(s.t_to_ms), mbps: s.mbps })
                    .collect(),
            });
        }
        Ok(ContactPlan::new(self.nodes, contacts, self.epoch_ms, ms(self.horizon_ms), self.buffer_mb)?)
    }
}

pub fn parse_plan(json: &str) -> Result<ContactPlan, IoError> {
    serde_json::from_str::<PlanDto>(json)?.into_plan()
}

pub fn plan_to_json(plan: &ContactPlan) -> String {
    let mut s = serde_json::to_string_pretty(&PlanDto::from_plan(plan)).expect("plan serializes");
    s.push('\n');
    s
}

pub fn load_plan(path: &Path) -> Result<ContactPlan, IoError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| IoError::File { path: path.into(), source })?;
    parse_plan(&text)
}

pub fn save_plan(plan: &ContactPlan, path: &Path) -> Result<(), IoError> {
    write_text(path, &plan_to_json(plan))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficRow {
    pub id: u32,
    pub src: String,
    pub dst: String,
    pub t_f_ms: u64,
    #[serde(rename = "T_f_ms")]
    pub period_ms: u64,
    #[serde(rename = "A_f_mb")]
    pub size_mb: f64,
    #[serde(rename = "B_f_ms")]
    pub bound_ms: u64,
}

fn whole_ms(id: u32, field: &'static str, v: Micros) -> Result<u64, IoError> {
    if v % US_PER_MS == 0 {
        Ok(v / US_PER_MS)
    } else {
        Err(IoError::NotWholeMs { id, field })
    }
}

pub fn read_traffic<R: Read>(plan: &ContactPlan, reader: R) -> Result<Vec<TrafficDemand>, IoError> {
    let idx = name_index(plan.nodes())?;
    let mut out = Vec::new();
    for (row, rec) in csv::Reader::from_reader(reader).deserialize::<TrafficRow>().enumerate() {
        let r = rec?;
        let lookup = |field: &'static str, name: &str| {
            idx.get(name).copied().ok_or_else(|| IoError::UnknownEndpoint { row, field, name: name.into() })
        };
        let d = TrafficDemand::new(
            r.id,
            lookup("src", &r.src)?,
            lookup("dst", &r.dst)?,
            ms(r.t_f_ms),
            ms(r.period_ms),
            r.size_mb,
            ms(r.bound_ms),
        )?;
        d.check_against(plan)?;
        out.push(d);
    }
    Ok(out)
}

pub fn write_traffic<W: Write>(plan: &ContactPlan, demands: &[TrafficDemand], writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for d in demands {
        w.serialize(TrafficRow {
            id: d.id,
            src: plan.nodes()[d.source].clone(),
            dst: plan.nodes()[d.sink].clone(),
            t_f_ms: whole_ms(d.id, "t_f_ms", d.t_f)?,
            period_ms: whole_ms(d.id, "T_f_ms", d.period)?,
            size_mb: d.size_mb,
            bound_ms: whole_ms(d.id, "B_f_ms", d.bound)?,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn load_traffic(plan: &ContactPlan, path: &Path) -> Result<Vec<TrafficDemand>, IoError> {
    read_traffic(plan, open(path)?)
}

pub fn save_traffic(plan: &ContactPlan, demands: &[TrafficDemand], path: &Path) -> Result<(), IoError> {
    write_traffic(plan, demands, create(path)?)
}

pub fn find_demand(demands: &[TrafficDemand], id: u32) -> Result<TrafficDemand, IoError> {
    demands.iter().find(|d| d.id == id).copied().ok_or(IoError::NoSuchDemand(id))
}

/// One line of a `route` results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub demand_id: u32,
    pub accepted: bool,
    pub delay_ms: Option<f64>,
    pub path: String,
}

pub fn write_results<W: Write>(rows: &[ResultRow], writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<ResultRow>, IoError> {
    Ok(csv::Reader::from_reader(reader).deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub to: String,
    pub kind: String,
    pub capacity_mb: f64,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: String,
    pub out: Vec<EdgeDto>,
}

/// Adjacency list of `eteg`, nodes in index order.
pub fn eteg_to_json(eteg: &Eteg) -> String {
    let nodes: Vec<NodeDto> = (0..eteg.node_count())
        .map(|n| NodeDto {
            id: eteg.node(n).to_string(),
            out: eteg
                .out_edges(n)
                .iter()
                .map(|&e| eteg.edge(e))
                .map(|e| EdgeDto {
                    to: eteg.node(e.head).to_string(),
                    kind: e.kind.as_str().into(),
                    capacity_mb: e.capacity,
                    latency_ms: as_ms(e.latency),
                })
                .collect(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&nodes).expect("eteg serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_milliseconds_only() {
        assert_eq!(whole_ms(0, "t_f_ms", 7_000).unwrap(), 7);
        assert!(matches!(whole_ms(3, "B_f_ms", 7_001), Err(IoError::NotWholeMs { id: 3, field: "B_f_ms" })));
    }

    #[test]
    fn node_names_are_unique() {
        let names = vec!["a".to_string(), "b".into(), "a".into()];
        assert!(matches!(name_index(&names), Err(IoError::DuplicateNode(n)) if n == "a"));
    }

    #[test]
    fn delays_are_positive() {
        let json = r#"{"epoch_ms":0,"horizon_ms":10,"buffer_mb":1,"nodes":["a","b"],
            "contacts":[{"from":"a","to":"b","t_start_ms":0,"t_end_ms":10,"delay_ms":0,
            "bandwidth":[{"t_from_ms":0,"t_to_ms":10,"mbps":1}]}]}"#;
        assert!(matches!(parse_plan(json), Err(IoError::Delay { contact: 0 })));
    }
}
