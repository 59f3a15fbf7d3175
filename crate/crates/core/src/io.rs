//! JSON formats.
//!
//! Network:
//! `{"nodes":[{"id":0,"card":3,"label":"V1"}], "edges":[[0,1]],
//!   "cpds":[{"child":0,"parents":[],"table":[[0.4,0.6]]}], "positive":true}`.
//! Table rows are indexed by the mixed-radix code of the listed parents, first
//! parent most significant. `positive` is optional and defaults to false.
//!
//! Tuple set: `{"tuples":[{"target":{"0":0,"1":0},"weight":0.5}]}`.
//!
//! Mixture table: `{"entries":[{"assignment":[0,1],"prob":0.25}]}`, one entry
//! per full assignment with nonzero mass.
//!
//! Probabilities are JSON numbers or strings holding fractions (`"1/3"`).
//! Exact values are written as fractions, floats as numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbn::{CausalNet, CptTable, Dag, NetError, NetSpec, NodeId, Value};
use crate::disentangle::{DisentangleReport, FrequencyOracle, LevelResidual};
use crate::intervene::{InterventionError, InterventionTarget, InterventionTuple, InterventionTupleSet};
use crate::scalar::{ParseScalarError, ProbLiteral, Scalar};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Intervention(#[from] InterventionError),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeJson {
    id: usize,
    card: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CptJson {
    child: usize,
    parents: Vec<usize>,
    table: Vec<Vec<ProbLiteral>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetJson {
    nodes: Vec<NodeJson>,
    edges: Vec<(usize, usize)>,
    cpds: Vec<CptJson>,
    #[serde(default)]
    positive: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct TupleJson {
    target: BTreeMap<String, Value>,
    weight: ProbLiteral,
}

#[derive(Debug, Serialize, Deserialize)]
struct TupleSetJson {
    tuples: Vec<TupleJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableEntryJson {
    assignment: Vec<Value>,
    prob: ProbLiteral,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableJson {
    entries: Vec<TableEntryJson>,
}

pub fn net_from_json<S: Scalar>(text: &str) -> Result<CausalNet<S>, FormatError> {
    let raw: NetJson = serde_json::from_str(text)?;
    let n = raw.nodes.len();
    let mut cards = vec![0; n];
    let mut labels = vec![None; n];
    for node in &raw.nodes {
        if node.id >= n || cards[node.id] != 0 {
            return Err(FormatError::Invalid(format!("node ids must be 0..{n} without repeats")));
        }
        cards[node.id] = node.card;
        labels[node.id] = node.label.clone();
    }
    let labels = labels.into_iter().enumerate().map(|(i, l)| l.unwrap_or_else(|| format!("V{}", i + 1))).collect();
    let cpds = raw
        .cpds
        .into_iter()
        .map(|c| {
            let rows = c
                .table
                .iter()
                .map(|row| row.iter().map(S::parse_literal).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CptTable { child: NodeId(c.child), parents: c.parents.into_iter().map(NodeId).collect(), rows })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let spec = NetSpec { cards, labels, edges: raw.edges, cpds, positive: raw.positive };
    Ok(spec.validate()?)
}

pub fn net_to_json<S: Scalar>(net: &CausalNet<S>) -> String {
    let dag = net.dag();
    let raw = NetJson {
        nodes: dag
            .nodes()
            .map(|id| NodeJson { id: id.0, card: dag.domain(id).cardinality(), label: Some(dag.label(id).to_string()) })
            .collect(),
        edges: dag.edges().into_iter().map(|(p, c)| (p.0, c.0)).collect(),
        cpds: net
            .cpts()
            .iter()
            .map(|c| CptJson {
                child: c.child.0,
                parents: c.parents.iter().map(|p| p.0).collect(),
                table: c.rows.iter().map(|r| r.iter().map(Scalar::to_literal).collect()).collect(),
            })
            .collect(),
        positive: net.claims_positivity(),
    };
    pretty(&raw)
}

fn target_from_json(map: &BTreeMap<String, Value>) -> Result<InterventionTarget, FormatError> {
    let pairs = map
        .iter()
        .map(|(k, &v)| {
            k.trim()
                .parse::<usize>()
                .map(|n| (NodeId(n), v))
                .map_err(|_| FormatError::Invalid(format!("target key `{k}` is not a node id")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InterventionTarget::new(pairs)?)
}

fn target_to_json(t: &InterventionTarget) -> BTreeMap<String, Value> {
    t.assignments().iter().map(|(n, v)| (n.0.to_string(), *v)).collect()
}

fn tuple_entries<S: Scalar>(set: &InterventionTupleSet<S>) -> Vec<TupleJson> {
    set.iter().map(|t| TupleJson { target: target_to_json(&t.target), weight: t.weight.to_literal() }).collect()
}

/// Reads a tuple set; when `dag` is given the targets are checked against it.
pub fn tuples_from_json<S: Scalar>(text: &str, dag: Option<&Dag>) -> Result<InterventionTupleSet<S>, FormatError> {
    let raw: TupleSetJson = serde_json::from_str(text)?;
    let tuples = raw
        .tuples
        .iter()
        .map(|t| Ok(InterventionTuple::new(target_from_json(&t.target)?, S::parse_literal(&t.weight)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let set = InterventionTupleSet::new(tuples)?;
    if let Some(dag) = dag {
        set.check_against(dag)?;
    }
    Ok(set)
}

pub fn tuples_to_json<S: Scalar>(set: &InterventionTupleSet<S>) -> String {
    pretty(&TupleSetJson { tuples: tuple_entries(set) })
}

/// Reads an explicit mixture table over the assignments of `dag`.
pub fn mixture_table_from_json<S: Scalar>(text: &str, dag: &Dag) -> Result<FrequencyOracle<S>, FormatError> {
    let raw: TableJson = serde_json::from_str(text)?;
    let mut entries = Vec::with_capacity(raw.entries.len());
    let mut total = S::zero();
    for e in &raw.entries {
        dag.check_assignment(&e.assignment)?;
        let p = S::parse_literal(&e.prob)?;
        if p < S::zero() {
            return Err(FormatError::Invalid(format!("negative probability at {:?}", e.assignment)));
        }
        total = total + p.clone();
        entries.push((e.assignment.clone(), p));
    }
    if (total.to_f64() - 1.0).abs() > crate::intervene::WEIGHT_TOLERANCE {
        return Err(FormatError::Invalid(format!("mixture table sums to {}", total.to_f64())));
    }
    if S::EXACT && !total.is_one() {
        for (_, p) in &mut entries {
            *p = p.clone() / total.clone();
        }
    }
    Ok(FrequencyOracle::from_table(dag, entries))
}

pub fn mixture_table_to_json<S: Scalar>(entries: &[(Vec<Value>, S)]) -> String {
    pretty(&TableJson {
        entries: entries.iter().map(|(a, p)| TableEntryJson { assignment: a.clone(), prob: p.to_literal() }).collect(),
    })
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    tuples: Vec<TupleJson>,
    residuals: &'a [LevelResidual],
    pruned_mass: f64,
    notes: &'a [String],
    wall_time_ms: f64,
}

pub fn report_to_json<S: Scalar>(report: &DisentangleReport<S>) -> String {
    pretty(&ReportJson {
        tuples: tuple_entries(&report.tuples),
        residuals: &report.residuals,
        pruned_mass: report.pruned_mass.to_f64(),
        notes: &report.notes,
        wall_time_ms: report.elapsed.as_secs_f64() * 1e3,
    })
}

/// The tuple set stored in a report file.
pub fn report_tuples<S: Scalar>(text: &str) -> Result<InterventionTupleSet<S>, FormatError> {
    tuples_from_json(text, None)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
