//! Discrete causal Bayesian networks.
//!
//! A [`Dag`] carries structure only (domains and ordered parent lists); a
//! [`CausalNet`] adds one conditional probability table per node. Networks are
//! only ever constructed through [`NetSpec::validate`], so a `CausalNet` value
//! is acyclic, shape-consistent and row-normalized.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{convert, Scalar};

/// Value code of a categorical variable, dense in `0..cardinality`.
pub type Value = u32;

/// Rows summing to within this of one are renormalized at load time.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    cardinality: usize,
}

impl Domain {
    pub fn new(cardinality: usize) -> Result<Self, NetError> {
        if cardinality < 2 {
            return Err(NetError::InvalidCardinality { cardinality });
        }
        Ok(Domain { cardinality })
    }

    pub fn cardinality(self) -> usize {
        self.cardinality
    }

    pub fn values(self) -> impl Iterator<Item = Value> {
        0..self.cardinality as Value
    }

    pub fn contains(self, v: Value) -> bool {
        (v as usize) < self.cardinality
    }
}

/// A total assignment, indexed by node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<Value>);

impl Assignment {
    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn get(&self, node: NodeId) -> Value {
        self.0[node.0]
    }
}

impl From<Vec<Value>> for Assignment {
    fn from(v: Vec<Value>) -> Self {
        Assignment(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("cardinality {cardinality} is invalid; every domain needs at least two values")]
    InvalidCardinality { cardinality: usize },
    #[error("node id {0} is out of range")]
    UnknownNode(usize),
    #[error("{node} has no CPT")]
    MissingCpt { node: NodeId },
    #[error("{node} has more than one CPT")]
    DuplicateCpt { node: NodeId },
    #[error("CPT parents of {node} do not match its graph parents")]
    ParentMismatch { node: NodeId },
    #[error("CPT of {node} has the wrong shape: {detail}")]
    ShapeMismatch { node: NodeId, detail: String },
    #[error("CPT row {parent_assignment} of {node} sums to {sum}, not 1")]
    UnnormalizedCpt { node: NodeId, parent_assignment: usize, sum: f64 },
    #[error("CPT entry ({parent_assignment}, {value}) of {node} is not a probability")]
    InvalidProbability { node: NodeId, parent_assignment: usize, value: Value },
    #[error("positivity violated at CPT entry ({parent_assignment}, {value}) of {node}")]
    PositivityViolated { node: NodeId, parent_assignment: usize, value: Value },
    #[error("assignment covers {got} nodes, network has {expected}")]
    IncompleteAssignment { expected: usize, got: usize },
    #[error("value {value} is outside the domain of {node}")]
    ValueOutOfDomain { node: NodeId, value: Value },
    #[error("{node} has children and cannot be deleted")]
    NotASink { node: NodeId },
    #[error("order does not list every node of the network exactly once")]
    BadOrder,
}

/// Graph structure: per-node domains and ordered parent lists. Parent order is
/// significant, it fixes the mixed-radix indexing of CPT rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    domains: Vec<Domain>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    labels: Vec<String>,
    order: Vec<NodeId>,
}

impl Dag {
    /// Builds a DAG from parent lists. Fails on unknown ids, duplicate
    /// parents, or cycles.
    pub fn new(domains: Vec<Domain>, parents: Vec<Vec<NodeId>>) -> Result<Self, NetError> {
        let labels = (0..domains.len()).map(|i| format!("V{}", i + 1)).collect();
        Self::with_labels(domains, parents, labels)
    }

    pub fn with_labels(domains: Vec<Domain>, parents: Vec<Vec<NodeId>>, labels: Vec<String>) -> Result<Self, NetError> {
        let n = domains.len();
        if parents.len() != n {
            return Err(NetError::UnknownNode(parents.len().max(n)));
        }
        let mut children = vec![Vec::new(); n];
        for (child, ps) in parents.iter().enumerate() {
            for (i, p) in ps.iter().enumerate() {
                if p.0 >= n {
                    return Err(NetError::UnknownNode(p.0));
                }
                if p.0 == child {
                    return Err(NetError::CycleDetected);
                }
                if ps[..i].contains(p) {
                    return Err(NetError::ParentMismatch { node: NodeId(child) });
                }
                children[p.0].push(NodeId(child));
            }
        }
        let order = topological_order(&parents)?;
        Ok(Dag { domains, parents, children, labels, order })
    }

    /// Convenience constructor from an edge list; parents are ordered by id.
    pub fn from_edges(cards: &[usize], edges: &[(usize, usize)]) -> Result<Self, NetError> {
        let domains = cards.iter().map(|&k| Domain::new(k)).collect::<Result<Vec<_>, _>>()?;
        let mut parents = vec![Vec::new(); cards.len()];
        for &(from, to) in edges {
            if from >= cards.len() {
                return Err(NetError::UnknownNode(from));
            }
            if to >= cards.len() {
                return Err(NetError::UnknownNode(to));
            }
            parents[to].push(NodeId(from));
        }
        for ps in &mut parents {
            ps.sort();
        }
        Dag::new(domains, parents)
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.domains.len()).map(NodeId)
    }

    pub fn domain(&self, node: NodeId) -> Domain {
        self.domains[node.0]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn parents(&self, node: NodeId) -> &[NodeId] {
        &self.parents[node.0]
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.children[node.0]
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut edges: Vec<_> =
            self.parents.iter().enumerate().flat_map(|(c, ps)| ps.iter().map(move |&p| (p, NodeId(c)))).collect();
        edges.sort();
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Deterministic topological order, ties broken by smallest id.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.order
    }

    /// Number of CPT rows of `node` (product of parent cardinalities).
    pub fn parent_configs(&self, node: NodeId) -> usize {
        self.parents[node.0].iter().map(|p| self.domains[p.0].cardinality).product()
    }

    /// Mixed-radix code of the parent values of `node` in `values`, first
    /// parent most significant.
    pub fn parent_code(&self, node: NodeId, values: &[Value]) -> usize {
        self.parents[node.0].iter().fold(0usize, |code, p| code * self.domains[p.0].cardinality + values[p.0] as usize)
    }

    /// Inverse of [`Dag::parent_code`]: parent values in parent-list order.
    pub fn decode_parents(&self, node: NodeId, mut code: usize) -> Vec<Value> {
        let ps = &self.parents[node.0];
        let mut out = vec![0; ps.len()];
        for (slot, p) in ps.iter().enumerate().rev() {
            let k = self.domains[p.0].cardinality;
            out[slot] = (code % k) as Value;
            code /= k;
        }
        out
    }

    /// Every total assignment, in odometer order (last node fastest).
    pub fn assignments(&self) -> AssignmentIter {
        AssignmentIter::new(self.domains.iter().map(|d| d.cardinality).collect())
    }

    /// Number of total assignments, saturating.
    pub fn assignment_count(&self) -> usize {
        self.domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.cardinality)).unwrap_or(usize::MAX)
    }

    pub fn check_assignment(&self, values: &[Value]) -> Result<(), NetError> {
        if values.len() != self.len() {
            return Err(NetError::IncompleteAssignment { expected: self.len(), got: values.len() });
        }
        for (i, &v) in values.iter().enumerate() {
            if !self.domains[i].contains(v) {
                return Err(NetError::ValueOutOfDomain { node: NodeId(i), value: v });
            }
        }
        Ok(())
    }
}

/// Exactly one for rationals; within a few ulps for floats, so that saving and
/// reloading a renormalized row leaves its bits alone.
pub(crate) fn is_unit_sum<S: Scalar>(sum: &S) -> bool {
    if S::EXACT {
        sum.is_one()
    } else {
        (sum.to_f64() - 1.0).abs() <= 4.0 * f64::EPSILON
    }
}

/// Kahn's algorithm with a min-heap so that ties go to the smallest id.
pub fn topological_order(parents: &[Vec<NodeId>]) -> Result<Vec<NodeId>, NetError> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for p in ps {
            if p.0 >= n {
                return Err(NetError::UnknownNode(p.0));
            }
            children[p.0].push(c);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(u)) = ready.pop() {
        order.push(NodeId(u));
        for &c in &children[u] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() != n {
        return Err(NetError::CycleDetected);
    }
    Ok(order)
}

pub struct AssignmentIter {
    cards: Vec<usize>,
    next: Option<Vec<Value>>,
}

impl AssignmentIter {
    pub fn new(cards: Vec<usize>) -> Self {
        let next = if cards.contains(&0) { None } else { Some(vec![0; cards.len()]) };
        AssignmentIter { cards, next }
    }
}

impl Iterator for AssignmentIter {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut carried = true;
        while i > 0 && carried {
            i -= 1;
            succ[i] += 1;
            if (succ[i] as usize) < self.cards[i] {
                carried = false;
            } else {
                succ[i] = 0;
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Assignment(current))
    }
}

/// Conditional probability table for one node. `rows[code][value]` is
/// `P(child = value | parents = decode(code))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CptTable<S> {
    pub child: NodeId,
    pub parents: Vec<NodeId>,
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> CptTable<S> {
    pub fn convert<T: Scalar>(&self) -> CptTable<T> {
        CptTable {
            child: self.child,
            parents: self.parents.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(convert).collect()).collect(),
        }
    }
}

/// Unvalidated network description, the shape of the JSON file format.
#[derive(Clone, Debug, PartialEq)]
pub struct NetSpec<S> {
    pub cards: Vec<usize>,
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub cpds: Vec<CptTable<S>>,
    pub positive: bool,
}

impl<S: Scalar> NetSpec<S> {
    /// Checks acyclicity, CPT shapes and normalization (renormalizing rows
    /// within [`NORMALIZATION_TOLERANCE`]), and positivity when claimed.
    pub fn validate(self) -> Result<CausalNet<S>, NetError> {
        let n = self.cards.len();
        let domains = self.cards.iter().map(|&k| Domain::new(k)).collect::<Result<Vec<_>, _>>()?;

        let mut graph_parents: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(from, to) in &self.edges {
            if from >= n {
                return Err(NetError::UnknownNode(from));
            }
            if to >= n {
                return Err(NetError::UnknownNode(to));
            }
            graph_parents[to].push(from);
        }
        let edge_parents: Vec<Vec<NodeId>> =
            graph_parents.iter().map(|ps| ps.iter().map(|&p| NodeId(p)).collect()).collect();
        topological_order(&edge_parents)?;

        let mut slots: Vec<Option<CptTable<S>>> = vec![None; n];
        for cpt in self.cpds {
            let c = cpt.child.0;
            if c >= n {
                return Err(NetError::UnknownNode(c));
            }
            if slots[c].is_some() {
                return Err(NetError::DuplicateCpt { node: cpt.child });
            }
            slots[c] = Some(cpt);
        }
        let mut cpds = Vec::with_capacity(n);
        for (i, slot) in slots.into_iter().enumerate() {
            let cpt = slot.ok_or(NetError::MissingCpt { node: NodeId(i) })?;
            let mut listed: Vec<usize> = cpt.parents.iter().map(|p| p.0).collect();
            listed.sort_unstable();
            let mut graph = graph_parents[i].clone();
            graph.sort_unstable();
            if listed != graph || listed.windows(2).any(|w| w[0] == w[1]) {
                return Err(NetError::ParentMismatch { node: NodeId(i) });
            }
            cpds.push(cpt);
        }

        let labels = if self.labels.len() == n { self.labels } else { (0..n).map(|i| format!("V{}", i + 1)).collect() };
        let parents: Vec<Vec<NodeId>> = cpds.iter().map(|c| c.parents.clone()).collect();
        let dag = Dag::with_labels(domains, parents, labels)?;

        let tolerance = S::from_f64(NORMALIZATION_TOLERANCE);
        for cpt in &mut cpds {
            let node = cpt.child;
            let configs = dag.parent_configs(node);
            let k = dag.domain(node).cardinality();
            if cpt.rows.len() != configs {
                return Err(NetError::ShapeMismatch {
                    node,
                    detail: format!("{} rows, expected {configs}", cpt.rows.len()),
                });
            }
            for (code, row) in cpt.rows.iter_mut().enumerate() {
                if row.len() != k {
                    return Err(NetError::ShapeMismatch {
                        node,
                        detail: format!("row {code} has {} entries, expected {k}", row.len()),
                    });
                }
                for (v, p) in row.iter().enumerate() {
                    if *p < S::zero() || p.to_f64().is_nan() {
                        return Err(NetError::InvalidProbability { node, parent_assignment: code, value: v as Value });
                    }
                }
                let sum = S::sum(row.iter());
                if !is_unit_sum(&sum) {
                    if (sum.clone() - S::one()).abs() > tolerance {
                        return Err(NetError::UnnormalizedCpt { node, parent_assignment: code, sum: sum.to_f64() });
                    }
                    for p in row.iter_mut() {
                        *p = p.clone() / sum.clone();
                    }
                }
                if self.positive {
                    if let Some(v) = row.iter().position(|p| p.is_zero()) {
                        return Err(NetError::PositivityViolated { node, parent_assignment: code, value: v as Value });
                    }
                }
            }
        }

        Ok(CausalNet { dag, cpds, positive: self.positive })
    }
}

/// A validated causal Bayesian network.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalNet<S> {
    dag: Dag,
    cpds: Vec<CptTable<S>>,
    positive: bool,
}

impl<S: Scalar> CausalNet<S> {
    /// Builds and validates a network over `dag` from per-node CPT rows.
    pub fn from_dag(dag: &Dag, rows: Vec<Vec<Vec<S>>>, positive: bool) -> Result<Self, NetError> {
        let spec = NetSpec {
            cards: dag.domains().iter().map(|d| d.cardinality()).collect(),
            labels: dag.labels().to_vec(),
            edges: dag.edges().iter().map(|(p, c)| (p.0, c.0)).collect(),
            cpds: rows
                .into_iter()
                .enumerate()
                .map(|(i, rows)| CptTable { child: NodeId(i), parents: dag.parents(NodeId(i)).to_vec(), rows })
                .collect(),
            positive,
        };
        spec.validate()
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    pub fn domain(&self, node: NodeId) -> Domain {
        self.dag.domain(node)
    }

    pub fn cpt(&self, node: NodeId) -> &CptTable<S> {
        &self.cpds[node.0]
    }

    pub fn cpts(&self) -> &[CptTable<S>] {
        &self.cpds
    }

    /// Whether the positivity flag was set (and therefore verified) at load.
    pub fn claims_positivity(&self) -> bool {
        self.positive
    }

    /// Whether every CPT entry is strictly positive, regardless of the flag.
    pub fn is_positive(&self) -> bool {
        self.cpds.iter().all(|c| c.rows.iter().flatten().all(|p| *p > S::zero()))
    }

    pub fn topological_order(&self) -> &[NodeId] {
        self.dag.topological_order()
    }

    /// `P(node = values[node] | pa(node) = values[pa(node)])`.
    pub fn factor(&self, node: NodeId, values: &[Value]) -> &S {
        let code = self.dag.parent_code(node, values);
        &self.cpds[node.0].rows[code][values[node.0] as usize]
    }

    /// `∏ P(v_i | pa(v_i))` over all nodes.
    pub fn joint_prob(&self, v: &Assignment) -> Result<S, NetError> {
        self.dag.check_assignment(&v.0)?;
        Ok(self.prefix_prob(self.dag.len(), &v.0))
    }

    /// Product of the factors of the first `len` nodes of the topological
    /// order: the marginal of those nodes, since every later factor sums out.
    pub fn prefix_prob(&self, len: usize, values: &[Value]) -> S {
        let mut acc = S::one();
        for &node in &self.dag.topological_order()[..len] {
            let f = self.factor(node, values);
            if f.is_zero() {
                return S::zero();
            }
            acc = acc * f.clone();
        }
        acc
    }

    /// Removes the last node of `order`, which must be a sink. Returns the
    /// reduced network and, for each of its nodes, the id it had here. Ids
    /// above the removed node shift down by one.
    pub fn delete_last(&self, order: &[NodeId]) -> Result<(CausalNet<S>, Vec<NodeId>), NetError> {
        let mut seen = vec![false; self.len()];
        for &u in order {
            if u.0 >= self.len() || std::mem::replace(&mut seen[u.0], true) {
                return Err(NetError::BadOrder);
            }
        }
        let Some(&last) = order.last() else {
            return Err(NetError::BadOrder);
        };
        if order.len() != self.len() {
            return Err(NetError::BadOrder);
        }
        if !self.dag.children(last).is_empty() {
            return Err(NetError::NotASink { node: last });
        }
        let renumber = |u: NodeId| if u.0 > last.0 { NodeId(u.0 - 1) } else { u };
        let kept: Vec<NodeId> = self.dag.nodes().filter(|&u| u != last).collect();
        let spec = NetSpec {
            cards: kept.iter().map(|&u| self.domain(u).cardinality()).collect(),
            labels: kept.iter().map(|&u| self.dag.label(u).to_string()).collect(),
            edges: self
                .dag
                .edges()
                .into_iter()
                .filter(|&(_, c)| c != last)
                .map(|(p, c)| (renumber(p).0, renumber(c).0))
                .collect(),
            cpds: kept
                .iter()
                .map(|&u| {
                    let cpt = &self.cpds[u.0];
                    CptTable {
                        child: renumber(u),
                        parents: cpt.parents.iter().map(|&p| renumber(p)).collect(),
                        rows: cpt.rows.clone(),
                    }
                })
                .collect(),
            positive: self.positive,
        };
        Ok((spec.validate()?, kept))
    }

    /// Same network in another numeric backend. Rows are renormalized on the
    /// way in, so converting rationals to `f64` stays valid.
    pub fn convert<T: Scalar>(&self) -> CausalNet<T> {
        let spec = NetSpec {
            cards: self.dag.domains().iter().map(|d| d.cardinality()).collect(),
            labels: self.dag.labels().to_vec(),
            edges: self.dag.edges().iter().map(|(p, c)| (p.0, c.0)).collect(),
            cpds: self.cpds.iter().map(CptTable::convert).collect(),
            positive: false,
        };
        let mut net = spec.validate().expect("conversion preserves validity");
        net.positive = self.positive && net.is_positive();
        net
    }

    pub fn to_spec(&self) -> NetSpec<S> {
        NetSpec {
            cards: self.dag.domains().iter().map(|d| d.cardinality()).collect(),
            labels: self.dag.labels().to_vec(),
            edges: self.dag.edges().iter().map(|(p, c)| (p.0, c.0)).collect(),
            cpds: self.cpds.clone(),
            positive: self.positive,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(p: u64, d: u64) -> Rational {
        ratio(p, d)
    }

    fn one_node(row: Vec<Rational>, positive: bool) -> NetSpec<Rational> {
        NetSpec {
            cards: vec![row.len()],
            labels: vec![],
            edges: vec![],
            cpds: vec![CptTable { child: NodeId(0), parents: vec![], rows: vec![row] }],
            positive,
        }
    }

    /// V1 -> V2, binary; P(V1=1) = 1/2, P(V2=1 | V1=0) = 1/2,
    /// P(V2=1 | V1=1) = `p21`.
    fn two_node(p21: Rational, positive: bool) -> NetSpec<Rational> {
        NetSpec {
            cards: vec![2, 2],
            labels: vec![],
            edges: vec![(0, 1)],
            cpds: vec![
                CptTable { child: NodeId(0), parents: vec![], rows: vec![vec![q(1, 2), q(1, 2)]] },
                CptTable {
                    child: NodeId(1),
                    parents: vec![NodeId(0)],
                    rows: vec![vec![q(1, 2), q(1, 2)], vec![Rational::from_integer(1.into()) - p21.clone(), p21]],
                },
            ],
            positive,
        }
    }

    #[test]
    fn uniform_single_node_validates() {
        let net = one_node(vec![q(1, 2), q(1, 2)], true).validate().unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.is_positive());
    }

    #[test]
    fn positivity_violation_is_reported() {
        let err = two_node(q(0, 1), true).validate().unwrap_err();
        assert_eq!(err, NetError::PositivityViolated { node: NodeId(1), parent_assignment: 1, value: 1 });
        // Without the flag the same network is accepted.
        assert!(two_node(q(0, 1), false).validate().is_ok());
    }

    #[test]
    fn two_cycle_is_rejected() {
        let mut spec = two_node(q(1, 2), false);
        spec.edges.push((1, 0));
        spec.cpds[0].parents = vec![NodeId(1)];
        spec.cpds[0].rows = vec![vec![q(1, 2), q(1, 2)]; 2];
        assert_eq!(spec.validate().unwrap_err(), NetError::CycleDetected);
    }

    #[test]
    fn unnormalized_row_is_rejected() {
        let err = one_node(vec![q(1, 2), q(1, 3)], false).validate().unwrap_err();
        assert!(matches!(err, NetError::UnnormalizedCpt { parent_assignment: 0, .. }));
    }

    #[test]
    fn float_rows_within_tolerance_are_renormalized() {
        let spec = NetSpec {
            cards: vec![2],
            labels: vec![],
            edges: vec![],
            cpds: vec![CptTable { child: NodeId(0), parents: vec![], rows: vec![vec![0.5, 0.5 + 5e-13]] }],
            positive: false,
        };
        let net = spec.validate().unwrap();
        let row = &net.cpt(NodeId(0)).rows[0];
        assert!((row[0] + row[1] - 1.0).abs() < 1e-15);

        let bad = NetSpec {
            cards: vec![2],
            labels: vec![],
            edges: vec![],
            cpds: vec![CptTable { child: NodeId(0), parents: vec![], rows: vec![vec![0.5, 0.5 + 1e-9]] }],
            positive: false,
        };
        assert!(matches!(bad.validate(), Err(NetError::UnnormalizedCpt { .. })));
    }

    #[test]
    fn shape_and_parent_mismatches() {
        let mut spec = two_node(q(1, 2), false);
        spec.cpds[1].rows.pop();
        assert!(matches!(spec.validate(), Err(NetError::ShapeMismatch { .. })));

        let mut spec = two_node(q(1, 2), false);
        spec.cpds[1].parents.clear();
        assert!(matches!(spec.validate(), Err(NetError::ParentMismatch { .. })));

        let mut spec = two_node(q(1, 2), false);
        spec.cpds.pop();
        assert!(matches!(spec.validate(), Err(NetError::MissingCpt { .. })));
    }

    #[test]
    fn topological_orders() {
        let chain = Dag::from_edges(&[2, 2, 2], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.topological_order(), &[NodeId(0), NodeId(1), NodeId(2)]);

        let empty = Dag::from_edges(&[2, 2, 2], &[]).unwrap();
        assert_eq!(empty.topological_order(), &[NodeId(0), NodeId(1), NodeId(2)]);

        let c2 = Dag::from_edges(&[2, 2, 2], &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(c2.topological_order(), &[NodeId(0), NodeId(1), NodeId(2)]);

        // 2 -> 0, tie between 1 and 2 at the start goes to 1.
        let reversed = Dag::from_edges(&[2, 2, 2], &[(2, 0)]).unwrap();
        assert_eq!(reversed.topological_order(), &[NodeId(1), NodeId(2), NodeId(0)]);

        assert_eq!(Dag::from_edges(&[2, 2], &[(0, 1), (1, 0)]).unwrap_err(), NetError::CycleDetected);
    }

    #[test]
    fn worked_two_node_joint() {
        let net = two_node(q(1, 2), true).validate().unwrap();
        assert_eq!(net.joint_prob(&Assignment(vec![0, 0])).unwrap(), q(1, 4));
        let total: Rational = net.dag().assignments().map(|v| net.joint_prob(&v).unwrap()).sum();
        assert_eq!(total, q(1, 1));
        assert_eq!(
            net.joint_prob(&Assignment(vec![0])).unwrap_err(),
            NetError::IncompleteAssignment { expected: 2, got: 1 }
        );
        assert!(matches!(net.joint_prob(&Assignment(vec![0, 2])), Err(NetError::ValueOutOfDomain { .. })));
    }

    #[test]
    fn delete_sink_of_chain() {
        let net = two_node(q(1, 3), true).validate().unwrap();
        let (reduced, ids) = net.delete_last(&[NodeId(0), NodeId(1)]).unwrap();
        assert_eq!(ids, vec![NodeId(0)]);
        assert_eq!(reduced.cpt(NodeId(0)).rows, net.cpt(NodeId(0)).rows);
        assert_eq!(net.delete_last(&[NodeId(1), NodeId(0)]).unwrap_err(), NetError::NotASink { node: NodeId(0) });
    }

    #[test]
    fn delete_renumbers_ids_above_the_sink() {
        // 1 -> 2, node 0 isolated; order [1, 2, 0] deletes node 0.
        let dag = Dag::from_edges(&[2, 3, 2], &[(1, 2)]).unwrap();
        let rows = vec![
            vec![vec![q(1, 2), q(1, 2)]],
            vec![vec![q(1, 3), q(1, 3), q(1, 3)]],
            vec![vec![q(1, 4), q(3, 4)], vec![q(1, 2), q(1, 2)], vec![q(1, 5), q(4, 5)]],
        ];
        let net = CausalNet::from_dag(&dag, rows, true).unwrap();
        let (reduced, ids) = net.delete_last(&[NodeId(1), NodeId(2), NodeId(0)]).unwrap();
        assert_eq!(ids, vec![NodeId(1), NodeId(2)]);
        assert_eq!(reduced.dag().parents(NodeId(1)), &[NodeId(0)]);
        assert_eq!(reduced.domain(NodeId(0)).cardinality(), 3);
    }

    #[test]
    fn parent_code_round_trip() {
        let dag = Dag::new(
            vec![Domain::new(2).unwrap(), Domain::new(3).unwrap(), Domain::new(2).unwrap()],
            vec![vec![], vec![], vec![NodeId(1), NodeId(0)]],
        )
        .unwrap();
        // First listed parent (node 1) is most significant.
        assert_eq!(dag.parent_code(NodeId(2), &[1, 2, 0]), 2 * 2 + 1);
        for code in 0..dag.parent_configs(NodeId(2)) {
            let vals = dag.decode_parents(NodeId(2), code);
            let mut full = vec![0; 3];
            full[1] = vals[0];
            full[0] = vals[1];
            assert_eq!(dag.parent_code(NodeId(2), &full), code);
        }
    }

    #[test]
    fn domain_requires_two_values() {
        assert!(Domain::new(1).is_err());
        assert_eq!(Domain::new(3).unwrap().values().collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}
