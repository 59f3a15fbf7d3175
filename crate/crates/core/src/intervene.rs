//! Perfect interventions and mixtures of them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cbn::{is_unit_sum, Assignment, CausalNet, Dag, NetError, NodeId, Value};
use crate::scalar::{convert, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterventionError {
    #[error("target assigns {node} twice with different values")]
    ConflictingAssignment { node: NodeId },
    #[error("target refers to node id {0}, which is out of range")]
    UnknownNode(usize),
    #[error("target value {value} is outside the domain of {node}")]
    ValueOutOfDomain { node: NodeId, value: Value },
    #[error("target {0} appears more than once")]
    DuplicateTarget(String),
    #[error("weight of target {0} is negative")]
    NegativeWeight(String),
    #[error("weights sum to {0}, not 1")]
    WeightsNotNormalized(f64),
    #[error("tuple set is empty")]
    Empty,
    #[error("every value of {node} is used by some target; exclusion fails")]
    ExclusionViolated { node: NodeId },
}

/// A partial assignment `do(T = t)`, kept sorted by node. The empty target
/// stands for the observational distribution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InterventionTarget {
    assignments: Vec<(NodeId, Value)>,
}

impl InterventionTarget {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I>(pairs: I) -> Result<Self, InterventionError>
    where
        I: IntoIterator<Item = (NodeId, Value)>,
    {
        let mut assignments: Vec<(NodeId, Value)> = pairs.into_iter().collect();
        assignments.sort();
        assignments.dedup();
        if let Some(w) = assignments.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(InterventionError::ConflictingAssignment { node: w[0].0 });
        }
        Ok(InterventionTarget { assignments })
    }

    /// Shorthand for tests and fixtures: `InterventionTarget::of(&[(0, 0), (1, 0)])`.
    pub fn of(pairs: &[(usize, Value)]) -> Self {
        Self::new(pairs.iter().map(|&(n, v)| (NodeId(n), v))).expect("consistent target")
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn assignments(&self) -> &[(NodeId, Value)] {
        &self.assignments
    }

    pub fn get(&self, node: NodeId) -> Option<Value> {
        self.assignments.binary_search_by_key(&node, |&(n, _)| n).ok().map(|i| self.assignments[i].1)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.get(node).is_some()
    }

    /// `self ∪ {node = value}`; `node` must not already be assigned.
    pub fn with(&self, node: NodeId, value: Value) -> Self {
        debug_assert!(!self.contains_node(node));
        let mut assignments = self.assignments.clone();
        let at = assignments.partition_point(|&(n, _)| n < node);
        assignments.insert(at, (node, value));
        InterventionTarget { assignments }
    }

    pub fn without(&self, node: NodeId) -> Self {
        InterventionTarget { assignments: self.assignments.iter().copied().filter(|&(n, _)| n != node).collect() }
    }

    /// Set inclusion of the (node, value) pairs.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.assignments.iter().all(|&(n, v)| other.get(n) == Some(v))
    }

    /// Whether `values` agrees with every assignment of the target.
    pub fn agrees_with(&self, values: &[Value]) -> bool {
        self.assignments.iter().all(|&(n, v)| values[n.0] == v)
    }

    pub fn check_against(&self, dag: &Dag) -> Result<(), InterventionError> {
        for &(n, v) in &self.assignments {
            if n.0 >= dag.len() {
                return Err(InterventionError::UnknownNode(n.0));
            }
            if !dag.domain(n).contains(v) {
                return Err(InterventionError::ValueOutOfDomain { node: n, value: v });
            }
        }
        Ok(())
    }
}

/// Canonical order: size first, then lexicographic on (node, value) pairs.
/// Sorting by this order is a linear extension of strict set inclusion.
impl Ord for InterventionTarget {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.assignments.cmp(&other.assignments))
    }
}

impl PartialOrd for InterventionTarget {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for InterventionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (i, (n, v)) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterventionTuple<S> {
    pub target: InterventionTarget,
    pub weight: S,
}

impl<S> InterventionTuple<S> {
    pub fn new(target: InterventionTarget, weight: S) -> Self {
        InterventionTuple { target, weight }
    }
}

/// A set of intervention tuples with distinct targets and positive weights
/// summing to one, stored in canonical target order so that structural
/// equality is set equality.
#[derive(Clone, Debug, PartialEq)]
pub struct InterventionTupleSet<S> {
    tuples: Vec<InterventionTuple<S>>,
}

/// Weight sums within this of one are accepted.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

impl<S: Scalar> InterventionTupleSet<S> {
    /// Validates and canonicalizes. Zero-weight tuples are dropped; repeated
    /// targets are an error (use [`InterventionTupleSet::merged`] to sum them).
    ///
    /// For exact backends a sum within [`WEIGHT_TOLERANCE`] of one is
    /// renormalized exactly, so weights read from decimal files still load.
    pub fn new(tuples: Vec<InterventionTuple<S>>) -> Result<Self, InterventionError> {
        let mut tuples: Vec<_> = tuples.into_iter().filter(|t| !t.weight.is_zero()).collect();
        if let Some(t) = tuples.iter().find(|t| t.weight < S::zero()) {
            return Err(InterventionError::NegativeWeight(t.target.to_string()));
        }
        if tuples.is_empty() {
            return Err(InterventionError::Empty);
        }
        tuples.sort_by(|a, b| a.target.cmp(&b.target));
        if let Some(w) = tuples.windows(2).find(|w| w[0].target == w[1].target) {
            return Err(InterventionError::DuplicateTarget(w[0].target.to_string()));
        }
        let sum = S::sum(tuples.iter().map(|t| &t.weight));
        if !is_unit_sum(&sum) {
            if (sum.to_f64() - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(InterventionError::WeightsNotNormalized(sum.to_f64()));
            }
            if S::EXACT {
                for t in &mut tuples {
                    t.weight = t.weight.clone() / sum.clone();
                }
            }
        }
        Ok(InterventionTupleSet { tuples })
    }

    /// Like [`InterventionTupleSet::new`], but tuples sharing a target are
    /// merged by summing their weights.
    pub fn merged(tuples: Vec<InterventionTuple<S>>) -> Result<Self, InterventionError> {
        Self::new(merge(tuples))
    }

    /// Canonical ordering and merging only; no normalization check. For
    /// intermediate results whose weights are still being repaired.
    pub(crate) fn from_parts(tuples: Vec<InterventionTuple<S>>) -> Self {
        let tuples = merge(tuples).into_iter().filter(|t| t.weight > S::zero()).collect();
        InterventionTupleSet { tuples }
    }

    /// `{(∅, 1)}`: the observational distribution.
    pub fn observational() -> Self {
        InterventionTupleSet { tuples: vec![InterventionTuple::new(InterventionTarget::empty(), S::one())] }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, InterventionTuple<S>> {
        self.tuples.iter()
    }

    pub fn tuples(&self) -> &[InterventionTuple<S>] {
        &self.tuples
    }

    pub fn targets(&self) -> impl Iterator<Item = &InterventionTarget> {
        self.tuples.iter().map(|t| &t.target)
    }

    pub fn weight_of(&self, target: &InterventionTarget) -> Option<&S> {
        self.tuples.binary_search_by(|t| t.target.cmp(target)).ok().map(|i| &self.tuples[i].weight)
    }

    pub fn total_weight(&self) -> S {
        S::sum(self.tuples.iter().map(|t| &t.weight))
    }

    pub fn check_against(&self, dag: &Dag) -> Result<(), InterventionError> {
        self.tuples.iter().try_for_each(|t| t.target.check_against(dag))
    }

    pub fn convert<T: Scalar>(&self) -> InterventionTupleSet<T> {
        InterventionTupleSet {
            tuples: self.tuples.iter().map(|t| InterventionTuple::new(t.target.clone(), convert(&t.weight))).collect(),
        }
    }
}

impl<'a, S> IntoIterator for &'a InterventionTupleSet<S> {
    type Item = &'a InterventionTuple<S>;
    type IntoIter = std::slice::Iter<'a, InterventionTuple<S>>;

    fn into_iter(self) -> Self::IntoIter {
        self.tuples.iter()
    }
}

fn merge<S: Scalar>(tuples: Vec<InterventionTuple<S>>) -> Vec<InterventionTuple<S>> {
    let mut by_target: BTreeMap<InterventionTarget, S> = BTreeMap::new();
    for t in tuples {
        let w = by_target.entry(t.target).or_insert_with(S::zero);
        *w = w.clone() + t.weight;
    }
    by_target.into_iter().map(|(target, weight)| InterventionTuple { target, weight }).collect()
}

/// Per-node value excluded from every target of a tuple set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionWitness(pub Vec<Value>);

impl ExclusionWitness {
    pub fn get(&self, node: NodeId) -> Value {
        self.0[node.0]
    }
}

/// `P_t(v) = ∏_{i ∉ T} P(v_i | pa(v_i)) · ∏_{i ∈ T} δ(v_i, t_i)`.
pub fn interventional_prob<S: Scalar>(
    net: &CausalNet<S>,
    target: &InterventionTarget,
    v: &Assignment,
) -> Result<S, NetError> {
    net.dag().check_assignment(v.values())?;
    Ok(interventional_prefix_prob(net, net.len(), target, v.values()))
}

/// Interventional marginal of the first `len` nodes of the topological order.
/// Only the target's assignments to those nodes matter.
pub fn interventional_prefix_prob<S: Scalar>(
    net: &CausalNet<S>,
    len: usize,
    target: &InterventionTarget,
    values: &[Value],
) -> S {
    let mut acc = S::one();
    for &node in &net.topological_order()[..len] {
        match target.get(node) {
            Some(t) if t != values[node.0] => return S::zero(),
            Some(_) => {}
            None => {
                let f = net.factor(node, values);
                if f.is_zero() {
                    return S::zero();
                }
                acc = acc * f.clone();
            }
        }
    }
    acc
}

/// `P_mix(v) = Σ π_i P_{t_i}(v)`.
pub fn mixture_prob<S: Scalar>(
    net: &CausalNet<S>,
    tuples: &InterventionTupleSet<S>,
    v: &Assignment,
) -> Result<S, NetError> {
    net.dag().check_assignment(v.values())?;
    Ok(mixture_prefix_prob(net, net.len(), tuples, v.values()))
}

pub fn mixture_prefix_prob<S: Scalar>(
    net: &CausalNet<S>,
    len: usize,
    tuples: &InterventionTupleSet<S>,
    values: &[Value],
) -> S {
    tuples.iter().fold(S::zero(), |acc, t| {
        let p = interventional_prefix_prob(net, len, &t.target, values);
        if p.is_zero() {
            acc
        } else {
            acc + t.weight.clone() * p
        }
    })
}

/// For each node, the smallest value code that no target assigns to it.
pub fn check_exclusion<S: Scalar>(
    tuples: &InterventionTupleSet<S>,
    dag: &Dag,
) -> Result<ExclusionWitness, InterventionError> {
    witness_for(tuples.targets(), dag, dag.len())
}

/// Witness over the first `len` nodes of the topological order; entries for
/// the other nodes are left at zero.
pub(crate) fn witness_for<'a, I>(targets: I, dag: &Dag, len: usize) -> Result<ExclusionWitness, InterventionError>
where
    I: IntoIterator<Item = &'a InterventionTarget>,
{
    let mut used: Vec<Vec<bool>> = dag.domains().iter().map(|d| vec![false; d.cardinality()]).collect();
    for t in targets {
        for &(n, v) in t.assignments() {
            if n.0 >= dag.len() {
                return Err(InterventionError::UnknownNode(n.0));
            }
            if let Some(slot) = used[n.0].get_mut(v as usize) {
                *slot = true;
            }
        }
    }
    let mut witness = vec![0; dag.len()];
    for &node in &dag.topological_order()[..len] {
        match used[node.0].iter().position(|&u| !u) {
            Some(v) => witness[node.0] = v as Value,
            None => return Err(InterventionError::ExclusionViolated { node }),
        }
    }
    Ok(ExclusionWitness(witness))
}

/// Drops `last` from every target and merges targets that collide.
pub fn marginalize_tuples<S: Scalar>(tuples: &InterventionTupleSet<S>, last: NodeId) -> InterventionTupleSet<S> {
    InterventionTupleSet::from_parts(
        tuples.iter().map(|t| InterventionTuple::new(t.target.without(last), t.weight.clone())).collect(),
    )
}
