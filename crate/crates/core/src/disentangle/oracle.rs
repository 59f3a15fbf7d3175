//! Distribution oracles queried by prefix of the topological order.

use std::collections::HashMap;

use crate::cbn::{CausalNet, Dag, NodeId, Value};
use crate::intervene::{mixture_prefix_prob, InterventionTupleSet};
use crate::scalar::Scalar;

/// Marginal probabilities over prefixes of a fixed topological order.
///
/// `prefix_prob(len, values)` is the probability that the first `len` nodes of
/// the order take the values `values[node]`; entries for the other nodes are
/// ignored. `len == 0` gives total mass, which is one for every oracle here.
pub trait DistributionOracle<S>: Sync {
    fn prefix_prob(&self, len: usize, values: &[Value]) -> S;
}

impl<S: Scalar> DistributionOracle<S> for CausalNet<S> {
    fn prefix_prob(&self, len: usize, values: &[Value]) -> S {
        CausalNet::prefix_prob(self, len, values)
    }
}

/// `P_mix` evaluated from a network and the tuple set generating it.
#[derive(Clone, Copy, Debug)]
pub struct ExactMixture<'a, S> {
    pub net: &'a CausalNet<S>,
    pub tuples: &'a InterventionTupleSet<S>,
}

impl<'a, S: Scalar> ExactMixture<'a, S> {
    pub fn new(net: &'a CausalNet<S>, tuples: &'a InterventionTupleSet<S>) -> Self {
        ExactMixture { net, tuples }
    }
}

impl<S: Scalar> DistributionOracle<S> for ExactMixture<'_, S> {
    fn prefix_prob(&self, len: usize, values: &[Value]) -> S {
        mixture_prefix_prob(self.net, len, self.tuples, values)
    }
}

/// A distribution stored as a sparse table over full assignments, with every
/// prefix marginal precomputed by summing out suffixes.
#[derive(Clone, Debug)]
pub struct FrequencyOracle<S> {
    order: Vec<NodeId>,
    levels: Vec<HashMap<Vec<Value>, S>>,
}

impl<S: Scalar> FrequencyOracle<S> {
    /// `entries` pairs full assignments (indexed by node) with their mass.
    /// Repeated assignments accumulate.
    pub fn from_table<I>(dag: &Dag, entries: I) -> Self
    where
        I: IntoIterator<Item = (Vec<Value>, S)>,
    {
        let order = dag.topological_order().to_vec();
        let n = order.len();
        let mut levels: Vec<HashMap<Vec<Value>, S>> = vec![HashMap::new(); n + 1];
        for (values, p) in entries {
            if p.is_zero() {
                continue;
            }
            let key: Vec<Value> = order.iter().map(|node| values[node.0]).collect();
            for (len, level) in levels.iter_mut().enumerate() {
                let slot = level.entry(key[..len].to_vec()).or_insert_with(S::zero);
                *slot = slot.clone() + p.clone();
            }
        }
        FrequencyOracle { order, levels }
    }

    /// Relative frequencies of `rows` (each indexed by node).
    pub fn from_rows<'r, I>(dag: &Dag, rows: I) -> Self
    where
        I: IntoIterator<Item = &'r [Value]>,
    {
        let mut counts: HashMap<&[Value], u64> = HashMap::new();
        let mut total = 0u64;
        for row in rows {
            *counts.entry(row).or_insert(0) += 1;
            total += 1;
        }
        let total = total.max(1);
        Self::from_table(dag, counts.into_iter().map(|(row, c)| (row.to_vec(), S::from_ratio(c, total))))
    }

    /// Materializes any oracle over the full assignment space of `dag`.
    pub fn enumerate<O: DistributionOracle<S>>(dag: &Dag, oracle: &O) -> Self {
        let n = dag.len();
        Self::from_table(
            dag,
            dag.assignments().map(|v| {
                let p = oracle.prefix_prob(n, v.values());
                (v.0, p)
            }),
        )
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    /// Number of distinct full assignments with nonzero mass.
    pub fn support_size(&self) -> usize {
        self.levels.last().map_or(0, HashMap::len)
    }
}

impl<S: Scalar> DistributionOracle<S> for FrequencyOracle<S> {
    fn prefix_prob(&self, len: usize, values: &[Value]) -> S {
        let key: Vec<Value> = self.order[..len].iter().map(|node| values[node.0]).collect();
        self.levels[len].get(&key).cloned().unwrap_or_else(S::zero)
    }
}
