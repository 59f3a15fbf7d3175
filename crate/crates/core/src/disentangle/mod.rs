//! Recovery of intervention targets and mixing weights.
//!
//! Both algorithms run as one loop over prefixes of the topological order.
//! Level 1 is the single-node base case with `S = {(∅, 1)}`; each later level
//! lifts the tuple set recovered on the shorter prefix by one node, solving
//! one structured system per reduced target.

mod finite;
mod oracle;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub use finite::{disentangle_finite, disentangle_finite_samples, FiniteParams};
pub use oracle::{DistributionOracle, ExactMixture, FrequencyOracle};

use crate::cbn::{CausalNet, Domain, NodeId, Value};
use crate::intervene::{
    interventional_prefix_prob, witness_for, InterventionError, InterventionTarget, InterventionTuple,
    InterventionTupleSet,
};
use crate::scalar::Scalar;
use crate::solver::{solve_exact, solve_scored, SolveError, StructuredSystem, FLOAT_TOLERANCE};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DisentangleError {
    #[error("level {level}: every value of {node} is used by a recovered target, no excluded value exists")]
    ExclusionUnsatisfiable { level: usize, node: NodeId },
    #[error("level {level}: lifting {target} failed: {source}")]
    Solve { level: usize, target: String, source: SolveError },
    #[error("level {level}: weights of {target} exceed its reduced weight")]
    NegativeRemainder { level: usize, target: String },
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("oracle and network disagree: {0}")]
    Mismatch(String),
}

impl DisentangleError {
    /// True for failures of the linear algebra rather than of the inputs'
    /// structure.
    pub fn is_inconsistency(&self) -> bool {
        matches!(self, DisentangleError::Solve { .. } | DisentangleError::NegativeRemainder { .. })
    }
}

/// Residual `‖Ax − b‖²` of one solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResidual {
    pub level: usize,
    pub target_index: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisentangleReport<S> {
    pub tuples: InterventionTupleSet<S>,
    pub residuals: Vec<LevelResidual>,
    /// Weight of ε-pruned remainders and of lifts zeroed to restore an
    /// excluded value, before redistribution.
    pub pruned_mass: S,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub(crate) enum Mode<S> {
    Exact,
    Finite { epsilon: S },
}

/// One reduced target together with the tuples it splits into.
struct Group<S> {
    target: InterventionTarget,
    remainder: S,
    lifts: Vec<S>,
}

pub(crate) struct LevelOutcome<S> {
    pub tuples: Vec<InterventionTuple<S>>,
    pub residuals: Vec<LevelResidual>,
    pub pruned: S,
    pub notes: Vec<String>,
}

/// Lifts the tuple set recovered on the first `level − 1` nodes of the
/// topological order to the first `level` nodes.
pub(crate) fn run_level<S, M>(
    net: &CausalNet<S>,
    level: usize,
    reduced: &InterventionTupleSet<S>,
    mix: &M,
    mode: &Mode<S>,
) -> Result<LevelOutcome<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    let order = net.topological_order();
    let last = order[level - 1];
    let k = net.domain(last).cardinality();
    // Canonical order sorts by size first, so no later target is a subset of
    // an earlier one.
    let reduced = reduced.tuples();
    let witness = witness_for(reduced.iter().map(|t| &t.target), net.dag(), level - 1).map_err(|e| match e {
        InterventionError::ExclusionViolated { node } => DisentangleError::ExclusionUnsatisfiable { level, node },
        other => DisentangleError::Mismatch(other.to_string()),
    })?;

    let mut groups: Vec<Group<S>> = Vec::with_capacity(reduced.len());
    let mut residuals = Vec::new();
    let mut notes = Vec::new();
    let mut pruned = S::zero();

    for (i, tuple) in reduced.iter().enumerate() {
        let target = &tuple.target;
        let mu = tuple.weight.clone();
        let mut values: Vec<Value> = witness.0.clone();
        for &(n, v) in target.assignments() {
            values[n.0] = v;
        }
        debug_assert!(
            reduced[i + 1..]
                .iter()
                .all(|later| interventional_prefix_prob(net, level - 1, &later.target, &values).is_zero()),
            "a later target does not vanish at the settings of {target}"
        );
        let c = interventional_prefix_prob(net, level - 1, target, &values);
        let mut a = Vec::with_capacity(k);
        let mut b = Vec::with_capacity(k);
        for l in 0..k as Value {
            values[last.0] = l;
            let a_l = interventional_prefix_prob(net, level, target, &values);
            let mut b_l = mix.prefix_prob(level, &values) - mu.clone() * a_l.clone();
            for g in &groups {
                b_l = b_l - g.mass_at(net, level, last, &values);
            }
            a.push(a_l);
            b.push(b_l);
        }
        let fail = |source| DisentangleError::Solve { level, target: target.to_string(), source };
        let system = StructuredSystem::new(a, b, c).map_err(fail)?;

        let mut group = Group { target: target.clone(), remainder: S::zero(), lifts: Vec::new() };
        match mode {
            Mode::Exact => {
                let sol = solve_exact(&system).map_err(fail)?;
                residuals.push(LevelResidual { level, target_index: i, residual: sol.residual.to_f64() });
                let lifted = S::sum(sol.x.iter());
                let remainder = mu.clone() - lifted;
                let slack = S::slack(&mu, FLOAT_TOLERANCE);
                if remainder < -slack.clone() {
                    return Err(DisentangleError::NegativeRemainder { level, target: target.to_string() });
                }
                group.remainder = if remainder <= slack { S::zero() } else { remainder };
                group.lifts = sol.x;
            }
            Mode::Finite { epsilon } => {
                let sol = solve_scored(&system);
                residuals.push(LevelResidual { level, target_index: i, residual: sol.residual.to_f64() });
                let mut x = sol.x;
                let lifted = S::sum(x.iter());
                let remainder = mu.clone() - lifted.clone();
                if remainder < *epsilon {
                    if remainder > S::zero() {
                        pruned = pruned + remainder;
                    }
                    if lifted > S::zero() {
                        for xl in &mut x {
                            *xl = mu.clone() * xl.clone() / lifted.clone();
                        }
                    } else {
                        notes.push(format!(
                            "level {level}: dropped {target} with weight {:.3e} below epsilon and no lifts",
                            mu.to_f64()
                        ));
                    }
                } else {
                    group.remainder = remainder;
                }
                group.lifts = x;
            }
        }
        groups.push(group);
    }

    if let Mode::Finite { .. } = mode {
        pruned = pruned + restore_exclusion(&mut groups, k, level, last, &mut notes);
    }

    let mut tuples = Vec::new();
    for g in groups {
        if g.remainder > S::zero() {
            tuples.push(InterventionTuple::new(g.target.clone(), g.remainder));
        }
        for (l, w) in g.lifts.into_iter().enumerate() {
            if w > S::zero() {
                tuples.push(InterventionTuple::new(g.target.with(last, l as Value), w));
            }
        }
    }
    if let Mode::Finite { .. } = mode {
        renormalize(&mut tuples);
    }
    Ok(LevelOutcome { tuples, residuals, pruned, notes })
}

impl<S: Scalar> Group<S> {
    /// `Σ π_s P_s(values)` over the tuples this group has produced.
    fn mass_at(&self, net: &CausalNet<S>, level: usize, last: NodeId, values: &[Value]) -> S {
        let mut acc = S::zero();
        if !self.remainder.is_zero() {
            let p = interventional_prefix_prob(net, level, &self.target, values);
            acc = acc + self.remainder.clone() * p;
        }
        // A lift fixes the last node, so only the lift matching its value counts.
        let l = values[last.0] as usize;
        if let Some(w) = self.lifts.get(l).filter(|w| !w.is_zero()) {
            let p = interventional_prefix_prob(net, level, &self.target.with(last, l as Value), values);
            acc = acc + w.clone() * p;
        }
        acc
    }
}

/// If every value of the new node is used by some lift, zeroes the value with
/// the least total lift weight. Within each group the removed weight moves to
/// the group's remaining lifts in proportion, or to its remainder if none
/// remain. Returns the weight removed.
fn restore_exclusion<S: Scalar>(
    groups: &mut [Group<S>],
    k: usize,
    level: usize,
    last: NodeId,
    notes: &mut Vec<String>,
) -> S {
    let used = |l: usize| groups.iter().any(|g| g.lifts[l] > S::zero());
    if !(0..k).all(used) {
        return S::zero();
    }
    let totals: Vec<S> = (0..k).map(|l| S::sum(groups.iter().map(|g| &g.lifts[l]))).collect();
    let mut v = 0;
    for l in 1..k {
        if totals[l] < totals[v] {
            v = l;
        }
    }
    notes.push(format!("level {level}: no excluded value for {last}, zeroed lifts to value {v}"));
    for g in groups.iter_mut() {
        let removed = std::mem::replace(&mut g.lifts[v], S::zero());
        if removed.is_zero() {
            continue;
        }
        let rest = S::sum(g.lifts.iter());
        if rest > S::zero() {
            let scale = (rest.clone() + removed) / rest;
            for w in &mut g.lifts {
                *w = w.clone() * scale.clone();
            }
        } else {
            g.remainder = g.remainder.clone() + removed;
        }
    }
    totals[v].clone()
}

fn renormalize<S: Scalar>(tuples: &mut [InterventionTuple<S>]) {
    let total = S::sum(tuples.iter().map(|t| &t.weight));
    if total > S::zero() && !total.is_one() {
        for t in tuples.iter_mut() {
            t.weight = t.weight.clone() / total.clone();
        }
    }
}

/// Recovers the unique exclusion-satisfying tuple set generating `mix`.
///
/// With the rational backend and an exact oracle the result is exact.
pub fn disentangle_oracle<S, M>(net: &CausalNet<S>, mix: &M) -> Result<InterventionTupleSet<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    disentangle_oracle_report(net, mix).map(|r| r.tuples)
}

pub fn disentangle_oracle_report<S, M>(net: &CausalNet<S>, mix: &M) -> Result<DisentangleReport<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    run(net, mix, &Mode::Exact)
}

pub(crate) fn run<S, M>(net: &CausalNet<S>, mix: &M, mode: &Mode<S>) -> Result<DisentangleReport<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    let start = std::time::Instant::now();
    let mut current = InterventionTupleSet::observational();
    let mut residuals = Vec::new();
    let mut notes = Vec::new();
    let mut pruned_mass = S::zero();
    for level in 1..=net.len() {
        let outcome = run_level(net, level, &current, mix, mode)?;
        residuals.extend(outcome.residuals);
        notes.extend(outcome.notes);
        pruned_mass = pruned_mass + outcome.pruned;
        current = if outcome.tuples.is_empty() {
            notes.push(format!("level {level}: every tuple was pruned, falling back to {{(∅, 1)}}"));
            InterventionTupleSet::observational()
        } else {
            InterventionTupleSet::from_parts(outcome.tuples)
        };
    }
    Ok(DisentangleReport { tuples: current, residuals, pruned_mass, notes, elapsed: start.elapsed() })
}

/// One lift step: `reduced` is the recovered set on the first `level − 1`
/// nodes of the topological order, the result covers the first `level`.
pub fn lift_level<S, M>(
    net: &CausalNet<S>,
    level: usize,
    reduced: &InterventionTupleSet<S>,
    mix: &M,
) -> Result<InterventionTupleSet<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    assert!(level >= 1 && level <= net.len(), "level {level} out of range");
    let outcome = run_level(net, level, reduced, mix, &Mode::Exact)?;
    Ok(InterventionTupleSet::from_parts(outcome.tuples))
}

/// The single-node problem solved directly: `a_i = P(v^i)`, `c = 1`,
/// `b_i = P_mix(v^i) − P(v^i)`. Both oracles are over one node, `V1`.
pub fn base_case<S, P, M>(domain: Domain, p: &P, mix: &M) -> Result<InterventionTupleSet<S>, DisentangleError>
where
    S: Scalar,
    P: DistributionOracle<S> + ?Sized,
    M: DistributionOracle<S> + ?Sized,
{
    let fail = |source| DisentangleError::Solve { level: 1, target: "∅".into(), source };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for v in domain.values() {
        let a_v = p.prefix_prob(1, &[v]);
        b.push(mix.prefix_prob(1, &[v]) - a_v.clone());
        a.push(a_v);
    }
    let system = StructuredSystem::new(a, b, S::one()).map_err(fail)?;
    let sol = solve_exact(&system).map_err(fail)?;
    let remainder = S::one() - S::sum(sol.x.iter());
    if remainder < -S::slack(&S::one(), FLOAT_TOLERANCE) {
        return Err(DisentangleError::NegativeRemainder { level: 1, target: "∅".into() });
    }
    let mut tuples: Vec<InterventionTuple<S>> = sol
        .x
        .into_iter()
        .zip(domain.values())
        .filter(|(w, _)| *w > S::zero())
        .map(|(w, v)| InterventionTuple::new(InterventionTarget::of(&[(0, v)]), w))
        .collect();
    if remainder > S::slack(&S::one(), FLOAT_TOLERANCE) {
        tuples.push(InterventionTuple::new(InterventionTarget::empty(), remainder));
    }
    Ok(InterventionTupleSet::from_parts(tuples))
}
