//! Small networks and mixtures with known answers.

use crate::cbn::{CausalNet, CptTable, NetSpec, NodeId};
use crate::intervene::{InterventionTarget, InterventionTuple, InterventionTupleSet};
use crate::scalar::{ratio, Scalar};

fn q<S: Scalar>(p: u64, d: u64) -> S {
    ratio(p, d)
}

fn half<S: Scalar>() -> Vec<S> {
    vec![q(1, 2), q(1, 2)]
}

/// `V1 → V2`, both binary and uniform.
pub fn two_node<S: Scalar>() -> CausalNet<S> {
    NetSpec {
        cards: vec![2, 2],
        labels: vec![],
        edges: vec![(0, 1)],
        cpds: vec![
            CptTable { child: NodeId(0), parents: vec![], rows: vec![half()] },
            CptTable { child: NodeId(1), parents: vec![NodeId(0)], rows: vec![half(), half()] },
        ],
        positive: true,
    }
    .validate()
    .expect("fixture is valid")
}

/// `½ do(V1=0) + ½ do(V1=0, V2=0)`.
pub fn two_node_mixture<S: Scalar>() -> InterventionTupleSet<S> {
    InterventionTupleSet::new(vec![
        InterventionTuple::new(InterventionTarget::of(&[(0, 0)]), q(1, 2)),
        InterventionTuple::new(InterventionTarget::of(&[(0, 0), (1, 0)]), q(1, 2)),
    ])
    .expect("fixture is valid")
}

/// [`two_node`] with `P(V2=1 | V1=1) = 0`. The positivity flag is off unless
/// `claim_positive` is set, in which case validation must fail.
pub fn positivity_counterexample_spec<S: Scalar>(claim_positive: bool) -> NetSpec<S> {
    NetSpec {
        cards: vec![2, 2],
        labels: vec![],
        edges: vec![(0, 1)],
        cpds: vec![
            CptTable { child: NodeId(0), parents: vec![], rows: vec![half()] },
            CptTable { child: NodeId(1), parents: vec![NodeId(0)], rows: vec![half(), vec![q(1, 1), q(0, 1)]] },
        ],
        positive: claim_positive,
    }
}

pub fn positivity_counterexample<S: Scalar>() -> CausalNet<S> {
    positivity_counterexample_spec(false).validate().expect("fixture is valid")
}

/// `V1 → V2 → V3` with `V1 → V3`, binary, positive CPTs.
pub fn three_node<S: Scalar>() -> CausalNet<S> {
    NetSpec {
        cards: vec![2, 2, 2],
        labels: vec![],
        edges: vec![(0, 1), (0, 2), (1, 2)],
        cpds: vec![
            CptTable { child: NodeId(0), parents: vec![], rows: vec![vec![q(3, 5), q(2, 5)]] },
            CptTable {
                child: NodeId(1),
                parents: vec![NodeId(0)],
                rows: vec![vec![q(2, 3), q(1, 3)], vec![q(1, 4), q(3, 4)]],
            },
            CptTable {
                child: NodeId(2),
                parents: vec![NodeId(0), NodeId(1)],
                rows: vec![
                    vec![q(1, 2), q(1, 2)],
                    vec![q(1, 5), q(4, 5)],
                    vec![q(2, 3), q(1, 3)],
                    vec![q(3, 10), q(7, 10)],
                ],
            },
        ],
        positive: true,
    }
    .validate()
    .expect("fixture is valid")
}

/// `μ0 do(V1=0) + μ1 do(V1=0, V2=0) + μ2 do(V1=0, V2=0, V3=0)`.
pub fn three_node_mixture<S: Scalar>(mu: [S; 3]) -> InterventionTupleSet<S> {
    let [m0, m1, m2] = mu;
    InterventionTupleSet::new(vec![
        InterventionTuple::new(InterventionTarget::of(&[(0, 0)]), m0),
        InterventionTuple::new(InterventionTarget::of(&[(0, 0), (1, 0)]), m1),
        InterventionTuple::new(InterventionTarget::of(&[(0, 0), (1, 0), (2, 0)]), m2),
    ])
    .expect("weights sum to one")
}

/// One node with the given marginal.
pub fn single_node<S: Scalar>(p: Vec<S>) -> CausalNet<S> {
    NetSpec {
        cards: vec![p.len()],
        labels: vec![],
        edges: vec![],
        cpds: vec![CptTable { child: NodeId(0), parents: vec![], rows: vec![p] }],
        positive: true,
    }
    .validate()
    .expect("fixture is valid")
}
