//! The structured system `(cI − a·1ᵀ)x = b`.
//!
//! With `a ≥ 0` and `c = Σa > 0` the matrix has rank `k − 1` and its null
//! space is spanned by `a`. When `Σb = 0`, `b/c` is a particular solution, so
//! every solution is `b/c + t·a` and fixing a coordinate with `a_i > 0` to
//! zero pins `t` down. Candidates cost O(k) each.

use thiserror::Error;

use crate::scalar::Scalar;

/// Relative tolerance for float-mode sign and consistency tests.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("system has no nonnegative solution with a zero coordinate")]
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredSystem<S> {
    a: Vec<S>,
    b: Vec<S>,
    c: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedSolution<S> {
    pub x: Vec<S>,
    pub zero_index: usize,
    /// `‖Ax − b‖²`.
    pub residual: S,
}

impl<S: Scalar> StructuredSystem<S> {
    pub fn new(a: Vec<S>, b: Vec<S>, c: S) -> Result<Self, SolveError> {
        if a.is_empty() {
            return Err(SolveError::Degenerate("empty system".into()));
        }
        if a.len() != b.len() {
            return Err(SolveError::Degenerate(format!("a has {} entries, b has {}", a.len(), b.len())));
        }
        if let Some(j) = a.iter().position(|x| *x < S::zero()) {
            return Err(SolveError::Degenerate(format!("a[{j}] = {:?} is negative", a[j])));
        }
        if c <= S::zero() {
            return Err(SolveError::Degenerate(format!("c = {c:?} is not positive")));
        }
        let sum = S::sum(a.iter());
        if !sum.approx_eq(&c, &c, FLOAT_TOLERANCE) {
            return Err(SolveError::Degenerate(format!("c = {c:?} but Σa = {sum:?}")));
        }
        Ok(StructuredSystem { a, b, c })
    }

    /// Takes `c = Σa`.
    pub fn from_a_b(a: Vec<S>, b: Vec<S>) -> Result<Self, SolveError> {
        let c = S::sum(a.iter());
        Self::new(a, b, c)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[S] {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    /// `(cI − a·1ᵀ)x`.
    pub fn apply(&self, x: &[S]) -> Vec<S> {
        let total = S::sum(x.iter());
        self.a.iter().zip(x).map(|(aj, xj)| self.c.clone() * xj.clone() - aj.clone() * total.clone()).collect()
    }

    pub fn residual(&self, x: &[S]) -> S {
        self.apply(x).into_iter().zip(&self.b).fold(S::zero(), |acc, (ax, bj)| {
            let d = ax - bj.clone();
            acc + d.clone() * d
        })
    }

    /// `x = (b − (b_i/a_i)·a) / c`, the solution with `x[zero_index] = 0`,
    /// unclamped. `None` when `a_i = 0`: shifting along `a` cannot move that
    /// coordinate.
    pub fn candidate(&self, zero_index: usize) -> Option<Vec<S>> {
        let a_i = &self.a[zero_index];
        if a_i.is_zero() {
            return None;
        }
        let t = self.b[zero_index].clone() / a_i.clone();
        Some(
            self.a
                .iter()
                .zip(&self.b)
                .enumerate()
                .map(
                    |(j, (aj, bj))| {
                        if j == zero_index {
                            S::zero()
                        } else {
                            (bj.clone() - t.clone() * aj.clone()) / self.c.clone()
                        }
                    },
                )
                .collect(),
        )
    }

    /// `Σb = 0` is necessary and sufficient for a solution to exist.
    pub fn is_consistent(&self) -> bool {
        let total = S::sum(self.b.iter());
        let scale = self.c.clone() + self.b.iter().fold(S::zero(), |acc, x| acc + x.abs());
        total.approx_eq(&S::zero(), &scale, FLOAT_TOLERANCE)
    }
}

/// The unique nonnegative solution with a zero coordinate, taking the first
/// zero index whose candidate is nonnegative.
///
/// Floats accept coordinates down to `−1e-9·c`; those, and any coordinate of
/// magnitude within that slack, are returned as exactly zero.
pub fn solve_exact<S: Scalar>(sys: &StructuredSystem<S>) -> Result<ConstrainedSolution<S>, SolveError> {
    if !sys.is_consistent() {
        return Err(SolveError::Inconsistent);
    }
    let tol = S::slack(sys.c(), FLOAT_TOLERANCE);
    for i in 0..sys.k() {
        let Some(x) = sys.candidate(i) else { continue };
        if x.iter().all(|xj| *xj >= -tol.clone()) {
            let x: Vec<S> = x.into_iter().map(|xj| if xj <= tol { S::zero() } else { xj }).collect();
            let residual = sys.residual(&x);
            return Ok(ConstrainedSolution { x, zero_index: i, residual });
        }
    }
    Err(SolveError::Inconsistent)
}

/// Least-residual candidate after clamping negatives to zero; ties go to the
/// smallest zero index.
pub fn solve_scored<S: Scalar>(sys: &StructuredSystem<S>) -> ConstrainedSolution<S> {
    let mut best: Option<ConstrainedSolution<S>> = None;
    for i in 0..sys.k() {
        let Some(x) = sys.candidate(i) else { continue };
        let x: Vec<S> = x.into_iter().map(|xj| if xj < S::zero() { S::zero() } else { xj }).collect();
        let residual = sys.residual(&x);
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(ConstrainedSolution { x, zero_index: i, residual });
        }
    }
    best.expect("c > 0 leaves some a_i positive")
}
