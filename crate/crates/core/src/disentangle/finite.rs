use crate::cbn::CausalNet;
use crate::estimate::SampleSet;
use crate::scalar::Scalar;

use super::{run, DisentangleError, DisentangleReport, DistributionOracle, FrequencyOracle, Mode};
use super::{DEFAULT_DELTA, DEFAULT_EPSILON};

/// Tuning of the finite-sample path: `epsilon` prunes small remainders,
/// `delta` smooths zero cells of estimated CPTs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for FiniteParams {
    fn default() -> Self {
        FiniteParams { epsilon: DEFAULT_EPSILON, delta: DEFAULT_DELTA }
    }
}

/// Scored recovery against an estimated network and mixture.
///
/// Generic over the backend so that exact probabilities can be injected in
/// place of frequencies; on such input the result equals the oracle path's
/// whenever every true weight exceeds `epsilon`.
pub fn disentangle_finite<S, M>(
    net_hat: &CausalNet<S>,
    mix: &M,
    epsilon: S,
) -> Result<DisentangleReport<S>, DisentangleError>
where
    S: Scalar,
    M: DistributionOracle<S> + ?Sized,
{
    if epsilon <= S::zero() {
        return Err(DisentangleError::InvalidEpsilon(epsilon.to_f64()));
    }
    run(net_hat, mix, &Mode::Finite { epsilon })
}

/// [`disentangle_finite`] with the mixture given as samples; marginals are
/// relative frequencies.
pub fn disentangle_finite_samples(
    net_hat: &CausalNet<f64>,
    mix_samples: &SampleSet,
    epsilon: f64,
) -> Result<DisentangleReport<f64>, DisentangleError> {
    if mix_samples.is_empty() {
        return Err(DisentangleError::EmptySampleSet);
    }
    if mix_samples.width() != net_hat.len() {
        return Err(DisentangleError::Mismatch(format!(
            "samples have {} columns, network has {} nodes",
            mix_samples.width(),
            net_hat.len()
        )));
    }
    let oracle = FrequencyOracle::from_rows(net_hat.dag(), mix_samples.rows());
    disentangle_finite(net_hat, &oracle, epsilon)
}
