//! Sampling, CPT estimation and empirical marginals.
//!
//! Row `r` of a sample set drawn with seed `s` uses ChaCha8 seeded from `s`
//! on stream `r`, so rows are independent of each other, of the row count,
//! and of how the work is split across threads.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbn::{CausalNet, Dag, NetError, NodeId, Value};
use crate::intervene::{InterventionTarget, InterventionTupleSet};
use crate::scalar::Scalar;

pub type RngSeed = u64;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("row {row} has {got} columns, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("row {row}: value {value} is outside the domain of {node}")]
    ValueOutOfDomain { row: usize, node: NodeId, value: Value },
    #[error("CSV header {got:?} does not match network labels {expected:?}")]
    HeaderMismatch { got: Vec<String>, expected: Vec<String> },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSource {
    Observational,
    Mixture,
}

/// `M` rows of value codes, one column per node in id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    labels: Vec<String>,
    width: usize,
    data: Vec<Value>,
    source: SampleSource,
}

impl SampleSet {
    pub fn from_rows(labels: Vec<String>, rows: &[Vec<Value>], source: SampleSource) -> Result<Self, EstimateError> {
        let width = labels.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        for (row, values) in rows.iter().enumerate() {
            if values.len() != width {
                return Err(EstimateError::RaggedRow { row, got: values.len(), expected: width });
            }
            data.extend_from_slice(values);
        }
        Ok(SampleSet { labels, width, data, source })
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn source(&self) -> SampleSource {
        self.source
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.data.chunks_exact(self.width.max(1))
    }

    /// Checks every value against the domains of `dag`.
    pub fn check_against(&self, dag: &Dag) -> Result<(), EstimateError> {
        if self.width != dag.len() {
            return Err(EstimateError::RaggedRow { row: 0, got: self.width, expected: dag.len() });
        }
        for (row, values) in self.rows().enumerate() {
            for (i, &value) in values.iter().enumerate() {
                if !dag.domain(NodeId(i)).contains(value) {
                    return Err(EstimateError::ValueOutOfDomain { row, node: NodeId(i), value });
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), EstimateError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.labels)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads a headerful CSV whose header lists the network's labels in id
    /// order.
    pub fn read_csv<R: Read>(reader: R, dag: &Dag, source: SampleSource) -> Result<Self, EstimateError> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != dag.labels() {
            return Err(EstimateError::HeaderMismatch { got: header, expected: dag.labels().to_vec() });
        }
        let mut data = Vec::new();
        for record in r.deserialize::<Vec<Value>>() {
            data.extend(record?);
        }
        let set = SampleSet { labels: header, width: dag.len(), data, source };
        set.check_against(dag)?;
        Ok(set)
    }
}

/// Per node and parent configuration, the cumulative distribution of the
/// child in `f64`.
struct Sampler {
    cdfs: Vec<Vec<Vec<f64>>>,
}

impl Sampler {
    fn new<S: Scalar>(net: &CausalNet<S>) -> Self {
        let cdfs = net
            .cpts()
            .iter()
            .map(|cpt| {
                cpt.rows
                    .iter()
                    .map(|row| {
                        let mut acc = 0.0;
                        row.iter()
                            .map(|p| {
                                acc += p.to_f64();
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Sampler { cdfs }
    }

    fn fill<S: Scalar>(
        &self,
        net: &CausalNet<S>,
        target: &InterventionTarget,
        rng: &mut ChaCha8Rng,
        out: &mut [Value],
    ) {
        for &node in net.topological_order() {
            out[node.0] = match target.get(node) {
                Some(v) => v,
                None => {
                    let code = net.dag().parent_code(node, out);
                    draw(&self.cdfs[node.0][code], rng) as Value
                }
            };
        }
    }
}

/// Inverse-CDF draw; zero-probability categories are never returned.
fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        // Only reachable through rounding at the top end.
        (0..cdf.len()).rev().find(|&i| i == 0 || cdf[i] > cdf[i - 1]).unwrap_or(0)
    })
}

fn sample_with<F>(width: usize, labels: Vec<String>, m: usize, seed: RngSeed, source: SampleSource, f: F) -> SampleSet
where
    F: Fn(&mut ChaCha8Rng, &mut [Value]) + Sync,
{
    let mut data = vec![0; m * width];
    if width > 0 {
        let base = ChaCha8Rng::seed_from_u64(seed);
        data.par_chunks_mut(width).enumerate().for_each(|(row, out)| {
            let mut rng = base.clone();
            rng.set_stream(row as u64);
            f(&mut rng, out);
        });
    }
    SampleSet { labels, width, data, source }
}

/// `m` i.i.d. rows from `P(V)`.
pub fn ancestral_sample<S: Scalar>(net: &CausalNet<S>, seed: RngSeed, m: usize) -> SampleSet {
    let sampler = Sampler::new(net);
    let empty = InterventionTarget::empty();
    sample_with(net.len(), net.dag().labels().to_vec(), m, seed, SampleSource::Observational, |rng, out| {
        sampler.fill(net, &empty, rng, out)
    })
}

/// `m` i.i.d. rows from `P_mix(V)`: a component is drawn by weight, then the
/// intervened network is sampled.
pub fn mixture_sample<S: Scalar>(
    net: &CausalNet<S>,
    tuples: &InterventionTupleSet<S>,
    seed: RngSeed,
    m: usize,
) -> SampleSet {
    let sampler = Sampler::new(net);
    let mut acc = 0.0;
    let component_cdf: Vec<f64> = tuples
        .iter()
        .map(|t| {
            acc += t.weight.to_f64();
            acc
        })
        .collect();
    let targets: Vec<&InterventionTarget> = tuples.targets().collect();
    sample_with(net.len(), net.dag().labels().to_vec(), m, seed, SampleSource::Mixture, |rng, out| {
        let i = draw(&component_cdf, rng);
        sampler.fill(net, targets[i], rng, out)
    })
}

/// Maximum-likelihood CPTs over `dag`.
///
/// A row with a zero cell gets `delta` added to every cell before it is
/// renormalized; a parent configuration never observed gets a uniform row.
pub fn mle_cpds(samples: &SampleSet, dag: &Dag, delta: f64) -> Result<CausalNet<f64>, EstimateError> {
    if samples.is_empty() {
        return Err(EstimateError::EmptySampleSet);
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(EstimateError::InvalidDelta(delta));
    }
    samples.check_against(dag)?;
    let mut rows = Vec::with_capacity(dag.len());
    for node in dag.nodes() {
        let k = dag.domain(node).cardinality();
        let mut counts = vec![vec![0u64; k]; dag.parent_configs(node)];
        for row in samples.rows() {
            counts[dag.parent_code(node, row)][row[node.0] as usize] += 1;
        }
        rows.push(counts.into_iter().map(|c| smoothed_row(&c, delta)).collect());
    }
    Ok(CausalNet::from_dag(dag, rows, true)?)
}

fn smoothed_row(counts: &[u64], delta: f64) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![1.0 / counts.len() as f64; counts.len()];
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    if counts.contains(&0) {
        let norm = 1.0 + delta * counts.len() as f64;
        freq.iter().map(|f| (f + delta) / norm).collect()
    } else {
        freq
    }
}

/// Fraction of rows agreeing with `partial`.
pub fn empirical_marginal(samples: &SampleSet, partial: &[(NodeId, Value)]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let hits = samples.rows().filter(|row| partial.iter().all(|&(n, v)| row[n.0] == v)).count();
    hits as f64 / samples.len() as f64
}

/// Seeds `ChaCha8Rng` the same way the samplers do, for callers that need
/// their own reproducible streams.
pub fn rng_for(seed: RngSeed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
