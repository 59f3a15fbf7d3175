//! Random instances, recovery metrics and the benchmark sweep.
//!
//! Seeds: an instance (graph, CPTs, tuple set) is a function of the graph
//! model, `N`, the base seed and the instance index only, so every `M` in a
//! sweep sees the same instances. The two sample sets additionally depend on
//! `M`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbn::{CausalNet, Dag, NodeId, Value};
use crate::disentangle::{disentangle_finite_samples, FiniteParams};
use crate::estimate::{ancestral_sample, mixture_sample, mle_cpds, RngSeed};
use crate::intervene::{InterventionTarget, InterventionTuple, InterventionTupleSet};
use crate::scalar::{ratio, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
pub enum GraphModel {
    #[serde(rename = "sf")]
    #[value(name = "sf")]
    ScaleFree,
    #[serde(rename = "er")]
    #[value(name = "er")]
    ErdosRenyi,
}

impl GraphModel {
    fn code(self) -> u64 {
        match self {
            GraphModel::ScaleFree => 1,
            GraphModel::ErdosRenyi => 2,
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphModel::ScaleFree => "sf",
            GraphModel::ErdosRenyi => "er",
        })
    }
}

impl FromStr for GraphModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sf" | "scale-free" => Ok(GraphModel::ScaleFree),
            "er" | "erdos-renyi" => Ok(GraphModel::ErdosRenyi),
            other => Err(format!("unknown graph model `{other}`, expected sf or er")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub nodes: usize,
    pub samples: usize,
    pub model: GraphModel,
    pub cardinality: usize,
    pub cpd_alpha: f64,
    pub tuples_min: usize,
    pub tuples_max: usize,
    pub weight_alpha: f64,
    pub seed: RngSeed,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            nodes: 4,
            samples: 1 << 14,
            model: GraphModel::ScaleFree,
            cardinality: 3,
            cpd_alpha: 2.0,
            tuples_min: 4,
            tuples_max: 16,
            weight_alpha: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
}

impl InstanceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.nodes == 0 {
            return bad("nodes must be at least 1");
        }
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.cardinality < 2 {
            return bad("cardinality must be at least 2");
        }
        if !(self.cpd_alpha > 0.0 && self.weight_alpha > 0.0) {
            return bad("Dirichlet parameters must be positive");
        }
        if self.tuples_min == 0 || self.tuples_min > self.tuples_max {
            return bad("tuple count range must satisfy 1 <= min <= max");
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of several seeds.
pub fn mix_seeds(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn instance_seed(base: RngSeed, model: GraphModel, nodes: usize, index: usize) -> RngSeed {
    mix_seeds(&[base, model.code(), nodes as u64, index as u64])
}

/// Edge count range `[min(N, E_max), min(5N, E_max)]`, `E_max = N(N−1)/2`.
pub fn edge_count_range(nodes: usize) -> (usize, usize) {
    let max = nodes * nodes.saturating_sub(1) / 2;
    (nodes.min(max), (5 * nodes).min(max))
}

/// A random DAG with every node of cardinality `cfg.cardinality`.
///
/// Scale-free: preferential attachment over a random node ordering (each new
/// node attaches to earlier ones with probability proportional to degree + 1),
/// then uniformly random edges are added or removed to hit the drawn count.
/// Erdős–Rényi: the drawn number of pairs, uniformly among ordered pairs of a
/// random ordering. Edges always point from earlier to later in the ordering.
pub fn random_dag<R: Rng + ?Sized>(cfg: &InstanceConfig, rng: &mut R) -> Dag {
    let n = cfg.nodes;
    let (lo, hi) = edge_count_range(n);
    let target = rng.random_range(lo..=hi);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);

    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    match cfg.model {
        GraphModel::ScaleFree => {
            let per = target.div_ceil(n.max(1)).max(1);
            let mut degree = vec![0usize; n];
            for b in 1..n {
                let earlier: Vec<usize> = (0..b).collect();
                let picks: Vec<usize> = earlier
                    .choose_multiple_weighted(rng, per.min(b), |&a| (degree[a] + 1) as f64)
                    .expect("positive weights")
                    .copied()
                    .collect();
                for a in picks {
                    present.insert((a, b));
                    degree[a] += 1;
                    degree[b] += 1;
                }
            }
            if present.len() < target {
                let mut missing: Vec<(usize, usize)> =
                    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|p| !present.contains(p)).collect();
                missing.shuffle(rng);
                present.extend(missing.into_iter().take(target - present.len()));
            } else if present.len() > target {
                let mut all: Vec<(usize, usize)> = present.into_iter().collect();
                all.shuffle(rng);
                all.truncate(target);
                present = all.into_iter().collect();
            }
        }
        GraphModel::ErdosRenyi => {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            for i in index::sample(rng, pairs.len(), target) {
                present.insert(pairs[i]);
            }
        }
    }
    let edges: Vec<(usize, usize)> = present.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    Dag::from_edges(&vec![cfg.cardinality; n], &edges).expect("edges follow a total order")
}

fn dirichlet<R: Rng + ?Sized>(alpha: f64, k: usize, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha > 0");
    loop {
        let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if draws.iter().all(|&x| x > 0.0) && total.is_finite() {
            return draws.into_iter().map(|x| x / total).collect();
        }
    }
}

/// CPT rows drawn from Dirichlet(α, …, α).
pub fn random_cbn<R: Rng + ?Sized>(dag: &Dag, alpha: f64, rng: &mut R) -> CausalNet<f64> {
    let rows = dag
        .nodes()
        .map(|node| {
            let k = dag.domain(node).cardinality();
            (0..dag.parent_configs(node)).map(|_| dirichlet(alpha, k, rng)).collect()
        })
        .collect();
    CausalNet::from_dag(dag, rows, true).expect("Dirichlet rows are positive and normalized")
}

/// Exact CPTs with integer numerators drawn from `1..=max_numerator`.
pub fn random_cbn_exact<R: Rng + ?Sized>(dag: &Dag, max_numerator: u64, rng: &mut R) -> CausalNet<Rational> {
    let rows = dag
        .nodes()
        .map(|node| {
            let k = dag.domain(node).cardinality();
            (0..dag.parent_configs(node)).map(|_| exact_weights(k, 1, max_numerator, rng)).collect()
        })
        .collect();
    CausalNet::from_dag(dag, rows, true).expect("rows are positive and normalized")
}

fn exact_weights<R: Rng + ?Sized>(k: usize, lo: u64, hi: u64, rng: &mut R) -> Vec<Rational> {
    let nums: Vec<u64> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
    let total: u64 = nums.iter().sum();
    nums.into_iter().map(|x| ratio(x, total)).collect()
}

/// `m` targets: one value per node is reserved as excluded, each target picks
/// a uniform size `r ∈ {0..N}`, a uniform `r`-subset of nodes, and for each a
/// uniform non-excluded value.
fn random_targets<R: Rng + ?Sized>(dag: &Dag, m: usize, rng: &mut R) -> Vec<InterventionTarget> {
    let n = dag.len();
    let excluded: Vec<Value> =
        dag.nodes().map(|node| rng.random_range(0..dag.domain(node).cardinality() as Value)).collect();
    (0..m)
        .map(|_| {
            let r = rng.random_range(0..=n);
            let mut nodes = index::sample(rng, n, r).into_vec();
            nodes.sort_unstable();
            let pairs = nodes.into_iter().map(|i| {
                let k = dag.domain(NodeId(i)).cardinality() as Value;
                let v = rng.random_range(0..k - 1);
                (NodeId(i), if v >= excluded[i] { v + 1 } else { v })
            });
            InterventionTarget::new(pairs).expect("distinct nodes")
        })
        .collect()
}

/// Tuple set with `m ∈ [tuples_min, tuples_max]` targets and Dirichlet
/// weights; repeated targets are merged.
pub fn random_tupleset<R: Rng + ?Sized>(dag: &Dag, cfg: &InstanceConfig, rng: &mut R) -> InterventionTupleSet<f64> {
    let m = rng.random_range(cfg.tuples_min..=cfg.tuples_max);
    let targets = random_targets(dag, m, rng);
    let weights = dirichlet(cfg.weight_alpha, m, rng);
    InterventionTupleSet::merged(targets.into_iter().zip(weights).map(|(t, w)| InterventionTuple::new(t, w)).collect())
        .expect("Dirichlet weights sum to one")
}

/// Exact tuple set; weights have integer numerators in `weight_range`.
pub fn random_tupleset_exact<R: Rng + ?Sized>(
    dag: &Dag,
    tuples: (usize, usize),
    weight_range: (u64, u64),
    rng: &mut R,
) -> InterventionTupleSet<Rational> {
    let m = rng.random_range(tuples.0..=tuples.1);
    let targets = random_targets(dag, m, rng);
    let weights = exact_weights(m, weight_range.0, weight_range.1, rng);
    InterventionTupleSet::merged(targets.into_iter().zip(weights).map(|(t, w)| InterventionTuple::new(t, w)).collect())
        .expect("weights sum to one")
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub net: CausalNet<f64>,
    pub tuples: InterventionTupleSet<f64>,
}

/// The instance for `cfg.seed`; `cfg.samples` is not used.
pub fn generate_instance(cfg: &InstanceConfig) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dag = random_dag(cfg, &mut rng);
    let net = random_cbn(&dag, cfg.cpd_alpha, &mut rng);
    let tuples = random_tupleset(&dag, cfg, &mut rng);
    Instance { net, tuples }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub recall: f64,
    pub rmse: f64,
    pub fp_rmse: f64,
    pub fn_rmse: f64,
}

/// Recall `|T ∩ T̂| / |T|`; RMSE over `T ∪ T̂` with a missing weight read as
/// zero; FP-RMSE over `T̂ \ T` and FN-RMSE over `T \ T̂`, each zero when its
/// set is empty.
pub fn metrics<S: Scalar, T: Scalar>(
    truth: &InterventionTupleSet<S>,
    recovered: &InterventionTupleSet<T>,
) -> MetricsRecord {
    metrics_from_weights(
        truth.iter().map(|t| (t.target.clone(), t.weight.to_f64())),
        recovered.iter().map(|t| (t.target.clone(), t.weight.to_f64())),
    )
}

pub fn metrics_from_weights<I, J>(truth: I, recovered: J) -> MetricsRecord
where
    I: IntoIterator<Item = (InterventionTarget, f64)>,
    J: IntoIterator<Item = (InterventionTarget, f64)>,
{
    let truth: BTreeMap<_, _> = truth.into_iter().collect();
    let recovered: BTreeMap<_, _> = recovered.into_iter().collect();
    let (mut both, mut sq_all) = (0usize, 0.0);
    let (mut fp_n, mut fp_sq) = (0usize, 0.0);
    let (mut fn_n, mut fn_sq) = (0usize, 0.0);
    for (t, &w) in &truth {
        match recovered.get(t) {
            Some(&r) => {
                both += 1;
                sq_all += (w - r) * (w - r);
            }
            None => {
                fn_n += 1;
                fn_sq += w * w;
            }
        }
    }
    for (t, &r) in &recovered {
        if !truth.contains_key(t) {
            fp_n += 1;
            fp_sq += r * r;
        }
    }
    let union = both + fp_n + fn_n;
    let rms = |sq: f64, n: usize| if n == 0 { 0.0 } else { (sq / n as f64).sqrt() };
    MetricsRecord {
        recall: if truth.is_empty() { 0.0 } else { both as f64 / truth.len() as f64 },
        rmse: rms(sq_all + fp_sq + fn_sq, union),
        fp_rmse: rms(fp_sq, fp_n),
        fn_rmse: rms(fn_sq, fn_n),
    }
}

/// One results row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub model: GraphModel,
    #[serde(rename = "N")]
    pub nodes: usize,
    #[serde(rename = "M")]
    pub samples: usize,
    pub seed: RngSeed,
    pub m: usize,
    pub recall: f64,
    pub rmse: f64,
    pub fp_rmse: f64,
    pub fn_rmse: f64,
    pub pruned_mass: f64,
    pub runtime_ms: f64,
    #[serde(skip)]
    pub instance: usize,
}

/// Generates the instance for `cfg`, samples `cfg.samples` rows from `P` and
/// from `P_mix`, estimates CPTs, runs the finite algorithm and scores it.
/// `runtime_ms` covers estimation and recovery, not sampling.
pub fn run_instance(cfg: &InstanceConfig, params: FiniteParams) -> BenchRow {
    let instance = generate_instance(cfg);
    let m = cfg.samples;
    let obs = ancestral_sample(&instance.net, mix_seeds(&[cfg.seed, m as u64, 1]), m);
    let mix = mixture_sample(&instance.net, &instance.tuples, mix_seeds(&[cfg.seed, m as u64, 2]), m);

    let start = Instant::now();
    let net_hat = mle_cpds(&obs, instance.net.dag(), params.delta).expect("samples match the network");
    let outcome = disentangle_finite_samples(&net_hat, &mix, params.epsilon);
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let (scores, pruned_mass) = match outcome {
        Ok(report) => (metrics(&instance.tuples, &report.tuples), report.pruned_mass),
        Err(_) => (
            metrics_from_weights(instance.tuples.iter().map(|t| (t.target.clone(), t.weight)), std::iter::empty()),
            0.0,
        ),
    };
    BenchRow {
        model: cfg.model,
        nodes: cfg.nodes,
        samples: m,
        seed: cfg.seed,
        m: instance.tuples.len(),
        recall: scores.recall,
        rmse: scores.rmse,
        fp_rmse: scores.fp_rmse,
        fn_rmse: scores.fn_rmse,
        pruned_mass,
        runtime_ms,
        instance: 0,
    }
}

/// `(N, M)` cells.
///
/// Grammar: cells separated by `;`, each `Ns x Ms` where `Ns` is a comma list
/// of node counts and `Ms` a comma list of sample counts. A sample count is an
/// integer, `2^e`, or a power-of-two range `2^a..2^b`. `full` expands to
/// `4,8,12x2^4..2^20`.
pub fn parse_grid(text: &str) -> Result<Vec<(usize, usize)>, ConfigError> {
    let text = if text.trim() == "full" { "4,8,12x2^4..2^20" } else { text };
    let bad = |m: String| ConfigError::Invalid(m);
    let mut cells = Vec::new();
    for cell in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let (ns, ms) =
            cell.split_once(['x', 'X']).ok_or_else(|| bad(format!("grid cell `{cell}` is not of the form NxM")))?;
        let ns = ns
            .split(',')
            .map(|n| n.trim().parse::<usize>().map_err(|_| bad(format!("bad node count `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut samples = Vec::new();
        for item in ms.split(',').map(str::trim) {
            match item.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (
                        exponent(a).ok_or_else(|| bad(format!("bad range `{item}`")))?,
                        exponent(b).ok_or_else(|| bad(format!("bad range `{item}`")))?,
                    );
                    samples.extend((a..=b).map(|e| 1usize << e));
                }
                None => samples.push(sample_count(item).ok_or_else(|| bad(format!("bad sample count `{item}`")))?),
            }
        }
        for &n in &ns {
            if n == 0 {
                return Err(bad("node counts must be positive".into()));
            }
            for &m in &samples {
                if m == 0 {
                    return Err(bad("sample counts must be positive".into()));
                }
                cells.push((n, m));
            }
        }
    }
    if cells.is_empty() {
        return Err(bad("empty grid".into()));
    }
    Ok(cells)
}

fn exponent(s: &str) -> Option<u32> {
    s.trim().strip_prefix("2^")?.parse().ok().filter(|&e| e < 63)
}

fn sample_count(s: &str) -> Option<usize> {
    match exponent(s) {
        Some(e) => Some(1usize << e),
        None => s.parse().ok(),
    }
}

/// Runs `instances` instances per cell on a pool of `workers` threads.
/// `on_row` sees each row as it completes; the returned rows are sorted by
/// cell, then instance.
pub fn sweep<F>(
    cells: &[(usize, usize)],
    instances: usize,
    template: &InstanceConfig,
    params: FiniteParams,
    workers: usize,
    on_row: F,
) -> Result<Vec<BenchRow>, rayon::ThreadPoolBuildError>
where
    F: Fn(&BenchRow) + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let jobs: Vec<(usize, usize, usize, usize)> =
        cells.iter().enumerate().flat_map(|(c, &(n, m))| (0..instances).map(move |i| (c, n, m, i))).collect();
    let mut rows: Vec<(usize, BenchRow)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, n, m, i)| {
                let cfg = InstanceConfig {
                    nodes: n,
                    samples: m,
                    seed: instance_seed(template.seed, template.model, n, i),
                    ..template.clone()
                };
                let mut row = run_instance(&cfg, params);
                row.instance = i;
                on_row(&row);
                (c, row)
            })
            .collect()
    });
    rows.sort_by_key(|(c, r)| (*c, r.instance));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// Writes rows in the results CSV layout.
pub fn write_rows_csv<W: std::io::Write>(rows: &[BenchRow], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, model: GraphModel) -> InstanceConfig {
        InstanceConfig { nodes: n, model, ..InstanceConfig::default() }
    }

    #[test]
    fn single_node_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for model in [GraphModel::ScaleFree, GraphModel::ErdosRenyi] {
            let dag = random_dag(&cfg(1, model), &mut rng);
            assert_eq!(dag.len(), 1);
            assert_eq!(dag.edge_count(), 0);
        }
    }

    #[test]
    fn edge_counts_respect_cap() {
        assert_eq!(edge_count_range(4), (4, 6));
        assert_eq!(edge_count_range(12), (12, 60));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in [GraphModel::ScaleFree, GraphModel::ErdosRenyi] {
            for _ in 0..1000 {
                let e = random_dag(&cfg(4, model), &mut rng).edge_count();
                assert!((4..=6).contains(&e), "{e}");
            }
            for _ in 0..50 {
                let dag = random_dag(&cfg(12, model), &mut rng);
                assert!((12..=60).contains(&dag.edge_count()));
                assert_eq!(dag.topological_order().len(), 12);
            }
        }
    }

    #[test]
    fn dirichlet_rows_are_positive_with_mean_one_third() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut sum = 0.0;
        let draws = 100_000;
        for _ in 0..draws {
            let row = dirichlet(2.0, 3, &mut rng);
            assert!(row.iter().all(|&x| x > 0.0));
            sum += row[0];
        }
        assert!((sum / draws as f64 - 1.0 / 3.0).abs() < 0.005);

        let variance = |alpha: f64, rng: &mut ChaCha8Rng| {
            let xs: Vec<f64> = (0..20_000).map(|_| dirichlet(alpha, 3, rng)[0]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64
        };
        let (v2, v20, v200) = (variance(2.0, &mut rng), variance(20.0, &mut rng), variance(200.0, &mut rng));
        assert!(v2 > v20 && v20 > v200);
    }

    #[test]
    fn random_cbn_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dag = random_dag(&cfg(6, GraphModel::ScaleFree), &mut rng);
            assert!(random_cbn(&dag, 2.0, &mut rng).is_positive());
        }
    }

    #[test]
    fn random_tuplesets_satisfy_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = cfg(8, GraphModel::ErdosRenyi);
        let dag = random_dag(&c, &mut rng);
        let mut saw_empty = false;
        for _ in 0..2000 {
            let set = random_tupleset(&dag, &c, &mut rng);
            assert!(crate::intervene::check_exclusion(&set, &dag).is_ok());
            assert!(set.len() <= 16 && !set.is_empty());
            assert!(set.iter().all(|t| t.weight > 0.0));
            assert!((set.total_weight() - 1.0).abs() < 1e-9);
            saw_empty |= set.weight_of(&InterventionTarget::empty()).is_some();
        }
        assert!(saw_empty);
    }

    #[test]
    fn worked_metrics() {
        let a = InterventionTarget::of(&[(0, 0)]);
        let b = InterventionTarget::of(&[(1, 0)]);
        let c = InterventionTarget::of(&[(2, 0)]);
        let r = metrics_from_weights([(a.clone(), 0.6), (b.clone(), 0.4)], [(a, 0.5), (c, 0.5)]);
        assert_eq!(r.recall, 0.5);
        assert!((r.rmse - (0.42f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((r.fp_rmse - 0.5).abs() < 1e-12);
        assert!((r.fn_rmse - 0.4).abs() < 1e-12);

        let empty = metrics_from_weights([(b.clone(), 0.4)], []);
        assert_eq!(empty.recall, 0.0);
        assert!((empty.fn_rmse - 0.4).abs() < 1e-12);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("4x2^10").unwrap(), vec![(4, 1024)]);
        assert_eq!(parse_grid("4,8x16,2^5").unwrap(), vec![(4, 16), (4, 32), (8, 16), (8, 32)]);
        assert_eq!(parse_grid("full").unwrap().len(), 3 * 17);
        assert_eq!(parse_grid("4x2^4..2^6; 8x100").unwrap(), vec![(4, 16), (4, 32), (4, 64), (8, 100)]);
        assert!(parse_grid("4").is_err());
        assert!(parse_grid("0x16").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn instances_do_not_depend_on_sample_count() {
        let a =
            InstanceConfig { seed: instance_seed(7, GraphModel::ScaleFree, 4, 0), samples: 16, ..Default::default() };
        let b = InstanceConfig { samples: 1 << 20, ..a.clone() };
        let (ia, ib) = (generate_instance(&a), generate_instance(&b));
        assert_eq!(ia.net, ib.net);
        assert_eq!(ia.tuples, ib.tuples);
    }

    #[test]
    fn sweep_is_deterministic() {
        let template = InstanceConfig { seed: 11, ..Default::default() };
        let cells = parse_grid("3x2^8").unwrap();
        let a = sweep(&cells, 3, &template, FiniteParams::default(), 2, |_| {}).unwrap();
        let b = sweep(&cells, 3, &template, FiniteParams::default(), 1, |_| {}).unwrap();
        assert_eq!(a.len(), 3);
        let strip =
            |rows: Vec<BenchRow>| rows.into_iter().map(|r| BenchRow { runtime_ms: 0.0, ..r }).collect::<Vec<_>>();
        assert_eq!(strip(a), strip(b));
    }
}
