//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use disentangle::benchgen::{
    self, metrics_from_weights, random_cbn_exact, random_dag, random_tupleset_exact, BenchRow, GraphModel,
    InstanceConfig,
};
use disentangle::cbn::{CausalNet, Dag};
use disentangle::disentangle::{disentangle_finite, disentangle_oracle, ExactMixture, FiniteParams, FrequencyOracle};
use disentangle::fixtures;
use disentangle::intervene::{check_exclusion, InterventionTarget, InterventionTuple, InterventionTupleSet};
use disentangle::scalar::{ratio, Rational};
use disentangle::solver::{solve_exact, StructuredSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn two_node_golden() -> Outcome {
    let net = fixtures::two_node::<Rational>();
    let truth = fixtures::two_node_mixture::<Rational>();
    let start = Instant::now();
    let got = disentangle_oracle(&net, &ExactMixture::new(&net, &truth)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(got == truth, || format!("recovered {got:?}"))?;
    ensure(elapsed < Duration::from_millis(10), || format!("took {:.3} ms", ms(elapsed)))?;
    Ok(format!("{:.3} ms", ms(elapsed)))
}

fn three_node_golden() -> Outcome {
    let net = fixtures::three_node::<Rational>();
    let mut worst = Duration::ZERO;
    for mu in [[ratio(1, 2), ratio(1, 3), ratio(1, 6)], [ratio(1, 10), ratio(7, 10), ratio(1, 5)]] {
        let truth = fixtures::three_node_mixture::<Rational>(mu);
        let start = Instant::now();
        let got = disentangle_oracle(&net, &ExactMixture::new(&net, &truth)).map_err(|e| e.to_string())?;
        worst = worst.max(start.elapsed());
        ensure(got == truth, || format!("recovered {got:?}"))?;
    }
    ensure(worst < Duration::from_millis(50), || format!("took {:.3} ms", ms(worst)))?;
    Ok(format!("{:.3} ms", ms(worst)))
}

fn small_instance(
    rng: &mut ChaCha8Rng,
    weights: (u64, u64),
    tuples: (usize, usize),
) -> (CausalNet<Rational>, InterventionTupleSet<Rational>) {
    let cfg = InstanceConfig {
        nodes: rng.random_range(2..=5),
        cardinality: rng.random_range(2..=3),
        model: if rng.random_bool(0.5) { GraphModel::ScaleFree } else { GraphModel::ErdosRenyi },
        ..InstanceConfig::default()
    };
    let dag = random_dag(&cfg, rng);
    let net = random_cbn_exact(&dag, 9, rng);
    let set = random_tupleset_exact(&dag, tuples, weights, rng);
    (net, set)
}

fn round_trip_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let start = Instant::now();
    for i in 0..200 {
        let (net, truth) = small_instance(&mut rng, (1, 9), (1, 8));
        if !net.is_positive() || check_exclusion(&truth, net.dag()).is_err() {
            return Err(format!("instance {i} violates an assumption"));
        }
        let got =
            disentangle_oracle(&net, &ExactMixture::new(&net, &truth)).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(got == truth, || format!("instance {i}: recovered {got:?}, planted {truth:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!("200 instances in {:.0} ms", ms(elapsed)))
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone() / m[r][col].clone();
                let pivot = m[r].clone();
                for (cell, p) in m[i].iter_mut().zip(&pivot).skip(col) {
                    *cell -= f.clone() * p;
                }
            }
        }
        r += 1;
    }
    r
}

fn solver_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    let start = Instant::now();
    for case in 0..1000 {
        let k = rng.random_range(2..=8);
        let a: Vec<Rational> = (0..k).map(|_| ratio(rng.random_range(1..=20), rng.random_range(1..=20))).collect();
        let c = a.iter().fold(Rational::zero(), |s, x| s + x);
        let zero = rng.random_range(0..k);
        let planted: Vec<Rational> =
            (0..k)
                .map(|j| {
                    if j == zero {
                        Rational::zero()
                    } else {
                        ratio(rng.random_range(0..=12), rng.random_range(1..=12))
                    }
                })
                .collect();
        let lhs: Vec<Vec<Rational>> =
            (0..k).map(|i| (0..k).map(|j| if i == j { c.clone() - &a[i] } else { -a[i].clone() }).collect()).collect();
        let b: Vec<Rational> =
            lhs.iter().map(|row| row.iter().zip(&planted).fold(Rational::zero(), |s, (m, x)| s + m * x)).collect();
        let sys = StructuredSystem::new(a.clone(), b, c).map_err(|e| format!("case {case}: {e}"))?;

        ensure(rank(lhs) == k - 1, || format!("case {case}: rank is not k-1"))?;
        ensure(sys.apply(&a).iter().all(Zero::is_zero), || format!("case {case}: a is not in the null space"))?;
        let mut nonneg: Vec<Vec<Rational>> =
            (0..k).filter_map(|i| sys.candidate(i)).filter(|x| x.iter().all(|v| *v >= Rational::zero())).collect();
        nonneg.sort();
        nonneg.dedup();
        ensure(nonneg.len() == 1, || format!("case {case}: {} nonnegative candidates", nonneg.len()))?;
        let sol = solve_exact(&sys).map_err(|e| format!("case {case}: {e}"))?;
        ensure(sol.x == planted, || format!("case {case}: recovered {:?}", sol.x))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!("1000 systems in {:.0} ms", ms(elapsed)))
}

fn non_positive_regression() -> Outcome {
    let net = fixtures::positivity_counterexample::<Rational>();
    ensure(!net.is_positive(), || "fixture is positive".into())?;
    let truth = fixtures::two_node_mixture::<Rational>();
    let got = disentangle_oracle(&net, &ExactMixture::new(&net, &truth)).map_err(|e| e.to_string())?;
    let half = ratio::<Rational>(1, 2);
    ensure(got == truth && got.iter().all(|t| t.weight == half), || format!("recovered {got:?}"))?;
    // The empty target's witness V1=1 hits the zero cell, so its system has a zero entry in a.
    let zero_cell = InterventionTupleSet::new(vec![
        InterventionTuple::new(InterventionTarget::of(&[]), half.clone()),
        InterventionTuple::new(InterventionTarget::of(&[(0, 0), (1, 0)]), half.clone()),
    ])
    .map_err(|e| e.to_string())?;
    let got = disentangle_oracle(&net, &ExactMixture::new(&net, &zero_cell)).map_err(|e| e.to_string())?;
    ensure(got == zero_cell, || format!("zero-cell mixture recovered {got:?}"))?;
    Ok("weights (1/2, 1/2) on both mixtures".into())
}

struct CellMeans {
    recall: f64,
    rmse: f64,
    fp_rmse: f64,
}

fn means(rows: &[BenchRow]) -> CellMeans {
    let n = rows.len() as f64;
    CellMeans {
        recall: rows.iter().map(|r| r.recall).sum::<f64>() / n,
        rmse: rows.iter().map(|r| r.rmse).sum::<f64>() / n,
        fp_rmse: rows.iter().map(|r| r.fp_rmse).sum::<f64>() / n,
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Non-increasing up to at most one adjacent increase of at most `slack`.
fn mostly_non_increasing(xs: &[f64], slack: f64) -> bool {
    let ups: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 0.0).collect();
    ups.is_empty() || (ups.len() == 1 && ups[0] <= slack)
}

fn trend() -> Outcome {
    let sizes = [1usize << 6, 1 << 10, 1 << 14, 1 << 18];
    let cells: Vec<(usize, usize)> = sizes.iter().map(|&m| (4, m)).collect();
    let template = InstanceConfig { seed: 2024, ..InstanceConfig::default() };
    let start = Instant::now();
    let rows = benchgen::sweep(&cells, 20, &template, FiniteParams::default(), workers(), |_| {})
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let per_cell: Vec<CellMeans> =
        sizes.iter().map(|&m| means(&rows.iter().filter(|r| r.samples == m).cloned().collect::<Vec<_>>())).collect();
    let recall: Vec<f64> = per_cell.iter().map(|c| c.recall).collect();
    let rmse: Vec<f64> = per_cell.iter().map(|c| c.rmse).collect();
    let fp: Vec<f64> = per_cell.iter().map(|c| c.fp_rmse).collect();
    let summary = format!("recall {recall:.3?} rmse {rmse:.4?} fp_rmse {fp:.4?} in {:.1} s", elapsed.as_secs_f64());
    ensure(recall.windows(2).all(|w| w[1] >= w[0]), || format!("recall decreases: {summary}"))?;
    ensure(recall[3] >= 0.9, || format!("final recall below 0.9: {summary}"))?;
    ensure(mostly_non_increasing(&rmse, 0.02), || format!("rmse trend: {summary}"))?;
    ensure(mostly_non_increasing(&fp, 0.02), || format!("fp_rmse trend: {summary}"))?;
    ensure(elapsed < Duration::from_secs(15 * 60), || format!("too slow: {summary}"))?;
    Ok(summary)
}

fn model_parity() -> Outcome {
    let mut recall = Vec::new();
    for model in [GraphModel::ScaleFree, GraphModel::ErdosRenyi] {
        let template = InstanceConfig { model, seed: 77, ..InstanceConfig::default() };
        let rows = benchgen::sweep(&[(4, 1 << 14)], 20, &template, FiniteParams::default(), workers(), |_| {})
            .map_err(|e| e.to_string())?;
        recall.push(means(&rows).recall);
    }
    let diff = (recall[0] - recall[1]).abs();
    let summary = format!("sf {:.3} er {:.3} diff {diff:.3}", recall[0], recall[1]);
    ensure(diff <= 0.1, || summary.clone())?;
    Ok(summary)
}

fn metrics_example() -> Outcome {
    let (a, b, c) =
        (InterventionTarget::of(&[(0, 0)]), InterventionTarget::of(&[(1, 0)]), InterventionTarget::of(&[(2, 0)]));
    let r = metrics_from_weights([(a.clone(), 0.6), (b, 0.4)], [(a, 0.5), (c, 0.5)]);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let expected_rmse = (0.42f64 / 3.0).sqrt();
    ensure(
        close(r.recall, 0.5) && close(r.rmse, expected_rmse) && close(r.fp_rmse, 0.5) && close(r.fn_rmse, 0.4),
        || format!("{r:?}"),
    )?;
    Ok(format!("recall {} rmse {:.4} fp {} fn {}", r.recall, r.rmse, r.fp_rmse, r.fn_rmse))
}

fn injection_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A);
    let epsilon = ratio::<Rational>(1, 100);
    for i in 0..50 {
        let (net, truth) = small_instance(&mut rng, (5, 20), (1, 8));
        let exact = ExactMixture::new(&net, &truth);
        let oracle = disentangle_oracle(&net, &exact).map_err(|e| format!("instance {i}: {e}"))?;
        let table = FrequencyOracle::enumerate(net.dag(), &exact);
        let finite = disentangle_finite(&net, &table, epsilon.clone()).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(finite.tuples == oracle, || format!("instance {i}: {:?} vs {oracle:?}", finite.tuples))?;
        ensure(finite.pruned_mass.is_zero(), || format!("instance {i}: pruned {}", finite.pruned_mass))?;
    }
    Ok("50 instances".into())
}

fn chain(n: usize, rng: &mut ChaCha8Rng) -> (CausalNet<Rational>, InterventionTupleSet<Rational>) {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let dag = Dag::from_edges(&vec![3; n], &edges).expect("chain");
    let net = random_cbn_exact(&dag, 9, rng);
    let set = loop {
        let s = random_tupleset_exact(&dag, (6, 6), (1, 9), rng);
        if s.len() == 6 {
            break s;
        }
    };
    (net, set)
}

fn complexity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    let sizes = [2usize, 4, 8, 16];
    let mut times = Vec::new();
    for &n in &sizes {
        let mut best = Vec::new();
        for _ in 0..3 {
            let (net, truth) = chain(n, &mut rng);
            let mut runs: Vec<f64> = (0..5)
                .map(|_| {
                    let start = Instant::now();
                    let got = disentangle_oracle(&net, &ExactMixture::new(&net, &truth));
                    let t = start.elapsed().as_secs_f64();
                    assert_eq!(got.as_ref().ok(), Some(&truth));
                    t
                })
                .collect();
            runs.sort_by(f64::total_cmp);
            best.push(runs[runs.len() / 2]);
        }
        times.push(best.iter().sum::<f64>() / best.len() as f64);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let summary =
        format!("slope {slope:.2}, times {:?} ms", times.iter().map(|t| format!("{:.3}", t * 1e3)).collect::<Vec<_>>());
    ensure(slope < 3.0, || summary.clone())?;
    Ok(summary)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("two-node golden recovery", two_node_golden),
        ("three-node golden recovery", three_node_golden),
        ("random oracle round trips", round_trip_suite),
        ("planted structured systems", solver_suite),
        ("non-positive network recovery", non_positive_regression),
        ("recall and error trend in M", trend),
        ("scale-free vs Erdos-Renyi parity", model_parity),
        ("metrics worked example", metrics_example),
        ("exact injection into finite path", injection_consistency),
        ("runtime growth on chains", complexity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
