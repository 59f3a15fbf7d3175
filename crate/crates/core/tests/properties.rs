use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use disentangle::benchgen::{metrics, random_cbn_exact, random_dag, random_tupleset_exact, GraphModel, InstanceConfig};
use disentangle::cbn::CausalNet;
use disentangle::disentangle::{disentangle_finite, disentangle_oracle, ExactMixture, FrequencyOracle};
use disentangle::intervene::{marginalize_tuples, mixture_prefix_prob, InterventionTupleSet};
use disentangle::io;
use disentangle::scalar::{ratio, Rational};
use disentangle::solver::{solve_exact, solve_scored, StructuredSystem};

fn instance(seed: u64, nodes: usize, k: usize, er: bool) -> (CausalNet<Rational>, InterventionTupleSet<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = InstanceConfig {
        nodes,
        cardinality: k,
        model: if er { GraphModel::ErdosRenyi } else { GraphModel::ScaleFree },
        ..InstanceConfig::default()
    };
    let dag = random_dag(&cfg, &mut rng);
    let net = random_cbn_exact(&dag, 9, &mut rng);
    let tuples = random_tupleset_exact(&dag, (1, 8), (1, 9), &mut rng);
    (net, tuples)
}

fn planted_system() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (2usize..=8).prop_flat_map(|k| {
        (prop::collection::vec((1u64..=30, 1u64..=30), k), prop::collection::vec((0u64..=15, 1u64..=15), k), 0..k)
            .prop_map(|(a, x, zero)| {
                let a = a.into_iter().map(|(p, q)| ratio(p, q)).collect();
                let x = x
                    .into_iter()
                    .enumerate()
                    .map(|(j, (p, q))| if j == zero { Rational::zero() } else { ratio(p, q) })
                    .collect();
                (a, x)
            })
    })
}

fn system_for(a: &[Rational], x: &[Rational]) -> StructuredSystem<Rational> {
    let zeros = vec![Rational::zero(); a.len()];
    let probe = StructuredSystem::from_a_b(a.to_vec(), zeros).unwrap();
    StructuredSystem::from_a_b(a.to_vec(), probe.apply(x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn solver_null_space_is_a((a, x) in planted_system()) {
        let sys = system_for(&a, &x);
        prop_assert!(sys.apply(&a).iter().all(Zero::is_zero));
        prop_assert!(sys.is_consistent());
    }

    #[test]
    fn solver_recovers_planted_solution((a, x) in planted_system()) {
        let sys = system_for(&a, &x);
        let exact = solve_exact(&sys).unwrap();
        prop_assert_eq!(&exact.x, &x);
        prop_assert!(exact.residual.is_zero());
        let scored = solve_scored(&sys);
        prop_assert_eq!(scored.x, x);
    }

    #[test]
    fn solver_nonnegative_candidate_is_unique((a, x) in planted_system()) {
        let sys = system_for(&a, &x);
        let mut nonneg: Vec<_> = (0..a.len())
            .filter_map(|i| sys.candidate(i))
            .filter(|c| c.iter().all(|v| *v >= Rational::zero()))
            .collect();
        nonneg.sort();
        nonneg.dedup();
        prop_assert_eq!(nonneg, vec![x]);
    }

    #[test]
    fn solver_candidates_solve_the_system((a, x) in planted_system(), shift in 0u64..5) {
        let sys = system_for(&a, &x);
        for i in 0..a.len() {
            prop_assert!(sys.residual(&sys.candidate(i).unwrap()).is_zero());
        }
        // Adding a multiple of `a` keeps every equation satisfied.
        let moved: Vec<Rational> = x.iter().zip(&a).map(|(xi, ai)| xi + ai * Rational::from_integer(shift.into())).collect();
        prop_assert!(sys.residual(&moved).is_zero());
    }

    #[test]
    fn marginalizing_the_last_node(seed in any::<u64>(), nodes in 2usize..=4, k in 2usize..=3, er in any::<bool>()) {
        let (net, tuples) = instance(seed, nodes, k, er);
        let order = net.topological_order().to_vec();
        let last = *order.last().unwrap();
        let reduced = marginalize_tuples(&tuples, last);
        for a in net.dag().assignments() {
            if a.get(last) != 0 {
                continue;
            }
            let mut values = a.0.clone();
            let summed = (0..k as u32).fold(Rational::zero(), |acc, l| {
                values[last.0] = l;
                acc + mixture_prefix_prob(&net, nodes, &tuples, &values)
            });
            prop_assert_eq!(summed, mixture_prefix_prob(&net, nodes - 1, &reduced, &values));
        }
    }

    #[test]
    fn deleting_a_sink_keeps_prefix_marginals(seed in any::<u64>(), nodes in 2usize..=5, k in 2usize..=3) {
        let (net, _) = instance(seed, nodes, k, false);
        let order = net.topological_order().to_vec();
        let (smaller, kept) = net.delete_last(&order).unwrap();
        for a in smaller.dag().assignments() {
            let mut full = vec![0; nodes];
            for (i, &old) in kept.iter().enumerate() {
                full[old.0] = a.0[i];
            }
            prop_assert_eq!(smaller.joint_prob(&a).unwrap(), net.prefix_prob(nodes - 1, &full));
        }
    }

    #[test]
    fn oracle_round_trip(seed in any::<u64>(), nodes in 1usize..=5, k in 2usize..=3, er in any::<bool>()) {
        let (net, tuples) = instance(seed, nodes, k, er);
        let got = disentangle_oracle(&net, &ExactMixture::new(&net, &tuples)).unwrap();
        prop_assert_eq!(got, tuples);
    }

    #[test]
    fn exact_frequencies_match_oracle(seed in any::<u64>(), nodes in 1usize..=4, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = InstanceConfig { nodes, cardinality: k, ..InstanceConfig::default() };
        let dag = random_dag(&cfg, &mut rng);
        let net = random_cbn_exact(&dag, 9, &mut rng);
        let tuples = random_tupleset_exact(&dag, (1, 8), (5, 20), &mut rng);
        let exact = ExactMixture::new(&net, &tuples);
        let table = FrequencyOracle::enumerate(net.dag(), &exact);
        let finite = disentangle_finite(&net, &table, ratio(1, 100)).unwrap();
        prop_assert_eq!(finite.tuples, disentangle_oracle(&net, &exact).unwrap());
    }

    #[test]
    fn metrics_identity_and_symmetry(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (net, a) = instance(s1, 3, 3, false);
        let mut rng = ChaCha8Rng::seed_from_u64(s2);
        let b = random_tupleset_exact(net.dag(), (1, 8), (1, 9), &mut rng);
        let same = metrics(&a, &a);
        prop_assert_eq!((same.recall, same.rmse, same.fp_rmse, same.fn_rmse), (1.0, 0.0, 0.0, 0.0));
        let (ab, ba) = (metrics(&a, &b), metrics(&b, &a));
        prop_assert!((ab.rmse - ba.rmse).abs() < 1e-12);
        prop_assert_eq!(ab.fp_rmse, ba.fn_rmse);
        prop_assert_eq!(ab.fn_rmse, ba.fp_rmse);
        prop_assert!((0.0..=1.0).contains(&ab.recall));
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), nodes in 1usize..=5, k in 2usize..=4) {
        let (net, tuples) = instance(seed, nodes, k, true);
        let back: CausalNet<Rational> = io::net_from_json(&io::net_to_json(&net)).unwrap();
        prop_assert_eq!(&back, &net);
        let back = io::tuples_from_json::<Rational>(&io::tuples_to_json(&tuples), Some(net.dag())).unwrap();
        prop_assert_eq!(&back, &tuples);

        let float = net.convert::<f64>();
        let text = io::net_to_json(&float);
        let again: CausalNet<f64> = io::net_from_json(&text).unwrap();
        prop_assert_eq!(io::net_to_json(&again), text);
        prop_assert!(again.dag().nodes().all(|u| again.dag().parents(u) == net.dag().parents(u)));
    }
}
