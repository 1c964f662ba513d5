//! Property tests for the structural invariants: order preservation of
//! relabeling, counting identities, explosion round-trips, score identities,
//! information monotonicity under merging, and search evaluation budgets.

use bnmdl::dataset::{counts, relabel, DiscreteDataset, RawDataset};
use bnmdl::discretize::{apply_policy, info_sum, Policy};
use bnmdl::graph::{enumerate_dags, Dag};
use bnmdl::joint::{explode_joint, joint_table, mutual_information, JointTable};
use bnmdl::scoring::{dl_data, log_likelihood, param_count, score_all};
use bnmdl::simulate::ExplosionSpec;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dataset_strategy(
    max_cols: usize,
    max_card: u32,
    max_rows: usize,
) -> impl Strategy<Value = DiscreteDataset> {
    (1..=max_cols, 1..=max_rows).prop_flat_map(move |(n, m)| {
        prop::collection::vec(1..=max_card, n).prop_flat_map(move |cards| {
            let columns: Vec<_> = cards
                .iter()
                .map(|&c| prop::collection::vec(0..c, m))
                .collect();
            (Just(cards), columns).prop_map(|(cards, columns)| {
                DiscreteDataset::new(cards, columns).expect("generated data is valid")
            })
        })
    })
}

fn joint_strategy(cards: Vec<u32>) -> impl Strategy<Value = JointTable> {
    let cells: usize = cards.iter().map(|&c| c as usize).product();
    prop::collection::vec(0.01f64..1.0, cells).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        let probs = raw.iter().map(|&x| x / total).collect();
        JointTable::new((0..cards.len()).collect(), cards.clone(), probs)
            .expect("normalized table is valid")
    })
}

proptest! {
    #[test]
    fn relabel_preserves_order(raw_values in prop::collection::vec(-20i32..20, 1..60)) {
        let column: Vec<f64> = raw_values.iter().map(|&v| f64::from(v) / 2.0).collect();
        let raw = RawDataset::new(vec!["x".into()], vec![column.clone()]).unwrap();
        let (data, maps) = relabel(&raw);
        for (i, &u) in column.iter().enumerate() {
            for (j, &v) in column.iter().enumerate() {
                if u < v {
                    prop_assert!(data.value(i, 0) < data.value(j, 0));
                } else if u == v {
                    prop_assert_eq!(data.value(i, 0), data.value(j, 0));
                }
            }
        }
        prop_assert_eq!(maps[0].cardinality(), data.cardinality(0));
    }

    #[test]
    fn count_marginals_partition_the_rows(
        data in dataset_strategy(3, 3, 40),
        dag_pick in any::<prop::sample::Index>(),
    ) {
        let dags = enumerate_dags(data.n_cols()).unwrap();
        let dag = &dags[dag_pick.index(dags.len())];
        let ct = counts(&data, dag).unwrap();
        for i in 0..data.n_cols() {
            let mut total = 0;
            for j in 0..ct.config_len(i) {
                let row_sum: u64 = (0..ct.cardinality(i) as usize)
                    .map(|k| ct.count(i, j, k))
                    .sum();
                prop_assert_eq!(row_sum, ct.config_count(i, j));
                total += ct.config_count(i, j);
            }
            prop_assert_eq!(total, data.n_rows() as u64);
        }
    }

    #[test]
    fn explosion_round_trips_through_its_policy(
        column in prop::collection::vec(0u32..3, 1..50),
        sizes in prop::collection::vec(1u32..=3, 3),
        raw_probs in prop::collection::vec(0.05f64..1.0, 9),
        seed in any::<u64>(),
    ) {
        let data = DiscreteDataset::new(vec![3], vec![column]).unwrap();
        let groups: Vec<Vec<f64>> = sizes
            .iter()
            .enumerate()
            .map(|(v, &len)| {
                let slice = &raw_probs[3 * v..3 * v + len as usize];
                let total: f64 = slice.iter().sum();
                slice.iter().map(|&q| q / total).collect()
            })
            .collect();
        let spec = ExplosionSpec::new(0, groups).unwrap();
        let exploded = bnmdl::simulate::explode(&data, &spec, seed).unwrap();
        let truth = Policy::from_group_sizes(0, &spec.group_sizes());
        let recovered = apply_policy(&exploded, &truth).unwrap();
        prop_assert_eq!(recovered, data);
    }

    #[test]
    fn exploded_joint_preserves_other_marginals(
        joint in joint_strategy(vec![3, 3]),
        sizes in prop::collection::vec(1u32..=3, 3),
        raw_probs in prop::collection::vec(0.05f64..1.0, 9),
    ) {
        let groups: Vec<Vec<f64>> = sizes
            .iter()
            .enumerate()
            .map(|(v, &len)| {
                let slice = &raw_probs[3 * v..3 * v + len as usize];
                let total: f64 = slice.iter().sum();
                slice.iter().map(|&q| q / total).collect()
            })
            .collect();
        let spec = ExplosionSpec::new(0, groups).unwrap();
        let exploded = explode_joint(&joint, &spec).unwrap();
        prop_assert!((exploded.total_mass() - joint.total_mass()).abs() < 1e-12);
        let before = joint.marginal(&[1]).unwrap();
        let after = exploded.marginal(&[1]).unwrap();
        for v in 0..3u32 {
            prop_assert!((before.prob(&[v]) - after.prob(&[v])).abs() < 1e-12);
        }
        // Aggregating back through the ground-truth policy recovers the
        // original joint exactly up to float addition.
        let truth = Policy::from_group_sizes(0, &spec.group_sizes());
        let back = exploded.aggregate(0, &truth).unwrap();
        for i in 0..3u32 {
            for j in 0..3u32 {
                prop_assert!((back.prob(&[i, j]) - joint.prob(&[i, j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scores_ignore_row_order(
        data in dataset_strategy(3, 3, 30),
        dag_pick in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let dags = enumerate_dags(data.n_cols()).unwrap();
        let dag = &dags[dag_pick.index(dags.len())];
        let mut order: Vec<usize> = (0..data.n_rows()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let columns: Vec<Vec<u32>> = (0..data.n_cols())
            .map(|i| order.iter().map(|&r| data.value(r, i)).collect())
            .collect();
        let shuffled = DiscreteDataset::new(data.cardinalities().to_vec(), columns).unwrap();
        let a = score_all(&data, dag).unwrap();
        let b = score_all(&shuffled, dag).unwrap();
        prop_assert!((a.ll.nats - b.ll.nats).abs() < 1e-9);
        prop_assert!((a.aic - b.aic).abs() < 1e-9);
        prop_assert!((a.bic - b.bic).abs() < 1e-9);
        prop_assert!((a.mdl - b.mdl).abs() < 1e-9);
    }

    #[test]
    fn adding_edges_never_hurts_likelihood(
        data in dataset_strategy(3, 3, 30),
        superset_pick in any::<prop::sample::Index>(),
        edge_mask in any::<u16>(),
    ) {
        let dags = enumerate_dags(data.n_cols()).unwrap();
        let superset = &dags[superset_pick.index(dags.len())];
        // Any edge subset of a DAG is a DAG.
        let edges: Vec<(usize, usize)> = superset
            .edges()
            .into_iter()
            .enumerate()
            .filter(|(idx, _)| edge_mask >> (idx % 16) & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        let subset = Dag::new(data.n_cols(), &edges).unwrap();
        let ll_sub = log_likelihood(&data, &subset).unwrap().nats;
        let ll_super = log_likelihood(&data, superset).unwrap().nats;
        prop_assert!(ll_super >= ll_sub - 1e-9);
    }

    #[test]
    fn description_length_identities(
        data in dataset_strategy(3, 3, 30),
        dag_pick in any::<prop::sample::Index>(),
    ) {
        let dags = enumerate_dags(data.n_cols()).unwrap();
        let dag = &dags[dag_pick.index(dags.len())];
        let s = score_all(&data, dag).unwrap();
        // Row-wise data bits equal the negated base-2 log-likelihood.
        prop_assert!((s.dl_data + s.ll.bits).abs() < 1e-9);
        prop_assert!((dl_data(&data, dag).unwrap() - s.dl_data).abs() < 1e-12);
        // MDL decomposes into half the base-2 BIC plus the structure bits.
        let m = data.n_rows() as f64;
        let bic_base2 = -2.0 * s.ll.bits + param_count(dag, data.cardinalities()) as f64 * m.log2();
        let structure: f64 = data
            .cardinalities()
            .iter()
            .map(|&c| f64::from(c).log2())
            .sum::<f64>()
            + (0..dag.node_count())
                .map(|i| (1.0 + dag.parents(i).len() as f64) * (dag.node_count() as f64).log2())
                .sum::<f64>();
        prop_assert!((s.mdl - (0.5 * bic_base2 + structure)).abs() < 1e-6);
    }

    #[test]
    fn mutual_information_is_symmetric_and_nonnegative(
        joint in joint_strategy(vec![3, 4]),
    ) {
        let ab = mutual_information(&joint, &[0], &[1]).unwrap();
        let ba = mutual_information(&joint, &[1], &[0]).unwrap();
        prop_assert!(ab >= -1e-12);
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn merging_values_never_increases_information(
        joint in joint_strategy(vec![7, 3]),
        policy_mask in 0u32..64,
        removal_pick in any::<prop::sample::Index>(),
    ) {
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        let source = bnmdl::joint::DistributionSource::new(joint, 1000.0).unwrap();
        let thresholds: Vec<u32> =
            (1..7).filter(|&t| policy_mask >> (t - 1) & 1 == 1).collect();
        prop_assume!(!thresholds.is_empty());
        let removal = thresholds[removal_pick.index(thresholds.len())];
        let policy = Policy::new(0, 7, thresholds).unwrap();
        let before = info_sum(&source, &dag, 0, &policy).unwrap();
        let after = info_sum(&source, &dag, 0, &policy.without_threshold(removal)).unwrap();
        prop_assert!(after <= before + 1e-9, "after={after}, before={before}");
    }

    #[test]
    fn full_discretization_maximizes_information(
        joint in joint_strategy(vec![5, 3]),
    ) {
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        let source = bnmdl::joint::DistributionSource::new(joint, 1000.0).unwrap();
        let full = info_sum(&source, &dag, 0, &Policy::full(0, 5)).unwrap();
        for mask in 0u32..16 {
            let thresholds: Vec<u32> = (1..5).filter(|&t| mask >> (t - 1) & 1 == 1).collect();
            let p = Policy::new(0, 5, thresholds).unwrap();
            let info = info_sum(&source, &dag, 0, &p).unwrap();
            prop_assert!(info <= full + 1e-9);
        }
    }

    #[test]
    fn empirical_joint_mass_is_one(data in dataset_strategy(3, 4, 50)) {
        let vars: Vec<usize> = (0..data.n_cols()).collect();
        let joint = joint_table(&data, &vars).unwrap();
        prop_assert!((joint.total_mass() - 1.0).abs() < 1e-12);
    }
}
