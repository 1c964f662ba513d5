//! Benchmarks for the data-parallel hot paths: DAG enumeration, candidate
//! scoring, and the two policy searches.
//!
//! Run with the default features for the rayon build and with
//! `--no-default-features` for the sequential fallback, then compare:
//!
//! ```text
//! cargo bench -p bnmdl -- --save-baseline parallel
//! cargo bench -p bnmdl --no-default-features -- --baseline parallel
//! ```

use bnmdl::dataset::DiscreteDataset;
use bnmdl::discretize::{exhaustive_search, top_down_search};
use bnmdl::graph::enumerate_dags;
use bnmdl::scoring::{recover, Criterion};
use bnmdl::simulate::{sample, BnSpec};
use bnmdl::synth::random_exploded_instance;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion as Bench};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn four_node_dataset() -> DiscreteDataset {
    let dag = bnmdl::graph::Dag::new(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
    let spec = BnSpec::new(
        dag,
        (1..=4).map(|i| format!("x{i}")).collect(),
        vec![3, 3, 3, 3],
        vec![
            vec![vec![0.5, 0.3, 0.2]],
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.2, 0.6, 0.2],
                vec![0.1, 0.2, 0.7],
            ],
            vec![
                vec![0.6, 0.3, 0.1],
                vec![0.15, 0.7, 0.15],
                vec![0.1, 0.3, 0.6],
            ],
            vec![
                vec![0.5, 0.4, 0.1],
                vec![0.3, 0.3, 0.4],
                vec![0.1, 0.5, 0.4],
            ],
        ],
    )
    .unwrap();
    sample(&spec, 2000, 71).unwrap()
}

fn bench_enumerate(c: &mut Bench) {
    c.bench_function("enumerate_dags/n=5", |b| {
        b.iter(|| enumerate_dags(5).unwrap().len())
    });
}

fn bench_recover(c: &mut Bench) {
    let data = four_node_dataset();
    let candidates = enumerate_dags(4).unwrap();
    c.bench_function("recover/543 candidates", |b| {
        b.iter(|| recover(&data, &candidates, Criterion::Mdl).unwrap().winners.len())
    });
}

fn bench_searches(c: &mut Bench) {
    let mut group = c.benchmark_group("policy_search");
    for m1 in [10u32, 14] {
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from(m1));
        let instance = random_exploded_instance(m1, 1e5, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("top_down", m1), &instance, |b, inst| {
            b.iter(|| top_down_search(&inst.source, &inst.dag, 0).unwrap().evaluations)
        });
        group.bench_with_input(BenchmarkId::new("exhaustive", m1), &instance, |b, inst| {
            b.iter(|| exhaustive_search(&inst.source, &inst.dag, 0).unwrap().evaluations)
        });
    }
    group.finish();
}

criterion_group!(benches, bench_enumerate, bench_recover, bench_searches);
criterion_main!(benches);
