use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spl_impact::cia::Lifted;
use spl_impact::exec::Execution;
use spl_impact::model::load_inputs;
use spl_impact::oracle::{check_commutation_with, gen_random_inputs, run_campaign, Limits};
use spl_impact::slicer::SlicerConfig;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn fixture_check(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/lms_ex2.json");
    let inputs = load_inputs(path).unwrap();
    let cfg = SlicerConfig::default();
    let mut group = c.benchmark_group("check_lms_ex2");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| check_commutation_with(black_box(&inputs), &cfg, &Lifted, exec).unwrap())
        });
    }
    group.finish();
}

fn wide_check(c: &mut Criterion) {
    let cfg = SlicerConfig::default();
    let mut group = c.benchmark_group("check_random_wide");
    group.sample_size(20);
    for features in [6usize, 8] {
        let limits = Limits {
            features,
            sys_elements: 30,
            gsn_elements: 30,
            edges: 60,
        };
        // Pick a seed that uses every allowed feature.
        let inputs = (0..)
            .map(|seed| gen_random_inputs(seed, &limits))
            .find(|i| i.space.features().len() == features)
            .unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, features), &inputs, |b, inputs| {
                b.iter(|| check_commutation_with(inputs, &cfg, &Lifted, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn campaign(c: &mut Criterion) {
    let cfg = SlicerConfig::default();
    let limits = Limits::default();
    let mut group = c.benchmark_group("campaign_100_seeds");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_campaign(0..100, &limits, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fixture_check, wide_check, campaign);
criterion_main!(benches);
