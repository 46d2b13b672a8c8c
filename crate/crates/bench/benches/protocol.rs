use std::hint::black_box;

use acshare_bench::synthetic_payloads;
use acshare_core::bench::{run_sweep, SweepConfig, SweepDataset};
use acshare_core::{execute, AdversaryClass, KeyLength, ScenarioConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn honest_run(c: &mut Criterion) {
    let payloads = synthetic_payloads(32, 0);
    let mut group = c.benchmark_group("honest_run_32_users");
    group.throughput(Throughput::Elements(payloads.len() as u64));
    for k in KeyLength::ALL {
        let config = ScenarioConfig::honest(payloads.len(), k, 0);
        group.bench_with_input(BenchmarkId::from_parameter(k.bits()), &config, |b, config| {
            b.iter(|| execute(black_box(config), &payloads).unwrap())
        });
    }
    group.finish();
}

fn adversarial_run(c: &mut Criterion) {
    let payloads = synthetic_payloads(8, 1);
    let mut group = c.benchmark_group("adversarial_run");
    for class in AdversaryClass::ALL.into_iter().filter(|c| !c.is_genuine()) {
        let config = ScenarioConfig::honest(4, KeyLength::Bits256, 1).with_adversary(class, 4);
        group.bench_with_input(BenchmarkId::from_parameter(class), &config, |b, config| {
            b.iter(|| execute(black_box(config), &payloads).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let datasets = vec![SweepDataset {
        name: "synthetic".into(),
        payloads: synthetic_payloads(64, 2),
    }];
    let config = SweepConfig::default();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("64_records_x_4_lengths", |b| {
        b.iter(|| run_sweep(black_box(&datasets), &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, honest_run, adversarial_run, sweep);
criterion_main!(benches);
