use std::hint::black_box;

use acshare_bench::operands;
use acshare_core::primitives::{expand, hash, mod_reduce, mul_mod_width, sym_encrypt};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const WIDTHS: [usize; 4] = [8, 16, 32, 64];

fn bench_hash(c: &mut Criterion) {
    let mut group = c.benchmark_group("hash");
    for len in [32usize, 256, 4096] {
        let data = vec![0xa5u8; len];
        group.throughput(Throughput::Bytes(len as u64));
        group.bench_with_input(BenchmarkId::from_parameter(len), &data, |b, d| {
            b.iter(|| hash(black_box(d)))
        });
    }
    group.finish();
}

fn bench_expand(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand");
    for w in WIDTHS {
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| expand(black_box(b"user-0000"), w).unwrap())
        });
    }
    group.finish();
}

fn bench_mod_reduce(c: &mut Criterion) {
    let mut group = c.benchmark_group("mod_reduce");
    for w in WIDTHS {
        let (x, m) = operands(w, w as u64);
        group.bench_with_input(BenchmarkId::from_parameter(w), &(x, m), |b, (x, m)| {
            b.iter(|| mod_reduce(black_box(x.as_bytes()), black_box(m.as_bytes())).unwrap())
        });
    }
    group.finish();
}

fn bench_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("mul_mod_width");
    for w in WIDTHS {
        let (x, y) = operands(w, 100 + w as u64);
        group.bench_with_input(BenchmarkId::from_parameter(w), &(x, y), |b, (x, y)| {
            b.iter(|| mul_mod_width(black_box(x.as_bytes()), black_box(y.as_bytes())).unwrap())
        });
    }
    group.finish();
}

fn bench_cipher(c: &mut Criterion) {
    let payload = vec![7u8; 128];
    c.bench_function("sym_encrypt/128", |b| {
        b.iter(|| sym_encrypt(black_box(b"0123456789abcdef0123456789abcdef"), black_box(&payload)))
    });
}

criterion_group!(benches, bench_hash, bench_expand, bench_mod_reduce, bench_mul, bench_cipher);
criterion_main!(benches);
