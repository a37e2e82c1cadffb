//! Sequential vs rayon execution for the main pipeline stages.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use normvar::sieve::{NormEvents, PrimeSieve};
use normvar::stats::{exchange_grid, orthogonality_grid, variance, VarianceOptions};
use normvar::{parse_field, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sieve(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve");
    group.sample_size(10);
    for (name, exec) in MODES {
        let s = PrimeSieve::new(1 << 16, exec).unwrap();
        group.bench_function(BenchmarkId::new(name, "x=1e7"), |b| b.iter(|| s.primes_up_to(10_000_000).unwrap()));
    }
    group.finish();
}

fn events(c: &mut Criterion) {
    let k = parse_field("cyclo:5").unwrap();
    let mut group = c.benchmark_group("norm_events");
    group.sample_size(10);
    for (name, exec) in MODES {
        let s = PrimeSieve::new(1 << 16, exec).unwrap();
        group.bench_function(BenchmarkId::new(name, "x=1e6"), |b| {
            b.iter(|| NormEvents::generate(&k, 1_000_000, &s).unwrap())
        });
    }
    group.finish();
}

fn variance_run(c: &mut Criterion) {
    let k = parse_field("quad:-1").unwrap();
    let ev = NormEvents::generate(&k, 100_000, &PrimeSieve::default()).unwrap();
    let mut group = c.benchmark_group("variance");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "x=1e5,Q=2000"), |b| {
            b.iter(|| variance(&ev, VarianceOptions { big_q: 2000, m: 1.0, exec }).unwrap())
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let k = parse_field("quad:5").unwrap();
    let ev = NormEvents::generate(&k, 10_000, &PrimeSieve::default()).unwrap();
    let moduli: Vec<u64> = (1..=120).collect();
    let mut group = c.benchmark_group("identities");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "orthogonality q<=120"), |b| {
            b.iter(|| orthogonality_grid(&ev, &moduli, exec))
        });
        group.bench_function(BenchmarkId::new(name, "exchange q<=30"), |b| b.iter(|| exchange_grid(&ev, 30, exec)));
    }
    group.finish();
}

criterion_group!(benches, sieve, events, variance_run, identities);
criterion_main!(benches);
