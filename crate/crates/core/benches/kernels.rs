//! Kernel timings on one thread against the full rayon pool.
//!
//! The one-thread pool runs the same parallel iterators serially, which is
//! what the sequential build does. Build with `--no-default-features` to time
//! the plain-loop fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;

use convan::fenchel::{conjugate, conjugate_oracle, inf_convolution};
use convan::monotone::{is_monotone, OperatorGraph};
use convan::moreau::moreau_envelope;
use convan::renorm::{asplund_step, init_pair};
use convan::special::convexity_probe;
use convan::{FnAtom, Grid, NormKind};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("serial", one), ("parallel", all)]
}

fn conjugates(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate");
    let f1 = FnAtom::Power { p: 1.5 }.sample(&Grid::line(-5.0, 5.0, 200_001).unwrap()).unwrap();
    let d1 = Grid::line(-3.0, 3.0, 200_001).unwrap();
    let f2 = FnAtom::NormSq { kind: NormKind::L2 }.sample(&Grid::square(-2.0, 2.0, 801).unwrap()).unwrap();
    let d2 = Grid::square(-2.0, 2.0, 801).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("line_200k", name), |b| {
            b.iter(|| pool.install(|| conjugate(&f1, &d1).unwrap()))
        });
        group.bench_function(BenchmarkId::new("plane_801", name), |b| {
            b.iter(|| pool.install(|| conjugate(&f2, &d2).unwrap()))
        });
    }
    let small = FnAtom::DoubleWell.sample(&Grid::line(-3.0, 3.0, 2001).unwrap()).unwrap();
    let sd = Grid::line(-2.0, 2.0, 2001).unwrap();
    group.bench_function("fast_2001", |b| b.iter(|| conjugate(&small, &sd).unwrap()));
    group.bench_function("oracle_2001", |b| b.iter(|| conjugate_oracle(&small, &sd).unwrap()));
    group.finish();
}

fn envelopes(c: &mut Criterion) {
    let mut group = c.benchmark_group("envelope");
    let f = FnAtom::Norm { kind: NormKind::L1 }.sample(&Grid::square(-3.0, 3.0, 601).unwrap()).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("plane_601", name), |b| {
            b.iter(|| pool.install(|| moreau_envelope(&f, 1.0).unwrap()))
        });
    }
    group.finish();
}

fn infconvs(c: &mut Criterion) {
    let mut group = c.benchmark_group("infconv");
    group.sample_size(10);
    let grid = Grid::line(-4.0, 4.0, 4001).unwrap();
    let f = FnAtom::Abs.sample(&grid).unwrap();
    let g = FnAtom::Indicator { a: -1.0, b: 1.0 }.sample(&grid).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("line_4001", name), |b| {
            b.iter(|| pool.install(|| inf_convolution(&f, &g).unwrap()))
        });
    }
    group.finish();
}

fn asplund(c: &mut Criterion) {
    let mut group = c.benchmark_group("asplund_step");
    group.sample_size(10);
    let grid = Grid::square(-4.0, 4.0, 161).unwrap();
    let pair = init_pair(FnAtom::NormSq { kind: NormKind::L1 }, FnAtom::NormSq { kind: NormKind::L2 }, &grid).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("plane_161", name), |b| {
            b.iter(|| pool.install(|| asplund_step(&pair).unwrap()))
        });
    }
    group.finish();
}

fn monotone(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_monotone");
    let grid = Grid::square(-1.0, 1.0, 61).unwrap();
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.node(k)).collect();
    let graph = OperatorGraph::from_map(2, &points, |x| vec![x[0] + x[0].powi(3), 2.0 * x[1]]).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("pairs_3721", name), |b| {
            b.iter(|| pool.install(|| is_monotone(&graph, None)))
        });
    }
    group.finish();
}

fn coupon(c: &mut Criterion) {
    let mut group = c.benchmark_group("coupon_probe");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("n5_200", name), |b| {
            b.iter(|| pool.install(|| convexity_probe(5, 200, 1).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, conjugates, envelopes, infconvs, asplund, monotone, coupon);
criterion_main!(benches);
