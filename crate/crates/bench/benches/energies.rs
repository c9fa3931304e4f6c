use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use elastigraph::minimize::{emb_minimize, MinimizeBudget};
use elastigraph::obstruction::perron_eigenvalue;
use elastigraph::pl::{emb, PlMap};
use elastigraph::ribbon::is_simple;
use elastigraph::traintrack::{stitch_simple, validate_weighted_tt, TrainTrack};
use elastigraph::Q;
use elastigraph_bench::{level, pattern_matrix};

fn sweep(c: &mut Criterion) {
    let (phi, a_s, a_t) = level("theta", 3);
    let psi = PlMap::constant_speed(&phi, &a_s, &a_t);
    c.bench_function("emb constant speed theta n=3", |b| b.iter(|| emb(black_box(&psi))));
}

fn minimize(c: &mut Criterion) {
    let (phi, a_s, a_t) = level("theta", 2);
    let budget = MinimizeBudget { restarts: 2, levels: 3, ..Default::default() };
    let mut g = c.benchmark_group("minimize");
    g.sample_size(10);
    g.bench_function("theta n=2", |b| b.iter(|| emb_minimize(&phi, &a_s, &a_t, black_box(&budget)).value));
    g.finish();
}

fn perron(c: &mut Criterion) {
    let m = pattern_matrix(40);
    c.bench_function("perron 40x40", |b| b.iter(|| perron_eigenvalue(black_box(&m)).value()));
}

fn curves(c: &mut Criterion) {
    let (phi, _, _) = level("theta", 1);
    let g = phi.target().clone();
    let t = TrainTrack::singletons(g.clone()).unwrap();
    let w = validate_weighted_tt(&t, [6, 4, 10].iter().map(|&x| Q::from_integer(x.into())).collect()).unwrap();
    let stitched = stitch_simple(&w).unwrap();
    c.bench_function("stitch theta (6,4,10)", |b| b.iter(|| stitch_simple(black_box(&w)).unwrap()));
    c.bench_function("is_simple stitched", |b| b.iter(|| is_simple(&g, black_box(&stitched.curve)).is_ribbon()));
}

criterion_group!(benches, sweep, minimize, perron, curves);
criterion_main!(benches);
