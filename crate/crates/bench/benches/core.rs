use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use subposet_core::{
    build_boolean, build_covering, build_subspace, la, parse_poset, verify_covering, CoveringMethod, SearchOptions,
};

fn grounds(c: &mut Criterion) {
    c.bench_function("build_subspace(4,2)", |b| b.iter(|| build_subspace(black_box(4), 2).unwrap()));
    c.bench_function("build_subspace(3,3)", |b| b.iter(|| build_subspace(black_box(3), 3).unwrap()));
    c.bench_function("build_boolean(10)", |b| b.iter(|| build_boolean(black_box(10)).unwrap()));
}

fn searches(c: &mut Criterion) {
    let opts = SearchOptions::default();
    let g = build_boolean(4).unwrap();
    let butterfly = [parse_poset("butterfly").unwrap()];
    c.bench_function("la butterfly boolean(4)", |b| b.iter(|| la(&g, &butterfly, &opts).unwrap()));
    let s = build_subspace(3, 2).unwrap();
    c.bench_function("la butterfly subspace(3,2)", |b| b.iter(|| la(&s, &butterfly, &opts).unwrap()));
    let chain = [parse_poset("chain:3").unwrap()];
    let g5 = build_boolean(5).unwrap();
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("la chain:3 boolean(5)", |b| b.iter(|| la(&g5, &chain, &opts).unwrap()));
    group.finish();
}

fn coverings(c: &mut Criterion) {
    let g = build_boolean(6).unwrap();
    let chains = build_covering(&g, CoveringMethod::Chains).unwrap();
    c.bench_function("verify chains boolean(6)", |b| b.iter(|| verify_covering(black_box(&chains))));
    let s = build_subspace(3, 2).unwrap();
    c.bench_function("build sublattices subspace(3,2)", |b| {
        b.iter(|| build_covering(&s, CoveringMethod::BooleanSublattices).unwrap())
    });
}

criterion_group!(benches, grounds, searches, coverings);
criterion_main!(benches);
