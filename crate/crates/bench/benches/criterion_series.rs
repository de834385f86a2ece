use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flute_core::oracle::{develop_with_ladder, lift_shears};
use flute_core::patchwork::{minimizing_patchwork_search, reduce_to_patchwork, RestrictedPatchwork, SearchStrategy};
use flute_core::{classify, families, ClassifyOptions};
use std::hint::black_box;

fn classify_families(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for name in ["log2-untwisted", "log4-half", "constant-one-quarter"] {
        let f = families::by_name(name).unwrap();
        for depth in [200, 2000] {
            let opts = ClassifyOptions {
                depth,
                ..ClassifyOptions::default()
            };
            g.bench_with_input(BenchmarkId::new(name, depth), &opts, |b, o| {
                b.iter(|| classify(black_box(&f.surface), o).unwrap())
            });
        }
    }
    g.finish();
}

fn patchwork_search(c: &mut Criterion) {
    let f = families::by_name("log4-quarter").unwrap();
    let mut g = c.benchmark_group("search");
    g.bench_function("exhaustive depth 8", |b| {
        b.iter(|| minimizing_patchwork_search(&f.surface, 8, SearchStrategy::Exhaustive).unwrap())
    });
    g.bench_function("beam 64 depth 200", |b| {
        b.iter(|| minimizing_patchwork_search(&f.surface, 200, SearchStrategy::Beam { width: 64 }).unwrap())
    });
    g.finish();
}

fn develop(c: &mut Criterion) {
    let f = families::by_name("log4-untwisted").unwrap();
    let p = reduce_to_patchwork(&RestrictedPatchwork::canonical(&f.surface, 502).unwrap());
    let shears = lift_shears(&f.surface, &p, 500).unwrap();
    c.bench_function("develop ladder depth 500", |b| {
        b.iter(|| develop_with_ladder(black_box(&shears), 256))
    });
}

criterion_group!(benches, classify_families, patchwork_search, develop);
criterion_main!(benches);
