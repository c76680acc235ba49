use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ocslopes::classical::{t2_matrix, t2_reversed_charpoly};
use ocslopes::linalg::reversed_charpoly_berkowitz;
use ocslopes::qseries::{delta_qexp, f_qexp};
use ocslopes::spectral::{s_table, truncated_char_series};

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for prec in [200, 800] {
        g.bench_with_input(BenchmarkId::new("delta", prec), &prec, |b, &p| b.iter(|| delta_qexp(black_box(p))));
        let f = f_qexp(prec);
        g.bench_with_input(BenchmarkId::new("f_squared", prec), &f, |b, f| b.iter(|| black_box(f) * f));
    }
    g.finish();
}

fn charpoly(c: &mut Criterion) {
    let mut g = c.benchmark_group("t2_charpoly");
    g.sample_size(10);
    for k in [120, 240, 480] {
        g.bench_with_input(BenchmarkId::new("multimodular", k), &k, |b, &k| {
            b.iter(|| t2_reversed_charpoly(black_box(k)).unwrap())
        });
    }
    let m = t2_matrix(120).unwrap();
    g.bench_function("berkowitz/120", |b| b.iter(|| reversed_charpoly_berkowitz(black_box(&m))));
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral");
    g.sample_size(10);
    g.bench_function("s_table/200", |b| b.iter(|| s_table(black_box(200), 200)));
    for n in [24, 48] {
        g.bench_with_input(BenchmarkId::new("truncated_char_series", n), &n, |b, &n| {
            b.iter(|| truncated_char_series(black_box(n)))
        });
    }
    g.finish();
}

criterion_group!(benches, series, charpoly, spectral);
criterion_main!(benches);
