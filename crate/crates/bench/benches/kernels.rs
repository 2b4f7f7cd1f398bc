use std::hint::black_box;

use campanato::analysis::{double_star, luxemburg_norm};
use campanato::gauges::{build_f, check_integral_condition_numeric, IntegralForm};
use campanato::seminorms::{ball_oscillation, fractional_seminorm, GagliardoOptions};
use campanato::young::End;
use campanato::{EmbeddingParams, YoungFunction};
use campanato_bench::{first_order_extremal, step_data, young_family};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn conjugation(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate");
    for (name, a) in young_family() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &a, |b, a| b.iter(|| a.conjugate().unwrap()));
    }
    group.finish();
    let a = YoungFunction::power_log(4.0, 1.0);
    c.bench_function("conjugate_at/power_log", |b| b.iter(|| a.conjugate_at(black_box(37.0))));
}

fn norms(c: &mut Criterion) {
    let a = YoungFunction::power(3.0);
    let mut group = c.benchmark_group("luxemburg_norm");
    for cells in [16, 256, 4096] {
        let f = step_data(cells);
        group.bench_with_input(BenchmarkId::from_parameter(cells), &f, |b, f| b.iter(|| luxemburg_norm(f, &a)));
    }
    group.finish();
    let f = step_data(4096);
    c.bench_function("double_star/4096", |b| b.iter(|| double_star(black_box(&f))));
}

fn gauges(c: &mut Criterion) {
    let pr = EmbeddingParams::new(3, 1.5, 0).unwrap();
    let a = YoungFunction::power(4.0);
    c.bench_function("build_f/power_4", |b| b.iter(|| build_f(&pr, &a).unwrap()));
    let pl = YoungFunction::power_log(4.0, 3.5);
    c.bench_function("integral_condition_numeric/dual_tail", |b| {
        b.iter(|| check_integral_condition_numeric(&pl, 1.0 / 3.0, End::Infinity, IntegralForm::DualTail).unwrap())
    });
}

fn seminorms(c: &mut Criterion) {
    let (pr, u) = first_order_extremal();
    let a = YoungFunction::power(2.0);
    c.bench_function("ball_oscillation/level_2", |b| {
        b.iter(|| ball_oscillation(&u, &[0.0], black_box(0.1), 0, 2).unwrap())
    });
    let opts = GagliardoOptions { level: 1, ..Default::default() };
    let mut group = c.benchmark_group("fractional_seminorm");
    group.sample_size(10);
    group.bench_function("level_1", |b| b.iter(|| fractional_seminorm(&u, &pr, &a, &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, conjugation, norms, gauges, seminorms);
criterion_main!(benches);
