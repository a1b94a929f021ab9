use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use noisedisc::discretize::discretize;
use noisedisc::linalg::mat_exp;
use noisedisc::Method;
use noisedisc_bench::{ensemble_model, stable_model, SIZES};

fn closed_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("stable");
    for n in SIZES {
        let m = stable_model(n);
        for method in [Method::Proposed, Method::VanLoan, Method::LyapQ] {
            g.bench_with_input(BenchmarkId::new(method.name(), n), &m, |b, m| {
                b.iter(|| discretize(m, method, black_box(1.0)).unwrap())
            });
        }
    }
    g.finish();
}

// Integrators rule out the Lyapunov-only methods.
fn with_integrators(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrators");
    let m = ensemble_model(4, 2, 0);
    for method in [Method::Proposed, Method::VanLoan] {
        g.bench_function(method.name(), |b| b.iter(|| discretize(&m, method, black_box(1.0)).unwrap()));
    }
    g.bench_function("oracle", |b| b.iter(|| discretize(&m, Method::Oracle, black_box(1.0)).unwrap()));
    g.finish();
}

fn exponential(c: &mut Criterion) {
    let mut g = c.benchmark_group("mat_exp");
    for n in SIZES {
        let a = stable_model(n).a().clone();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| mat_exp(a, black_box(10.0)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, closed_forms, with_integrators, exponential);
criterion_main!(benches);
