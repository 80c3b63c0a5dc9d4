//! Cross-section residual evaluation over an s-grid, on one thread and on
//! the full pool. Build with `--no-default-features` to time the sequential
//! fallback instead of a one-thread rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sbt_core::harness::{CurveSpec, ForceSpec};
use sbt_core::residuals::cross_section;
use sbt_core::{par, QuadratureSpec};

fn residual_grid(c: &mut Criterion) {
    let frame = CurveSpec::named("fourier-knot").build().unwrap();
    let force = ForceSpec::named("harmonic").build().unwrap();
    let eps = 2e-3;
    let spec = QuadratureSpec::for_eps(eps);
    let s_grid: Vec<f64> = (0..32).map(|i| i as f64 / 32.0).collect();
    let run = || {
        par::map(&s_grid, |&s| cross_section(&frame, &force, eps, s, 64, &spec).unwrap())
    };

    let mut group = c.benchmark_group("cross_sections_32x64");
    group.sample_size(10);
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut counts = vec![1, available];
    counts.dedup();
    for threads in counts {
        group.bench_with_input(BenchmarkId::new("threads", threads), &threads, |b, &t| {
            b.iter(|| par::with_threads(Some(t), run))
        });
    }
    group.finish();
}

criterion_group!(benches, residual_grid);
criterion_main!(benches);
