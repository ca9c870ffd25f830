//! Parallel vs sequential schedules on the three fan-out surfaces: the
//! λ-sweep (one closed-form solve per λ), the oracle restarts, and the
//! probe's λ × seed training grid. Both schedules produce bit-identical
//! results, so the only question these answer is throughput.
//!
//! With `--no-default-features` the "parallel" functions degrade to the
//! sequential path and the pairs should time identically; that is the
//! fallback this suite exists to keep honest.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use alignlab_core::data::{synth_generate, SynthConfig};
use alignlab_core::probe::{train_sweep, train_sweep_serial, ProbeConfig};
use alignlab_core::solver::{oracle_minimize, oracle_minimize_serial};
use alignlab_core::verify::{lambda_sweep, lambda_sweep_serial};
use alignlab_core::{fixtures, Tolerances};

fn sweep_instance() -> SynthConfig {
    SynthConfig {
        n: 96,
        d1: 12,
        d2: 10,
        c1: 4,
        c2: 4,
        k_shared: 3,
        k_spec1: 3,
        k_spec2: 2,
        noise_x1: 0.1,
        noise_x2: 0.1,
        noise_y1: 0.5,
        noise_y2: 0.3,
        cross_leak: 0.1,
        nonlinear: false,
        seed: 41,
    }
}

fn bench_lambda_sweep(c: &mut Criterion) {
    let d = synth_generate(&sweep_instance()).unwrap();
    let tol = Tolerances::default();
    let grid: Vec<f64> = (0..16).map(|i| i as f64 * 0.7).collect();
    let mut g = c.benchmark_group("lambda_sweep_16");
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(lambda_sweep(&d, 3, &grid, &tol).unwrap()))
    });
    g.bench_function("serial", |b| {
        b.iter(|| black_box(lambda_sweep_serial(&d, 3, &grid, &tol).unwrap()))
    });
    g.finish();
}

fn bench_oracle_restarts(c: &mut Criterion) {
    let d = synth_generate(&sweep_instance()).unwrap();
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("oracle_8_restarts");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(oracle_minimize(&d, 3, 1.0, 8, 7, &tol).unwrap()))
    });
    g.bench_function("serial", |b| {
        b.iter(|| black_box(oracle_minimize_serial(&d, 3, 1.0, 8, 7, &tol).unwrap()))
    });
    g.finish();
}

fn bench_probe_grid(c: &mut Criterion) {
    let d = synth_generate(&fixtures::thm2_nonlinear()).unwrap();
    let cfg = ProbeConfig {
        k: 3,
        hidden: 16,
        steps: 120,
        lr: 1e-2,
    };
    let lambdas = [0.0, 0.5, 2.0];
    let seeds = [1u64, 2, 3];
    let mut g = c.benchmark_group("probe_3x3_grid");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(train_sweep(&d, &lambdas, &seeds, &cfg).unwrap()))
    });
    g.bench_function("serial", |b| {
        b.iter(|| black_box(train_sweep_serial(&d, &lambdas, &seeds, &cfg).unwrap()))
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_lambda_sweep,
    bench_oracle_restarts,
    bench_probe_grid
);
criterion_main!(benches);
