use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nsdecay_bench::state;
use nsdecay_core::field2d::{gradient, leray_project};
use nsdecay_core::pressure::solve_pressure;
use nsdecay_core::solver::Stepper;
use nsdecay_core::SolverConfig;
use std::hint::black_box;

const SIZES: [usize; 3] = [64, 128, 256];

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft");
    for n in SIZES {
        let (_, st) = state(n, 0.0);
        let phys = st.u.x.physical().into_owned();
        let grid = st.grid().clone();
        group.bench_with_input(BenchmarkId::new("forward", n), &phys, |b, v| b.iter(|| grid.forward(black_box(v))));
        let spec = grid.forward(&phys);
        group.bench_with_input(BenchmarkId::new("inverse", n), &spec, |b, s| b.iter(|| grid.inverse(black_box(s))));
    }
    group.finish();
}

fn bench_leray(c: &mut Criterion) {
    let mut group = c.benchmark_group("leray");
    for n in SIZES {
        let (_, st) = state(n, 0.0);
        let v = gradient(&st.u.x).add(&st.u).expect("same grid");
        group.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| b.iter(|| leray_project(black_box(v))));
    }
    group.finish();
}

fn bench_pressure(c: &mut Criterion) {
    let mut group = c.benchmark_group("pressure");
    group.sample_size(20);
    for n in SIZES {
        let (_, st) = state(n, 0.05);
        let f = gradient(&st.u.x).add(&st.u).expect("same grid");
        group.bench_with_input(BenchmarkId::from_parameter(n), &(st.a.clone(), f), |b, (a, f)| {
            b.iter(|| solve_pressure(black_box(a), black_box(f), 1e-10, 100).expect("converges"))
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(10);
    for n in SIZES {
        for (label, rho) in [("homogeneous", 0.0), ("inhomogeneous", 0.05)] {
            let (_, st) = state(n, rho);
            let cfg = SolverConfig::new(0.25, 1.0);
            let mut stepper = Stepper::new(st.grid(), &cfg).expect("stepper");
            group.bench_with_input(BenchmarkId::new(label, n), &st, |b, st| {
                b.iter(|| stepper.step(black_box(st), 0.25).expect("step"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_fft, bench_leray, bench_pressure, bench_step);
criterion_main!(benches);
