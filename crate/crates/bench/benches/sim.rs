use std::hint::black_box;

use cavsim::coordination::solve_unconstrained;
use cavsim::road::evaluate_route_field;
use cavsim::scenario::ControlMode;
use cavsim::{run, Vec2};
use cavsim_bench::reference_scenario;
use criterion::{criterion_group, criterion_main, Criterion};

fn plan_solve(c: &mut Criterion) {
    c.bench_function("plan_solve", |b| {
        b.iter(|| solve_unconstrained(black_box(12.0), black_box(24.5), black_box(0.31), 3.0, 0.3))
    });
}

fn field_eval(c: &mut Criterion) {
    let s = reference_scenario();
    let ramp = &s.roads[1].route;
    let on_arc = Vec2::new(-0.3, 0.12);
    c.bench_function("route_field_arc", |b| {
        b.iter(|| evaluate_route_field(black_box(on_arc), ramp, 1))
    });
}

fn full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("reference_run");
    group.sample_size(10);
    for mode in [ControlMode::Optimal, ControlMode::Baseline] {
        let s = reference_scenario().with_mode(mode);
        group.bench_function(mode.as_str(), |b| b.iter(|| run(black_box(&s)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, plan_solve, field_eval, full_run);
criterion_main!(benches);
