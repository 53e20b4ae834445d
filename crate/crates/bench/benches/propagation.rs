use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qkr_core::analytic::energy_two_kicks;
use qkr_core::classical::standard_map_step;
use qkr_core::quantum::{apply_kick, init_plane_wave, simulate_delta_ensemble, Propagator};
use qkr_core::sweep::run_sweep;
use qkr_core::{AnalyticInputs, ClassicalState, EnsembleSpec, Method, RotorParams, SweepConfig};

fn kick(c: &mut Criterion) {
    let state = init_plane_wave(0.37, 64).unwrap();
    c.bench_function("kick k=7 half_width=64", |b| {
        b.iter(|| apply_kick(black_box(&state), 7.0).unwrap())
    });
    let mut prop = Propagator::new();
    c.bench_function("kick reused propagator", |b| {
        b.iter(|| prop.kick(black_box(&state), 7.0).unwrap())
    });
}

fn delta_ensemble(c: &mut Criterion) {
    let spec = EnsembleSpec::new(1000, 1, 3.2).unwrap();
    let params = RotorParams::new(0.5, 7.0, 3.2).unwrap();
    c.bench_function("two-kick delta ensemble n=1000", |b| {
        b.iter(|| simulate_delta_ensemble(&spec, &params, 2).unwrap())
    });
}

fn analytic(c: &mut Criterion) {
    let inputs = AnalyticInputs::new(0.4, 7.0, 1.8).unwrap();
    c.bench_function("two-kick energy formula", |b| {
        b.iter(|| energy_two_kicks(black_box(&inputs)))
    });
}

fn standard_map(c: &mut Criterion) {
    c.bench_function("standard map 100 steps", |b| {
        b.iter(|| {
            let mut s = ClassicalState { phi: 0.3, rho: 1.1 };
            for _ in 0..100 {
                s = standard_map_step(s, black_box(1.65));
            }
            s
        })
    });
}

/// Smoke check that a delta-kick sweep speeds up with more workers.
fn sweep_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta sweep workers");
    group.sample_size(10);
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut workers = vec![1];
    while workers.last().unwrap() * 2 <= max {
        workers.push(workers.last().unwrap() * 2);
    }
    for w in workers {
        let config = SweepConfig {
            steps: 4,
            methods: vec![Method::QuantumDelta],
            n_traj: 2000,
            workers: Some(w),
            ..SweepConfig::default()
        };
        group.bench_function(format!("{w}"), |b| b.iter(|| run_sweep(&config).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, kick, delta_ensemble, analytic, standard_map, sweep_scaling);
criterion_main!(benches);
