use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dhosc_bench::{ground_state, resonant_pulse};
use dhosc_core::exact::ExactState;
use dhosc_core::oracle::evolution_operator;
use dhosc_core::oscillator::{Grid, OscillatorParams};
use dhosc_core::propagate::{propagate, Method, PropagationConfig};
use dhosc_core::pulse::fourier_weights;
use std::hint::black_box;

fn split_operator(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let pulse = resonant_pulse();
    let mut group = c.benchmark_group("split_operator_one_cycle");
    for n in [256usize, 1024, 4096] {
        let (grid, psi) = ground_state(40.0, n);
        let config = PropagationConfig::new(grid, 2.0 * PI / 1000.0, 2.0 * PI, 1000, Method::SplitOperator).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| propagate(black_box(&psi), &pulse, &params, &config).unwrap())
        });
    }
    group.finish();
}

fn adaptive_multistep(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let pulse = resonant_pulse();
    let (grid, psi) = ground_state(20.0, 256);
    let config = PropagationConfig::new(grid, 2.0 * PI / 1000.0, 2.0 * PI, 1000, Method::AdaptiveMultistep).unwrap();
    c.bench_function("adaptive_multistep_one_cycle_256", |b| {
        b.iter(|| propagate(black_box(&psi), &pulse, &params, &config).unwrap())
    });
}

fn force_weights(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let pulse = resonant_pulse();
    c.bench_function("fourier_weights_full_pulse", |b| {
        b.iter(|| fourier_weights(&pulse, &params, black_box(20.0 * PI)).unwrap())
    });
}

fn exact_snapshot(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let state = ExactState::new(0, resonant_pulse(), params).unwrap();
    let grid = Grid::new(-64.0, 64.0, 2048).unwrap();
    c.bench_function("exact_psi_2048", |b| {
        b.iter(|| {
            let snap = state.snapshot(black_box(15.0 * PI)).unwrap();
            state.psi_at(&snap, &grid).unwrap()
        })
    });
}

fn dense_oracle(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let pulse = resonant_pulse();
    let grid = Grid::new(-8.0, 8.0, 64).unwrap();
    c.bench_function("dense_evolution_operator_64", |b| {
        b.iter(|| evolution_operator(&pulse, &params, &grid, black_box(PI), 200).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = split_operator, adaptive_multistep, force_weights, exact_snapshot, dense_oracle
}
criterion_main!(benches);
