use std::f64::consts::PI;

use dhosc_core::exact::{exact_psi, ExactState};
use dhosc_core::oscillator::{eigenstate, inner_product, Grid, OscillatorParams};
use dhosc_core::propagate::{propagate, Method, PropagationConfig};
use dhosc_core::pulse::Pulse;

fn fig1() -> Pulse {
    Pulse::sine_squared(1.0, 0.5, 20.0 * PI).unwrap()
}

#[test]
fn numeric_state_tracks_exact_state() {
    let p = OscillatorParams::default();
    let grid = Grid::new(-20.0, 20.0, 512).unwrap();
    let psi0 = eigenstate(0, &p, &grid).unwrap();
    let state = ExactState::new(0, fig1(), p).unwrap();
    for cycles in [2.0, 5.0] {
        let t = cycles * 2.0 * PI;
        let config = PropagationConfig::with_defaults(grid, &p, t).unwrap();
        let run = propagate(&psi0, &fig1(), &p, &config).unwrap();
        let exact = exact_psi(&state, t, &grid).unwrap();
        let dist = run.final_state.distance(&exact).unwrap();
        eprintln!("cycles {cycles}: L2 {dist:e}");
        assert!(dist < 1e-4);
    }
}

#[test]
fn global_phase_matches_at_grid_center() {
    let p = OscillatorParams::default();
    let grid = Grid::new(-20.0, 20.0, 512).unwrap();
    let psi0 = eigenstate(0, &p, &grid).unwrap();
    let t = 4.0 * PI;
    let config = PropagationConfig::with_defaults(grid, &p, t).unwrap();
    let run = propagate(&psi0, &fig1(), &p, &config).unwrap();
    let exact = exact_psi(&ExactState::new(0, fig1(), p).unwrap(), t, &grid).unwrap();
    let center = grid.n_points() / 2;
    let rel = (run.final_state.amps()[center] / exact.amps()[center]).arg();
    assert!(rel.abs() < 1e-3, "phase offset {rel}");
    let overlap = inner_product(&exact, &run.final_state).unwrap();
    assert!((overlap.norm() - 1.0).abs() < 1e-8);
}

#[test]
fn adaptive_method_agrees_with_split_operator() {
    let p = OscillatorParams::default();
    let grid = Grid::new(-20.0, 20.0, 256).unwrap();
    let psi0 = eigenstate(0, &p, &grid).unwrap();
    let t = 2.0 * PI;
    let fine = PropagationConfig::new(grid, p.period() / 20000.0, t, 1000, Method::SplitOperator).unwrap();
    let split = propagate(&psi0, &fig1(), &p, &fine).unwrap();
    let mut adaptive_cfg = fine.clone();
    adaptive_cfg.method = Method::AdaptiveMultistep;
    let adams = propagate(&psi0, &fig1(), &p, &adaptive_cfg).unwrap();
    let dist = split.final_state.distance(&adams.final_state).unwrap();
    eprintln!("split vs adaptive {dist:e}, adams steps {}", adams.steps);
    assert!(dist < 1e-6);
}
