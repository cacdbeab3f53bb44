//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use dhosc_core::oscillator::{eigenstate, Grid, OscillatorParams, WaveFunction};
use dhosc_core::pulse::Pulse;

/// A resonant ten-cycle sine-squared pulse on the unit oscillator.
pub fn resonant_pulse() -> Pulse {
    Pulse::sine_squared(1.0, 1.0, 20.0 * PI).expect("valid pulse")
}

/// Ground state on a symmetric grid of `n` points.
pub fn ground_state(half_width: f64, n: usize) -> (Grid, WaveFunction) {
    let grid = Grid::new(-half_width, half_width, n).expect("valid grid");
    let psi = eigenstate(0, &OscillatorParams::default(), &grid).expect("ground state");
    (grid, psi)
}
