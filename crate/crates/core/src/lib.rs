//! Driven quantum harmonic oscillator toolkit: pulse kinematics, a phase-space
//! operator algebra for the Hamiltonian decomposition, the exact nonspreading
//! solution, a Fourier-grid propagator, and experiment orchestration.

// `!(a <= b)` is used deliberately so that NaN fails validation checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adams;
pub mod algebra;
pub mod compare;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod oracle;
pub mod oscillator;
pub mod propagate;
pub mod pulse;
pub mod quadrature;
pub mod spectral;
pub mod table;

pub use algebra::{
    apply_operator, build_h_tilde, build_hamiltonian, decompose, heisenberg_xt_pt, Decomposition,
    PhaseSpacePolynomial,
};
pub use compare::{compare, CompareReport, ToleranceSpec};
pub use error::{Error, ErrorClass, Result};
pub use exact::{
    eigen_residual, exact_psi, occupation_distribution, phase_phi, schrodinger_residual, ExactState,
    PhaseMode,
};
pub use experiment::{decompose_report, preset, pulse_table, run_experiment, ExperimentConfig};
pub use oracle::matrix_oracle_heisenberg;
pub use oscillator::{
    eigenstate, inner_product, observables, peak_position, Grid, ObservableSet, OscillatorParams,
    WaveFunction,
};
pub use propagate::{
    ehrenfest_acceleration, energy_expectation, propagate, Method, PropagationConfig, TimeRecord,
    TimeSeries,
};
pub use pulse::{fourier_weights, kinematics_quadrature, ClosedForm, ClosedFormVariant, Kinematics, Pulse};
