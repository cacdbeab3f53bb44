//! The exact nonspreading solution `Ψ = e^{−iφ/ħ} e^{imḋx/ħ} Φ_n(x − d)` of the
//! driven oscillator, its residual checks, and eigenbasis occupation analysis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply_operator_with, build_h_tilde, build_hamiltonian};
use crate::error::{Error, Result};
use crate::oscillator::{eigenfunction_value, hermite_functions, Grid, OscillatorParams, WaveFunction};
use crate::propagate::{TimeRecord, TimeSeries};
use crate::pulse::{pulse_windows, weights_between, Kinematics, Pulse};
use crate::quadrature::{adaptive, integrate_windows};
use crate::spectral::Spectral;

/// Absolute tolerance of the phase integral.
pub const PHASE_TOL: f64 = 1e-10;

/// Occupation below which the eigenbasis expansion is considered truncated.
pub const MIN_CAPTURED: f64 = 0.999;

/// Largest eigenstate index accepted by [`occupation_distribution`].
pub const MAX_OCCUPATION_INDEX: usize = 400;

/// Which integrand defines the global phase `φ(t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// `E_n − (fc² + fs²)/2m − mḋ²`, the textbook form of the integrand.
    Literal,
    /// `E_n + mḋ² − (fc² + fs²)/2m`, obtained by substituting the ansatz into the
    /// Schrödinger equation; zeroes the residual and is the default.
    #[default]
    ResidualValidated,
}

impl std::str::FromStr for PhaseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(PhaseMode::Literal),
            "residual_validated" => Ok(PhaseMode::ResidualValidated),
            other => Err(Error::Config(format!("unknown phase mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactState {
    pub n: usize,
    pub pulse: Pulse,
    pub params: OscillatorParams,
    pub phase_mode: PhaseMode,
}

/// Kinematics and phase at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub kinematics: Kinematics,
    pub phi: f64,
}

impl Snapshot {
    pub fn t(&self) -> f64 {
        self.kinematics.t
    }
}

impl ExactState {
    pub fn new(n: usize, pulse: Pulse, params: OscillatorParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { n, pulse, params, phase_mode: PhaseMode::default() })
    }

    pub fn with_phase_mode(mut self, mode: PhaseMode) -> Self {
        self.phase_mode = mode;
        self
    }

    pub fn energy(&self) -> f64 {
        self.params.energy(self.n)
    }

    /// Phase integrand at kinematic state `kin`.
    pub fn phase_rate(&self, kin: &Kinematics) -> f64 {
        let m = self.params.m;
        let kinetic = m * kin.d_dot * kin.d_dot;
        let weights = (kin.fc * kin.fc + kin.fs * kin.fs) / (2.0 * m);
        match self.phase_mode {
            PhaseMode::Literal => self.energy() - weights - kinetic,
            PhaseMode::ResidualValidated => self.energy() + kinetic - weights,
        }
    }

    pub fn marcher(&self) -> Marcher<'_> {
        Marcher {
            state: self,
            current: Snapshot {
                kinematics: Kinematics::from_weights(&self.pulse, &self.params, 0.0, 0.0, 0.0),
                phi: 0.0,
            },
        }
    }

    /// Kinematics and phase at `t ≥ 0`.
    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        let mut marcher = self.marcher();
        marcher.advance_to(t)
    }

    /// `Ψ(x, t)` sampled on `grid` for a precomputed snapshot.
    pub fn psi_at(&self, snap: &Snapshot, grid: &Grid) -> Result<WaveFunction> {
        self.psi_with_phase(snap, grid, snap.phi)
    }

    fn psi_with_phase(&self, snap: &Snapshot, grid: &Grid, phi: f64) -> Result<WaveFunction> {
        let (m, hbar) = (self.params.m, self.params.hbar);
        let kin = &snap.kinematics;
        let global = Complex64::from_polar(1.0, -phi / hbar);
        let psi = WaveFunction::from_fn(*grid, |x| {
            global
                * Complex64::from_polar(1.0, m * kin.d_dot * x / hbar)
                * eigenfunction_value(self.n, &self.params, x - kin.d)
        });
        psi.check_edges()?;
        Ok(psi)
    }

    /// Moves `snap` to `t` (either direction) by integrating only `[snap.t, t]`.
    fn shifted(&self, snap: &Snapshot, t: f64) -> Result<Snapshot> {
        let a = snap.t();
        let (dfs, dfc) = signed_weights(&self.pulse, &self.params, a, t)?;
        let (fs0, fc0) = (snap.kinematics.fs, snap.kinematics.fc);
        let integrand = |tau: f64| {
            let (s, c) = signed_weights(&self.pulse, &self.params, a, tau).unwrap_or((f64::NAN, f64::NAN));
            let kin = Kinematics::from_weights(&self.pulse, &self.params, tau, fs0 + s, fc0 + c);
            [self.phase_rate(&kin)]
        };
        let dphi = if a == t { 0.0 } else { adaptive(&integrand, a, t, PHASE_TOL)?[0] };
        Ok(Snapshot {
            kinematics: Kinematics::from_weights(&self.pulse, &self.params, t, fs0 + dfs, fc0 + dfc),
            phi: snap.phi + dphi,
        })
    }
}

fn signed_weights(pulse: &Pulse, params: &OscillatorParams, a: f64, b: f64) -> Result<(f64, f64)> {
    if b >= a {
        weights_between(pulse, params, a, b)
    } else {
        let (s, c) = weights_between(pulse, params, b, a)?;
        Ok((-s, -c))
    }
}

/// Advances `fs`, `fc` and `φ` through increasing times, one quadrature window at a time.
pub struct Marcher<'a> {
    state: &'a ExactState,
    current: Snapshot,
}

impl Marcher<'_> {
    pub fn current(&self) -> Snapshot {
        self.current
    }

    pub fn advance_to(&mut self, t: f64) -> Result<Snapshot> {
        if !(t.is_finite() && t >= self.current.t()) {
            return Err(Error::OutOfRange { t, t_max: f64::INFINITY });
        }
        let state = self.state;
        for (a, b) in pulse_windows(&state.pulse, &state.params, self.current.t(), t) {
            debug_assert!((a - self.current.t()).abs() <= 1e-12 * b.abs().max(1.0));
            self.current = state.shifted(&self.current, b)?;
        }
        Ok(self.current)
    }
}

/// `φ(t)` in action units.
pub fn phase_phi(state: &ExactState, t: f64) -> Result<f64> {
    Ok(state.snapshot(t)?.phi)
}

/// `Ψ(x, t)` on `grid`, with `Φ_n` evaluated analytically at the shifted points.
pub fn exact_psi(state: &ExactState, t: f64, grid: &Grid) -> Result<WaveFunction> {
    let snap = state.snapshot(t)?;
    state.psi_at(&snap, grid)
}

/// Observables of the exact state on `grid` at each of `times` (increasing).
pub fn exact_series(state: &ExactState, grid: &Grid, times: &[f64]) -> Result<(TimeSeries, Option<WaveFunction>)> {
    let spectral = Spectral::new(grid);
    let mut marcher = state.marcher();
    let mut series = TimeSeries::default();
    let mut last = None;
    for &t in times {
        let snap = marcher.advance_to(t)?;
        let psi = state.psi_at(&snap, grid)?;
        series.records.push(TimeRecord::measure(&spectral, &psi, &state.pulse, &state.params, &snap.kinematics)?);
        last = Some(psi);
    }
    Ok((series, last))
}

/// `‖iħ∂_tΨ − H(t)Ψ‖/‖Ψ‖` with a central difference of step `10⁻⁶` periods.
pub fn schrodinger_residual(state: &ExactState, t: f64, grid: &Grid) -> Result<f64> {
    let snap = state.snapshot(t)?;
    schrodinger_residual_at(state, &snap, grid)
}

/// [`schrodinger_residual`] at a precomputed snapshot.
pub fn schrodinger_residual_at(state: &ExactState, snap: &Snapshot, grid: &Grid) -> Result<f64> {
    let h = 1e-6 * state.params.period();
    let t = snap.t();
    let plus = state.shifted(snap, t + h)?;
    let minus = state.shifted(snap, t - h)?;
    // The common phase φ(t) cancels in the residual norm; dropping it keeps the
    // difference quotient free of rounding in a large φ.
    let psi = state.psi_with_phase(snap, grid, 0.0)?;
    let psi_p = state.psi_with_phase(&plus, grid, plus.phi - snap.phi)?;
    let psi_m = state.psi_with_phase(&minus, grid, minus.phi - snap.phi)?;
    let spectral = Spectral::new(grid);
    let h_psi = apply_operator_with(&spectral, &build_hamiltonian(&state.pulse, &state.params, t), &psi, &state.params)?;
    let i_hbar = Complex64::new(0.0, state.params.hbar);
    let diff: Vec<Complex64> = psi_p
        .amps()
        .iter()
        .zip(psi_m.amps())
        .zip(h_psi.amps())
        .map(|((p, m), hp)| i_hbar * (p - m) / (2.0 * h) - hp)
        .collect();
    Ok(WaveFunction::new(*grid, diff)?.l2_norm() / psi.l2_norm())
}

/// `‖H̃(t)Ψ − E_nΨ‖/‖Ψ‖`.
pub fn eigen_residual(state: &ExactState, t: f64, grid: &Grid) -> Result<f64> {
    let psi = exact_psi(state, t, grid)?;
    let h_tilde = build_h_tilde(&state.pulse, &state.params, t)?;
    let applied = apply_operator_with(&Spectral::new(grid), &h_tilde, &psi, &state.params)?;
    let e = state.energy();
    let diff: Vec<Complex64> = applied.amps().iter().zip(psi.amps()).map(|(a, v)| a - e * v).collect();
    Ok(WaveFunction::new(*grid, diff)?.l2_norm() / psi.l2_norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Occupation {
    pub probabilities: Vec<f64>,
    pub captured: f64,
}

/// `P_n = |⟨Φ_n, ψ⟩|²` for `n = 0..=n_max`.
pub fn occupation_distribution(psi: &WaveFunction, params: &OscillatorParams, n_max: usize) -> Result<Occupation> {
    params.validate()?;
    if n_max > MAX_OCCUPATION_INDEX {
        return Err(Error::Config(format!("n_max {n_max} exceeds {MAX_OCCUPATION_INDEX}")));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > crate::oscillator::NORM_TOLERANCE {
        return Err(Error::Unnormalized { norm });
    }
    let scale = params.length_scale();
    let mut overlaps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (x, a) in psi.grid().points().zip(psi.amps()) {
        for (o, h) in overlaps.iter_mut().zip(hermite_functions(n_max, x / scale)) {
            *o += h * a;
        }
    }
    let weight = psi.grid().dx() / scale.sqrt();
    let probabilities: Vec<f64> = overlaps.iter().map(|o| (o * weight).norm_sqr()).collect();
    let captured = probabilities.iter().sum::<f64>();
    if captured < MIN_CAPTURED {
        return Err(Error::OccupationCapture { n_max, captured });
    }
    Ok(Occupation { probabilities, captured })
}

/// `e^{−λ} λⁿ / n!`, evaluated in log space.
pub fn poisson(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    (-lambda + n as f64 * lambda.ln() - log_fact).exp()
}

/// Coherent-state mean `(mωd² + mḋ²/ω)/2ħ` of a displaced, boosted ground state.
pub fn coherent_mean(params: &OscillatorParams, d: f64, d_dot: f64) -> f64 {
    (params.m * params.omega * d * d + params.m * d_dot * d_dot / params.omega) / (2.0 * params.hbar)
}

/// The same mean from `−ln|⟨Φ₀, e^{imḋx/ħ}Φ₀(x − d)⟩|²`, with the overlap integral
/// evaluated by adaptive quadrature.
pub fn coherent_mean_quadrature(params: &OscillatorParams, d: f64, d_dot: f64) -> Result<f64> {
    let (m, hbar) = (params.m, params.hbar);
    let integrand = |x: f64| {
        let v = eigenfunction_value(0, params, x) * eigenfunction_value(0, params, x - d);
        let (s, c) = (m * d_dot * x / hbar).sin_cos();
        [v * c, v * s]
    };
    let half_width = 12.0 * params.length_scale();
    let center = 0.5 * d;
    let max_window = (0.25 * params.length_scale()).min(if d_dot != 0.0 { hbar / (m * d_dot.abs()) } else { f64::INFINITY });
    let [re, im] = integrate_windows(&integrand, center - half_width, center + half_width, &[], max_window, 1e-15)?;
    Ok(-(re * re + im * im).ln())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::oscillator::{eigenstate, inner_product, observables};

    fn fig1() -> Pulse {
        Pulse::sine_squared(1.0, 0.5, 20.0 * PI).unwrap()
    }

    fn fig2() -> Pulse {
        Pulse::sine_squared(1.0, 1.0, 20.0 * PI).unwrap()
    }

    fn grid() -> Grid {
        Grid::new(-20.0, 20.0, 512).unwrap()
    }

    fn state(n: usize, pulse: Pulse) -> ExactState {
        ExactState::new(n, pulse, OscillatorParams::default()).unwrap()
    }

    #[test]
    fn zero_pulse_phase_is_energy_times_time() {
        for mode in [PhaseMode::Literal, PhaseMode::ResidualValidated] {
            let s = state(2, Pulse::Zero).with_phase_mode(mode);
            assert!((phase_phi(&s, 7.3).unwrap() - 2.5 * 7.3).abs() < 1e-12);
            assert_eq!(phase_phi(&s, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn phase_at_two_cycles() {
        let s = state(0, fig1());
        assert!((phase_phi(&s, 4.0 * PI).unwrap() - 6.171_473_583_608_35).abs() < 1e-9);
        let lit = s.with_phase_mode(PhaseMode::Literal);
        assert!((phase_phi(&lit, 4.0 * PI).unwrap() - 6.000_854_501_347_59).abs() < 1e-9);
    }

    #[test]
    fn marcher_matches_direct_evaluation() {
        let s = state(0, fig2());
        let mut m = s.marcher();
        let mut last = 0.0;
        for k in 1..=7 {
            last = m.advance_to(k as f64 * 3.1).unwrap().phi;
        }
        let direct = phase_phi(&s, 7.0 * 3.1).unwrap();
        assert!((last - direct).abs() < 1e-9);
        assert!(m.advance_to(1.0).is_err());
    }

    #[test]
    fn initial_state_is_eigenstate() {
        for n in 0..3 {
            let psi = exact_psi(&state(n, fig1()), 0.0, &grid()).unwrap();
            let phi = eigenstate(n, &OscillatorParams::default(), &grid()).unwrap();
            assert!(psi.distance(&phi).unwrap() < 1e-14);
        }
    }

    #[test]
    fn zero_pulse_is_stationary() {
        let s = state(1, Pulse::Zero);
        let psi = exact_psi(&s, 3.0, &grid()).unwrap();
        let phi = eigenstate(1, &s.params, &grid()).unwrap();
        let overlap = inner_product(&phi, &psi).unwrap();
        assert!((overlap - Complex64::from_polar(1.0, -1.5 * 3.0)).norm() < 1e-10);
        assert!(schrodinger_residual(&s, 3.0, &grid()).unwrap() < 1e-6);
    }

    #[test]
    fn mean_position_and_momentum_follow_trajectory() {
        let s = state(1, fig1());
        for t in [3.0, 17.0, 40.0] {
            let snap = s.snapshot(t).unwrap();
            let obs = observables(&s.psi_at(&snap, &grid()).unwrap(), &s.params).unwrap();
            assert!((obs.mean_x - snap.kinematics.d).abs() < 1e-8);
            assert!((obs.mean_p - snap.kinematics.d_dot).abs() < 1e-8);
        }
    }

    #[test]
    fn validated_mode_zeroes_schrodinger_residual() {
        let s = state(0, fig1());
        let lit = s.clone().with_phase_mode(PhaseMode::Literal);
        for t in [5.0, 20.0, 33.0] {
            assert!(schrodinger_residual(&s, t, &grid()).unwrap() < 1e-5);
            // The literal integrand is off by 2mḋ², so its residual is exactly that over ħ.
            let d_dot = s.snapshot(t).unwrap().kinematics.d_dot;
            let lit_res = schrodinger_residual(&lit, t, &grid()).unwrap();
            assert!((lit_res - 2.0 * d_dot * d_dot).abs() < 1e-5, "{lit_res} at {t}");
        }
        assert!(schrodinger_residual(&lit, 20.0, &grid()).unwrap() > 1e-3);
    }

    #[test]
    fn eigen_residual_small() {
        let s = state(2, fig1());
        assert!(eigen_residual(&s, 0.0, &grid()).unwrap() < 1e-6);
        assert!(eigen_residual(&s, 6.0 * PI, &grid()).unwrap() < 1e-5);
    }

    #[test]
    fn occupation_of_an_eigenstate() {
        let p = OscillatorParams::default();
        let occ = occupation_distribution(&eigenstate(3, &p, &grid()).unwrap(), &p, 20).unwrap();
        assert!((occ.probabilities[3] - 1.0).abs() < 1e-10);
        for (n, &pn) in occ.probabilities.iter().enumerate() {
            if n != 3 {
                assert!(pn < 1e-10);
            }
        }
        assert!(matches!(
            occupation_distribution(&eigenstate(3, &p, &grid()).unwrap(), &p, 2),
            Err(Error::OccupationCapture { .. })
        ));
    }

    #[test]
    fn coherent_mean_formula_matches_quadrature() {
        let p = OscillatorParams::default();
        for (d, v) in [(0.0, 0.0), (1.3, 0.0), (0.0, -0.7), (2.1, 1.4)] {
            let a = coherent_mean(&p, d, v);
            let b = coherent_mean_quadrature(&p, d, v).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn poisson_weights() {
        let total: f64 = (0..60).map(|n| poisson(3.2, n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(poisson(0.0, 0), 1.0);
        assert!((poisson(2.0, 3) - (-2.0f64).exp() * 8.0 / 6.0).abs() < 1e-15);
    }
}
