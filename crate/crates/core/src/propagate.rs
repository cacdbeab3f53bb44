//! Fourier-grid solution of `iħ ∂_t Ψ = H(t) Ψ` and the observables recorded along a run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adams::{Adams, AdamsConfig};
use crate::error::{Error, Result};
use crate::oscillator::{observables_with, peak_position, Grid, OscillatorParams, WaveFunction};
use crate::pulse::{Kinematics, KinematicsTracker, Pulse};
use crate::spectral::Spectral;

/// Norm drift tolerated before a run is declared broken.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Strang splitting with the potential at the half-step time.
    #[default]
    SplitOperator,
    /// Variable-step Adams–Bashforth–Moulton on the grid ODE system.
    AdaptiveMultistep,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split_operator" | "split" => Ok(Method::SplitOperator),
            "adaptive_multistep" | "adams" => Ok(Method::AdaptiveMultistep),
            other => Err(Error::Config(format!("unknown propagation method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::SplitOperator => "split_operator",
            Method::AdaptiveMultistep => "adaptive_multistep",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub method: Method,
    /// Relative tolerance of the adaptive method.
    pub rtol: f64,
}

impl PropagationConfig {
    pub fn new(grid: Grid, dt: f64, t_end: f64, record_stride: usize, method: Method) -> Result<Self> {
        let config = Self { grid, dt, t_end, record_stride, method, rtol: 1e-9 };
        config.validate()?;
        Ok(config)
    }

    /// `dt = cycle/2000`, one record every five steps.
    pub fn with_defaults(grid: Grid, params: &OscillatorParams, t_end: f64) -> Result<Self> {
        Self::new(grid, params.period() / 2000.0, t_end, 5, Method::SplitOperator)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps; `dt` is shrunk slightly so they land exactly on `t_end`.
    pub fn n_steps(&self) -> usize {
        if self.t_end == 0.0 {
            0
        } else {
            ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.n_steps() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }

    /// Times at which records are taken.
    pub fn record_times(&self) -> Vec<f64> {
        let n = self.n_steps();
        let dt = self.effective_dt();
        let mut steps: Vec<usize> = (0..=n).step_by(self.record_stride).collect();
        if steps.last() != Some(&n) {
            steps.push(n);
        }
        steps.into_iter().map(|k| if k == n { self.t_end } else { k as f64 * dt }).collect()
    }
}

/// One row of a time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRecord {
    pub t: f64,
    pub peak: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub dx: f64,
    pub dp: f64,
    pub dxdp: f64,
    pub energy: f64,
    pub accel: f64,
    pub d_ref: f64,
    pub norm: f64,
}

impl TimeRecord {
    pub const HEADER: [&'static str; 11] =
        ["t", "peak", "mean_x", "mean_p", "dx", "dp", "dxdp", "energy", "accel", "d_ref", "norm"];

    pub fn values(&self) -> [f64; 11] {
        [
            self.t, self.peak, self.mean_x, self.mean_p, self.dx, self.dp, self.dxdp, self.energy,
            self.accel, self.d_ref, self.norm,
        ]
    }

    pub fn from_values(v: [f64; 11]) -> Self {
        Self {
            t: v[0],
            peak: v[1],
            mean_x: v[2],
            mean_p: v[3],
            dx: v[4],
            dp: v[5],
            dxdp: v[6],
            energy: v[7],
            accel: v[8],
            d_ref: v[9],
            norm: v[10],
        }
    }

    /// Measures every observable of `psi` at time `kin.t`.
    pub fn measure(
        spectral: &Spectral,
        psi: &WaveFunction,
        pulse: &Pulse,
        params: &OscillatorParams,
        kin: &Kinematics,
    ) -> Result<Self> {
        let t = kin.t;
        psi.check_edges().map_err(|e| Error::PropagationAborted { t, reason: e.to_string() })?;
        let obs = observables_with(spectral, psi, params)
            .map_err(|e| Error::PropagationAborted { t, reason: e.to_string() })?;
        let peak = peak_position(psi).map_err(|e| Error::PropagationAborted { t, reason: e.to_string() })?;
        let force = pulse.force(t);
        Ok(Self {
            t,
            peak,
            mean_x: obs.mean_x,
            mean_p: obs.mean_p,
            dx: obs.dx_unc,
            dp: obs.dp_unc,
            dxdp: obs.product,
            energy: obs.mean_p2 / (2.0 * params.m)
                + 0.5 * params.m * params.omega * params.omega * obs.mean_x2
                - force * obs.mean_x,
            accel: force - params.m * params.omega * params.omega * obs.mean_x,
            d_ref: kin.d,
            norm: obs.norm,
        })
    }
}

/// A sequence of records on increasing times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<TimeRecord>,
}

impl TimeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&TimeRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Propagation {
    pub series: TimeSeries,
    pub final_state: WaveFunction,
    /// Steps (split operator) or accepted steps (adaptive) taken.
    pub steps: usize,
}

/// `⟨p²⟩/2m + ½mω²⟨x²⟩ − F(t)⟨x⟩`.
pub fn energy_expectation(psi: &WaveFunction, pulse: &Pulse, params: &OscillatorParams, t: f64) -> Result<f64> {
    let obs = observables_with(&Spectral::new(psi.grid()), psi, params)?;
    Ok(obs.mean_p2 / (2.0 * params.m) + 0.5 * params.m * params.omega * params.omega * obs.mean_x2
        - pulse.force(t) * obs.mean_x)
}

/// `m⟨ẍ⟩ = F(t) − mω²⟨x⟩`.
pub fn ehrenfest_acceleration(
    psi: &WaveFunction,
    pulse: &Pulse,
    params: &OscillatorParams,
    t: f64,
) -> Result<f64> {
    let obs = observables_with(&Spectral::new(psi.grid()), psi, params)?;
    Ok(pulse.force(t) - params.m * params.omega * params.omega * obs.mean_x)
}

/// Propagates `psi0` under `H(t)`, recording observables every `record_stride` steps.
pub fn propagate(
    psi0: &WaveFunction,
    pulse: &Pulse,
    params: &OscillatorParams,
    config: &PropagationConfig,
) -> Result<Propagation> {
    config.validate()?;
    params.validate()?;
    if *psi0.grid() != config.grid {
        return Err(Error::GridMismatch);
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
        return Err(Error::Unnormalized { norm });
    }
    match config.method {
        Method::SplitOperator => split_operator(psi0, pulse, params, config),
        Method::AdaptiveMultistep => adaptive(psi0, pulse, params, config),
    }
}

fn check_norm(psi: &WaveFunction, t: f64) -> Result<()> {
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= NORM_DRIFT_LIMIT) {
        return Err(Error::PropagationAborted { t, reason: format!("norm drifted to {norm}") });
    }
    Ok(())
}

fn split_operator(
    psi0: &WaveFunction,
    pulse: &Pulse,
    params: &OscillatorParams,
    config: &PropagationConfig,
) -> Result<Propagation> {
    let grid = config.grid;
    let spectral = Spectral::new(&grid);
    let (m, w, hbar) = (params.m, params.omega, params.hbar);
    let n_steps = config.n_steps();
    let dt = config.effective_dt();
    let kinetic: Vec<Complex64> = spectral
        .wavenumbers()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, -hbar * k * k * dt / (2.0 * m)))
        .collect();
    let xs: Vec<f64> = grid.points().collect();

    let mut psi = psi0.clone();
    let mut tracker = KinematicsTracker::new(pulse, params);
    let mut series = TimeSeries::default();
    series.records.push(TimeRecord::measure(&spectral, &psi, pulse, params, &tracker.current())?);

    let mut half = vec![Complex64::new(0.0, 0.0); xs.len()];
    for step in 1..=n_steps {
        let t_mid = (step as f64 - 0.5) * dt;
        let force = pulse.force(t_mid);
        for (h, &x) in half.iter_mut().zip(&xs) {
            let v = 0.5 * m * w * w * x * x - force * x;
            *h = Complex64::from_polar(1.0, -v * dt / (2.0 * hbar));
        }
        let amps = psi.amps_mut();
        for (a, h) in amps.iter_mut().zip(&half) {
            *a *= h;
        }
        spectral.forward(amps);
        for (a, k) in amps.iter_mut().zip(&kinetic) {
            *a *= k;
        }
        spectral.inverse(amps);
        for (a, h) in amps.iter_mut().zip(&half) {
            *a *= h;
        }

        if step % config.record_stride == 0 || step == n_steps {
            let t = if step == n_steps { config.t_end } else { step as f64 * dt };
            check_norm(&psi, t)?;
            let kin = tracker.advance_to(t)?;
            series.records.push(TimeRecord::measure(&spectral, &psi, pulse, params, &kin)?);
        }
    }
    Ok(Propagation { series, final_state: psi, steps: n_steps })
}

fn adaptive(
    psi0: &WaveFunction,
    pulse: &Pulse,
    params: &OscillatorParams,
    config: &PropagationConfig,
) -> Result<Propagation> {
    let grid = config.grid;
    let spectral = Spectral::new(&grid);
    let (m, w, hbar) = (params.m, params.omega, params.hbar);
    let xs: Vec<f64> = grid.points().collect();
    let kinetic: Vec<f64> = spectral.wavenumbers().iter().map(|&k| hbar * hbar * k * k / (2.0 * m)).collect();
    let minus_i_over_hbar = Complex64::new(0.0, -1.0 / hbar);
    let rhs_spectral = spectral.clone();
    let rhs = move |t: f64, y: &[Complex64]| -> Vec<Complex64> {
        let force = pulse.force(t);
        let mut kin = y.to_vec();
        rhs_spectral.forward(&mut kin);
        for (v, &e) in kin.iter_mut().zip(&kinetic) {
            *v *= e;
        }
        rhs_spectral.inverse(&mut kin);
        kin.iter()
            .zip(y)
            .zip(&xs)
            .map(|((k, v), &x)| minus_i_over_hbar * (k + (0.5 * m * w * w * x * x - force * x) * v))
            .collect()
    };
    let adams_config = AdamsConfig { rtol: config.rtol, ..AdamsConfig::default() };
    let mut solver = Adams::new(rhs, 0.0, psi0.amps().to_vec(), adams_config);

    let mut tracker = KinematicsTracker::new(pulse, params);
    let mut series = TimeSeries::default();
    let mut psi = psi0.clone();
    for t in config.record_times() {
        solver.advance_to(t)?;
        psi = WaveFunction::new(grid, solver.state().to_vec())?;
        check_norm(&psi, t)?;
        let kin = tracker.advance_to(t)?;
        series.records.push(TimeRecord::measure(&spectral, &psi, pulse, params, &kin)?);
    }
    Ok(Propagation { series, final_state: psi, steps: solver.accepted })
}
