//! Driving forces and the classical kinematics they induce.
//!
//! `fs(t) = ∫₀ᵗ F(τ) sin ωτ dτ` and `fc(t) = ∫₀ᵗ F(τ) cos ωτ dτ` are evaluated by
//! adaptive quadrature; the trajectory
//! `d(t) = (1/mω) ∫₀ᵗ F(τ) sin ω(t − τ) dτ` is the quadrature ground truth that
//! the sine-squared closed forms are checked against.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oscillator::OscillatorParams;
use crate::quadrature::{integrate_windows, windows};

/// Absolute tolerance used for every force integral.
pub const QUAD_TOL: f64 = 1e-12;

/// A force sampled at strictly increasing times, linearly interpolated and zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceTable {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ForceTable {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidPulse(
                "a force table needs at least two (time, force) rows".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPulse("table times must be strictly increasing".into()));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPulse("table contains non-finite values".into()));
        }
        Ok(Self { times, values })
    }

    /// Reads `time,force` rows; a non-numeric first row is taken as a header.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let (mut times, mut values) = (Vec::new(), Vec::new());
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidPulse(format!(
                    "row {} has {} columns, expected 2",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(f)) => {
                    times.push(t);
                    values.push(f);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidPulse(format!("row {} is not numeric", row + 1)));
                }
            }
        }
        Self::new(times, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, t: f64) -> f64 {
        let (first, last) = (self.times[0], self.times[self.times.len() - 1]);
        if t < first || t > last {
            return 0.0;
        }
        let i = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (f0, f1) = (self.values[i - 1], self.values[i]);
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }
}

/// The driving force `F(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pulse {
    Zero,
    /// `F0`, switched on at `t = 0`.
    Constant { f0: f64 },
    /// `F_m·sin²(πt/T)·sin(Ωt)` on `[0, T]`, zero elsewhere.
    SineSquared { f_m: f64, carrier: f64, duration: f64 },
    Tabulated(ForceTable),
}

impl Pulse {
    pub fn sine_squared(f_m: f64, carrier: f64, duration: f64) -> Result<Self> {
        if !f_m.is_finite() {
            return Err(Error::InvalidPulse(format!("peak force must be finite, got {f_m}")));
        }
        if !(carrier.is_finite() && carrier > 0.0) {
            return Err(Error::InvalidPulse(format!("carrier must be positive, got {carrier}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidPulse(format!("duration must be positive, got {duration}")));
        }
        Ok(Pulse::SineSquared { f_m, carrier, duration })
    }

    pub fn force(&self, t: f64) -> f64 {
        match self {
            Pulse::Zero => 0.0,
            Pulse::Constant { f0 } => {
                if t >= 0.0 {
                    *f0
                } else {
                    0.0
                }
            }
            Pulse::SineSquared { f_m, carrier, duration } => {
                if (0.0..=*duration).contains(&t) {
                    f_m * (PI * t / duration).sin().powi(2) * (carrier * t).sin()
                } else {
                    0.0
                }
            }
            Pulse::Tabulated(table) => table.eval(t),
        }
    }

    /// Times where `F` or one of its low derivatives is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Pulse::Zero => Vec::new(),
            Pulse::Constant { .. } => vec![0.0],
            Pulse::SineSquared { duration, .. } => vec![0.0, *duration],
            Pulse::Tabulated(table) => table.times.clone(),
        }
    }

    /// Time after which the force vanishes identically, if any.
    pub fn end_time(&self) -> Option<f64> {
        match self {
            Pulse::Zero => Some(0.0),
            Pulse::Constant { .. } => None,
            Pulse::SineSquared { duration, .. } => Some(*duration),
            Pulse::Tabulated(table) => table.times.last().copied(),
        }
    }

    /// Longest quadrature window: a quarter period of the fastest oscillation in the integrands.
    pub fn max_window(&self, params: &OscillatorParams) -> f64 {
        let fastest = match self {
            Pulse::SineSquared { carrier, duration, .. } => {
                params.omega + carrier + 2.0 * PI / duration
            }
            _ => params.omega,
        };
        0.5 * PI / fastest
    }
}

pub fn eval_force(pulse: &Pulse, t: f64) -> f64 {
    pulse.force(t)
}

/// `fs`, `fc` and the trajectory `d` with its first two derivatives at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Kinematics {
    pub t: f64,
    pub fs: f64,
    pub fc: f64,
    pub d: f64,
    pub d_dot: f64,
    pub d_ddot: f64,
}

impl Kinematics {
    /// Builds `d`, `ḋ`, `d̈` from `fs`, `fc` via
    /// `d = (sin ωt·fc − cos ωt·fs)/mω`, `ḋ = (cos ωt·fc + sin ωt·fs)/m`, `d̈ = F/m − ω²d`.
    pub fn from_weights(pulse: &Pulse, params: &OscillatorParams, t: f64, fs: f64, fc: f64) -> Self {
        let (s, c) = (params.omega * t).sin_cos();
        let d = (s * fc - c * fs) / (params.m * params.omega);
        let d_dot = (c * fc + s * fs) / params.m;
        let d_ddot = pulse.force(t) / params.m - params.omega * params.omega * d;
        Self { t, fs, fc, d, d_dot, d_ddot }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfRange { t, t_max: f64::INFINITY });
    }
    Ok(())
}

/// `(fs, fc)` over `[a, b]`.
pub fn weights_between(pulse: &Pulse, params: &OscillatorParams, a: f64, b: f64) -> Result<(f64, f64)> {
    if matches!(pulse, Pulse::Zero) {
        return Ok((0.0, 0.0));
    }
    let w = params.omega;
    let integrand = |tau: f64| {
        let f = pulse.force(tau);
        let (s, c) = (w * tau).sin_cos();
        [f * s, f * c]
    };
    let lo = a.max(0.0);
    let hi = match pulse.end_time() {
        Some(end) => b.min(end),
        None => b,
    };
    if hi <= lo {
        return Ok((0.0, 0.0));
    }
    let [fs, fc] = integrate_windows(
        &integrand,
        lo,
        hi,
        &pulse.breakpoints(),
        pulse.max_window(params),
        QUAD_TOL,
    )?;
    Ok((fs, fc))
}

/// `(fs(t), fc(t))`.
pub fn fourier_weights(pulse: &Pulse, params: &OscillatorParams, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    weights_between(pulse, params, 0.0, t)
}

/// Kinematics with `d` taken directly from the convolution integral.
pub fn kinematics_quadrature(pulse: &Pulse, params: &OscillatorParams, t: f64) -> Result<Kinematics> {
    check_time(t)?;
    let (fs, fc) = fourier_weights(pulse, params, t)?;
    let mut kin = Kinematics::from_weights(pulse, params, t, fs, fc);
    if matches!(pulse, Pulse::Zero) {
        return Ok(kin);
    }
    let w = params.omega;
    let hi = pulse.end_time().map_or(t, |end| t.min(end));
    let conv = if hi > 0.0 {
        integrate_windows(
            &|tau: f64| [pulse.force(tau) * (w * (t - tau)).sin()],
            0.0,
            hi,
            &pulse.breakpoints(),
            pulse.max_window(params),
            QUAD_TOL,
        )?[0]
    } else {
        0.0
    };
    kin.d = conv / (params.m * w);
    kin.d_ddot = pulse.force(t) / params.m - w * w * kin.d;
    Ok(kin)
}

/// Marches `fs`, `fc` forward through increasing times, integrating only the new window.
#[derive(Clone, Debug)]
pub struct KinematicsTracker<'a> {
    pulse: &'a Pulse,
    params: OscillatorParams,
    t: f64,
    fs: f64,
    fc: f64,
}

impl<'a> KinematicsTracker<'a> {
    pub fn new(pulse: &'a Pulse, params: &OscillatorParams) -> Self {
        Self { pulse, params: *params, t: 0.0, fs: 0.0, fc: 0.0 }
    }

    pub fn current(&self) -> Kinematics {
        Kinematics::from_weights(self.pulse, &self.params, self.t, self.fs, self.fc)
    }

    pub fn advance_to(&mut self, t: f64) -> Result<Kinematics> {
        let (dfs, dfc) = weights_between(self.pulse, &self.params, self.t, t)?;
        self.fs += dfs;
        self.fc += dfc;
        self.t = t;
        Ok(self.current())
    }
}

/// Which version of the sine-squared closed forms to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormVariant {
    /// Checked against quadrature; differs from the literal resonant expression
    /// in the sign of its `sin[(ω+Λ)t]` term.
    #[default]
    Corrected,
    /// The textbook term-by-term expressions, kept for comparison.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Term {
    /// `amp·sin(freq·t)`
    Sin { amp: f64, freq: f64 },
    /// `amp·t·cos(freq·t)`
    TCos { amp: f64, freq: f64 },
}

impl Term {
    fn value(&self, t: f64) -> f64 {
        match *self {
            Term::Sin { amp, freq } => amp * (freq * t).sin(),
            Term::TCos { amp, freq } => amp * t * (freq * t).cos(),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match *self {
            Term::Sin { amp, freq } => amp * freq * (freq * t).cos(),
            Term::TCos { amp, freq } => amp * ((freq * t).cos() - freq * t * (freq * t).sin()),
        }
    }
}

/// Closed-form `d(t)` for a sine-squared pulse, valid on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    terms: Vec<Term>,
    duration: f64,
    omega: f64,
}

fn nonzero(den: f64, scale: f64, what: &str) -> Result<f64> {
    if den.abs() <= 1e-9 * scale {
        return Err(Error::DegenerateDenominator(format!("{what} vanishes")));
    }
    Ok(den)
}

impl ClosedForm {
    /// Nonresonant pulse, `Ω ≠ ω`.
    pub fn nonresonant(
        f_m: f64,
        carrier: f64,
        duration: f64,
        params: &OscillatorParams,
        variant: ClosedFormVariant,
    ) -> Result<Self> {
        let (m, w, om) = (params.m, params.omega, carrier);
        let lam = 2.0 * PI / duration;
        let scale = w * w;
        let d0 = nonzero(w * w - om * om, scale, "ω² − Ω²")?;
        let dm = nonzero(w * w - (lam - om).powi(2), scale, "ω² − (Λ − Ω)²")?;
        let dp = nonzero(w * w - (lam + om).powi(2), scale, "ω² − (Λ + Ω)²")?;
        let lead = f_m / (2.0 * m * w * d0);
        let env = f_m / (4.0 * m * w);
        let terms = match variant {
            ClosedFormVariant::Literal => vec![
                Term::Sin { amp: lead * w, freq: om },
                Term::Sin { amp: -lead * om, freq: w },
                Term::Sin { amp: -env * (lam - om) / dm, freq: w },
                Term::Sin { amp: env * (lam + om) / dp, freq: w },
                Term::Sin { amp: env * w / dm, freq: lam - om },
                Term::Sin { amp: -env * w / dp, freq: lam + om },
            ],
            // Superposition of the rest-start responses to the three carrier
            // components sin Ωt, sin (Ω±Λ)t; algebraically equal to the literal form.
            ClosedFormVariant::Corrected => {
                let response = |amp: f64, nu: f64, den: f64| {
                    let k = amp / (m * w * den);
                    [Term::Sin { amp: k * w, freq: nu }, Term::Sin { amp: -k * nu, freq: w }]
                };
                let mut terms = Vec::with_capacity(6);
                terms.extend(response(0.5 * f_m, om, d0));
                terms.extend(response(-0.25 * f_m, om + lam, dp));
                terms.extend(response(-0.25 * f_m, om - lam, dm));
                terms
            }
        };
        Ok(Self { terms, duration, omega: w })
    }

    /// Resonant pulse, `Ω = ω`.
    pub fn resonant(
        f_m: f64,
        duration: f64,
        params: &OscillatorParams,
        variant: ClosedFormVariant,
    ) -> Result<Self> {
        let (m, w) = (params.m, params.omega);
        let lam = 2.0 * PI / duration;
        let scale = w * w;
        let dq = nonzero(4.0 * w * w - lam * lam, scale, "4ω² − Λ²")?;
        let dm = nonzero(lam * (2.0 * w - lam), scale, "Λ(2ω − Λ)")?;
        let dp = lam * (2.0 * w + lam);
        let env = f_m / (4.0 * m * w);
        let last_sign = match variant {
            ClosedFormVariant::Corrected => 1.0,
            ClosedFormVariant::Literal => -1.0,
        };
        let terms = vec![
            Term::Sin { amp: env / w, freq: w },
            Term::TCos { amp: -env, freq: w },
            Term::Sin { amp: -env * 2.0 * w / dq, freq: w },
            Term::Sin { amp: -env * w / dm, freq: w - lam },
            Term::Sin { amp: last_sign * env * w / dp, freq: w + lam },
        ];
        Ok(Self { terms, duration, omega: w })
    }

    /// Picks the resonant or nonresonant form for a sine-squared pulse.
    pub fn for_pulse(pulse: &Pulse, params: &OscillatorParams, variant: ClosedFormVariant) -> Result<Self> {
        match pulse {
            Pulse::SineSquared { f_m, carrier, duration } => {
                if (carrier - params.omega).abs() <= 1e-12 * params.omega {
                    Self::resonant(*f_m, *duration, params, variant)
                } else {
                    Self::nonresonant(*f_m, *carrier, *duration, params, variant)
                }
            }
            _ => Err(Error::InvalidPulse("closed forms exist only for sine-squared pulses".into())),
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// `d(t)` for `0 ≤ t ≤ T`.
    pub fn displacement(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.raw_d(t))
    }

    /// `ḋ(t)` for `0 ≤ t ≤ T`.
    pub fn velocity(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.raw_v(t))
    }

    /// `d(t)` for any `t`: zero before the pulse and the free oscillation frozen at `T` after it.
    pub fn displacement_extended(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t <= self.duration {
            self.raw_d(t)
        } else {
            let (d_end, v_end) = (self.raw_d(self.duration), self.raw_v(self.duration));
            let (s, c) = (self.omega * (t - self.duration)).sin_cos();
            d_end * c + v_end / self.omega * s
        }
    }

    /// `ḋ(t)` for any `t`, continued past `T` like [`ClosedForm::displacement_extended`].
    pub fn velocity_extended(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t <= self.duration {
            self.raw_v(t)
        } else {
            let (d_end, v_end) = (self.raw_d(self.duration), self.raw_v(self.duration));
            let (s, c) = (self.omega * (t - self.duration)).sin_cos();
            v_end * c - d_end * self.omega * s
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::OutOfRange { t, t_max: self.duration });
        }
        Ok(())
    }

    fn raw_d(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.value(t)).sum()
    }

    fn raw_v(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.derivative(t)).sum()
    }
}

/// Closed-form nonresonant `d(t)` on `[0, T]`.
pub fn d_closed_nonresonant(
    f_m: f64,
    carrier: f64,
    duration: f64,
    params: &OscillatorParams,
    t: f64,
    variant: ClosedFormVariant,
) -> Result<f64> {
    ClosedForm::nonresonant(f_m, carrier, duration, params, variant)?.displacement(t)
}

/// Closed-form resonant `d(t)` on `[0, T]`.
pub fn d_closed_resonant(
    f_m: f64,
    duration: f64,
    params: &OscillatorParams,
    t: f64,
    variant: ClosedFormVariant,
) -> Result<f64> {
    ClosedForm::resonant(f_m, duration, params, variant)?.displacement(t)
}

/// `|d̈ + ω²d − F/m|` at `t` with `d̈` from a central difference of step `10⁻⁴` periods.
pub fn classical_residual(
    pulse: &Pulse,
    params: &OscillatorParams,
    d_fn: impl Fn(f64) -> f64,
    t: f64,
) -> f64 {
    let h = 1e-4 * params.period();
    let d0 = d_fn(t);
    let d_ddot = (d_fn(t + h) - 2.0 * d0 + d_fn(t - h)) / (h * h);
    (d_ddot + params.omega * params.omega * d0 - pulse.force(t) / params.m).abs()
}

/// Times `0, Δ, 2Δ, …` through `t_end` with `n` intervals.
pub fn uniform_mesh(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

/// Windows that the propagators and trackers share when stepping across a pulse.
pub fn pulse_windows(pulse: &Pulse, params: &OscillatorParams, a: f64, b: f64) -> Vec<(f64, f64)> {
    windows(a, b, &pulse.breakpoints(), pulse.max_window(params))
}
