//! Experiment configuration, presets, and run orchestration with CSV/JSON outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::algebra::decompose;
use crate::error::{Error, Result};
use crate::exact::{exact_series, ExactState, PhaseMode, PHASE_TOL};
use crate::oscillator::{eigenstate, Grid, OscillatorParams, WaveFunction, EDGE_LIMIT};
use crate::propagate::{propagate, Method, Propagation, PropagationConfig, TimeSeries, NORM_DRIFT_LIMIT};
use crate::pulse::{kinematics_quadrature, ClosedForm, ClosedFormVariant, ForceTable, KinematicsTracker, Pulse, QUAD_TOL};
use crate::table::{timeseries_table, wavefunction_table, Table};

pub const TIMESERIES_NUMERIC: &str = "timeseries_numeric.csv";
pub const TIMESERIES_EXACT: &str = "timeseries_exact.csv";
pub const D_REFERENCE: &str = "d_reference.csv";
pub const DECOMPOSITION: &str = "decomposition.csv";
pub const PSI_NUMERIC_FINAL: &str = "psi_numeric_final.csv";
pub const PSI_EXACT_FINAL: &str = "psi_exact_final.csv";
pub const RUN_META: &str = "run_meta.json";

/// Header of the classical-trajectory reference table.
pub const D_REFERENCE_HEADER: [&str; 8] =
    ["t", "force", "fs", "fc", "d_quadrature", "d_dot_quadrature", "d_closed", "d_dot_closed"];

/// Header of the state-changing-operator table.
pub const DECOMPOSITION_HEADER: [&str; 4] = ["t", "cx", "cp", "c1"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Zero,
    Constant,
    SineSquared,
    Tabulated,
}

impl PulseKind {
    fn name(self) -> &'static str {
        match self {
            PulseKind::Zero => "zero",
            PulseKind::Constant => "constant",
            PulseKind::SineSquared => "sine_squared",
            PulseKind::Tabulated => "tabulated",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(PulseKind::Zero),
            "constant" => Ok(PulseKind::Constant),
            "sine_squared" => Ok(PulseKind::SineSquared),
            "tabulated" => Ok(PulseKind::Tabulated),
            other => Err(Error::Config(format!("unknown pulse.kind {other:?}"))),
        }
    }
}

/// Pulse as written in a config: durations in oscillator cycles, carrier relative to `ω`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseSpec {
    pub kind: PulseKind,
    /// Peak force (sine-squared) or constant force.
    pub f_m: f64,
    pub omega_over_omega: f64,
    pub t_cycles: f64,
    /// Force table for `tabulated` pulses (`t,F` CSV).
    pub table: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropSpec {
    /// Time step as a fraction of one oscillator cycle `2π/ω`.
    pub dt_per_cycle: f64,
    pub t_end_cycles: f64,
    pub method: Method,
    pub record_stride: usize,
}

/// Fully resolved experiment description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub params: OscillatorParams,
    pub pulse: PulseSpec,
    pub n: usize,
    pub grid: GridSpec,
    pub prop: PropSpec,
    pub phase_mode: PhaseMode,
    pub out_dir: PathBuf,
}

/// Config keys in serialization order.
pub const CONFIG_KEYS: [&str; 19] = [
    "preset",
    "params.m",
    "params.omega",
    "params.hbar",
    "pulse.kind",
    "pulse.F_m",
    "pulse.Omega_over_omega",
    "pulse.T_cycles",
    "pulse.table",
    "state.n",
    "grid.x_min",
    "grid.x_max",
    "grid.n",
    "prop.dt_per_cycle",
    "prop.t_end_cycles",
    "prop.method",
    "prop.record_stride",
    "exact.phase_mode",
    "out.dir",
];

/// Names of the built-in presets.
pub const PRESETS: [&str; 2] = ["fig1", "fig2"];

/// Expands a preset: `fig1` is the nonresonant `Ω = ω/2` pulse, `fig2` the resonant
/// `Ω = ω` pulse; both `F_m = 1`, `T = 10` cycles, run for 12 cycles from `Φ₀`.
///
/// The resonant packet moves fast enough that its phase error at `dt = cycle/2000`
/// reaches ~1e−3 by the end of the pulse, so `fig2` halves the step (and doubles the
/// record stride, keeping both presets on the same record mesh).
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (ratio, grid, dt_per_cycle, record_stride) = match name {
        "fig1" => (0.5, GridSpec { x_min: -20.0, x_max: 20.0, n: 512 }, 0.0005, 5),
        "fig2" => (1.0, GridSpec { x_min: -64.0, x_max: 64.0, n: 2048 }, 0.00025, 10),
        other => return Err(Error::Config(format!("unknown preset {other:?} (expected fig1 or fig2)"))),
    };
    Ok(ExperimentConfig {
        preset: Some(name.to_string()),
        params: OscillatorParams::default(),
        pulse: PulseSpec {
            kind: PulseKind::SineSquared,
            f_m: 1.0,
            omega_over_omega: ratio,
            t_cycles: 10.0,
            table: None,
        },
        n: 0,
        grid,
        prop: PropSpec { dt_per_cycle, t_end_cycles: 12.0, method: Method::SplitOperator, record_stride },
        phase_mode: PhaseMode::ResidualValidated,
        out_dir: PathBuf::from(format!("out/{name}")),
    })
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::Config(format!("{key} must be a number, got {other}"))),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(Error::Config(format!("{key} must be a non-negative integer, got {other}"))),
    }
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::Config(format!("{key} must be a string, got {v}")))
}

impl ExperimentConfig {
    /// Parses the flat `key = value` format. A `preset` key supplies defaults that
    /// the remaining keys override; without it every key falls back to `fig1`.
    pub fn from_flat_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut flat = BTreeMap::new();
        flatten("", &table, &mut flat);
        if let Some(unknown) = flat.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown config key {unknown:?}")));
        }
        let mut config = match flat.get("preset") {
            Some(v) => preset(as_str("preset", v)?)?,
            None => ExperimentConfig { preset: None, ..preset("fig1")? },
        };
        for (key, v) in &flat {
            match key.as_str() {
                "preset" => {}
                "params.m" => config.params.m = as_f64(key, v)?,
                "params.omega" => config.params.omega = as_f64(key, v)?,
                "params.hbar" => config.params.hbar = as_f64(key, v)?,
                "pulse.kind" => config.pulse.kind = PulseKind::parse(as_str(key, v)?)?,
                "pulse.F_m" => config.pulse.f_m = as_f64(key, v)?,
                "pulse.Omega_over_omega" => config.pulse.omega_over_omega = as_f64(key, v)?,
                "pulse.T_cycles" => config.pulse.t_cycles = as_f64(key, v)?,
                "pulse.table" => config.pulse.table = Some(PathBuf::from(as_str(key, v)?)),
                "state.n" => config.n = as_usize(key, v)?,
                "grid.x_min" => config.grid.x_min = as_f64(key, v)?,
                "grid.x_max" => config.grid.x_max = as_f64(key, v)?,
                "grid.n" => config.grid.n = as_usize(key, v)?,
                "prop.dt_per_cycle" => config.prop.dt_per_cycle = as_f64(key, v)?,
                "prop.t_end_cycles" => config.prop.t_end_cycles = as_f64(key, v)?,
                "prop.method" => config.prop.method = as_str(key, v)?.parse()?,
                "prop.record_stride" => config.prop.record_stride = as_usize(key, v)?,
                "exact.phase_mode" => config.phase_mode = as_str(key, v)?.parse()?,
                "out.dir" => config.out_dir = PathBuf::from(as_str(key, v)?),
                _ => unreachable!("keys checked against CONFIG_KEYS"),
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; a relative `pulse.table` is resolved against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_flat_str(&text)?;
        if let (Some(table), Some(dir)) = (&config.pulse.table, path.parent()) {
            if table.is_relative() {
                config.pulse.table = Some(dir.join(table));
            }
        }
        Ok(config)
    }

    /// Serializes every key in [`CONFIG_KEYS`] order; parses back to an equal config.
    pub fn to_flat_string(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let quoted = |v: &str| toml::Value::String(v.to_string()).to_string();
        if let Some(p) = &self.preset {
            line("preset", quoted(p));
        }
        line("params.m", format!("{:?}", self.params.m));
        line("params.omega", format!("{:?}", self.params.omega));
        line("params.hbar", format!("{:?}", self.params.hbar));
        line("pulse.kind", quoted(self.pulse.kind.name()));
        line("pulse.F_m", format!("{:?}", self.pulse.f_m));
        line("pulse.Omega_over_omega", format!("{:?}", self.pulse.omega_over_omega));
        line("pulse.T_cycles", format!("{:?}", self.pulse.t_cycles));
        if let Some(t) = &self.pulse.table {
            line("pulse.table", quoted(&t.to_string_lossy()));
        }
        line("state.n", self.n.to_string());
        line("grid.x_min", format!("{:?}", self.grid.x_min));
        line("grid.x_max", format!("{:?}", self.grid.x_max));
        line("grid.n", self.grid.n.to_string());
        line("prop.dt_per_cycle", format!("{:?}", self.prop.dt_per_cycle));
        line("prop.t_end_cycles", format!("{:?}", self.prop.t_end_cycles));
        line("prop.method", quoted(&self.prop.method.to_string()));
        line("prop.record_stride", self.prop.record_stride.to_string());
        let mode = match self.phase_mode {
            PhaseMode::Literal => "literal",
            PhaseMode::ResidualValidated => "residual_validated",
        };
        line("exact.phase_mode", quoted(mode));
        line("out.dir", quoted(&self.out_dir.to_string_lossy()));
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid()?;
        self.propagation_config()?;
        if self.pulse.kind != PulseKind::Tabulated {
            self.pulse()?;
        } else if self.pulse.table.is_none() {
            return Err(Error::Config("pulse.kind = \"tabulated\" requires pulse.table".into()));
        }
        if self.n > 60 {
            return Err(Error::Config(format!("state.n = {} exceeds 60", self.n)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n)
    }

    pub fn pulse(&self) -> Result<Pulse> {
        let period = self.params.period();
        let spec = &self.pulse;
        match spec.kind {
            PulseKind::Zero => Ok(Pulse::Zero),
            PulseKind::Constant => {
                if !spec.f_m.is_finite() {
                    return Err(Error::InvalidPulse(format!("force must be finite, got {}", spec.f_m)));
                }
                Ok(Pulse::Constant { f0: spec.f_m })
            }
            PulseKind::SineSquared => Pulse::sine_squared(
                spec.f_m,
                spec.omega_over_omega * self.params.omega,
                spec.t_cycles * period,
            ),
            PulseKind::Tabulated => {
                let path = spec
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Config("tabulated pulse needs pulse.table".into()))?;
                Ok(Pulse::Tabulated(ForceTable::from_csv_path(path)?))
            }
        }
    }

    pub fn propagation_config(&self) -> Result<PropagationConfig> {
        let period = self.params.period();
        PropagationConfig::new(
            self.grid()?,
            self.prop.dt_per_cycle * period,
            self.prop.t_end_cycles * period,
            self.prop.record_stride,
            self.prop.method,
        )
    }

    pub fn exact_state(&self) -> Result<ExactState> {
        Ok(ExactState::new(self.n, self.pulse()?, self.params)?.with_phase_mode(self.phase_mode))
    }

    pub fn initial_state(&self) -> Result<WaveFunction> {
        eigenstate(self.n, &self.params, &self.grid()?)
    }
}

/// What a run produced, for callers that want to report without re-reading files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub numeric: TimeSeries,
    pub exact: TimeSeries,
    pub final_numeric: WaveFunction,
    pub final_exact: WaveFunction,
    /// L² distance between the final numeric and exact states.
    pub final_distance: f64,
    /// Largest `|⟨x⟩ − d|` over the numeric records.
    pub max_trajectory_error: f64,
    pub files: Vec<PathBuf>,
}

/// Trajectory reference table: quadrature and (for sine-squared pulses) closed-form `d`, `ḋ`.
pub fn d_reference_table(pulse: &Pulse, params: &OscillatorParams, times: &[f64]) -> Result<Table> {
    let closed = match pulse {
        Pulse::SineSquared { .. } => Some(ClosedForm::for_pulse(pulse, params, ClosedFormVariant::Corrected)?),
        _ => None,
    };
    let mut table = Table::new(&D_REFERENCE_HEADER);
    let mut tracker = KinematicsTracker::new(pulse, params);
    for &t in times {
        let kin = tracker.advance_to(t)?;
        let conv = kinematics_quadrature(pulse, params, t)?;
        let (dc, vc) = match &closed {
            Some(cf) => (cf.displacement_extended(t), cf.velocity_extended(t)),
            None => (f64::NAN, f64::NAN),
        };
        table.push(vec![t, pulse.force(t), kin.fs, kin.fc, conv.d, kin.d_dot, dc, vc]);
    }
    Ok(table)
}

/// `H_c` coefficients `cx`, `cp`, `c1` from the full decomposition at each time.
pub fn decomposition_table(pulse: &Pulse, params: &OscillatorParams, times: &[f64]) -> Result<Table> {
    let mut table = Table::new(&DECOMPOSITION_HEADER);
    for &t in times {
        let dec = decompose(pulse, params, t)?;
        table.push(vec![t, dec.h_c.cx.re, dec.h_c.cp.re, dec.h_c.c1.re]);
    }
    Ok(table)
}

/// Runs the numeric propagation and the exact solution side by side and writes
/// every artifact into `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let pulse = config.pulse()?;
    let prop = config.propagation_config()?;
    let psi0 = config.initial_state()?;
    let state = config.exact_state()?;
    let times = prop.record_times();
    let grid = prop.grid;

    let (numeric, exact, d_ref, decomposition) = std::thread::scope(|scope| {
        let numeric = scope.spawn(|| propagate(&psi0, &pulse, &config.params, &prop));
        let exact = scope.spawn(|| exact_series(&state, &grid, &times));
        let d_ref = d_reference_table(&pulse, &config.params, &times);
        let decomposition = decomposition_table(&pulse, &config.params, &times);
        (
            numeric.join().expect("numeric propagation thread panicked"),
            exact.join().expect("exact solution thread panicked"),
            d_ref,
            decomposition,
        )
    });
    let Propagation { series: numeric, final_state, steps } = numeric?;
    let (exact, final_exact) = exact?;
    let final_exact = final_exact.unwrap_or_else(|| psi0.clone());
    let (d_ref, decomposition) = (d_ref?, decomposition?);

    let final_distance = final_state.distance(&final_exact)?;
    let max_trajectory_error =
        numeric.records.iter().map(|r| (r.mean_x - r.d_ref).abs()).fold(0.0, f64::max);

    let dir = config.out_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    let mut write = |name: &str, table: &Table| -> Result<()> {
        let path = dir.join(name);
        table.write_path(&path)?;
        files.push(path);
        Ok(())
    };
    write(TIMESERIES_NUMERIC, &timeseries_table(&numeric))?;
    write(TIMESERIES_EXACT, &timeseries_table(&exact))?;
    write(D_REFERENCE, &d_ref)?;
    write(DECOMPOSITION, &decomposition)?;
    write(PSI_NUMERIC_FINAL, &wavefunction_table(&final_state))?;
    write(PSI_EXACT_FINAL, &wavefunction_table(&final_exact))?;

    let meta = serde_json::json!({
        "config": config,
        "config_text": config.to_flat_string(),
        "units": "Oscillator units: lengths, momenta and energies are in the units of params.m, params.omega, params.hbar; times are in 1/omega, and one cycle is 2*pi/omega.",
        "numerics": {
            "dt": prop.effective_dt(),
            "steps": steps,
            "records": numeric.records.len(),
            "dx": grid.dx(),
            "t_end": prop.t_end,
        },
        "tolerances": {
            "edge_amplitude_limit": EDGE_LIMIT,
            "norm_drift_limit": NORM_DRIFT_LIMIT,
            "force_quadrature_tol": QUAD_TOL,
            "phase_quadrature_tol": PHASE_TOL,
            "adaptive_rtol": prop.rtol,
        },
        "diagnostics": {
            "final_l2_numeric_vs_exact": final_distance,
            "max_abs_mean_x_minus_d": max_trajectory_error,
        },
        "outputs": [TIMESERIES_NUMERIC, TIMESERIES_EXACT, D_REFERENCE, DECOMPOSITION, PSI_NUMERIC_FINAL, PSI_EXACT_FINAL],
        "versions": { "dhosc-core": env!("CARGO_PKG_VERSION") },
    });
    let meta_path = dir.join(RUN_META);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Schema(e.to_string()))?;
    fs::write(&meta_path, text + "\n").map_err(|e| Error::io(&meta_path, e))?;
    files.push(meta_path);

    Ok(RunOutcome {
        dir,
        numeric,
        exact,
        final_numeric: final_state,
        final_exact,
        final_distance,
        max_trajectory_error,
        files,
    })
}

/// Per-time coefficients of `H`, `H̃`, `H_c` with linearity and trajectory cross-checks.
pub fn decompose_report(config: &ExperimentConfig, times: &[f64]) -> Result<Table> {
    let pulse = config.pulse()?;
    let m = config.params.m;
    let names = ["c1", "cx", "cp", "cxx", "cpp", "cxp"];
    let mut header: Vec<String> = vec!["t".into()];
    for prefix in ["h", "ht", "hc"] {
        header.extend(names.iter().map(|n| format!("{prefix}_{n}")));
    }
    header.extend(["hc_linear", "d_dot", "m_d_ddot", "hc_cp_minus_d_dot", "hc_cx_plus_m_d_ddot"].map(String::from));
    let mut table = Table { header, rows: Vec::new() };
    for &t in times {
        let dec = decompose(&pulse, &config.params, t)?;
        let kin = dec.kinematics;
        let mut row = vec![t];
        for poly in [dec.hamiltonian, dec.h_tilde, dec.h_c] {
            row.extend(poly.to_array().iter().map(|c| c.re));
        }
        row.push(if dec.h_c.is_linear() { 1.0 } else { 0.0 });
        row.extend([kin.d_dot, m * kin.d_ddot, dec.h_c.cp.re - kin.d_dot, dec.h_c.cx.re + m * kin.d_ddot]);
        table.push(row);
    }
    Ok(table)
}

/// `F(t)`, `fs`, `fc`, `d`, `ḋ` on `samples + 1` evenly spaced times through the run end.
pub fn pulse_table(config: &ExperimentConfig, samples: usize) -> Result<Table> {
    if samples == 0 {
        return Err(Error::Config("pulse table needs at least one sample interval".into()));
    }
    let pulse = config.pulse()?;
    let t_end = config.prop.t_end_cycles * config.params.period();
    let mut table = Table::new(&["t", "F", "fs", "fc", "d", "d_dot"]);
    let mut tracker = KinematicsTracker::new(&pulse, &config.params);
    for k in 0..=samples {
        let t = t_end * k as f64 / samples as f64;
        let kin = tracker.advance_to(t)?;
        table.push(vec![t, pulse.force(t), kin.fs, kin.fc, kin.d, kin.d_dot]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let text = c.to_flat_string();
            assert_eq!(ExperimentConfig::from_flat_str(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn preset_values() {
        let c = preset("fig2").unwrap();
        match c.pulse().unwrap() {
            Pulse::SineSquared { f_m, carrier, duration } => {
                assert_eq!((f_m, carrier), (1.0, 1.0));
                assert!((duration - 20.0 * std::f64::consts::PI).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.grid().unwrap().n_points(), 2048);
        assert!(preset("fig3").is_err());
    }

    #[test]
    fn overrides_and_errors() {
        let c = ExperimentConfig::from_flat_str(
            "preset = \"fig2\"\nstate.n = 2\nprop.method = \"adaptive_multistep\"\n[grid]\nn = 1024\n",
        )
        .unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.grid.n, 1024);
        assert_eq!(c.prop.method, Method::AdaptiveMultistep);
        assert_eq!(c.pulse.omega_over_omega, 1.0);
        for bad in [
            "params.m = -1.0",
            "bogus.key = 1",
            "pulse.kind = \"square\"",
            "grid.n = 1.5",
            "prop.dt_per_cycle = 0",
            "pulse.kind = \"tabulated\"",
            "this is not toml",
        ] {
            let err = ExperimentConfig::from_flat_str(bad).unwrap_err();
            assert_eq!(err.class(), crate::error::ErrorClass::Input, "{bad}: {err}");
        }
    }

    #[test]
    fn zero_pulse_run_is_stationary() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "pulse.kind = \"zero\"\ngrid.x_min = -10.0\ngrid.x_max = 10.0\ngrid.n = 128\nprop.t_end_cycles = 0.2\nprop.dt_per_cycle = 0.0005\nout.dir = {:?}\n",
            dir.path().to_string_lossy()
        );
        let config = ExperimentConfig::from_flat_str(&text).unwrap();
        let out = run_experiment(&config).unwrap();
        for r in out.numeric.records.iter().chain(&out.exact.records) {
            assert!(r.mean_x.abs() < 1e-12 && r.mean_p.abs() < 1e-12 && r.d_ref == 0.0);
            assert!((r.energy - 0.5).abs() < 1e-9, "{r:?}");
        }
        let decomposition = Table::read_path(&dir.path().join(DECOMPOSITION)).unwrap();
        assert!(decomposition.rows.iter().all(|r| r[1..].iter().all(|&v| v == 0.0)));
        for name in [TIMESERIES_NUMERIC, TIMESERIES_EXACT, D_REFERENCE, RUN_META, PSI_EXACT_FINAL] {
            assert!(dir.path().join(name).exists());
        }
    }

    #[test]
    fn pulse_table_has_requested_rows() {
        let t = pulse_table(&preset("fig1").unwrap(), 100).unwrap();
        assert_eq!(t.rows.len(), 101);
        assert_eq!(t.rows[0][1..], [0.0; 5]);
    }

    #[test]
    fn decompose_report_columns() {
        let c = preset("fig2").unwrap();
        let t8 = 8.0 * c.params.period();
        let table = decompose_report(&c, &[0.0, t8]).unwrap();
        let lin = table.column_index("hc_linear").unwrap();
        assert!(table.rows.iter().all(|r| r[lin] == 1.0));
        let cp = table.column_index("hc_cp").unwrap();
        assert!((table.rows[1][cp] - (-0.086_589_349_075_821_1)).abs() < 1e-9);
        let c1 = table.column_index("hc_c1").unwrap();
        assert_eq!(table.rows[0][cp..=cp], [0.0]);
        assert_eq!(table.rows[0][c1], 0.0);
    }
}
