//! Units, the spatial grid, wave functions, harmonic-oscillator eigenstates and
//! the grid observables every other module reads.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectral;

/// Largest edge amplitude tolerated for a state that is meant to be localized.
pub const EDGE_LIMIT: f64 = 1e-8;

/// How far from unity a norm may drift before observables refuse the state.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Mass, angular frequency and reduced action of the oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self { m: 1.0, omega: 1.0, hbar: 1.0 }
    }
}

impl OscillatorParams {
    pub fn new(m: f64, omega: f64, hbar: f64) -> Result<Self> {
        let params = Self { m, omega, hbar };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// One oscillator cycle, `2π/ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// `E_n = (n + ½)ħω`.
    pub fn energy(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.hbar * self.omega
    }

    /// Oscillator length `sqrt(ħ/mω)`.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.m * self.omega)).sqrt()
    }
}

/// Uniform periodic grid `x_j = x_min + j·dx`, `j = 0..n_points`, with `x_max` excluded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!("empty domain [{x_min}, {x_max}]")));
        }
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }
}

/// Complex samples of Ψ on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a {}-point grid",
                amps.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amps })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amps = grid.points().map(f).collect();
        Self { grid, amps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// `∫|Ψ|² dx` as a rectangle sum.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `sqrt(∫|Ψ|² dx)`.
    pub fn l2_norm(&self) -> f64 {
        self.norm().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let s = self.norm().sqrt();
        if s > 0.0 {
            for a in &mut self.amps {
                *a /= s;
            }
        }
        self
    }

    /// Larger of `|Ψ|` at the first and last sample.
    pub fn edge_amplitude(&self) -> f64 {
        let first = self.amps.first().map_or(0.0, |a| a.norm());
        let last = self.amps.last().map_or(0.0, |a| a.norm());
        first.max(last)
    }

    pub fn check_edges(&self) -> Result<()> {
        let amplitude = self.edge_amplitude();
        if amplitude > EDGE_LIMIT || !amplitude.is_finite() {
            return Err(Error::EdgeAmplitude { amplitude, limit: EDGE_LIMIT });
        }
        Ok(())
    }

    /// `Ψ(x) → Ψ(x − shift)` through the Fourier shift theorem.
    pub fn translated(&self, shift: f64) -> Self {
        let spectral = Spectral::new(&self.grid);
        Self { grid: self.grid, amps: spectral.translate(&self.amps, shift) }
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= factor;
        }
        self
    }

    /// L² distance `sqrt(∫|a − b|² dx)`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let sum: f64 = self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((sum * self.grid.dx()).sqrt())
    }
}

/// `⟨a, b⟩ = Σ conj(a)·b·dx`.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(sum * a.grid.dx())
}

/// Normalized Hermite functions `ψ_0..=ψ_{n_max}` at the dimensionless point `xi`,
/// by the three-term recurrence
/// `ψ_{k+1} = sqrt(2/(k+1))·ξ·ψ_k − sqrt(k/(k+1))·ψ_{k−1}`.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * xi * out[0]);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Oscillator eigenfunction `Φ_n(x)` in physical units.
pub fn eigenfunction_value(n: usize, params: &OscillatorParams, x: f64) -> f64 {
    let scale = params.length_scale();
    hermite_function(n, x / scale) / scale.sqrt()
}

/// Samples of `Φ_n(x − shift)` evaluated analytically at the shifted points.
pub fn eigenstate_shifted(
    n: usize,
    params: &OscillatorParams,
    grid: &Grid,
    shift: f64,
) -> Result<WaveFunction> {
    params.validate()?;
    let psi = WaveFunction::from_fn(*grid, |x| {
        Complex64::new(eigenfunction_value(n, params, x - shift), 0.0)
    });
    psi.check_edges()?;
    Ok(psi)
}

/// The `n`-th oscillator eigenstate `Φ_n` sampled on `grid`.
pub fn eigenstate(n: usize, params: &OscillatorParams, grid: &Grid) -> Result<WaveFunction> {
    eigenstate_shifted(n, params, grid, 0.0)
}

/// Moments and uncertainties of a normalized state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableSet {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub dx_unc: f64,
    pub dp_unc: f64,
    pub product: f64,
    pub norm: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
}

pub fn observables(psi: &WaveFunction, params: &OscillatorParams) -> Result<ObservableSet> {
    observables_with(&Spectral::new(psi.grid()), psi, params)
}

/// Same as [`observables`] with a caller-owned transform workspace.
pub fn observables_with(
    spectral: &Spectral,
    psi: &WaveFunction,
    params: &OscillatorParams,
) -> Result<ObservableSet> {
    let norm = psi.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Unnormalized { norm });
    }
    let dx = psi.grid().dx();
    let (mut sx, mut sx2) = (0.0, 0.0);
    for (x, a) in psi.grid().points().zip(psi.amps()) {
        let w = a.norm_sqr();
        sx += w * x;
        sx2 += w * x * x;
    }
    let mean_x = sx * dx / norm;
    let mean_x2 = sx2 * dx / norm;

    let p_psi = spectral.momentum(psi.amps(), params.hbar);
    let mut sp = Complex64::new(0.0, 0.0);
    let mut sp2 = 0.0;
    for (a, pa) in psi.amps().iter().zip(&p_psi) {
        sp += a.conj() * pa;
        sp2 += pa.norm_sqr();
    }
    let mean_p = sp.re * dx / norm;
    let mean_p2 = sp2 * dx / norm;

    let var_x = (mean_x2 - mean_x * mean_x).max(0.0);
    let var_p = (mean_p2 - mean_p * mean_p).max(0.0);
    let dx_unc = var_x.sqrt();
    let dp_unc = var_p.sqrt();
    Ok(ObservableSet {
        mean_x,
        mean_p,
        var_x,
        var_p,
        dx_unc,
        dp_unc,
        product: dx_unc * dp_unc,
        norm,
        mean_x2,
        mean_p2,
    })
}

/// Location of the maximum of `|Ψ|²`, refined by a three-point parabola.
///
/// Ties go to the lowest index. Only a strict interior maximum is refined; a
/// plateau returns its first grid point. A maximum on the first or last sample
/// that rises above its interior neighbour means the packet is running off the
/// domain and is reported as an error.
pub fn peak_position(psi: &WaveFunction) -> Result<f64> {
    let density: Vec<f64> = psi.amps().iter().map(|a| a.norm_sqr()).collect();
    let n = density.len();
    let mut best = 0;
    for (j, &v) in density.iter().enumerate() {
        if v > density[best] {
            best = j;
        }
    }
    let grid = psi.grid();
    let x = grid.x(best);
    if best == 0 || best == n - 1 {
        let neighbour = if best == 0 { density[1] } else { density[n - 2] };
        if density[best] > neighbour {
            return Err(Error::PeakOnBoundary { x });
        }
        return Ok(x);
    }
    let (ym, y0, yp) = (density[best - 1], density[best], density[best + 1]);
    if !(y0 > ym && y0 > yp) {
        return Ok(x);
    }
    let offset = 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp);
    Ok(x + offset * grid.dx())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(-20.0, 20.0, 512).unwrap()
    }

    #[test]
    fn grid_spacing() {
        assert_eq!(grid().dx(), 0.078125);
        assert_eq!(Grid::new(-64.0, 64.0, 2048).unwrap().dx(), 0.0625);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(0.0, 0.0, 512).is_err());
        assert!(Grid::new(1.0, -1.0, 512).is_err());
        assert!(Grid::new(-1.0, 1.0, 500).is_err());
        assert!(Grid::new(-1.0, 1.0, 4).is_err());
    }

    #[test]
    fn params_must_be_positive() {
        assert!(OscillatorParams::new(0.0, 1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, -1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, 1.0, f64::NAN).is_err());
        assert_eq!(OscillatorParams::default().energy(0), 0.5);
    }

    #[test]
    fn ground_state_is_normalized_gaussian() {
        let g = grid();
        let phi0 = eigenstate(0, &OscillatorParams::default(), &g).unwrap();
        let center = phi0.amps()[256];
        assert_eq!(g.x(256), 0.0);
        assert!((center.re - 0.751_125_544_464_942_5).abs() < 1e-12);
        assert!((phi0.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn recurrence_matches_bulk_evaluation() {
        let all = hermite_functions(12, 1.7);
        for (n, v) in all.iter().enumerate() {
            assert!((v - hermite_function(n, 1.7)).abs() < 1e-15);
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = Grid::new(-3.0, 3.0, 64).unwrap();
        assert!(matches!(
            eigenstate(0, &OscillatorParams::default(), &g),
            Err(Error::EdgeAmplitude { .. })
        ));
    }

    #[test]
    fn orthogonality_and_parity() {
        let g = grid();
        let p = OscillatorParams::default();
        let phi0 = eigenstate(0, &p, &g).unwrap();
        let phi1 = eigenstate(1, &p, &g).unwrap();
        let phi3 = eigenstate(3, &p, &g).unwrap();
        assert!(inner_product(&phi3, &phi0).unwrap().norm() < 1e-10);
        assert!(inner_product(&phi0, &phi1).unwrap().norm() < 1e-10);
        assert!((inner_product(&phi0, &phi0).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn inner_product_rejects_mismatch() {
        let p = OscillatorParams::default();
        let a = eigenstate(0, &p, &grid()).unwrap();
        let b = eigenstate(0, &p, &Grid::new(-20.0, 20.0, 256).unwrap()).unwrap();
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn ground_state_uncertainties() {
        let p = OscillatorParams::default();
        let obs = observables(&eigenstate(0, &p, &grid()).unwrap(), &p).unwrap();
        let s = 0.5f64.sqrt();
        assert!((obs.dx_unc - s).abs() < 1e-6);
        assert!((obs.dp_unc - s).abs() < 1e-6);
        assert!((obs.product - 0.5).abs() < 1e-6);
    }

    #[test]
    fn displaced_ground_state_keeps_minimum_uncertainty() {
        let p = OscillatorParams::default();
        let psi = eigenstate_shifted(0, &p, &grid(), 2.0).unwrap();
        let obs = observables(&psi, &p).unwrap();
        assert!((obs.mean_x - 2.0).abs() < 1e-10);
        assert!((obs.product - 0.5).abs() < 1e-6);
    }

    #[test]
    fn excited_state_product() {
        let p = OscillatorParams::default();
        let obs = observables(&eigenstate(1, &p, &grid()).unwrap(), &p).unwrap();
        assert!((obs.product - 1.5).abs() < 1e-6);
    }

    #[test]
    fn non_unit_parameters_scale_moments() {
        let p = OscillatorParams::new(2.0, 3.0, 0.5).unwrap();
        let obs = observables(&eigenstate(2, &p, &grid()).unwrap(), &p).unwrap();
        // <x²> = (n+½)ħ/(mω), <p²> = (n+½)ħmω
        assert!((obs.var_x - 2.5 * 0.5 / 6.0).abs() < 1e-10);
        assert!((obs.var_p - 2.5 * 0.5 * 6.0).abs() < 1e-8);
        assert!((obs.product - 2.5 * 0.5).abs() < 1e-8);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let p = OscillatorParams::default();
        let psi = eigenstate(0, &p, &grid()).unwrap().scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(observables(&psi, &p), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn peak_of_ground_state() {
        let g = grid();
        let p = OscillatorParams::default();
        let x0 = peak_position(&eigenstate(0, &p, &g).unwrap()).unwrap();
        assert!(x0.abs() < g.dx() / 10.0);
        let x1 = peak_position(&eigenstate_shifted(0, &p, &g, 1.25).unwrap()).unwrap();
        assert!((x1 - 1.25).abs() < g.dx() / 10.0);
    }

    #[test]
    fn peak_tie_break_takes_lowest_index() {
        let g = Grid::new(-4.0, 4.0, 64).unwrap();
        let plateau = WaveFunction::from_fn(g, |x| {
            Complex64::new(if x.abs() < 1.0 { 1.0 } else { 0.0 }, 0.0)
        });
        let first = g.points().position(|x| x.abs() < 1.0).unwrap();
        assert_eq!(peak_position(&plateau).unwrap(), g.x(first));

        let flat = WaveFunction::from_fn(g, |_| Complex64::new(0.3, 0.0));
        assert_eq!(peak_position(&flat).unwrap(), g.x_min());
    }

    #[test]
    fn peak_on_edge_is_an_error() {
        let g = Grid::new(-4.0, 4.0, 64).unwrap();
        let ramp = WaveFunction::from_fn(g, |x| Complex64::new((x + 5.0).sqrt(), 0.0));
        assert!(matches!(peak_position(&ramp), Err(Error::PeakOnBoundary { .. })));
    }
}
