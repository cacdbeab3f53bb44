//! Fourier-grid machinery: the discrete momentum operator and plane-wave shifts.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::oscillator::Grid;

/// Forward/inverse transforms plus the signed wavenumbers of a grid.
///
/// Wavenumbers are `k_j = 2π·j̃/L` with `j̃` running `0, 1, …, N/2−1, −N/2, …, −1`.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let length = grid.x_max() - grid.x_min();
        let k = (0..n)
            .map(|j| {
                let signed = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * signed / length
            })
            .collect();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            k,
        }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / buf.len() as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Multiplies in Fourier space by `symbol(k)`.
    pub fn apply_symbol(&self, amps: &[Complex64], symbol: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut buf = amps.to_vec();
        self.forward(&mut buf);
        for (v, &k) in buf.iter_mut().zip(&self.k) {
            *v *= symbol(k);
        }
        self.inverse(&mut buf);
        buf
    }

    /// `p ψ = −iħ ∂ψ/∂x`.
    pub fn momentum(&self, amps: &[Complex64], hbar: f64) -> Vec<Complex64> {
        self.apply_symbol(amps, |k| Complex64::new(hbar * k, 0.0))
    }

    /// `p² ψ`.
    pub fn momentum_squared(&self, amps: &[Complex64], hbar: f64) -> Vec<Complex64> {
        self.apply_symbol(amps, |k| Complex64::new((hbar * k).powi(2), 0.0))
    }

    /// `ψ(x) → ψ(x − shift)`, exact for band-limited periodic data.
    pub fn translate(&self, amps: &[Complex64], shift: f64) -> Vec<Complex64> {
        self.apply_symbol(amps, |k| Complex64::from_polar(1.0, -k * shift))
    }
}
