//! Dense-matrix construction of `U(t, 0)` as a time-ordered product of exact
//! step exponentials, used to extract `U x U⁻¹` and `U p U⁻¹` independently of
//! the closed-form Heisenberg operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::PhaseSpacePolynomial;
use crate::error::{Error, Result};
use crate::oscillator::{eigenstate, Grid, OscillatorParams};
use crate::pulse::Pulse;

/// Largest grid the dense oracle accepts.
pub const MAX_ORACLE_POINTS: usize = 128;

/// Fit residual above which the oracle refuses to report coefficients.
pub const FIT_LIMIT: f64 = 1e-3;

/// Number of oscillator eigenstates used as probe vectors for the fit.
const PROBES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleFit {
    pub x_t: PhaseSpacePolynomial,
    pub p_t: PhaseSpacePolynomial,
    /// Relative least-squares residual, the larger of the two fits.
    pub residual: f64,
}

/// Dense `x`, `p` and `p²` on a Fourier grid.
struct GridOperators {
    x: Vec<f64>,
    p: DMatrix<Complex64>,
    p2: DMatrix<f64>,
}

impl GridOperators {
    fn new(grid: &Grid, hbar: f64) -> Self {
        let n = grid.n_points();
        let length = grid.x_max() - grid.x_min();
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let signed = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * std::f64::consts::PI * signed / length
            })
            .collect();
        let x: Vec<f64> = grid.points().collect();
        let nf = n as f64;
        let p = DMatrix::from_fn(n, n, |i, j| {
            let delta = x[i] - x[j];
            k.iter().map(|&kk| hbar * kk * Complex64::from_polar(1.0, kk * delta)).sum::<Complex64>() / nf
        });
        let p2 = DMatrix::from_fn(n, n, |i, j| {
            let delta = x[i] - x[j];
            k.iter().map(|&kk| (hbar * kk).powi(2) * (kk * delta).cos()).sum::<f64>() / nf
        });
        Self { x, p, p2 }
    }

    fn hamiltonian(&self, params: &OscillatorParams, force: f64) -> DMatrix<f64> {
        let mut h = &self.p2 * (0.5 / params.m);
        let k = 0.5 * params.m * params.omega * params.omega;
        for (i, &x) in self.x.iter().enumerate() {
            h[(i, i)] += k * x * x - force * x;
        }
        h
    }
}

/// Real and imaginary parts of a complex matrix, so the per-step products stay real.
struct SplitMatrix {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl SplitMatrix {
    fn identity(n: usize) -> Self {
        Self { re: DMatrix::identity(n, n), im: DMatrix::zeros(n, n) }
    }

    /// `self ← V·diag(e^{−iλΔt/ħ})·Vᵀ·self`.
    fn apply_step(&mut self, eig: &SymmetricEigen<f64, nalgebra::Dyn>, tau: f64) {
        let v = &eig.eigenvectors;
        let vt = v.transpose();
        let mut wr = &vt * &self.re;
        let mut wi = &vt * &self.im;
        for (row, &lambda) in eig.eigenvalues.iter().enumerate() {
            let (s, c) = (-lambda * tau).sin_cos();
            for col in 0..wr.ncols() {
                let (a, b) = (wr[(row, col)], wi[(row, col)]);
                wr[(row, col)] = c * a - s * b;
                wi[(row, col)] = s * a + c * b;
            }
        }
        self.re = v * wr;
        self.im = v * wi;
    }

    fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.re.nrows(), self.re.ncols(), |i, j| {
            Complex64::new(self.re[(i, j)], self.im[(i, j)])
        })
    }
}

/// Forms `U(t, 0) = Π_{i=N−1..0} exp(−(i/ħ) H(t_i) Δt)` with `t_i = iΔt`, latest
/// factor leftmost, on a small grid.
pub fn evolution_operator(
    pulse: &Pulse,
    params: &OscillatorParams,
    grid: &Grid,
    t: f64,
    n_steps: usize,
) -> Result<DMatrix<Complex64>> {
    let n = grid.n_points();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::InvalidGrid(format!(
            "dense oracle limited to {MAX_ORACLE_POINTS} points, got {n}"
        )));
    }
    let ops = GridOperators::new(grid, params.hbar);
    let mut u = SplitMatrix::identity(n);
    if t == 0.0 || n_steps == 0 {
        return Ok(u.to_complex());
    }
    let dt = t / n_steps as f64;
    let tau = dt / params.hbar;
    let mut cached: Option<(f64, SymmetricEigen<f64, nalgebra::Dyn>)> = None;
    for i in 0..n_steps {
        let force = pulse.force(i as f64 * dt);
        let reuse = matches!(&cached, Some((f, _)) if *f == force);
        if !reuse {
            cached = Some((force, SymmetricEigen::new(ops.hamiltonian(params, force))));
        }
        let (_, eig) = cached.as_ref().expect("eigendecomposition cached above");
        u.apply_step(eig, tau);
    }
    Ok(u.to_complex())
}

/// Extracts `x_t`, `p_t` from the dense evolution operator by a least-squares fit
/// in the basis `{1, x, p}`, restricted to the central half of the grid.
pub fn matrix_oracle_heisenberg(
    pulse: &Pulse,
    params: &OscillatorParams,
    grid: &Grid,
    t: f64,
    n_steps: usize,
) -> Result<OracleFit> {
    if t == 0.0 {
        return Ok(OracleFit {
            x_t: PhaseSpacePolynomial::x(),
            p_t: PhaseSpacePolynomial::p(),
            residual: 0.0,
        });
    }
    let u = evolution_operator(pulse, params, grid, t, n_steps)?;
    let ops = GridOperators::new(grid, params.hbar);
    let n = grid.n_points();
    let x_mat = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        ops.x.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let u_dag = u.adjoint();
    let xt_mat = &u * &x_mat * &u_dag;
    let pt_mat = &u * &ops.p * &u_dag;

    let lo = n / 4;
    let hi = n - n / 4;
    let probes: Vec<DVector<Complex64>> = (0..PROBES)
        .map(|k| eigenstate(k, params, grid).map(|wf| DVector::from_vec(wf.into_amps())))
        .collect::<Result<_>>()?;

    let rows = probes.len() * (hi - lo);
    let mut design = DMatrix::<Complex64>::zeros(rows, 3);
    let mut rhs_x = DVector::<Complex64>::zeros(rows);
    let mut rhs_p = DVector::<Complex64>::zeros(rows);
    for (b, phi) in probes.iter().enumerate() {
        let x_phi = &x_mat * phi;
        let p_phi = &ops.p * phi;
        let yx = &xt_mat * phi;
        let yp = &pt_mat * phi;
        for (r, i) in (lo..hi).enumerate() {
            let row = b * (hi - lo) + r;
            design[(row, 0)] = phi[i];
            design[(row, 1)] = x_phi[i];
            design[(row, 2)] = p_phi[i];
            rhs_x[row] = yx[i];
            rhs_p[row] = yp[i];
        }
    }
    let (cx, rx) = least_squares(&design, &rhs_x)?;
    let (cp, rp) = least_squares(&design, &rhs_p)?;
    let residual = rx.max(rp);
    if !(residual <= FIT_LIMIT) {
        return Err(Error::OracleFit { residual, limit: FIT_LIMIT });
    }
    let as_poly = |c: &DVector<Complex64>| PhaseSpacePolynomial {
        c1: c[0],
        cx: c[1],
        cp: c[2],
        ..PhaseSpacePolynomial::zero()
    };
    Ok(OracleFit { x_t: as_poly(&cx), p_t: as_poly(&cp), residual })
}

fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(b, 1e-13)
        .map_err(|_| Error::OracleFit { residual: f64::NAN, limit: FIT_LIMIT })?;
    let fitted = a * &coeffs;
    let residual = (b - fitted).norm() / b.norm().max(f64::MIN_POSITIVE);
    Ok((coeffs, residual))
}
