//! Operator polynomials of degree ≤ 2 in `x` and `p` with `[x, p] = iħ`.
//!
//! Quadratic cross terms are kept in the Weyl-symmetric form `S = (xp + px)/2`,
//! so `x·p = S + iħ/2` and `p·x = S − iħ/2`. An operator is Hermitian exactly
//! when all six coefficients are real.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{OscillatorParams, WaveFunction};
use crate::pulse::{fourier_weights, Kinematics, Pulse};
use crate::spectral::Spectral;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `c1 + cx·x + cp·p + cxx·x² + cpp·p² + cxp·(xp + px)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseSpacePolynomial {
    pub c1: Complex64,
    pub cx: Complex64,
    pub cp: Complex64,
    pub cxx: Complex64,
    pub cpp: Complex64,
    pub cxp: Complex64,
}

impl PhaseSpacePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: Complex64) -> Self {
        Self { c1: c, ..Self::default() }
    }

    pub fn identity() -> Self {
        Self::scalar(re(1.0))
    }

    pub fn x() -> Self {
        Self { cx: re(1.0), ..Self::default() }
    }

    pub fn p() -> Self {
        Self { cp: re(1.0), ..Self::default() }
    }

    /// Builds a Hermitian polynomial from real coefficients `[c1, cx, cp, cxx, cpp, cxp]`.
    pub fn real(coeffs: [f64; 6]) -> Self {
        Self::from_array(coeffs.map(re))
    }

    pub fn from_array(c: [Complex64; 6]) -> Self {
        Self { c1: c[0], cx: c[1], cp: c[2], cxx: c[3], cpp: c[4], cxp: c[5] }
    }

    pub fn to_array(&self) -> [Complex64; 6] {
        [self.c1, self.cx, self.cp, self.cxx, self.cpp, self.cxp]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_array(self.to_array().map(f))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c * s)
    }

    pub fn degree(&self) -> u32 {
        if self.cxx != ZERO || self.cpp != ZERO || self.cxp != ZERO {
            2
        } else if self.cx != ZERO || self.cp != ZERO {
            1
        } else {
            0
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.to_array().iter().all(|c| c.im == 0.0)
    }

    /// The quadratic part is identically zero.
    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Operator product in the canonical basis. At least one factor must be of
    /// degree ≤ 1, and a degree-2 factor may only meet a scalar.
    pub fn multiply(&self, other: &Self, hbar: f64) -> Result<Self> {
        let (da, db) = (self.degree(), other.degree());
        if da == 0 {
            return Ok(other.scale(self.c1));
        }
        if db == 0 {
            return Ok(self.scale(other.c1));
        }
        if da + db > 2 {
            return Err(Error::DegreeOverflow);
        }
        let (a, b) = (self, other);
        let half_ih = Complex64::new(0.0, 0.5 * hbar);
        Ok(Self {
            c1: a.c1 * b.c1 + half_ih * (a.cx * b.cp - a.cp * b.cx),
            cx: a.c1 * b.cx + a.cx * b.c1,
            cp: a.c1 * b.cp + a.cp * b.c1,
            cxx: a.cx * b.cx,
            cpp: a.cp * b.cp,
            cxp: a.cx * b.cp + a.cp * b.cx,
        })
    }

    pub fn commutator(&self, other: &Self, hbar: f64) -> Result<Self> {
        Ok(self.multiply(other, hbar)? - other.multiply(self, hbar)?)
    }

    /// `self − other`, with any coefficient that cancels down to the rounding
    /// floor of its two operands set to exactly zero.
    pub fn cancel(&self, other: &Self) -> Self {
        let a = self.to_array();
        let b = other.to_array();
        let mut out = [ZERO; 6];
        for k in 0..6 {
            let diff = a[k] - b[k];
            let floor = 8.0 * f64::EPSILON * (a[k].norm() + b[k].norm());
            out[k] = Complex64::new(
                if diff.re.abs() <= floor { 0.0 } else { diff.re },
                if diff.im.abs() <= floor { 0.0 } else { diff.im },
            );
        }
        Self::from_array(out)
    }
}

impl Add for PhaseSpacePolynomial {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] + b[k]))
    }
}

impl Sub for PhaseSpacePolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|k| a[k] - b[k]))
    }
}

impl Neg for PhaseSpacePolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl Mul<f64> for PhaseSpacePolynomial {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(re(s))
    }
}

/// `x_t = cos ωt·x − (sin ωt/mω)·p + fs/mω`, `p_t = mω sin ωt·x + cos ωt·p − fc`.
pub fn heisenberg_from_weights(
    params: &OscillatorParams,
    t: f64,
    fs: f64,
    fc: f64,
) -> (PhaseSpacePolynomial, PhaseSpacePolynomial) {
    let (m, w) = (params.m, params.omega);
    let (s, c) = (w * t).sin_cos();
    let x_t = PhaseSpacePolynomial::real([fs / (m * w), c, -s / (m * w), 0.0, 0.0, 0.0]);
    let p_t = PhaseSpacePolynomial::real([-fc, m * w * s, c, 0.0, 0.0, 0.0]);
    (x_t, p_t)
}

/// `U x U⁻¹` and `U p U⁻¹` for the driven oscillator.
pub fn heisenberg_xt_pt(
    pulse: &Pulse,
    params: &OscillatorParams,
    t: f64,
) -> Result<(PhaseSpacePolynomial, PhaseSpacePolynomial)> {
    let (fs, fc) = fourier_weights(pulse, params, t)?;
    Ok(heisenberg_from_weights(params, t, fs, fc))
}

fn sho(params: &OscillatorParams) -> PhaseSpacePolynomial {
    let (m, w) = (params.m, params.omega);
    PhaseSpacePolynomial::real([0.0, 0.0, 0.0, 0.5 * m * w * w, 0.5 / m, 0.0])
}

/// `H(t) = p²/2m + ½mω²x² − F(t)·x`.
pub fn build_hamiltonian(pulse: &Pulse, params: &OscillatorParams, t: f64) -> PhaseSpacePolynomial {
    PhaseSpacePolynomial { cx: re(-pulse.force(t)), ..sho(params) }
}

/// `H̃ = p_t²/2m + ½mω² x_t²` built by squaring the Heisenberg operators.
pub fn h_tilde_from_heisenberg(
    params: &OscillatorParams,
    x_t: &PhaseSpacePolynomial,
    p_t: &PhaseSpacePolynomial,
) -> Result<PhaseSpacePolynomial> {
    let (m, w, hbar) = (params.m, params.omega, params.hbar);
    let pp = p_t.multiply(p_t, hbar)?;
    let xx = x_t.multiply(x_t, hbar)?;
    Ok(pp * (0.5 / m) + xx * (0.5 * m * w * w))
}

/// The state-preserving operator `H̃(t)`.
pub fn build_h_tilde(pulse: &Pulse, params: &OscillatorParams, t: f64) -> Result<PhaseSpacePolynomial> {
    let (x_t, p_t) = heisenberg_xt_pt(pulse, params, t)?;
    h_tilde_from_heisenberg(params, &x_t, &p_t)
}

/// `H̃ = p²/2m + ½mω²x² − ḋ·p + (m·d̈ − F)·x + (fc² + fs²)/2m` in terms of the kinematics.
pub fn h_tilde_closed_form(pulse: &Pulse, params: &OscillatorParams, kin: &Kinematics) -> PhaseSpacePolynomial {
    let m = params.m;
    let base = sho(params);
    PhaseSpacePolynomial {
        c1: re((kin.fc * kin.fc + kin.fs * kin.fs) / (2.0 * m)),
        cx: re(m * kin.d_ddot - pulse.force(kin.t)),
        cp: re(-kin.d_dot),
        ..base
    }
}

/// `H_c = ḋ·p − m·d̈·x − (fc² + fs²)/2m`.
pub fn h_c_closed_form(params: &OscillatorParams, kin: &Kinematics) -> PhaseSpacePolynomial {
    let m = params.m;
    PhaseSpacePolynomial::real([
        -(kin.fc * kin.fc + kin.fs * kin.fs) / (2.0 * m),
        -m * kin.d_ddot,
        kin.d_dot,
        0.0,
        0.0,
        0.0,
    ])
}

/// `H(t) = H̃(t) + H_c(t)` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub t: f64,
    pub hamiltonian: PhaseSpacePolynomial,
    pub h_tilde: PhaseSpacePolynomial,
    pub h_c: PhaseSpacePolynomial,
    pub kinematics: Kinematics,
}

/// Splits `H(t)` into the state-preserving `H̃(t)` and the state-changing remainder `H_c(t)`.
pub fn decompose(pulse: &Pulse, params: &OscillatorParams, t: f64) -> Result<Decomposition> {
    let (fs, fc) = fourier_weights(pulse, params, t)?;
    let kinematics = Kinematics::from_weights(pulse, params, t, fs, fc);
    let (x_t, p_t) = heisenberg_from_weights(params, t, fs, fc);
    let h_tilde = h_tilde_from_heisenberg(params, &x_t, &p_t)?;
    let hamiltonian = build_hamiltonian(pulse, params, t);
    let h_c = hamiltonian.cancel(&h_tilde);
    Ok(Decomposition { t, hamiltonian, h_tilde, h_c, kinematics })
}

/// Acts with a polynomial operator on a grid state; `p` acts spectrally.
pub fn apply_operator(
    a: &PhaseSpacePolynomial,
    psi: &WaveFunction,
    params: &OscillatorParams,
) -> Result<WaveFunction> {
    apply_operator_with(&Spectral::new(psi.grid()), a, psi, params)
}

pub fn apply_operator_with(
    spectral: &Spectral,
    a: &PhaseSpacePolynomial,
    psi: &WaveFunction,
    params: &OscillatorParams,
) -> Result<WaveFunction> {
    psi.check_edges()?;
    let hbar = params.hbar;
    let grid = *psi.grid();
    let amps = psi.amps();
    let xs: Vec<f64> = grid.points().collect();
    let mut out: Vec<Complex64> = amps
        .iter()
        .zip(&xs)
        .map(|(v, &x)| (a.c1 + a.cx * x + a.cxx * x * x) * v)
        .collect();
    if a.cp != ZERO || a.cxp != ZERO {
        let p_psi = spectral.momentum(amps, hbar);
        for (o, pv) in out.iter_mut().zip(&p_psi) {
            *o += a.cp * pv;
        }
        if a.cxp != ZERO {
            let x_psi: Vec<Complex64> = amps.iter().zip(&xs).map(|(v, &x)| v * x).collect();
            let p_x_psi = spectral.momentum(&x_psi, hbar);
            for ((o, pv), (pxv, &x)) in out.iter_mut().zip(&p_psi).zip(p_x_psi.iter().zip(&xs)) {
                *o += a.cxp * 0.5 * (x * pv + pxv);
            }
        }
    }
    if a.cpp != ZERO {
        let pp = spectral.momentum_squared(amps, hbar);
        for (o, v) in out.iter_mut().zip(&pp) {
            *o += a.cpp * v;
        }
    }
    WaveFunction::new(grid, out)
}
