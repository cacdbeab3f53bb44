//! Variable-step, variable-order Adams–Bashforth–Moulton (PECE) integrator for
//! complex ODE systems `y' = f(t, y)`.
//!
//! Coefficients are rebuilt every step by integrating the Lagrange basis over the
//! actual (nonuniform) node history, so step changes need no restart. The order
//! ramps up from one as history accumulates. The predictor/corrector gap is the
//! local error estimate.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Five-point Gauss–Legendre rule on [0, 1]; exact for the degree ≤ 8 basis polynomials used here.
const GL_NODES: [f64; 5] = [
    0.046_910_077_030_668_0,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// `∫₀¹ ℓ_j(u) du` for the Lagrange basis on `nodes` (in units of the step).
fn basis_integrals(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &uj)| {
            GL_NODES
                .iter()
                .zip(&GL_WEIGHTS)
                .map(|(&u, &w)| {
                    let l: f64 = nodes
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != j)
                        .map(|(_, &ui)| (u - ui) / (uj - ui))
                        .product();
                    w * l
                })
                .sum()
        })
        .collect()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct AdamsConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_order: usize,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for AdamsConfig {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-14, max_order: 6, initial_step: 1e-5, min_step: 1e-12 }
    }
}

pub struct Adams<F> {
    rhs: F,
    config: AdamsConfig,
    t: f64,
    y: Vec<Complex64>,
    h: f64,
    /// `(t_j, f_j)`, most recent first.
    history: VecDeque<(f64, Vec<Complex64>)>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<F> Adams<F>
where
    F: FnMut(f64, &[Complex64]) -> Vec<Complex64>,
{
    pub fn new(mut rhs: F, t0: f64, y0: Vec<Complex64>, config: AdamsConfig) -> Self {
        let f0 = rhs(t0, &y0);
        let mut history = VecDeque::with_capacity(config.max_order + 1);
        history.push_front((t0, f0));
        let h = config.initial_step;
        Self { rhs, config, t: t0, y: y0, h, history, accepted: 0, rejected: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[Complex64] {
        &self.y
    }

    /// Integrates until `t == t_end` exactly.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            let remaining = t_end - self.t;
            let clipped = self.h >= remaining;
            let h = self.h.min(remaining);
            let (taken, factor) = self.try_step(h)?;
            self.accepted += 1;
            if clipped && taken == h {
                self.t = t_end;
                // A clipped final step says nothing about the natural step size.
                self.h = self.h.min(taken * factor.max(1.0));
            } else {
                self.h = taken * factor;
            }
        }
        Ok(())
    }

    /// Takes one step of size at most `h`, shrinking it on rejection; returns the
    /// step actually taken and the factor suggested for the next one.
    fn try_step(&mut self, mut h: f64) -> Result<(f64, f64)> {
        loop {
            let order = self.history.len().min(self.config.max_order);
            let t_next = self.t + h;

            let pred_nodes: Vec<f64> =
                self.history.iter().take(order).map(|(tj, _)| (tj - self.t) / h).collect();
            let beta = basis_integrals(&pred_nodes);
            let mut y_pred = self.y.clone();
            for (b, (_, fj)) in beta.iter().zip(self.history.iter()) {
                for (yp, v) in y_pred.iter_mut().zip(fj) {
                    *yp += h * b * v;
                }
            }
            let f_pred = (self.rhs)(t_next, &y_pred);

            let mut corr_nodes = vec![1.0];
            corr_nodes.extend_from_slice(&pred_nodes);
            let gamma = basis_integrals(&corr_nodes);
            let mut y_corr = self.y.clone();
            for (yc, v) in y_corr.iter_mut().zip(&f_pred) {
                *yc += h * gamma[0] * v;
            }
            for (g, (_, fj)) in gamma[1..].iter().zip(self.history.iter()) {
                for (yc, v) in y_corr.iter_mut().zip(fj) {
                    *yc += h * g * v;
                }
            }

            let diff: Vec<Complex64> = y_corr.iter().zip(&y_pred).map(|(a, b)| a - b).collect();
            let scale = self.config.atol + self.config.rtol * l2(&y_corr);
            let err = l2(&diff) / scale;
            let exponent = 1.0 / (order as f64 + 1.0);
            let factor = if err == 0.0 { 2.0 } else { (0.9 * err.powf(-exponent)).clamp(0.2, 2.0) };

            if err.is_finite() && err <= 1.0 {
                let f_corr = (self.rhs)(t_next, &y_corr);
                self.t = t_next;
                self.y = y_corr;
                self.history.push_front((t_next, f_corr));
                self.history.truncate(self.config.max_order);
                return Ok((h, factor));
            }
            self.rejected += 1;
            h *= if err.is_finite() { factor.min(0.5) } else { 0.2 };
            if h < self.config.min_step {
                return Err(Error::PropagationAborted {
                    t: self.t,
                    reason: format!("adaptive step fell below {:.1e}", self.config.min_step),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_integrals_reproduce_uniform_adams_bashforth() {
        // Nodes 0, −1, −2, −3 give the classic AB4 weights 55/24, −59/24, 37/24, −9/24.
        let w = basis_integrals(&[0.0, -1.0, -2.0, -3.0]);
        let expected = [55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
        // Adams–Moulton 3: nodes 1, 0, −1 → 5/12, 8/12, −1/12.
        let w = basis_integrals(&[1.0, 0.0, -1.0]);
        for (a, b) in w.iter().zip([5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rotating_phase_is_tracked() {
        // y' = −iωy, y(0) = 1 → e^{−iωt}.
        let omega = 3.0;
        let rhs = |_t: f64, y: &[Complex64]| y.iter().map(|v| Complex64::new(0.0, -omega) * v).collect();
        let mut adams = Adams::new(rhs, 0.0, vec![Complex64::new(1.0, 0.0)], AdamsConfig::default());
        adams.advance_to(10.0).unwrap();
        let exact = Complex64::from_polar(1.0, -omega * 10.0);
        assert!((adams.state()[0] - exact).norm() < 1e-7);
        assert_eq!(adams.t(), 10.0);
    }

    #[test]
    fn time_dependent_forcing() {
        // y' = cos t → y = sin t.
        let rhs = |t: f64, _y: &[Complex64]| vec![Complex64::new(t.cos(), 0.0)];
        let mut adams = Adams::new(rhs, 0.0, vec![Complex64::new(0.0, 0.0)], AdamsConfig::default());
        for k in 1..=20 {
            let t = 0.5 * k as f64;
            adams.advance_to(t).unwrap();
            assert!((adams.state()[0].re - t.sin()).abs() < 1e-8);
        }
    }
}
