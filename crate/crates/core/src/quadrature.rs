//! Adaptive Gauss–Kronrod (7/15) quadrature for small vector-valued integrands.

// Nodes and weights are kept at their full tabulated precision.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 48;

/// One 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
pub fn gauss_kronrod<const N: usize>(f: &impl Fn(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    for (i, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sign in nodes {
            let v = f(center + sign * half * x);
            for c in 0..N {
                kronrod[c] += wk * v[c];
                if i % 2 == 1 {
                    gauss[c] += WG[i / 2] * v[c];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for c in 0..N {
        kronrod[c] *= half;
        gauss[c] *= half;
        let gap = (kronrod[c] - gauss[c]).abs();
        // `f64::max` would silently drop a NaN gap.
        err = if gap.is_nan() || !kronrod[c].is_finite() { f64::INFINITY } else { err.max(gap) };
    }
    (kronrod, err)
}

/// Recursive bisection until each piece's Gauss/Kronrod gap is within its share of `abs_tol`.
pub fn adaptive<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<[f64; N]> {
    if a == b {
        return Ok([0.0; N]);
    }
    let (whole, err) = gauss_kronrod(f, a, b);
    refine(f, a, b, whole, err, abs_tol, 0)
}

fn refine<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    whole: [f64; N],
    err: f64,
    tol: f64,
    depth: u32,
) -> Result<[f64; N]> {
    if !err.is_finite() {
        return Err(Error::QuadratureFailed { a, b });
    }
    let scale = whole.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if err <= tol || err <= 64.0 * f64::EPSILON * scale {
        return Ok(whole);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailed { a, b });
    }
    let mid = 0.5 * (a + b);
    let (left, el) = gauss_kronrod(f, a, mid);
    let (right, er) = gauss_kronrod(f, mid, b);
    let l = refine(f, a, mid, left, el, 0.5 * tol, depth + 1)?;
    let r = refine(f, mid, b, right, er, 0.5 * tol, depth + 1)?;
    let mut out = [0.0; N];
    for c in 0..N {
        out[c] = l[c] + r[c];
    }
    Ok(out)
}

/// Splits `[a, b]` at the interior `breakpoints` and into windows no longer than
/// `max_window`, then integrates each piece adaptively.
pub fn integrate_windows<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_window: f64,
    abs_tol: f64,
) -> Result<[f64; N]> {
    let mut total = [0.0; N];
    if a == b {
        return Ok(total);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let span = hi - lo;
    for (s, e) in windows(lo, hi, breakpoints, max_window) {
        let piece = adaptive(f, s, e, abs_tol * (e - s) / span)?;
        for c in 0..N {
            total[c] += piece[c];
        }
    }
    for v in &mut total {
        *v *= sign;
    }
    Ok(total)
}

/// Consecutive `(start, end)` pieces of `[lo, hi]` cut at breakpoints and then
/// evenly subdivided so no piece exceeds `max_window`.
pub fn windows(lo: f64, hi: f64, breakpoints: &[f64], max_window: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo];
    cuts.extend(breakpoints.iter().copied().filter(|&t| t > lo && t < hi));
    cuts.push(hi);
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        let (s, e) = (pair[0], pair[1]);
        let pieces = ((e - s) / max_window).ceil().max(1.0) as usize;
        let h = (e - s) / pieces as f64;
        for k in 0..pieces {
            let start = s + k as f64 * h;
            let end = if k + 1 == pieces { e } else { s + (k + 1) as f64 * h };
            out.push((start, end));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates degree 22 exactly.
        let (v, _) = gauss_kronrod(&|x: f64| [x.powi(10), 1.0], -1.0, 2.0);
        assert!((v[0] - (2f64.powi(11) + 1.0) / 11.0).abs() < 1e-12);
        assert!((v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate_windows(&|t: f64| [(3.0 * t).sin()], 0.0, 40.0, &[], 1.0, 1e-12).unwrap();
        let exact = (1.0 - (120.0f64).cos()) / 3.0;
        assert!((v[0] - exact).abs() < 1e-13);
    }

    #[test]
    fn kink_handled_with_breakpoint() {
        let f = |t: f64| [(t - 0.3).abs()];
        let v = integrate_windows(&f, 0.0, 1.0, &[0.3], 1.0, 1e-13).unwrap();
        assert!((v[0] - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |t: f64| [t.exp()];
        let fwd = integrate_windows(&f, 0.0, 1.0, &[], 0.5, 1e-13).unwrap()[0];
        let back = integrate_windows(&f, 1.0, 0.0, &[], 0.5, 1e-13).unwrap()[0];
        assert_eq!(fwd, -back);
    }

    #[test]
    fn divergent_integrand_fails() {
        let f = |t: f64| [1.0 / t.abs().sqrt().max(1e-300).powi(4)];
        assert!(adaptive(&f, -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn windows_cover_interval() {
        let w = windows(0.0, 10.0, &[2.5, 12.0, -1.0], 3.0);
        assert_eq!(w.first().unwrap().0, 0.0);
        assert_eq!(w.last().unwrap().1, 10.0);
        assert!(w.iter().any(|&(_, e)| e == 2.5));
        assert!(w.iter().all(|&(s, e)| e - s <= 3.0 + 1e-12));
        for pair in w.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
    }
}
