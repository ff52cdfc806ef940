//! Exact first eigenpair on an interval via the generalized sine `sin_p`.
//!
//! With `π_p = 2 (p-1)^{1/p} ∫_0^1 (1 - s^p)^{-1/p} ds`, the first
//! eigenpair of `(a, b)` is `λ_p = (π_p / (b - a))^p` and
//! `e_p(x) = (p-1)^{-1/p} sin_p(π_p (x - a) / (b - a))`, where on
//! `[0, π_p/2]` the function `sin_p` inverts
//! `y ↦ (p-1)^{1/p} ∫_0^{y/(p-1)^{1/p}} (1 - s^p)^{-1/p} ds`.
//!
//! The integrable singularity at `s = 1` is removed by `s = 1 - t^m`,
//! `m = p/(p-1)`, which turns the integrand into the bounded function
//! `m (x / (1 - (1-x)^p))^{1/p}` with `x = t^m`. The transformed integral
//! is evaluated by adaptive Simpson quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUAD_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain("interval needs a < b"));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// `∫_y^1 (1 - s^p)^{-1/p} ds` for `0 <= y <= 1`.
fn arc_tail(p: f64, y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let m = p / (p - 1.0);
    let upper = (1.0 - y).powf(1.0 / m);
    let integrand = |t: f64| {
        let x = t.powf(m);
        if x == 0.0 {
            return m * (1.0 / p).powf(1.0 / p);
        }
        // 1 - (1 - x)^p without cancellation
        let d = -(p * (-x).ln_1p()).exp_m1();
        m * (x / d).powf(1.0 / p)
    };
    adaptive_simpson(&integrand, 0.0, upper, QUAD_TOL)
}

/// `∫_0^y (1 - s^p)^{-1/p} ds`.
fn arc(p: f64, y: f64) -> f64 {
    arc_tail(p, 0.0) - arc_tail(p, y)
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("p must be > 1"))
    }
}

/// `π_p = 2 (p-1)^{1/p} ∫_0^1 (1 - s^p)^{-1/p} ds`.
pub fn pi_p(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 * (p - 1.0).powf(1.0 / p) * arc_tail(p, 0.0))
}

/// `λ_p = (π_p / (b - a))^p`.
pub fn lambda_1d(p: f64, dom: &Interval) -> Result<f64> {
    Ok((pi_p(p)? / dom.length()).powf(p))
}

/// Solves `∫_0^y (1 - s^p)^{-1/p} ds = target` for `y ∈ [0, 1]`.
fn invert_arc(p: f64, target: f64, total: f64) -> Result<f64> {
    if target <= 0.0 {
        return Ok(0.0);
    }
    if target >= total {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut y = (target / total).clamp(0.0, 1.0);
    for _ in 0..200 {
        let f = arc(p, y) - target;
        if f == 0.0 {
            return Ok(y);
        }
        if f > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let slope = (1.0 - y.powf(p)).powf(-1.0 / p);
        let newton = y - f / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - y).abs() <= 1e-15 || hi - lo <= 1e-15 {
            return Ok(next);
        }
        y = next;
    }
    Err(Error::domain("sin_p inversion did not bracket the root"))
}

/// Evaluates `sin_p(x)` for `x ∈ [0, π_p]`; amplitude `(p-1)^{1/p}`.
pub fn sin_p(p: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    let total = arc_tail(p, 0.0);
    let scale = (p - 1.0).powf(1.0 / p);
    let pi = 2.0 * scale * total;
    if !(0.0..=pi).contains(&x) {
        return Err(Error::domain("sin_p is evaluated on [0, pi_p] only"));
    }
    let half = 0.5 * pi;
    let x = if x > half { pi - x } else { x };
    Ok(scale * invert_arc(p, x / scale, total)?)
}

/// `sin_p` sampled at `n` equally spaced points of `[0, π_p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinProfile {
    pub p: f64,
    pub pi_p: f64,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl SinProfile {
    /// `e_p` on `[0, π_p]`: the profile divided by its amplitude `(p-1)^{1/p}`.
    pub fn normalized(&self) -> Vec<f64> {
        let scale = (self.p - 1.0).powf(-1.0 / self.p);
        self.values.iter().map(|v| v * scale).collect()
    }
}

pub fn sin_p_profile(p: f64, n_samples: usize) -> Result<SinProfile> {
    check_p(p)?;
    if n_samples < 3 {
        return Err(Error::domain("sin_p profile needs at least 3 samples"));
    }
    let total = arc_tail(p, 0.0);
    let scale = (p - 1.0).powf(1.0 / p);
    let pi = 2.0 * scale * total;
    let x: Vec<f64> = (0..n_samples)
        .map(|k| pi * k as f64 / (n_samples - 1) as f64)
        .collect();
    let mut values = vec![0.0; n_samples];
    // Fill the first half and mirror, so the symmetry holds exactly.
    for k in 0..n_samples.div_ceil(2) {
        values[k] = scale * invert_arc(p, x[k] / scale, total)?;
        values[n_samples - 1 - k] = values[k];
    }
    if n_samples % 2 == 1 {
        values[n_samples / 2] = scale;
    }
    Ok(SinProfile {
        p,
        pi_p: pi,
        x,
        values,
    })
}

/// Normalized first eigenfunction `e_p(x)` of `(a, b)`, with `max e_p = 1`.
pub fn eigenfunction_1d(p: f64, dom: &Interval, x: f64) -> Result<f64> {
    if !(dom.a..=dom.b).contains(&x) {
        return Err(Error::domain("x lies outside the interval"));
    }
    let pi = pi_p(p)?;
    let t = (pi * (x - dom.a) / dom.length()).clamp(0.0, pi);
    Ok(sin_p(p, t)? * (p - 1.0).powf(-1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Beta-function identity, used only as an independent cross-check.
    fn pi_p_beta(p: f64) -> f64 {
        2.0 * PI * (p - 1.0).powf(1.0 / p) / (p * (PI / p).sin())
    }

    #[test]
    fn pi_2_is_pi() {
        assert!((pi_p(2.0).unwrap() - PI).abs() < 1e-10);
    }

    #[test]
    fn pi_p_matches_beta_identity() {
        for p in [1.05, 1.2, 1.5, 1.75, 2.5, 3.0, 4.0, 7.0, 10.0, 100.0] {
            let q = pi_p(p).unwrap();
            let b = pi_p_beta(p);
            assert!(((q - b) / b).abs() < 1e-9, "p={p}: {q} vs {b}");
        }
    }

    #[test]
    fn lambda_1d_cases() {
        let l = lambda_1d(2.0, &Interval::unit()).unwrap();
        assert!((l - PI * PI).abs() < 1e-9);
        let l2 = lambda_1d(2.0, &Interval::new(0.0, 2.0).unwrap()).unwrap();
        assert!((l2 - PI * PI / 4.0).abs() < 1e-9);
        let p3 = pi_p_beta(3.0);
        let l3 = lambda_1d(3.0, &Interval::unit()).unwrap();
        assert!((l3 - p3.powi(3)).abs() < 1e-8 * l3);
    }

    #[test]
    fn lambda_1d_length_scaling() {
        for p in [1.3, 2.0, 3.7] {
            let base = lambda_1d(p, &Interval::unit()).unwrap();
            for len in [0.25, 2.0, 3.5] {
                let l = lambda_1d(p, &Interval::new(-1.0, -1.0 + len).unwrap()).unwrap();
                assert!((l - base / len.powf(p)).abs() < 1e-12 * base / len.powf(p));
            }
        }
    }

    #[test]
    fn sin_2_is_sine() {
        let prof = sin_p_profile(2.0, 101).unwrap();
        for (x, v) in prof.x.iter().zip(&prof.values) {
            assert!((v - x.sin()).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn profile_symmetric_and_increasing() {
        for p in [1.2, 1.5, 3.0, 6.0] {
            let prof = sin_p_profile(p, 61).unwrap();
            let n = prof.values.len();
            for k in 0..n {
                assert_eq!(prof.values[k], prof.values[n - 1 - k]);
            }
            for k in 0..n / 2 {
                assert!(prof.values[k + 1] > prof.values[k], "p={p} k={k}");
            }
            let max = prof.values.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(max, prof.values[n / 2]);
            assert!((max - (p - 1.0).powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn pi_p_decreases_towards_two_for_large_p() {
        // trend only
        let vals: Vec<f64> = [2.0, 4.0, 10.0, 100.0]
            .iter()
            .map(|&p| pi_p(p).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
        assert!(vals[3] > 2.0 && vals[3] < 2.1);
    }

    #[test]
    fn eigenfunction_1d_solves_ode_by_finite_differences() {
        // -(|u'|^{p-2} u')' = λ u^{p-1} checked at interior points
        let p = 3.0;
        let dom = Interval::unit();
        let lam = lambda_1d(p, &dom).unwrap();
        let h = 1e-3;
        let flux = |x: f64| {
            let d = (eigenfunction_1d(p, &dom, x + 0.5 * h).unwrap()
                - eigenfunction_1d(p, &dom, x - 0.5 * h).unwrap())
                / h;
            d.abs().powf(p - 2.0) * d
        };
        for x in [0.2, 0.3, 0.4] {
            let lhs = -(flux(x + 0.5 * h) - flux(x - 0.5 * h)) / h;
            let rhs = lam * eigenfunction_1d(p, &dom, x).unwrap().powf(p - 1.0);
            assert!((lhs - rhs).abs() < 1e-3 * rhs, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(pi_p(1.0).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(sin_p_profile(2.0, 2).is_err());
        assert!(sin_p(2.0, 4.0).is_err());
    }
}
