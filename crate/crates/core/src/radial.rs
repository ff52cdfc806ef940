//! Balls and the symmetric interval: closed forms and the explicit radial
//! inverse iteration.
//!
//! For a radial source `f` the Dirichlet problem `-Δ_p u = f` on `B_R` has
//! the solution
//!
//! ```text
//! u(r) = ∫_r^R ( ∫_0^θ (s/θ)^{N-1} f(s) ds )^{1/(p-1)} dθ
//! ```
//!
//! The inner cumulative integral is a composite trapezoid sweep; the outer
//! integral is composite Simpson (plus a 3/8 panel or a trapezoid panel for
//! grid points with an odd number of panels to the boundary). Every weight
//! is positive, so the discrete operator preserves order like the
//! continuous one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EigenpairEstimate, IterationTrace, StepRecord};
use crate::field::{check_radial_grid, Field, RadialFunction, Sampled};
use crate::norms::{radial_power_integral, sup_norm};
use crate::params::ProblemParams;

pub const DEFAULT_GRID_POINTS: usize = 101;
pub const DEFAULT_OVERFLOW_CAP: f64 = 1e300;

/// Entries of a source this far below zero are rounding noise and clamp to 0.
const NEGATIVE_SOURCE_SLACK: f64 = 1e-14;

/// Ball `B_R ⊂ R^N`; `N = 1` is the interval `(-R, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallDomain {
    dim: usize,
    radius: f64,
}

impl BallDomain {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension N must be >= 1"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("radius R must be > 0"));
        }
        Ok(Self { dim, radius })
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0)
    }

    /// The interval `(0, length)`, represented by its half `[0, length/2]`.
    pub fn interval(length: f64) -> Result<Self> {
        Self::new(1, 0.5 * length)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOptions {
    /// Odd number of grid points on `[0, R]`.
    pub n_points: usize,
    /// Abort when an iterate's sup-norm exceeds this value.
    pub overflow_cap: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_GRID_POINTS,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
        }
    }
}

impl RadialOptions {
    pub fn with_points(n_points: usize) -> Self {
        Self {
            n_points,
            ..Self::default()
        }
    }
}

/// Closed-form torsion function
/// `((p-1)/(p N^{1/(p-1)})) (R^{p/(p-1)} - r^{p/(p-1)})`.
pub fn torsion_closed_form(dom: &BallDomain, p: f64, n_points: usize) -> Result<RadialFunction> {
    let n = dom.dim as f64;
    let a = (p - 1.0) / (p * n.powf(1.0 / (p - 1.0)));
    let e = p / (p - 1.0);
    let r_max = dom.radius.powf(e);
    let mut f = RadialFunction::from_fn(dom.radius, n_points, |r| a * (r_max - r.powf(e)))?;
    let last = f.n_points() - 1;
    f.values_mut()[last] = 0.0;
    Ok(f)
}

/// `k_p = ||φ||_inf^{1-p} = (N / R^p) (p/(p-1))^{p-1}`.
pub fn kp(dom: &BallDomain, p: f64) -> f64 {
    dom.dim as f64 / dom.radius.powf(p) * (p / (p - 1.0)).powf(p - 1.0)
}

/// Closed-form supersolution `(mu/k_p)^{1/(p-q)} (1 - (r/R)^{p/(p-1)})`.
pub fn supersolution(
    dom: &BallDomain,
    params: &ProblemParams,
    n_points: usize,
) -> Result<RadialFunction> {
    let params = params.validate()?;
    let k = kp(dom, params.p);
    let mu = params.mu.unwrap_or(k);
    let amp = (mu / k).powf(1.0 / params.gap());
    let e = params.p / (params.p - 1.0);
    let mut f = RadialFunction::from_fn(dom.radius, n_points, |r| {
        amp * (1.0 - (r / dom.radius).powf(e))
    })?;
    let last = f.n_points() - 1;
    f.values_mut()[last] = 0.0;
    Ok(f)
}

/// Precomputed discrete radial Green operator for one `(N, R, p, grid)`.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    radius: f64,
    h: f64,
    inv_p1: f64,
    /// `r_i^{N-1}`.
    r_pow: Vec<f64>,
    /// `1 / r_i^{N-1}`, with 0 at `r = 0`.
    inv_r_pow: Vec<f64>,
}

impl GreenOperator {
    pub fn new(dom: &BallDomain, p: f64, n_points: usize) -> Result<Self> {
        check_radial_grid(dom.radius, n_points)?;
        if !(p > 1.0) {
            return Err(Error::domain("p must be > 1"));
        }
        let h = dom.radius / (n_points - 1) as f64;
        let k = dom.dim as i32 - 1;
        let r_pow: Vec<f64> = (0..n_points).map(|i| (i as f64 * h).powi(k)).collect();
        let inv_r_pow = r_pow
            .iter()
            .enumerate()
            .map(|(i, w)| if i == 0 { 0.0 } else { 1.0 / w })
            .collect();
        Ok(Self {
            radius: dom.radius,
            h,
            inv_p1: 1.0 / (p - 1.0),
            r_pow,
            inv_r_pow,
        })
    }

    pub fn n_points(&self) -> usize {
        self.r_pow.len()
    }

    /// Applies the operator to nonnegative nodal source values.
    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n_points();
        assert_eq!(f.len(), n);
        assert_eq!(out.len(), n);
        if let Some((index, &value)) = f
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= -NEGATIVE_SOURCE_SLACK))
        {
            return Err(Error::NegativeSource { index, value });
        }
        let h = self.h;

        // g(θ_i) = (θ_i^{1-N} ∫_0^{θ_i} s^{N-1} f ds)^{1/(p-1)}, stored in `out`.
        // At θ = 0 the average tends to f(0) θ / N, so g(0) = 0.
        out[0] = 0.0;
        let mut cumulative = 0.0;
        let mut prev = self.r_pow[0] * f[0].max(0.0);
        for i in 1..n {
            let cur = self.r_pow[i] * f[i].max(0.0);
            cumulative += 0.5 * h * (prev + cur);
            prev = cur;
            out[i] = (cumulative * self.inv_r_pow[i]).powf(self.inv_p1);
        }

        // u(r_i) = ∫_{r_i}^R g, swept from the boundary. Indices with an even
        // panel count to R use Simpson pairs; the others take one 3/8 block first.
        let last = n - 1;
        let mut u_even = vec![0.0; n];
        let g = &*out;
        let mut i = last;
        while i >= 2 {
            u_even[i - 2] = u_even[i] + h / 3.0 * (g[i - 2] + 4.0 * g[i - 1] + g[i]);
            i -= 2;
        }
        let mut u = u_even.clone();
        let mut i = 1;
        while i < last {
            u[i] = if i + 3 <= last {
                u_even[i + 3] + 3.0 * h / 8.0 * (g[i] + 3.0 * g[i + 1] + 3.0 * g[i + 2] + g[i + 3])
            } else {
                0.5 * h * (g[i] + g[i + 1])
            };
            i += 2;
        }
        u[last] = 0.0;
        out.copy_from_slice(&u);
        Ok(())
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; f.len()];
        self.apply_into(f, &mut out)?;
        Ok(out)
    }

    /// `∫_{B_R} |w|^r dx / omega_{N-1}` on this grid, without the sphere factor.
    fn weighted_power_sum(&self, w: &[f64], r: f64) -> f64 {
        let n = w.len();
        let h = self.h;
        w.iter()
            .enumerate()
            .map(|(i, v)| {
                let s = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s * h / 3.0 * v.abs().powf(r) * self.r_pow[i]
            })
            .sum()
    }

    fn radial(&self, values: Vec<f64>) -> RadialFunction {
        RadialFunction::new(self.radius, values).expect("grid validated at construction")
    }
}

/// Solves `-Δ_p u = f` on the ball for a radial source sampled on `f`'s grid.
pub fn green_apply(f: &RadialFunction, dom: &BallDomain, p: f64) -> Result<RadialFunction> {
    if (f.radius() - dom.radius).abs() > 1e-12 * dom.radius {
        return Err(Error::domain(
            "source grid radius does not match the domain",
        ));
    }
    let op = GreenOperator::new(dom, p, f.n_points())?;
    Ok(op.radial(op.apply(f.values())?))
}

/// Called with `(step, sup-normalized iterate)`; step 0 is the normalized torsion function.
pub type IterateObserver<'a> = &'a mut dyn FnMut(usize, &[f64]);

/// Algorithm 1 on a ball: Lane–Emden iteration `v_{n+1} = G(mu v_n^{q-1})`
/// from the supersolution, stopped on the relative sup-norm change.
pub fn inverse_iterate_ball(
    dom: &BallDomain,
    params: &ProblemParams,
    opts: &RadialOptions,
) -> Result<EigenpairEstimate> {
    inverse_iterate_ball_observed(dom, params, opts, &mut |_, _| {})
}

pub fn inverse_iterate_ball_observed(
    dom: &BallDomain,
    params: &ProblemParams,
    opts: &RadialOptions,
    observer: IterateObserver<'_>,
) -> Result<EigenpairEstimate> {
    let params = params.validate()?;
    if params.q >= params.p {
        return Err(Error::domain("q must be < p"));
    }
    let (p, q) = (params.p, params.q);
    let op = GreenOperator::new(dom, p, opts.n_points)?;
    let n = opts.n_points;
    let ln_cap = opts.overflow_cap.ln();

    // Iterates are kept as v_n = exp(ln_c) * w with ||w||_inf = 1. G is
    // (p-1)-homogeneous, so G(mu v^{q-1}) = (mu c^{q-1})^{1/(p-1)} G(w^{q-1})
    // and the amplitude never has to be formed (it underflows for tiny p - q).
    let torsion = op.apply(&vec![1.0; n])?;
    let torsion_sup = sup_norm(&torsion);
    let ln_k = (1.0 - p) * torsion_sup.ln();
    let mu = params.mu.unwrap_or_else(|| kp(dom, p));
    let ln_mu = mu.ln();
    let mut ln_c = (ln_mu - ln_k) / (p - q);
    if ln_c > ln_cap {
        return Err(Error::Overflow { ln_sup: ln_c });
    }
    let mut w: Vec<f64> = torsion.iter().map(|v| v / torsion_sup).collect();
    observer(0, &w);

    let mut src = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut trace = IterationTrace::default();
    let mut converged = false;
    for step in 1..=params.max_outer_iters {
        for (s, wi) in src.iter_mut().zip(&w) {
            *s = wi.powf(q - 1.0);
        }
        op.apply_into(&src, &mut g)?;
        let g_sup = sup_norm(&g);
        let ln_c_next = (ln_mu + (q - 1.0) * ln_c) / (p - 1.0) + g_sup.ln();
        if ln_c_next > ln_cap {
            return Err(Error::Overflow { ln_sup: ln_c_next });
        }
        let ratio = (ln_c_next - ln_c).exp();
        let mut rel_change = 0.0_f64;
        for (gi, wi) in g.iter_mut().zip(w.iter_mut()) {
            let next = *gi / g_sup;
            rel_change = rel_change.max((ratio * next - *wi).abs());
            *wi = next;
        }
        ln_c = ln_c_next;
        trace.steps.push(StepRecord {
            sup_norm: ln_c.exp(),
            ln_sup_norm: ln_c,
            rel_change,
            eigenvalue: (ln_mu - (p - q) * ln_c).exp(),
            newton_iters: 0,
        });
        observer(step, &w);
        if rel_change < params.outer_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: trace.len(),
            last_change: trace.last().map_or(f64::NAN, |s| s.rel_change),
        });
    }

    let mu_q = (ln_mu - (p - q) * ln_c).exp();
    // Λ_q = mu ||v||_q^q / ||v||_p^p = mu_q ||w||_q^q / ||w||_p^p
    let lambda_upper = mu_q * op.weighted_power_sum(&w, q) / op.weighted_power_sum(&w, p);
    let est = EigenpairEstimate {
        p,
        q,
        mu_q,
        lambda_upper,
        eigenfunction: Field::Radial {
            profile: op.radial(w),
            dim: dom.dim,
        },
        ln_amplitude: ln_c,
        trace,
    };
    est.debug_check();
    Ok(est)
}

/// Algorithm 2 on a ball: torsion solve, then `φ_{m+1} = G((φ_m/||φ_m||)^{q-1})`.
pub fn normalized_iterate_ball(
    dom: &BallDomain,
    params: &ProblemParams,
    opts: &RadialOptions,
) -> Result<EigenpairEstimate> {
    normalized_iterate_ball_observed(dom, params, opts, &mut |_, _| {})
}

pub fn normalized_iterate_ball_observed(
    dom: &BallDomain,
    params: &ProblemParams,
    opts: &RadialOptions,
    observer: IterateObserver<'_>,
) -> Result<EigenpairEstimate> {
    let params = params.validate()?;
    let (p, q) = (params.p, params.q);
    let op = GreenOperator::new(dom, p, opts.n_points)?;
    let n = opts.n_points;

    let mut phi = op.apply(&vec![1.0; n])?;
    let mut phi_sup = sup_norm(&phi);
    let normalized: Vec<f64> = phi.iter().map(|v| v / phi_sup).collect();
    observer(0, &normalized);

    let mut src = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut trace = IterationTrace::default();
    let mut converged = false;
    for step in 1..=params.max_outer_iters {
        for (s, v) in src.iter_mut().zip(&phi) {
            *s = (v / phi_sup).powf(q - 1.0);
        }
        op.apply_into(&src, &mut next)?;
        let next_sup = sup_norm(&next);
        let rel_change = next
            .iter()
            .zip(&phi)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            / phi_sup;
        std::mem::swap(&mut phi, &mut next);
        phi_sup = next_sup;
        trace.steps.push(StepRecord {
            sup_norm: phi_sup,
            ln_sup_norm: phi_sup.ln(),
            rel_change,
            eigenvalue: phi_sup.powf(1.0 - p),
            newton_iters: 0,
        });
        let normalized: Vec<f64> = phi.iter().map(|v| v / phi_sup).collect();
        observer(step, &normalized);
        if rel_change < params.outer_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: trace.len(),
            last_change: trace.last().map_or(f64::NAN, |s| s.rel_change),
        });
    }

    let mu_q = phi_sup.powf(1.0 - p);
    let w: Vec<f64> = phi.iter().map(|v| v / phi_sup).collect();
    let lambda_upper = mu_q * op.weighted_power_sum(&w, q) / op.weighted_power_sum(&w, p);
    let est = EigenpairEstimate {
        p,
        q,
        mu_q,
        lambda_upper,
        eigenfunction: Field::Radial {
            profile: op.radial(w),
            dim: dom.dim,
        },
        ln_amplitude: phi_sup.ln(),
        trace,
    };
    est.debug_check();
    Ok(est)
}

/// `∫_{B_R} |f|^r dx` for a profile on this domain.
pub fn ball_power_integral(f: &RadialFunction, dom: &BallDomain, r: f64) -> f64 {
    radial_power_integral(f, dom.dim, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball(n: usize) -> BallDomain {
        BallDomain::unit(n).unwrap()
    }

    #[test]
    fn torsion_center_values() {
        let phi = torsion_closed_form(&ball(2), 2.0, 101).unwrap();
        assert_relative_eq!(phi.values()[0], 0.25, max_relative = 1e-15);
        assert_eq!(phi.values()[100], 0.0);
        assert_relative_eq!(phi.sup_norm(), 0.25, max_relative = 1e-15);
        let phi3 = torsion_closed_form(&ball(3), 2.0, 101).unwrap();
        assert_relative_eq!(phi3.values()[0], 1.0 / 6.0, max_relative = 1e-15);
        for (n, r, p) in [(1, 0.5, 1.3), (4, 2.0, 3.7), (2, 1.0, 7.0)] {
            let dom = BallDomain::new(n, r).unwrap();
            let phi = torsion_closed_form(&dom, p, 11).unwrap();
            assert_eq!(*phi.values().last().unwrap(), 0.0);
        }
    }

    #[test]
    fn kp_values_and_torsion_consistency() {
        assert_relative_eq!(kp(&ball(2), 2.0), 4.0, max_relative = 1e-15);
        assert_relative_eq!(kp(&ball(3), 2.0), 6.0, max_relative = 1e-15);
        assert_relative_eq!(kp(&ball(1), 2.0), 2.0, max_relative = 1e-15);
        for (n, r, p) in [(1, 0.5, 1.3), (2, 1.0, 2.0), (3, 1.7, 3.5), (4, 0.3, 1.1)] {
            let dom = BallDomain::new(n, r).unwrap();
            let phi = torsion_closed_form(&dom, p, 101).unwrap();
            let k = kp(&dom, p);
            assert!(
                (phi.sup_norm().powf(1.0 - p) - k).abs() <= 1e-12 * k.max(1.0),
                "N={n} R={r} p={p}"
            );
        }
    }

    #[test]
    fn green_of_one_reproduces_disk_torsion() {
        let dom = ball(2);
        let one = RadialFunction::constant(1.0, 101, 1.0).unwrap();
        let u = green_apply(&one, &dom, 2.0).unwrap();
        let phi = torsion_closed_form(&dom, 2.0, 101).unwrap();
        for (a, b) in u.values().iter().zip(phi.values()) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn green_of_one_on_interval() {
        // -u'' = 1 on (-1, 1): u = (1 - r^2) / 2
        let dom = ball(1);
        let one = RadialFunction::constant(1.0, 101, 1.0).unwrap();
        let u = green_apply(&one, &dom, 2.0).unwrap();
        assert_relative_eq!(u.values()[0], 0.5, max_relative = 1e-12);
        for i in 0..101 {
            let r = u.r(i);
            assert!((u.values()[i] - 0.5 * (1.0 - r * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn green_of_one_general_p_close_to_closed_form() {
        for (n, p) in [(2, 1.5), (3, 3.0), (4, 4.0), (1, 1.2)] {
            let dom = ball(n);
            let one = RadialFunction::constant(1.0, 401, 1.0).unwrap();
            let u = green_apply(&one, &dom, p).unwrap();
            let phi = torsion_closed_form(&dom, p, 401).unwrap();
            let err = u
                .values()
                .iter()
                .zip(phi.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            // p > 2 has a θ^{1/(p-1)} kink at the center, so only O(h^{1.5}) there
            assert!(err < 5e-4 * phi.sup_norm(), "N={n} p={p} err={err}");
        }
    }

    #[test]
    fn green_of_zero_is_zero() {
        let zero = RadialFunction::constant(1.0, 21, 0.0).unwrap();
        let u = green_apply(&zero, &ball(3), 2.5).unwrap();
        assert!(u.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn green_rejects_negative_source() {
        let mut f = RadialFunction::constant(1.0, 21, 1.0).unwrap();
        f.values_mut()[3] = -1e-3;
        assert!(matches!(
            green_apply(&f, &ball(2), 2.0),
            Err(Error::NegativeSource { index: 3, .. })
        ));
        f.values_mut()[3] = -1e-16;
        assert!(green_apply(&f, &ball(2), 2.0).is_ok());
    }

    #[test]
    fn green_is_order_preserving() {
        let dom = ball(3);
        let lo = RadialFunction::from_fn(1.0, 51, |r| (3.0 * r).sin().abs()).unwrap();
        let hi = RadialFunction::from_fn(1.0, 51, |r| (3.0 * r).sin().abs() + 0.01 * r).unwrap();
        let a = green_apply(&lo, &dom, 1.7).unwrap();
        let b = green_apply(&hi, &dom, 1.7).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
    }

    #[test]
    fn supersolution_cases() {
        let dom = ball(2);
        let at_kp = supersolution(&dom, &ProblemParams::new(3.0), 11).unwrap();
        assert_relative_eq!(at_kp.values()[0], 1.0, max_relative = 1e-15);
        assert_eq!(at_kp.values()[10], 0.0);
        let big =
            supersolution(&dom, &ProblemParams::new(2.0).with_q(1.99).with_mu(8.0), 11).unwrap();
        assert_relative_eq!(big.values()[0], 2f64.powi(100), max_relative = 1e-10);
        assert_eq!(big.values()[10], 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let params = ProblemParams::new(2.0).with_q(1.9999).with_mu(1e4);
        let err = inverse_iterate_ball(&ball(2), &params, &RadialOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn non_convergence_is_reported() {
        let params = ProblemParams::new(2.0).with_max_outer_iters(3);
        let err = inverse_iterate_ball(&ball(2), &params, &RadialOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 3, .. }));
    }

    #[test]
    fn disk_reference_value() {
        let est = inverse_iterate_ball(
            &ball(2),
            &ProblemParams::new(2.0),
            &RadialOptions::default(),
        )
        .unwrap();
        assert!((est.mu_q - 5.7616).abs() < 5e-3, "mu_q = {}", est.mu_q);
        assert!(est.mu_q <= est.lambda_upper);
        assert!(est.trace.last().unwrap().rel_change < 1e-9);
    }
}
