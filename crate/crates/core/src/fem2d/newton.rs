//! Damped Newton for the regularized p-Poisson problem, guarded by a cubic
//! backtracking line search on the energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridFunction2D, Sampled, SquareMesh};

use super::assembly::{energy, jacobian, residual, Linearization};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
/// Energy differences below this fraction of `|E|` are rounding noise.
const ENERGY_SLACK: f64 = 1e-14;
/// Search directions are rescaled to `||d||_inf <= MAX_STEP_GROWTH * max(||u||_inf, 1)`.
/// At `u = 0` with `p > 2` the Jacobian is `O(ε^{p-2})` and the raw step is absurdly long.
const MAX_STEP_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `||R(u)||_2 / ||R(0)||_2` at exit.
    pub final_rel_residual: f64,
    /// Backtracking reductions per iteration (0 when the full step was taken).
    pub line_search_steps: Vec<usize>,
    /// Iterations that fell back to the Picard linearization.
    pub picard_steps: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn axpy(u: &GridFunction2D, alpha: f64, d: &GridFunction2D) -> GridFunction2D {
    let mut w = u.clone();
    for (a, b) in w.values_mut().iter_mut().zip(d.values()) {
        *a += alpha * b;
    }
    w
}

/// Backtracks from the full step; returns `(alpha, reductions)` or `None`
/// when the step shrinks below the minimum.
fn cubic_backtrack(phi: impl Fn(f64) -> f64, e0: f64, slope: f64) -> Option<(f64, usize)> {
    let accept = |alpha: f64, e: f64| {
        e.is_finite() && e <= e0 + ARMIJO * alpha * slope + ENERGY_SLACK * (e0.abs() + e.abs())
    };
    let mut alpha = 1.0;
    let mut e = phi(alpha);
    let mut prev: Option<(f64, f64)> = None;
    let mut reductions = 0;
    while !accept(alpha, e) {
        let next = if !e.is_finite() {
            0.1 * alpha
        } else {
            let trial = match prev {
                None => -slope / (2.0 * (e - e0 - slope)),
                Some((a_prev, e_prev)) => {
                    let r1 = e - e0 - alpha * slope;
                    let r2 = e_prev - e0 - a_prev * slope;
                    let a = (r1 / (alpha * alpha) - r2 / (a_prev * a_prev)) / (alpha - a_prev);
                    let b = (-a_prev * r1 / (alpha * alpha) + alpha * r2 / (a_prev * a_prev))
                        / (alpha - a_prev);
                    if a == 0.0 {
                        -slope / (2.0 * b)
                    } else {
                        let disc = (b * b - 3.0 * a * slope).max(0.0);
                        (-b + disc.sqrt()) / (3.0 * a)
                    }
                }
            };
            let trial = if trial.is_finite() {
                trial
            } else {
                0.5 * alpha
            };
            trial.clamp(0.1 * alpha, 0.5 * alpha)
        };
        prev = Some((alpha, e));
        alpha = next;
        reductions += 1;
        if alpha < MIN_STEP {
            return None;
        }
        e = phi(alpha);
    }
    Some((alpha, reductions))
}

/// Minimizes the regularized energy for source `f` starting from `u0`.
///
/// Converged when `||R(u)|| / ||R(0)|| < rel_tol` after at least one step;
/// only an exactly vanishing initial residual returns `u0` untouched.
pub fn newton_solve(
    f: &GridFunction2D,
    u0: &GridFunction2D,
    mesh: &SquareMesh,
    p: f64,
    eps: f64,
    rel_tol: f64,
    max_iters: usize,
) -> Result<(GridFunction2D, NewtonReport)> {
    if f.mesh() != *mesh || u0.mesh() != *mesh {
        return Err(Error::domain("field and mesh do not match"));
    }
    let zero = GridFunction2D::zeros(*mesh);
    let baseline = match norm2(residual(&zero, f, mesh, p, eps).values()) {
        b if b > 0.0 => b,
        _ => 1.0,
    };

    let mut u = u0.clone();
    u.zero_boundary();
    let mut r = residual(&u, f, mesh, p, eps);
    let mut rnorm = norm2(r.values());
    let mut report = NewtonReport {
        final_rel_residual: rnorm / baseline,
        ..Default::default()
    };

    loop {
        let rel = rnorm / baseline;
        report.final_rel_residual = rel;
        if rnorm == 0.0 || (rel < rel_tol && report.iterations > 0) {
            return Ok((u, report));
        }
        if report.iterations >= max_iters {
            return Err(Error::NewtonNonConvergence {
                iterations: report.iterations,
                rel_residual: rel,
            });
        }

        let e0 = energy(&u, f, mesh, p, eps);
        let rhs: Vec<f64> = r.interior_values().iter().map(|v| -v).collect();
        let mut taken = None;
        for lin in [Linearization::Newton, Linearization::Picard] {
            if lin == Linearization::Picard && p == 2.0 {
                break;
            }
            let fact = jacobian(&u, mesh, p, eps, lin).cholesky()?;
            let mut d = GridFunction2D::from_interior(*mesh, &fact.solve(&rhs))?;
            let cap = MAX_STEP_GROWTH * u.sup_norm().max(1.0);
            let d_sup = d.sup_norm();
            if d_sup > cap {
                d = d.scaled(cap / d_sup);
            }
            let slope: f64 = r.values().iter().zip(d.values()).map(|(a, b)| a * b).sum();
            if !(slope < 0.0) {
                continue;
            }
            if let Some((alpha, k)) =
                cubic_backtrack(|a| energy(&axpy(&u, a, &d), f, mesh, p, eps), e0, slope)
            {
                if lin == Linearization::Picard {
                    report.picard_steps += 1;
                }
                taken = Some((alpha, k, d));
                break;
            }
        }
        let Some((alpha, k, d)) = taken else {
            return Err(Error::LineSearchFailed { step: MIN_STEP });
        };
        u = axpy(&u, alpha, &d);
        r = residual(&u, f, mesh, p, eps);
        rnorm = norm2(r.values());
        report.iterations += 1;
        report.line_search_steps.push(k);
    }
}
