//! Q1 finite elements on the unit square and the normalized inverse
//! iteration built on them.

mod assembly;
mod banded;
mod newton;

pub use assembly::{energy, jacobian, rayleigh_quotient, residual, Linearization};
pub use banded::{BandCholesky, BandMatrix};
pub use newton::{newton_solve, NewtonReport};

use crate::error::{Error, Result};
use crate::estimate::{EigenpairEstimate, IterationTrace, StepRecord};
use crate::field::{Field, GridFunction2D, Sampled, SquareMesh};
use crate::params::ProblemParams;

pub const DEFAULT_MESH: usize = 64;

/// Everything a square run produces beyond the estimate itself.
#[derive(Debug, Clone)]
pub struct SquareRun {
    pub estimate: EigenpairEstimate,
    pub torsion: NewtonReport,
    pub newton: Vec<NewtonReport>,
}

/// Normalized inverse iteration on the unit square:
/// torsion solve from zero, then
/// `-div((ε² + |∇φ_{m+1}|²)^{(p-2)/2} ∇φ_{m+1}) = (φ_m / ||φ_m||)^{q-1}`
/// with each Newton solve warm-started at `φ_m`.
pub fn algorithm2_square(mesh: &SquareMesh, params: &ProblemParams) -> Result<EigenpairEstimate> {
    algorithm2_square_detailed(mesh, params).map(|run| run.estimate)
}

pub fn algorithm2_square_detailed(mesh: &SquareMesh, params: &ProblemParams) -> Result<SquareRun> {
    let params = params.validate()?;
    let (p, q, eps) = (params.p, params.q, params.epsilon);
    let solve = |f: &GridFunction2D, u0: &GridFunction2D| {
        newton_solve(
            f,
            u0,
            mesh,
            p,
            eps,
            params.inner_rel_tol,
            params.max_newton_iters,
        )
    };

    let ones = GridFunction2D::constant(*mesh, 1.0);
    let (mut phi, torsion) = solve(&ones, &GridFunction2D::zeros(*mesh))?;
    let mut phi_sup = phi.sup_norm();
    let mut trace = IterationTrace {
        torsion_newton_iters: Some(torsion.iterations),
        steps: vec![],
    };
    let mut reports = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_outer_iters {
        let mut src = phi.clone();
        for v in src.values_mut() {
            *v = (v.max(0.0) / phi_sup).powf(q - 1.0);
        }
        let (next, rep) = solve(&src, &phi)?;
        let next_sup = next.sup_norm();
        let rel_change = next
            .values()
            .iter()
            .zip(phi.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            / phi_sup;
        trace.steps.push(StepRecord {
            sup_norm: next_sup,
            ln_sup_norm: next_sup.ln(),
            rel_change,
            eigenvalue: next_sup.powf(1.0 - p),
            newton_iters: rep.iterations,
        });
        reports.push(rep);
        phi = next;
        phi_sup = next_sup;
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

    let u = phi.scaled(1.0 / phi_sup);
    let estimate = EigenpairEstimate {
        p,
        q,
        mu_q: phi_sup.powf(1.0 - p),
        lambda_upper: rayleigh_quotient(&u, p),
        eigenfunction: Field::Square(u),
        ln_amplitude: phi_sup.ln(),
        trace,
    };
    estimate.debug_check();
    Ok(SquareRun {
        estimate,
        torsion,
        newton: reports,
    })
}
