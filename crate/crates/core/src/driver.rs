//! Backend-independent entry points: both inverse iterations, the two
//! eigenvalue estimators, and `q -> p` convergence studies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::EigenpairEstimate;
use crate::fem2d::algorithm2_square;
use crate::field::{Field, SquareMesh};
use crate::norms::power_integral;
use crate::oracle1d::{lambda_1d, Interval};
use crate::params::ProblemParams;
use crate::radial::{inverse_iterate_ball, normalized_iterate_ball, BallDomain, RadialOptions};

/// First zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
/// First zero of the Bessel function `J_1`.
pub const BESSEL_J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

/// With no exact eigenvalue, the reference run uses `smallest gap / REFERENCE_GAP_DIVISOR`.
pub const REFERENCE_GAP_DIVISOR: f64 = 100.0;

/// `mu / v_sup^{p-q}`.
pub fn mu_q_estimate(mu: f64, v_sup: f64, p: f64, q: f64) -> f64 {
    debug_assert!(v_sup > 0.0);
    mu / v_sup.powf(p - q)
}

/// `mu ∫|v|^q / ∫|v|^p` with the backend's own quadrature.
pub fn lambda_upper_estimate(v: &Field, p: f64, q: f64, mu: f64) -> Result<f64> {
    if q == p {
        return Ok(mu);
    }
    let denom = power_integral(v, p);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::domain("lambda_upper_estimate needs a nonzero field"));
    }
    Ok(mu * power_integral(v, q) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Backend {
    Radial {
        dom: BallDomain,
        opts: RadialOptions,
    },
    Square {
        mesh: SquareMesh,
    },
}

impl Backend {
    pub fn ball(dom: BallDomain) -> Self {
        Backend::Radial {
            dom,
            opts: RadialOptions::default(),
        }
    }

    pub fn square(n: usize) -> Result<Self> {
        Ok(Backend::Square {
            mesh: SquareMesh::new(n)?,
        })
    }

    /// The exact first eigenvalue where one is known: any `p` on an
    /// interval, `p = 2` on balls in dimensions 2 to 4 and on the square.
    pub fn exact_eigenvalue(&self, p: f64) -> Option<f64> {
        match *self {
            Backend::Radial { dom, .. } => {
                let r = dom.radius();
                if dom.dim() == 1 {
                    return lambda_1d(p, &Interval::new(-r, r).ok()?).ok();
                }
                if p != 2.0 {
                    return None;
                }
                let zero = match dom.dim() {
                    2 => BESSEL_J0_FIRST_ZERO,
                    3 => std::f64::consts::PI,
                    4 => BESSEL_J1_FIRST_ZERO,
                    _ => return None,
                };
                Some((zero / r).powi(2))
            }
            Backend::Square { .. } => (p == 2.0).then(|| 2.0 * std::f64::consts::PI.powi(2)),
        }
    }
}

/// Algorithm 1 (radial only): iterate `G(mu v^{q-1})` from the supersolution.
pub fn run_algorithm1(
    dom: &BallDomain,
    params: &ProblemParams,
    opts: &RadialOptions,
) -> Result<EigenpairEstimate> {
    inverse_iterate_ball(dom, params, opts)
}

/// Algorithm 2: torsion solve, then the normalized iteration. `params.mu`
/// is ignored.
pub fn run_algorithm2(backend: &Backend, params: &ProblemParams) -> Result<EigenpairEstimate> {
    match backend {
        Backend::Radial { dom, opts } => normalized_iterate_ball(dom, params, opts),
        Backend::Square { mesh } => algorithm2_square(mesh, params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    /// The backend's exact eigenvalue; an error when none is known.
    Exact,
    /// Exact when known, otherwise a run at a much smaller gap.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceSource {
    Exact,
    SmallGapRun,
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub gap: f64,
    pub mu_q: f64,
    pub lambda_upper: f64,
    /// `|mu_q - reference|`.
    pub error: f64,
    pub signed_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub p: f64,
    pub reference: f64,
    pub reference_source: ReferenceSource,
    /// Ordered by strictly decreasing gap.
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `ln error` against `ln gap`.
    pub slope: Option<f64>,
    /// `max error / gap`.
    pub k_estimate: f64,
}

/// Runs Algorithm 2 at `q = p - gap` for each gap and measures the error
/// of `mu_q` against the reference.
pub fn q_to_p_study(
    backend: &Backend,
    base: &ProblemParams,
    gaps: &[f64],
    reference: Reference,
) -> Result<ConvergenceStudy> {
    let p = base.p;
    if gaps.is_empty() {
        return Err(Error::domain("at least one gap is required"));
    }
    if gaps.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::domain("gaps must be positive"));
    }
    if gaps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("gaps must be strictly decreasing"));
    }
    let smallest = gaps[gaps.len() - 1];

    let run = |gap: f64| run_algorithm2(backend, &base.with_gap(gap));
    let resolve_reference = || -> Result<(f64, ReferenceSource)> {
        match reference {
            Reference::Value(v) => Ok((v, ReferenceSource::Given)),
            Reference::Exact => backend
                .exact_eigenvalue(p)
                .map(|v| (v, ReferenceSource::Exact))
                .ok_or_else(|| {
                    Error::domain("no exact eigenvalue is known for this geometry and p")
                }),
            Reference::Auto => match backend.exact_eigenvalue(p) {
                Some(v) => Ok((v, ReferenceSource::Exact)),
                None => Ok((
                    run(smallest / REFERENCE_GAP_DIVISOR)?.mu_q,
                    ReferenceSource::SmallGapRun,
                )),
            },
        }
    };

    let (reference, runs) = rayon::join(resolve_reference, || {
        gaps.par_iter().map(|&g| run(g)).collect::<Result<Vec<_>>>()
    });
    let (reference, reference_source) = reference?;
    let runs = runs?;

    let rows: Vec<StudyRow> = gaps
        .iter()
        .zip(&runs)
        .map(|(&gap, est)| StudyRow {
            gap,
            mu_q: est.mu_q,
            lambda_upper: est.lambda_upper,
            error: (est.mu_q - reference).abs(),
            signed_error: est.mu_q - reference,
            iterations: est.iterations(),
        })
        .collect();
    let k_estimate = rows.iter().map(|r| r.error / r.gap).fold(0.0, f64::max);
    Ok(ConvergenceStudy {
        p,
        reference,
        reference_source,
        slope: fit_slope(&rows),
        rows,
        k_estimate,
    })
}

/// Log-log least squares over rows with positive error, dropping the
/// largest gap when at least three rows are available.
pub fn fit_slope(rows: &[StudyRow]) -> Option<f64> {
    let skip = usize::from(rows.len() >= 3);
    let pts: Vec<(f64, f64)> = rows[skip..]
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| (r.gap.ln(), r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    (sxx > 0.0).then(|| sxy / sxx)
}
