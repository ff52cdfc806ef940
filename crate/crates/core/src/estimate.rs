use serde::{Deserialize, Serialize};

use crate::field::{Field, Sampled};

/// One outer step of an inverse iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// `||phi_m||_inf`. May underflow to 0 when the amplitude is tiny; see `ln_sup_norm`.
    pub sup_norm: f64,
    pub ln_sup_norm: f64,
    /// `||phi_{m+1} - phi_m||_inf / ||phi_m||_inf`.
    pub rel_change: f64,
    /// Running eigenvalue estimate after this step.
    pub eigenvalue: f64,
    /// Newton iterations of the inner solve (0 for the explicit radial solver).
    pub newton_iters: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// Newton iterations spent on the torsion solve, when one was needed.
    pub torsion_newton_iters: Option<usize>,
    pub steps: Vec<StepRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.steps.last()
    }

    pub fn newton_counts(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.newton_iters).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.eigenvalue).collect()
    }
}

/// Two-sided eigenvalue estimate with its normalized eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenpairEstimate {
    pub p: f64,
    pub q: f64,
    /// Lower estimate `mu / ||v||_inf^{p-q}`.
    pub mu_q: f64,
    /// Upper estimate `Lambda_q`.
    pub lambda_upper: f64,
    /// Sup-normalized, positive in the interior.
    pub eigenfunction: Field,
    /// `ln ||v||_inf` of the unnormalized converged iterate.
    pub ln_amplitude: f64,
    pub trace: IterationTrace,
}

impl EigenpairEstimate {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.mu_q, self.lambda_upper)
    }

    pub(crate) fn debug_check(&self) {
        debug_assert!((self.eigenfunction.sup_norm() - 1.0).abs() < 1e-12);
    }
}
