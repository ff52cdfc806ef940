//! Problem parameters shared by every backend.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default gap `p - q` used by the ball computations.
pub const DEFAULT_GAP: f64 = 0.01;
/// Stopping threshold on `||v_{n+1} - v_n||_inf / ||v_n||_inf`.
pub const DEFAULT_OUTER_TOL: f64 = 1e-9;
/// Relative residual tolerance of each Newton solve.
pub const DEFAULT_INNER_REL_TOL: f64 = 1e-8;
/// Flux regularization used on the square.
pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const DEFAULT_MAX_OUTER_ITERS: usize = 5_000_000;
pub const DEFAULT_MAX_NEWTON_ITERS: usize = 200;

/// Exponents, scaling and tolerances of one eigenpair computation.
///
/// `mu = None` selects `mu = k_p` of the domain, the choice that keeps the
/// initial supersolution at unit height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub p: f64,
    pub q: f64,
    pub mu: Option<f64>,
    pub epsilon: f64,
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    pub inner_rel_tol: f64,
    pub max_newton_iters: usize,
    /// Accept `q == p` (normalized iteration only). Convergence is not
    /// guaranteed in that regime.
    pub allow_q_equal_p: bool,
}

impl ProblemParams {
    /// Parameters for exponent `p` with `q = p - 0.01` and default tolerances.
    pub fn new(p: f64) -> Self {
        Self {
            p,
            q: p - DEFAULT_GAP,
            mu: None,
            epsilon: DEFAULT_EPSILON,
            outer_tol: DEFAULT_OUTER_TOL,
            max_outer_iters: DEFAULT_MAX_OUTER_ITERS,
            inner_rel_tol: DEFAULT_INNER_REL_TOL,
            max_newton_iters: DEFAULT_MAX_NEWTON_ITERS,
            allow_q_equal_p: false,
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.q = self.p - gap;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_outer_tol(mut self, tol: f64) -> Self {
        self.outer_tol = tol;
        self
    }

    pub fn with_inner_rel_tol(mut self, tol: f64) -> Self {
        self.inner_rel_tol = tol;
        self
    }

    pub fn with_max_outer_iters(mut self, n: usize) -> Self {
        self.max_outer_iters = n;
        self
    }

    pub fn with_max_newton_iters(mut self, n: usize) -> Self {
        self.max_newton_iters = n;
        self
    }

    pub fn experimental(mut self, allow_q_equal_p: bool) -> Self {
        self.allow_q_equal_p = allow_q_equal_p;
        self
    }

    /// `p - q`.
    pub fn gap(&self) -> f64 {
        self.p - self.q
    }

    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }
}

/// Checks every parameter constraint and returns the parameters unchanged.
pub fn validate_params(raw: ProblemParams) -> Result<ProblemParams> {
    let finite = |name: &str, x: f64| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("{name} must be finite")))
        }
    };
    finite("p", raw.p)?;
    finite("q", raw.q)?;
    if raw.p <= 1.0 {
        return Err(Error::domain("p must be > 1"));
    }
    if raw.q <= 1.0 {
        return Err(Error::domain("q must be > 1"));
    }
    if raw.q > raw.p || (raw.q == raw.p && !raw.allow_q_equal_p) {
        return Err(Error::domain("q must be < p"));
    }
    if let Some(mu) = raw.mu {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain("mu must be > 0"));
        }
    }
    if !(raw.epsilon >= 0.0) || !raw.epsilon.is_finite() {
        return Err(Error::domain("epsilon must be >= 0"));
    }
    if !(raw.outer_tol > 0.0) {
        return Err(Error::domain("outer_tol must be > 0"));
    }
    if !(raw.inner_rel_tol > 0.0) {
        return Err(Error::domain("inner_rel_tol must be > 0"));
    }
    if raw.max_outer_iters == 0 {
        return Err(Error::domain("max_outer_iters must be positive"));
    }
    if raw.max_newton_iters == 0 {
        return Err(Error::domain("max_newton_iters must be positive"));
    }
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(p: ProblemParams) -> String {
        validate_params(p).unwrap_err().to_string()
    }

    #[test]
    fn accepts_standard_ball_parameters() {
        let params = ProblemParams::new(2.0)
            .with_q(1.99)
            .with_mu(4.0)
            .with_epsilon(0.0);
        assert_eq!(validate_params(params).unwrap(), params);
    }

    #[test]
    fn rejects_q_equal_p() {
        let params = ProblemParams::new(2.0)
            .with_q(2.0)
            .with_mu(1.0)
            .with_epsilon(0.0);
        assert_eq!(message(params), "q must be < p");
    }

    #[test]
    fn rejects_p_at_most_one() {
        let params = ProblemParams::new(1.0)
            .with_q(0.5)
            .with_mu(1.0)
            .with_epsilon(0.0);
        assert_eq!(message(params), "p must be > 1");
    }

    #[test]
    fn q_equal_p_needs_experimental_flag() {
        let params = ProblemParams::new(2.0).with_q(2.0).experimental(true);
        assert!(validate_params(params).is_ok());
        let params = ProblemParams::new(2.0).with_q(2.1).experimental(true);
        assert_eq!(message(params), "q must be < p");
    }

    #[test]
    fn rejects_bad_scalars() {
        assert_eq!(
            message(ProblemParams::new(2.0).with_mu(0.0)),
            "mu must be > 0"
        );
        assert_eq!(
            message(ProblemParams::new(2.0).with_mu(-3.0)),
            "mu must be > 0"
        );
        assert_eq!(
            message(ProblemParams::new(2.0).with_epsilon(-1e-5)),
            "epsilon must be >= 0"
        );
        assert_eq!(
            message(ProblemParams::new(2.0).with_outer_tol(0.0)),
            "outer_tol must be > 0"
        );
        assert_eq!(
            message(ProblemParams::new(2.0).with_q(0.9)),
            "q must be > 1"
        );
        assert_eq!(message(ProblemParams::new(f64::NAN)), "p must be finite");
    }

    #[test]
    fn defaults() {
        let params = ProblemParams::new(3.0);
        assert!((params.gap() - 0.01).abs() < 1e-15);
        assert_eq!(params.outer_tol, 1e-9);
        assert_eq!(params.inner_rel_tol, 1e-8);
        assert_eq!(params.epsilon, 1e-5);
        assert!(params.mu.is_none());
    }
}
