//! Randomized invariants shared by `properties.rs` and `acceptance.rs`.
#![allow(dead_code)]

use plap_core::driver::{lambda_upper_estimate, run_algorithm2, Backend};
use plap_core::fem2d::{energy, residual};
use plap_core::radial::{inverse_iterate_ball_observed, GreenOperator};
use plap_core::{
    BallDomain, Field, GridFunction2D, ProblemParams, RadialFunction, RadialOptions, Sampled,
    SquareMesh,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

/// `(p, q)` with `1 < q < p` and a gap between 1% and 30% of `p - 1`.
pub fn exponents() -> impl Strategy<Value = (f64, f64)> {
    (1.2..4.5f64, 0.01..0.3f64).prop_map(|(p, frac)| (p, p - frac * (p - 1.0)))
}

pub fn source(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..2.0f64, n)
}

/// Iterates of the Lane–Emden iteration decrease pointwise from step 1 on.
pub fn monotone_iterates(dim: usize, p: f64, q: f64) -> Check {
    let dom = BallDomain::unit(dim).unwrap();
    let params = ProblemParams::new(p).with_q(q).with_outer_tol(1e-7);
    let mut shapes = Vec::new();
    let est =
        inverse_iterate_ball_observed(&dom, &params, &RadialOptions::default(), &mut |_, w| {
            shapes.push(w.to_vec())
        })
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let amps: Vec<f64> = est.trace.steps.iter().map(|s| s.ln_sup_norm).collect();
    for n in 1..amps.len() {
        prop_assert!(
            amps[n] <= amps[n - 1] + 1e-13,
            "sup norm rose at step {}",
            n + 1
        );
        let (prev, next) = (&shapes[n], &shapes[n + 1]);
        let ratio = (amps[n] - amps[n - 1]).exp();
        for (i, (a, b)) in prev.iter().zip(next).enumerate() {
            prop_assert!(
                ratio * b <= a * (1.0 + 1e-11) + 1e-300,
                "step {} node {}: {} > {}",
                n + 1,
                i,
                ratio * b,
                a
            );
        }
    }
    Ok(())
}

/// `mu_q` on a ball of radius `R` equals `mu_q(1) / R^p`.
pub fn radius_scaling(dim: usize, p: f64, q: f64, radius: f64) -> Check {
    let params = ProblemParams::new(p).with_q(q).with_outer_tol(1e-10);
    let unit = run_algorithm2(&Backend::ball(BallDomain::unit(dim).unwrap()), &params).unwrap();
    let scaled = run_algorithm2(
        &Backend::ball(BallDomain::new(dim, radius).unwrap()),
        &params,
    )
    .unwrap();
    let expect = unit.mu_q / radius.powf(p);
    prop_assert!(
        (scaled.mu_q - expect).abs() <= 1e-9 * expect,
        "{} vs {}",
        scaled.mu_q,
        expect
    );
    Ok(())
}

/// `Λ_q(c v) = c^{q-p} Λ_q(v)`.
pub fn upper_estimate_scaling(values: Vec<f64>, dim: usize, p: f64, q: f64, c: f64) -> Check {
    let mut values = values;
    values[0] += 0.1;
    let last = values.len() - 1;
    values[last] = 0.0;
    let v = Field::Radial {
        profile: RadialFunction::new(1.0, values).unwrap(),
        dim,
    };
    let a = lambda_upper_estimate(&v, p, q, 1.0).unwrap();
    let b = lambda_upper_estimate(&v.scaled(c), p, q, 1.0).unwrap();
    let expect = a * c.powf(q - p);
    prop_assert!((b - expect).abs() <= 1e-11 * expect, "{} vs {}", b, expect);
    Ok(())
}

/// The assembled residual is the gradient of the discrete energy.
pub fn residual_is_energy_gradient(p: f64, state: Vec<f64>, direction: Vec<f64>) -> Check {
    let mesh = SquareMesh::new(5).unwrap();
    let mut u = GridFunction2D::new(mesh, state).unwrap();
    u.zero_boundary();
    let mut d = GridFunction2D::new(mesh, direction).unwrap();
    d.zero_boundary();
    let f = GridFunction2D::interior_from_fn(mesh, |x, y| 1.0 + x - y * y);
    let eps = 1e-3;
    let along = |t: f64| {
        let mut w = u.clone();
        for (a, b) in w.values_mut().iter_mut().zip(d.values()) {
            *a += t * b;
        }
        energy(&w, &f, &mesh, p, eps)
    };
    let h = 1e-5;
    let fd = (along(h) - along(-h)) / (2.0 * h);
    let r = residual(&u, &f, &mesh, p, eps);
    let an: f64 = r.values().iter().zip(d.values()).map(|(a, b)| a * b).sum();
    prop_assert!(
        (fd - an).abs() <= 1e-5 * an.abs().max(1e-2),
        "fd {} vs {}",
        fd,
        an
    );
    Ok(())
}

/// The square eigenfunction inherits the symmetries of the square.
pub fn square_symmetry(p: f64, q: f64) -> Check {
    let n = 8;
    let params = ProblemParams::new(p)
        .with_q(q)
        .with_outer_tol(1e-9)
        .with_inner_rel_tol(1e-10);
    let est = run_algorithm2(&Backend::square(n).unwrap(), &params)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let u = est.eigenfunction.as_square().unwrap();
    for j in 0..=n {
        for i in 0..=n {
            let v = u.at(i, j);
            for w in [u.at(j, i), u.at(n - i, j), u.at(i, n - j)] {
                prop_assert!((v - w).abs() < 1e-7, "({},{}): {} vs {}", i, j, v, w);
            }
            if (1..n).contains(&i) && (1..n).contains(&j) {
                prop_assert!(v > 0.0);
            }
        }
    }
    Ok(())
}

/// The radial Green operator maps nonnegative sources to nonnegative
/// solutions vanishing at `r = R`, and preserves order.
pub fn maximum_principle(dim: usize, p: f64, f: Vec<f64>, extra: Vec<f64>) -> Check {
    let n = f.len();
    let op = GreenOperator::new(&BallDomain::unit(dim).unwrap(), p, n).unwrap();
    let g: Vec<f64> = f.iter().zip(&extra).map(|(a, b)| a + b).collect();
    let uf = op.apply(&f).unwrap();
    let ug = op.apply(&g).unwrap();
    prop_assert_eq!(uf[n - 1], 0.0);
    for i in 0..n {
        prop_assert!(uf[i] >= 0.0);
        prop_assert!(
            uf[i] <= ug[i] * (1.0 + 1e-13) + 1e-300,
            "node {}: {} > {}",
            i,
            uf[i],
            ug[i]
        );
    }
    Ok(())
}
