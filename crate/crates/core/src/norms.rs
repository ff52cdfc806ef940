//! Sup and L^r norms.
//!
//! Radial integrals use composite Simpson in `r` against the measure
//! `omega_{N-1} r^{N-1} dr`, the same rule the radial solver uses for its
//! outer integral. Square integrals use the nodal trapezoid rule, which is
//! the lumped quadrature behind the finite-element load vector.

use std::f64::consts::PI;

use crate::field::{Field, GridFunction2D, RadialFunction, Sampled};

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Surface measure of the unit sphere in `R^dim`; 2 for `dim = 1`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        0 => panic!("dimension must be positive"),
        1 => 2.0,
        2 => 2.0 * PI,
        d => sphere_area(d - 2) * 2.0 * PI / (d - 2) as f64,
    }
}

/// Composite Simpson weights for `n` (odd) points with spacing `h`.
pub(crate) fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    debug_assert!(n >= 3 && n % 2 == 1);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// `∫_{B_R} |f|^r dx` for a radial profile.
pub fn radial_power_integral(f: &RadialFunction, dim: usize, r: f64) -> f64 {
    let w = simpson_weights(f.n_points(), f.spacing());
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| w[i] * v.abs().powf(r) * f.r(i).powi(dim as i32 - 1))
        .sum();
    sphere_area(dim) * sum
}

pub fn radial_lp_norm(f: &RadialFunction, dim: usize, r: f64) -> f64 {
    radial_power_integral(f, dim, r).powf(1.0 / r)
}

/// Trapezoid weight of node `(i, j)`: `h^2` inside, halved per boundary side.
#[inline]
pub(crate) fn trapezoid_weight(n: usize, h: f64, i: usize, j: usize) -> f64 {
    let side = |k: usize| if k == 0 || k == n { 0.5 } else { 1.0 };
    side(i) * side(j) * h * h
}

/// `∫_{(0,1)^2} |f|^r dx` by the nodal trapezoid rule.
pub fn square_power_integral(f: &GridFunction2D, r: f64) -> f64 {
    let mesh = f.mesh();
    let n = mesh.cells_per_side();
    let h = mesh.h();
    let mut sum = 0.0;
    for j in 0..=n {
        for i in 0..=n {
            sum += trapezoid_weight(n, h, i, j) * f.at(i, j).abs().powf(r);
        }
    }
    sum
}

pub fn square_lp_norm(f: &GridFunction2D, r: f64) -> f64 {
    square_power_integral(f, r).powf(1.0 / r)
}

/// `∫ |f|^r dx` over the field's geometry.
pub fn power_integral(f: &Field, r: f64) -> f64 {
    match f {
        Field::Radial { profile, dim } => radial_power_integral(profile, *dim, r),
        Field::Square(g) => square_power_integral(g, r),
    }
}

/// `(∫ |f|^r dx)^{1/r}`, `r >= 1`.
pub fn lp_norm(f: &Field, r: f64) -> f64 {
    assert!(r >= 1.0, "lp_norm needs r >= 1");
    power_integral(f, r).powf(1.0 / r)
}
