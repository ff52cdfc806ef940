//! Element loops for the regularized p-Poisson energy
//! `E(u) = ∫ (1/p)(ε² + |∇u|²)^{p/2} dx - ∫ f u dx`.
//!
//! Q1 elements; the gradient term uses 2×2 Gauss quadrature per cell, the
//! load term the nodal (lumped) quadrature. A single centroid point would
//! leave the checkerboard mode with zero energy.

use crate::field::{GridFunction2D, SquareMesh};
use crate::norms::trapezoid_weight;

use super::banded::BandMatrix;

/// `ε² + |g|²` is floored here in the Jacobian when `ε = 0` and `p < 2`.
const DEGENERATE_FLOOR: f64 = 1e-24;

const GAUSS_LO: f64 = 0.5 - 0.288_675_134_594_812_9;
const GAUSS_HI: f64 = 0.5 + 0.288_675_134_594_812_9;
const GAUSS_POINTS: [(f64, f64); 4] = [
    (GAUSS_LO, GAUSS_LO),
    (GAUSS_HI, GAUSS_LO),
    (GAUSS_LO, GAUSS_HI),
    (GAUSS_HI, GAUSS_HI),
];

/// `h ∂φ_k/∂x` and `h ∂φ_k/∂y` at each Gauss point, local node order
/// (i,j), (i+1,j), (i,j+1), (i+1,j+1).
struct ShapeGradients {
    dx: [[f64; 4]; 4],
    dy: [[f64; 4]; 4],
}

const fn shape_gradients() -> ShapeGradients {
    let mut dx = [[0.0; 4]; 4];
    let mut dy = [[0.0; 4]; 4];
    let mut q = 0;
    while q < 4 {
        let (xi, eta) = GAUSS_POINTS[q];
        dx[q] = [-(1.0 - eta), 1.0 - eta, -eta, eta];
        dy[q] = [-(1.0 - xi), -xi, 1.0 - xi, xi];
        q += 1;
    }
    ShapeGradients { dx, dy }
}

const SHAPE: ShapeGradients = shape_gradients();

#[derive(Debug, Clone, Copy)]
pub(crate) struct Flux {
    pub p: f64,
    pub eps: f64,
}

impl Flux {
    #[inline]
    fn energy_density(&self, s: f64) -> f64 {
        (self.eps * self.eps + s).powf(0.5 * self.p) / self.p
    }

    /// `(ε² + |g|²)^{(p-2)/2}`, with the `g -> 0` limit of the flux product.
    #[inline]
    fn coefficient(&self, s: f64) -> f64 {
        let t = self.eps * self.eps + s;
        if t == 0.0 {
            return if self.p == 2.0 { 1.0 } else { 0.0 };
        }
        t.powf(0.5 * (self.p - 2.0))
    }
}

#[inline]
fn cell_nodes(i: usize, j: usize) -> [(usize, usize); 4] {
    [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
}

#[inline]
fn cell_values(u: &GridFunction2D, i: usize, j: usize) -> [f64; 4] {
    [
        u.at(i, j),
        u.at(i + 1, j),
        u.at(i, j + 1),
        u.at(i + 1, j + 1),
    ]
}

/// Gradient at Gauss point `q` of a cell with nodal values `v`.
#[inline]
fn point_gradient(v: &[f64; 4], q: usize, inv_h: f64) -> (f64, f64) {
    let mut gx = 0.0;
    let mut gy = 0.0;
    for k in 0..4 {
        gx += SHAPE.dx[q][k] * v[k];
        gy += SHAPE.dy[q][k] * v[k];
    }
    (gx * inv_h, gy * inv_h)
}

fn load_term(u: &GridFunction2D, f: &GridFunction2D) -> f64 {
    let mesh = u.mesh();
    let n = mesh.cells_per_side();
    let h = mesh.h();
    let mut sum = 0.0;
    for j in 0..=n {
        for i in 0..=n {
            sum += trapezoid_weight(n, h, i, j) * f.at(i, j) * u.at(i, j);
        }
    }
    sum
}

/// `Σ_cells Σ_gauss (h²/4) F(|∇u|²)`.
fn gradient_integral(u: &GridFunction2D, density: impl Fn(f64) -> f64) -> f64 {
    let mesh = u.mesh();
    let n = mesh.cells_per_side();
    let h = mesh.h();
    let inv_h = 1.0 / h;
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = cell_values(u, i, j);
            for q in 0..4 {
                let (gx, gy) = point_gradient(&v, q, inv_h);
                sum += density(gx * gx + gy * gy);
            }
        }
    }
    0.25 * h * h * sum
}

/// Discrete energy of `u` for source `f`.
pub fn energy(u: &GridFunction2D, f: &GridFunction2D, mesh: &SquareMesh, p: f64, eps: f64) -> f64 {
    assert_eq!(u.mesh(), *mesh);
    assert_eq!(f.mesh(), *mesh);
    let flux = Flux { p, eps };
    gradient_integral(u, |s| flux.energy_density(s)) - load_term(u, f)
}

/// Gradient of [`energy`] with respect to the interior nodal values, as a
/// nodal field with zero boundary entries.
pub fn residual(
    u: &GridFunction2D,
    f: &GridFunction2D,
    mesh: &SquareMesh,
    p: f64,
    eps: f64,
) -> GridFunction2D {
    assert_eq!(u.mesh(), *mesh);
    assert_eq!(f.mesh(), *mesh);
    let flux = Flux { p, eps };
    let n = mesh.cells_per_side();
    let h = mesh.h();
    let inv_h = 1.0 / h;
    // (h²/4) · (1/h) from the shape gradient scaling
    let w = 0.25 * h;
    let mut r = GridFunction2D::zeros(*mesh);
    {
        let out = r.values_mut();
        for j in 0..n {
            for i in 0..n {
                let v = cell_values(u, i, j);
                let nodes = cell_nodes(i, j);
                for q in 0..4 {
                    let (gx, gy) = point_gradient(&v, q, inv_h);
                    let c = flux.coefficient(gx * gx + gy * gy);
                    let (ax, ay) = (c * gx, c * gy);
                    for (k, (ni, nj)) in nodes.into_iter().enumerate() {
                        out[mesh.node(ni, nj)] += w * (SHAPE.dx[q][k] * ax + SHAPE.dy[q][k] * ay);
                    }
                }
            }
        }
        for j in 0..=n {
            for i in 0..=n {
                let k = mesh.node(i, j);
                out[k] -= trapezoid_weight(n, h, i, j) * f.at(i, j);
            }
        }
    }
    r.zero_boundary();
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearization {
    /// Full Hessian of the energy.
    Newton,
    /// Drops the rank-one term `(p-2) g g^T / (ε² + |g|²)`.
    Picard,
}

/// Banded Jacobian of [`residual`] over interior unknowns.
pub fn jacobian(
    u: &GridFunction2D,
    mesh: &SquareMesh,
    p: f64,
    eps: f64,
    lin: Linearization,
) -> BandMatrix {
    let flux = Flux { p, eps };
    let n = mesh.cells_per_side();
    let m = n - 1;
    let h = mesh.h();
    let inv_h = 1.0 / h;
    // (h²/4) · (1/h)²
    let scale = 0.25;
    let mut jac = BandMatrix::zeros(mesh.n_interior(), m + 1);
    for j in 0..n {
        for i in 0..n {
            let v = cell_values(u, i, j);
            let nodes = cell_nodes(i, j);
            for q in 0..4 {
                let (gx, gy) = point_gradient(&v, q, inv_h);
                let s = gx * gx + gy * gy;
                let mut t = eps * eps + s;
                let c = if t == 0.0 && p < 2.0 {
                    t = DEGENERATE_FLOOR;
                    t.powf(0.5 * (p - 2.0))
                } else {
                    flux.coefficient(s)
                };
                // K = c (I + (p-2) g g^T / t)
                let beta = match lin {
                    Linearization::Newton if t > 0.0 => (p - 2.0) / t,
                    _ => 0.0,
                };
                let kxx = c * (1.0 + beta * gx * gx);
                let kxy = c * beta * gx * gy;
                let kyy = c * (1.0 + beta * gy * gy);
                let (dx, dy) = (&SHAPE.dx[q], &SHAPE.dy[q]);
                for a in 0..4 {
                    let (ai, aj) = nodes[a];
                    if mesh.is_boundary(ai, aj) {
                        continue;
                    }
                    let ra = mesh.interior(ai, aj);
                    for b in 0..=a {
                        let (bi, bj) = nodes[b];
                        if mesh.is_boundary(bi, bj) {
                            continue;
                        }
                        let rb = mesh.interior(bi, bj);
                        let val = scale
                            * (dx[a] * (kxx * dx[b] + kxy * dy[b])
                                + dy[a] * (kxy * dx[b] + kyy * dy[b]));
                        jac.add(ra, rb, val);
                    }
                }
            }
        }
    }
    jac
}

/// `∫ |∇u|^p / ∫ |u|^p` with Gauss-point gradients and nodal quadrature.
pub fn rayleigh_quotient(u: &GridFunction2D, p: f64) -> f64 {
    gradient_integral(u, |s| s.powf(0.5 * p)) / crate::norms::square_power_integral(u, p)
}
