//! Sampled functions: radial profiles on `[0, R]` and nodal fields on the unit square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms;

/// Anything carrying nodal values.
pub trait Sampled {
    fn values(&self) -> &[f64];

    fn sup_norm(&self) -> f64 {
        norms::sup_norm(self.values())
    }
}

/// Radial profile sampled at `r_i = i R / (n - 1)`, `n` odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    radius: f64,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(radius: f64, values: Vec<f64>) -> Result<Self> {
        check_radial_grid(radius, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "radial value at index {i} is not finite"
            )));
        }
        Ok(Self { radius, values })
    }

    pub fn from_fn(radius: f64, n_points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_radial_grid(radius, n_points)?;
        let h = radius / (n_points - 1) as f64;
        Self::new(radius, (0..n_points).map(|i| f(i as f64 * h)).collect())
    }

    pub fn constant(radius: f64, n_points: usize, c: f64) -> Result<Self> {
        Self::from_fn(radius, n_points, |_| c)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        self.radius / (self.values.len() - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.radius
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::domain("grid size mismatch"));
        }
        Self::new(self.radius, values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            radius: self.radius,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

impl Sampled for RadialFunction {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn check_radial_grid(radius: f64, n_points: usize) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain("radius must be > 0"));
    }
    if n_points < 3 || n_points % 2 == 0 {
        return Err(Error::domain(format!(
            "radial grid needs an odd number of points >= 3, got {n_points}"
        )));
    }
    Ok(())
}

/// Uniform mesh of the unit square with `n` cells per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareMesh {
    n: usize,
}

impl SquareMesh {
    pub fn new(n_cells_per_side: usize) -> Result<Self> {
        if n_cells_per_side < 2 {
            return Err(Error::domain("square mesh needs at least 2 cells per side"));
        }
        Ok(Self {
            n: n_cells_per_side,
        })
    }

    pub fn cells_per_side(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Nodes per side, `n + 1`.
    pub fn nodes_per_side(&self) -> usize {
        self.n + 1
    }

    pub fn n_nodes(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    /// Unknowns: `(n - 1)^2` interior nodes.
    pub fn n_interior(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Row-major node index of `(i, j)`, `i` along x.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// Row-major interior index of interior node `(i, j)`.
    #[inline]
    pub fn interior(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.n - 1) + (i - 1)
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        (i as f64 * h, j as f64 * h)
    }
}

/// Nodal values on a [`SquareMesh`], row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction2D {
    mesh: SquareMesh,
    values: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(mesh: SquareMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_nodes() {
            return Err(Error::domain(format!(
                "expected {} nodal values, got {}",
                mesh.n_nodes(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: SquareMesh) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.n_nodes()],
        }
    }

    pub fn constant(mesh: SquareMesh, c: f64) -> Self {
        Self {
            mesh,
            values: vec![c; mesh.n_nodes()],
        }
    }

    /// Samples `f` at every node, boundary included.
    pub fn from_fn(mesh: SquareMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let m = mesh.nodes_per_side();
        let mut values = Vec::with_capacity(mesh.n_nodes());
        for j in 0..m {
            for i in 0..m {
                let (x, y) = mesh.coords(i, j);
                values.push(f(x, y));
            }
        }
        Self { mesh, values }
    }

    /// Samples `f` at interior nodes; boundary values are 0.
    pub fn interior_from_fn(mesh: SquareMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut g = Self::from_fn(mesh, f);
        g.zero_boundary();
        g
    }

    pub fn mesh(&self) -> SquareMesh {
        self.mesh
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.node(i, j)]
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn zero_boundary(&mut self) {
        let n = self.mesh.cells_per_side();
        for j in 0..=n {
            for i in 0..=n {
                if self.mesh.is_boundary(i, j) {
                    let k = self.mesh.node(i, j);
                    self.values[k] = 0.0;
                }
            }
        }
    }

    pub fn boundary_is_zero(&self) -> bool {
        let n = self.mesh.cells_per_side();
        (0..=n).all(|j| (0..=n).all(|i| !self.mesh.is_boundary(i, j) || self.at(i, j) == 0.0))
    }

    /// Interior values in interior ordering.
    pub fn interior_values(&self) -> Vec<f64> {
        let n = self.mesh.cells_per_side();
        let mut out = Vec::with_capacity(self.mesh.n_interior());
        for j in 1..n {
            for i in 1..n {
                out.push(self.at(i, j));
            }
        }
        out
    }

    /// Builds a field from interior values; boundary set to 0.
    pub fn from_interior(mesh: SquareMesh, interior: &[f64]) -> Result<Self> {
        if interior.len() != mesh.n_interior() {
            return Err(Error::domain("interior vector has the wrong length"));
        }
        let n = mesh.cells_per_side();
        let mut g = Self::zeros(mesh);
        for j in 1..n {
            for i in 1..n {
                g.values[mesh.node(i, j)] = interior[mesh.interior(i, j)];
            }
        }
        Ok(g)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mesh: self.mesh,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn lp_norm(&self, r: f64) -> f64 {
        norms::square_lp_norm(self, r)
    }
}

impl Sampled for GridFunction2D {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A sampled function together with the geometry that defines its integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Field {
    /// Radial profile of a function on the ball of dimension `dim`
    /// (`dim = 1` is the symmetric interval).
    Radial {
        profile: RadialFunction,
        dim: usize,
    },
    Square(GridFunction2D),
}

impl Field {
    pub fn lp_norm(&self, r: f64) -> f64 {
        norms::lp_norm(self, r)
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Field::Radial { profile, dim } => Field::Radial {
                profile: profile.scaled(c),
                dim: *dim,
            },
            Field::Square(g) => Field::Square(g.scaled(c)),
        }
    }

    pub fn as_radial(&self) -> Option<&RadialFunction> {
        match self {
            Field::Radial { profile, .. } => Some(profile),
            Field::Square(_) => None,
        }
    }

    pub fn as_square(&self) -> Option<&GridFunction2D> {
        match self {
            Field::Square(g) => Some(g),
            Field::Radial { .. } => None,
        }
    }
}

impl Sampled for Field {
    fn values(&self) -> &[f64] {
        match self {
            Field::Radial { profile, .. } => profile.values(),
            Field::Square(g) => g.values(),
        }
    }
}
