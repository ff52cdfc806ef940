//! First eigenpair of the Dirichlet p-Laplacian by inverse iteration of
//! sublinear supersolutions.
//!
//! Backends: explicit radial quadrature on balls and the symmetric interval
//! ([`radial`]), Q1 finite elements with a damped Newton solver on the unit
//! square ([`fem2d`]), and the closed-form one-dimensional eigenpair
//! ([`oracle1d`]). [`driver`] runs both inverse iterations and the `q -> p`
//! convergence studies on top of them.

pub mod driver;
pub mod error;
pub mod estimate;
pub mod fem2d;
pub mod field;
pub mod norms;
pub mod oracle1d;
pub mod params;
pub mod radial;

pub use driver::{Backend, ConvergenceStudy, Reference};
pub use error::{Error, Result};
pub use estimate::{EigenpairEstimate, IterationTrace, StepRecord};
pub use field::{Field, GridFunction2D, RadialFunction, Sampled, SquareMesh};
pub use norms::{lp_norm, sup_norm};
pub use params::{validate_params, ProblemParams};
pub use radial::{BallDomain, RadialOptions};
