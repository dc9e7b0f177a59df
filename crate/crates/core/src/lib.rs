//! Structure-preserving finite-difference solvers for the 3D Maxwell equations
//! with a Berenger perfectly matched layer.
//!
//! Two integrators share one staggered lattice: a Yee leapfrog that advances
//! the unsplit PML system with closed-form damping, and a partitioned
//! Runge–Kutta integrator over the twelve split subcomponents. Both expose the
//! discrete energy laws they satisfy as residual checks.
//!
//! Kernels are generic over [`Scalar`]; use the aliases below for the common
//! concrete choices.

pub mod error;
pub mod field;
pub mod grid;
pub mod maxwell;
pub mod msrk;
pub mod ops;
pub mod pml;
pub mod scalar;
pub mod yee;

pub use error::{Error, Result};
pub use field::{max_diff, Field};
pub use grid::{make_grid, Axis, Boundary, Component, Stagger, StaggerSite, StaggeredGrid3, TimeParity, DEFAULT_CFL};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type Grid = StaggeredGrid3<f64>;
pub type Grid32 = StaggeredGrid3<f32>;
pub type ExactGrid = StaggeredGrid3<Exact>;
