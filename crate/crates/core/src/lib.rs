//! Numerical tensor calculus for cohomogeneity-one Ambrose–Singer connections.
//!
//! The crate checks, on chart-defined Riemannian manifolds, whether a unit
//! normal field `ξ` and a candidate connection `∇̃` satisfy
//!
//! ```text
//! ∇̃R̃ = 0,  ∇̃T̃ = 0,  ∇̃ξ = 0,  ∇̃_X g = 0,  T̃(X,Y) ∈ D   (X, Y ∈ D = ξ^⊥)
//! ```
//!
//! extracts the structure tensor `S = ∇ − ∇̃` in an adapted orthonormal frame,
//! and splits it into its ten `SO(n)`-irreducible components.
//!
//! Modules:
//!
//! * [`geometry`] charts, metrics, vector fields, adapted frames, warped products
//! * [`connection`] Levi-Civita, torsion, curvature, covariant derivatives, geodesics
//! * [`co1`] the verifier, structure extraction, second fundamental form and the
//!   canonical structure built from Killing data
//! * [`decomp`] pointwise algebra of structures: validation, projections, classification
//! * [`registry`] built-in foliations (hyperplanes, spheres, horospheres, ...)
//! * [`report`] and [`cli`] the `co1as` command-line front end and its JSON reports

pub mod cli;
pub mod co1;
pub mod connection;
pub mod decomp;
mod error;
pub mod fd;
pub mod geometry;
pub mod registry;
pub mod report;
pub mod tensor;

pub use error::{Error, Result};
pub use fd::FdSteps;
pub use tensor::{Tensor, Variance};
