//! Separable discrete convex minimization over discrete box-TDI sets with
//! exact min-max certificates.
//!
//! Modules:
//! - [`conjugate`]: univariate and separable discrete convex functions, conjugates, fitting pairs.
//! - [`polyhedron`]: integral linear systems, brute-force primal and dual searches, feasibility conditions.
//! - [`mconvex`]: base polyhedra, Lovász extension, greedy, exchange descent, constructive dual.
//! - [`netflow`]: convex-cost integral flows and potential certificates.
//! - [`inverse`]: inverse optimization with tangent cones.
//! - [`cli`]: the `dctk` command-line front end.

pub mod cli;
pub mod conjugate;
pub mod error;
pub mod extint;
pub mod fixtures;
pub mod inverse;
pub mod io;
pub mod mconvex;
pub mod netflow;
pub mod polyhedron;
pub mod rational;

pub use conjugate::{SeparableConvex, UnivariateConvex};
pub use error::{Error, Result};
pub use extint::ExtInt;
