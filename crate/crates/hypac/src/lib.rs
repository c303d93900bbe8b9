//! Numerical toolkit for the one-dimensional invariant solutions of the
//! semilinear equation `Δu = f(u)` on hyperbolic space, where `f = F'` and
//! `F` is a double-well potential vanishing exactly at ±1.
//!
//! The crate is organized around the three cohomogeneity-one reductions of
//! the equation plus the machinery to verify them:
//!
//! - [`model`]: the nonlinearity, problem parameters and indicial roots.
//! - [`diagnostics`]: decay-exponent fits and energy/flux identity residuals.
//! - [`radial`]: the radial ODE `u'' + (n-1) coth r u' = f(u)`.
//! - [`parabolic`]: phase-plane analysis of `u'' - (n-1) u' = f(u)` on the
//!   log axis, heteroclinic shooting and nonexistence certificates.
//! - [`hyperbolic`]: the two-sided connection `U'' + (n-1) tanh t U' = f(U)`
//!   by weighted energy minimization with a Newton cross-check.
//! - [`disk`]: a 2D solver on the truncated Poincaré disk used to check the
//!   one-dimensional symmetry of solutions with invariant boundary data.
//! - [`perturb`]: perturbative non-symmetric solutions built from boundary
//!   data via contraction iterations.
//!
//! All solvers are deterministic and free of global state; results are
//! immutable once constructed and safe to share across threads.

pub mod acceptance;
pub mod diagnostics;
pub mod disk;
pub mod hyperbolic;
pub mod io;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod parabolic;
pub mod perturb;
pub mod radial;

pub use model::{cubic_potential, indicial_roots, PotentialSpec, ProblemParams};
