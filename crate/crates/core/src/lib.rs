//! ℓ1-analysis sparse regularization of linear inverse problems.
//!
//! The crate solves `min_x 1/2 ||y - Phi x||^2 + lambda ||D^* x||_1` and its
//! Basis Pursuit limit, computes the identifiability and recovery criteria
//! (IC, ARC, wARC) attached to a D-support, and certifies solutions through
//! their first-order optimality system.

pub mod certify;
pub mod cosparse;
pub mod criteria;
pub mod dictionaries;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod params;
pub mod solvers;

pub use error::{Error, Result};
