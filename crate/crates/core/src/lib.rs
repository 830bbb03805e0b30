//! Exact Lie point symmetry analysis for a family of constant-coefficient
//! linear evolution equations in one time and two space variables.

pub mod error;
pub mod kernel;
pub mod jet;
pub mod linalg;
pub mod prolong;
pub mod solver;
pub mod reduction;
pub mod registry;
pub mod algebra;

pub use error::{Error, Result};
