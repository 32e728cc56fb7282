//! Finite-dimensional laboratory for p-approximate Schauder frames on
//! `(ℝ^d, ‖·‖_r)`.

pub mod continuous;
pub mod error;
pub mod frames;
pub mod io;
pub mod lab;
mod linalg;
pub mod lp;
pub mod reconstruct;

pub use error::{LabError, Result};
