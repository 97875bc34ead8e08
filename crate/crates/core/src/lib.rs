//! Numerical toolkit for reflection-transmission algebras with integrable defects.

pub mod defect;
pub mod deltamodel;
pub mod doubling;
pub mod error;
pub mod fock;
pub mod smatrix;
pub mod tensor;

pub use error::{Error, Result};
