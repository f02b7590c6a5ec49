#![forbid(unsafe_code)]

pub mod algebra;
pub mod basis;
pub mod error;
pub mod fibration;
pub mod matrix;
pub mod oracles;
pub mod orbit;
pub mod selftest;
pub mod sld;
pub mod tensors;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::{Complex64, ComplexMatrix};
