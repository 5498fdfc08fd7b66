//! Index hypergeometric (Jacobi/Olevskii) transform library.

pub mod cli;
pub mod error;
pub mod gamma;
pub mod hyper;
pub mod quad;
pub mod funlang;
pub mod poly;
pub mod registry;
pub mod xform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
