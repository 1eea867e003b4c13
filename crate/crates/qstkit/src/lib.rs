//! Numerical and symbolic toolkit for quantum space-times with Lie-algebra
//! type noncommutativity.

pub mod bch;
pub mod causality;
pub mod config;
pub mod error;
pub mod exact;
pub mod gauge;
pub mod group;
pub mod hopf;
pub mod lie;
pub mod loops;
pub mod moyal_matrix;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod sw;
pub mod special;
pub mod suite;
pub mod twist;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
