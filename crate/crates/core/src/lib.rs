//! Numerical laboratory for strict deformation quantization.

extern crate blas_src;

pub mod asymptotics;
pub mod error;
pub mod gaussian;
pub mod groupoid;
pub mod landsman;
pub mod linalg;
pub mod numerics;
pub mod prequant;
pub mod rotation;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
