//! Shared numerical substrate: grids, sampled functions, quadrature, fiber
//! transforms and the canonical Poisson bracket.

pub mod fourier;
pub mod grid;
pub mod sampled;
pub mod symbol;

pub use fourier::{fourier_fiber, inverse_fourier_fiber, poisson_bracket, FiberTransform};
pub use grid::{Grid1D, Grid2D, HbarSchedule};
pub use sampled::{quadrature, quadrature_line, sample, sample_line, SampledFunction, SampledLine};
pub use symbol::Symbol;
