use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at ({q}, {p})")]
    NonFinite { q: f64, p: f64, value: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("function does not decay at the fiber boundary (boundary/sup = {ratio:.3e})")]
    NoDecay { ratio: f64 },

    #[error("symbol oracle required: {0}")]
    MissingOracle(&'static str),

    #[error("hbar = {hbar} is aliased on this momentum grid; smallest usable hbar is {min_hbar}")]
    Aliasing { hbar: f64, min_hbar: f64 },

    #[error("interpolation residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Accuracy { residual: f64, tol: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("theta mismatch: {0} vs {1}")]
    ThetaMismatch(f64, f64),

    #[error("invalid representation (N = {n}, K = {k}): {reason}")]
    InvalidRep { n: usize, k: usize, reason: &'static str },

    #[error("degree cap {cap} exceeded")]
    DegreeCap { cap: u32 },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("point {0} leaves the domain")]
    Range(f64),

    #[error("hbar = {hbar} exceeds the admissible bound {max_hbar}")]
    Admissibility { hbar: f64, max_hbar: f64 },

    #[error("root finder did not converge for target {0}")]
    NoConvergence(f64),

    #[error("invalid parameter: {0}")]
    Invalid(String),
}
