//! Dense spectral estimators (LAPACK via ndarray-linalg).

use ndarray::Array2;
use ndarray_linalg::{EigValsh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest matrix size the dense estimators accept.
pub const MAX_DENSE: usize = 2048;

fn check_square(m: &Array2<C64>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::Dimension(format!("expected a square matrix, got {r}x{c}")));
    }
    if r > MAX_DENSE {
        return Err(Error::Dimension(format!("dense estimators are capped at n = {MAX_DENSE}, got {r}")));
    }
    Ok(r)
}

/// Largest singular value.
pub fn spectral_norm(m: &Array2<C64>) -> Result<f64> {
    let n = check_square(m)?;
    if n == 0 || m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let (_, s, _) = m.svd(false, false).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// Eigenvalues of the Hermitian part `(M + M†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Vec<f64>> {
    check_square(m)?;
    let h = (m + &m.t().mapv(|z| z.conj())) * C64::new(0.5, 0.0);
    let ev = h.eigvalsh(UPLO::Lower).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut v = ev.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

/// Sup of `|a − b|` entrywise.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}
