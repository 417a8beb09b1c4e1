//! Weyl–Moyal quantization on a position grid.
//!
//! A symbol `f(q, p)` maps to the integral operator with kernel
//! `K(x, y) = ∫ dp/(2πħ) e^{ip(x−y)/ħ} f((x+y)/2, p)`.

mod dequantize;

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::fourier::{fiber_boundary_ratio, REJECT_TOL};
use crate::numerics::{Grid1D, Grid2D, SampledFunction, Symbol};

pub use dequantize::{dequantize, natural_p_axis, star_product, DEQUANT_TOL};

/// Integral kernel on a position grid; the operator acts by
/// `(Kψ)(q_i) = Σ_j K_ij ψ(q_j) Δq`.
#[derive(Clone, Debug)]
pub struct OperatorKernel {
    pub grid: Grid1D,
    pub matrix: Array2<C64>,
    pub hbar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid1D,
    pub values: Array1<C64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Array1<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("{} values on a {}-point grid", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &WaveFunction) -> C64 {
        self.values.iter().zip(other.values.iter()).map(|(a, b)| a.conj() * b).sum::<C64>()
            * self.grid.spacing()
    }
}

fn same_hbar(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

impl OperatorKernel {
    pub fn new(grid: Grid1D, matrix: Array2<C64>, hbar: f64) -> Result<Self> {
        if matrix.dim() != (grid.len(), grid.len()) {
            return Err(Error::Dimension(format!("{:?} matrix on a {}-point grid", matrix.dim(), grid.len())));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Invalid(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { grid, matrix, hbar })
    }

    pub fn zeros(grid: Grid1D, hbar: f64) -> Self {
        Self { grid, matrix: Array2::zeros((grid.len(), grid.len())), hbar }
    }

    /// Kernel `δ_ij / Δq`, the discrete identity operator.
    pub fn identity(grid: Grid1D, hbar: f64) -> Self {
        let mut k = Self::zeros(grid, hbar);
        let d = C64::new(1.0 / grid.spacing(), 0.0);
        k.matrix.diag_mut().fill(d);
        k
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn check_compatible(&self, other: &OperatorKernel) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Dimension("kernels live on different grids".into()));
        }
        if !same_hbar(self.hbar, other.hbar) {
            return Err(Error::Invalid(format!("hbar mismatch: {} vs {}", self.hbar, other.hbar)));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &OperatorKernel, b: C64) -> Result<OperatorKernel> {
        self.check_compatible(other)?;
        let matrix = &self.matrix * a + &other.matrix * b;
        Ok(OperatorKernel { grid: self.grid, matrix, hbar: self.hbar })
    }

    pub fn sub(&self, other: &OperatorKernel) -> Result<OperatorKernel> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> OperatorKernel {
        OperatorKernel { grid: self.grid, matrix: &self.matrix * c, hbar: self.hbar }
    }

    /// Entrywise sup of the kernel.
    pub fn sup(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }
}

/// Smallest `ħ` for which `e^{ip(q−q′)/ħ}` advances by at most `π` per
/// `p`-sample over every pair of points of `qgrid`.
pub fn min_hbar(qgrid: &Grid1D, paxis: &Grid1D) -> f64 {
    paxis.spacing() * (qgrid.len() - 1) as f64 * qgrid.spacing() / PI
}

/// Phase-space grid whose momentum axis `[-p_half, p_half]` is fine enough
/// for every `ħ ≥ hbar_min` on `qgrid`.
pub fn resolving_grid(qgrid: Grid1D, p_half: f64, hbar_min: f64) -> Result<Grid2D> {
    let span = (qgrid.len() - 1) as f64 * qgrid.spacing();
    let np = (2.0 * p_half * span / (PI * hbar_min)).ceil() as usize + 1;
    let np = np.max(qgrid.len().min(64)).max(2);
    Ok(Grid2D::new(qgrid, Grid1D::symmetric(p_half, np)?))
}

/// Kernel of the Weyl quantization of `f` at `hbar` on `qgrid`. Midpoints are
/// evaluated through the symbol oracle; the momentum integral uses the
/// midpoint rule on `f.grid.p`.
pub fn weyl_kernel(f: &SampledFunction, hbar: f64, qgrid: &Grid1D) -> Result<OperatorKernel> {
    let symbol = f.require_symbol()?;
    let ratio = fiber_boundary_ratio(f);
    if ratio > REJECT_TOL {
        return Err(Error::NoDecay { ratio });
    }
    weyl_kernel_symbol(symbol, hbar, qgrid, &f.grid.p)
}

/// [`weyl_kernel`] straight from an oracle, integrating over `paxis`. Decay
/// in `p` is checked on the midpoint samples the quadrature uses.
pub fn weyl_kernel_symbol(symbol: &Symbol, hbar: f64, qgrid: &Grid1D, paxis: &Grid1D) -> Result<OperatorKernel> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Invalid(format!("hbar must be positive, got {hbar}")));
    }
    let paxis = *paxis;
    let hmin = min_hbar(qgrid, &paxis);
    if hbar < hmin * (1.0 - 1e-12) {
        return Err(Error::Aliasing { hbar, min_hbar: hmin });
    }

    let n = qgrid.len();
    let np = paxis.len();
    let dq = qgrid.spacing();
    let ps = paxis.points();
    let pref = C64::new(paxis.spacing() / (2.0 * PI * hbar), 0.0);
    let mut out = Array2::<C64>::zeros((n, n));

    // K_ij depends on s = i + j through the midpoint and on d = i − j through
    // the phase, and s ≡ d (mod 2); each parity class is one matrix product.
    for parity in 0..2usize {
        let svals: Vec<usize> = (parity..2 * n - 1).step_by(2).collect();
        let dvals: Vec<i64> = (-(n as i64 - 1)..n as i64).filter(|d| d.rem_euclid(2) as usize == parity).collect();

        let mut fmat = Array2::<C64>::zeros((svals.len(), np));
        fmat.axis_iter_mut(ndarray::Axis(0)).into_par_iter().zip(svals.par_iter()).for_each(|(mut row, &s)| {
            let m = qgrid.lo() + 0.5 * (s as f64 + 1.0) * dq;
            for (x, &p) in row.iter_mut().zip(&ps) {
                *x = symbol.eval(m, p);
            }
        });
        let sup = fmat.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if sup > 0.0 {
            let edge = fmat
                .axis_iter(ndarray::Axis(0))
                .fold(0.0f64, |m, row| m.max(row[0].norm()).max(row[np - 1].norm()));
            if edge / sup > REJECT_TOL {
                return Err(Error::NoDecay { ratio: edge / sup });
            }
        }
        let mut emat = Array2::<C64>::zeros((np, dvals.len()));
        emat.axis_iter_mut(ndarray::Axis(1)).into_par_iter().zip(dvals.par_iter()).for_each(|(mut col, &d)| {
            let dx = d as f64 * dq / hbar;
            for (x, &p) in col.iter_mut().zip(&ps) {
                *x = C64::from_polar(1.0, p * dx);
            }
        });
        let g = fmat.dot(&emat);
        for (si, &s) in svals.iter().enumerate() {
            for (di, &d) in dvals.iter().enumerate() {
                let twice_i = s as i64 + d;
                let i = twice_i / 2;
                let j = s as i64 - i;
                if i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n {
                    out[[i as usize, j as usize]] = g[[si, di]] * pref;
                }
            }
        }
    }
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numeric("non-finite kernel entry".into()));
    }
    Ok(OperatorKernel { grid: *qgrid, matrix: out, hbar })
}

pub fn apply(k: &OperatorKernel, psi: &WaveFunction) -> Result<WaveFunction> {
    if !k.grid.same_as(&psi.grid) {
        return Err(Error::Dimension("wave function and kernel grids differ".into()));
    }
    let values = k.matrix.dot(&psi.values) * C64::new(k.grid.spacing(), 0.0);
    Ok(WaveFunction { grid: psi.grid, values })
}

pub fn hs_norm(k: &OperatorKernel) -> f64 {
    k.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * k.grid.spacing()
}

/// Largest singular value of the operator `K Δq`.
pub fn op_norm(k: &OperatorKernel) -> Result<f64> {
    Ok(linalg::spectral_norm(&k.matrix)? * k.grid.spacing())
}

pub fn compose(a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
    a.check_compatible(b)?;
    let matrix = a.matrix.dot(&b.matrix) * C64::new(a.grid.spacing(), 0.0);
    Ok(OperatorKernel { grid: a.grid, matrix, hbar: a.hbar })
}

pub fn adjoint(k: &OperatorKernel) -> OperatorKernel {
    OperatorKernel { grid: k.grid, matrix: linalg::dagger(&k.matrix), hbar: k.hbar }
}

/// Sup of the kernel difference restricted to `|q_i|, |q_j| ≤ half`.
pub fn sup_diff_within(a: &OperatorKernel, b: &OperatorKernel, half: f64) -> Result<f64> {
    a.check_compatible(b)?;
    let idx: Vec<usize> = (0..a.dim()).filter(|&i| a.grid.point(i).abs() <= half).collect();
    if idx.is_empty() {
        return Ok(0.0);
    }
    let (lo, hi) = (idx[0], idx[idx.len() - 1] + 1);
    let da = a.matrix.slice(s![lo..hi, lo..hi]);
    let db = b.matrix.slice(s![lo..hi, lo..hi]);
    Ok(da.iter().zip(db.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm())))
}

/// Serializable summary of a kernel.
#[derive(Clone, Debug, Serialize)]
pub struct KernelSummary {
    pub n: usize,
    pub hbar: f64,
    pub hs_norm: f64,
    pub op_norm: f64,
}

pub fn summarize(k: &OperatorKernel) -> Result<KernelSummary> {
    Ok(KernelSummary { n: k.dim(), hbar: k.hbar, hs_norm: hs_norm(k), op_norm: op_norm(k)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample, Symbol};

    fn gauss(q0: f64, p0: f64, a: f64, b: f64) -> Symbol {
        Symbol::new(move |q, p| {
            C64::new(2.0 * (-(q - q0).powi(2) / (2.0 * a) - (p - p0).powi(2) / (2.0 * b)).exp(), 0.0)
        })
    }

    #[test]
    fn projector_kernel_matches_closed_form() {
        // αβ = (ħ/2)²: the kernel is conj(χ(x)) χ(y).
        let (hbar, a, b, q0, p0) = (1.0, 0.5, 0.5, 0.3, -0.4);
        let q = Grid1D::symmetric(8.0, 128).unwrap();
        let grid = resolving_grid(q, 10.0, hbar).unwrap();
        let f = sample(&gauss(q0, p0, a, b), grid).unwrap();
        let k = weyl_kernel(&f, hbar, &q).unwrap();
        let amp = (2.0 * b / (PI * hbar * hbar)).powf(0.25);
        let chi = |x: f64| {
            C64::from_polar(amp * (-(x - q0).powi(2) / (4.0 * a)).exp(), -p0 * (x - q0) / hbar)
        };
        let qs = q.points();
        let mut err = 0.0f64;
        for i in 0..q.len() {
            for j in 0..q.len() {
                err = err.max((k.matrix[[i, j]] - chi(qs[i]).conj() * chi(qs[j])).norm());
            }
        }
        assert!(err < 1e-8, "{err}");
        // ‖χ‖² = 1 here, so the operator is a rank-one orthogonal projector.
        assert!((op_norm(&k).unwrap() - 1.0).abs() < 1e-4);
        let kk = compose(&k, &k).unwrap();
        assert!(linalg::max_abs_diff(&kk.matrix, &k.matrix) < 1e-4);
    }

    #[test]
    fn aliasing_guard_names_min_hbar() {
        let q = Grid1D::symmetric(8.0, 64).unwrap();
        let grid = Grid2D::new(q, Grid1D::symmetric(8.0, 64).unwrap());
        let f = sample(&gauss(0.0, 0.0, 1.0, 1.0), grid).unwrap();
        match weyl_kernel(&f, 0.1, &q) {
            Err(Error::Aliasing { min_hbar, .. }) => assert!((min_hbar - min_hbar_expected(&q, &grid.p)).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn min_hbar_expected(q: &Grid1D, p: &Grid1D) -> f64 {
        p.spacing() * (q.hi() - q.lo() - q.spacing()) / PI
    }

    #[test]
    fn missing_oracle_is_rejected() {
        let q = Grid1D::symmetric(4.0, 16).unwrap();
        let f = SampledFunction::zeros(Grid2D::new(q, q));
        assert!(matches!(weyl_kernel(&f, 1.0, &q), Err(Error::MissingOracle(_))));
    }

    #[test]
    fn identity_and_zero_kernels() {
        let q = Grid1D::symmetric(4.0, 16).unwrap();
        let psi = WaveFunction::from_fn(q, |x| C64::new((-x * x).exp(), x));
        let id = OperatorKernel::identity(q, 1.0);
        let out = apply(&id, &psi).unwrap();
        assert!(out.values.iter().zip(psi.values.iter()).all(|(a, b)| (a - b).norm() < 1e-14));
        let z = OperatorKernel::zeros(q, 1.0);
        assert_eq!(hs_norm(&z), 0.0);
        assert_eq!(op_norm(&z).unwrap(), 0.0);
        assert!(apply(&z, &psi).unwrap().values.iter().all(|v| v.norm() == 0.0));
        let c = compose(&id, &id).unwrap();
        assert!(linalg::max_abs_diff(&c.matrix, &id.matrix) < 1e-12);
    }

    #[test]
    fn hilbert_schmidt_for_unit_gaussian() {
        let q = Grid1D::symmetric(10.0, 160).unwrap();
        let grid = resolving_grid(q, 10.0, 1.0).unwrap();
        let f = sample(&gauss(0.0, 0.0, 1.0, 1.0), grid).unwrap();
        let k = weyl_kernel(&f, 1.0, &q).unwrap();
        let hs2 = hs_norm(&k).powi(2);
        assert!((hs2 / 2.0 - 1.0).abs() < 1e-4, "{hs2}");
        assert!(op_norm(&k).unwrap() <= hs_norm(&k));
    }
}
