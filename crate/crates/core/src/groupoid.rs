//! Functions on the semidirect product `ℝ ⋊ ℝ` with the deformed convolution
//! `(f⋆g)(x, y) = ∫ f(x, z) g(x + εz, y − z) dz`, their regular
//! representation, the passage from Weyl symbols, and the boundary condition
//! of the tangent groupoid.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::fourier::{dirichlet, fiber_boundary_ratio, fractional_shift, interpolation_matrix, REJECT_TOL};
use crate::numerics::{fourier_fiber, sample, Grid1D, Grid2D, SampledFunction, Symbol};
use crate::weyl::{op_norm, resolving_grid, weyl_kernel, weyl_kernel_symbol, OperatorKernel};

/// Relative size below which samples are treated as outside the support.
const SUPPORT_TOL: f64 = 1e-10;

/// `values[[i, k]] = f(x_i, y_k)`.
#[derive(Clone, Debug)]
pub struct GroupoidFunction {
    pub grid: Grid2D,
    pub values: Array2<C64>,
    pub epsilon: f64,
}

impl GroupoidFunction {
    pub fn new(grid: Grid2D, values: Array2<C64>, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Invalid(format!("epsilon must be finite and non-negative, got {epsilon}")));
        }
        if values.dim() != grid.shape() {
            return Err(Error::Dimension(format!("values {:?} vs grid {:?}", values.dim(), grid.shape())));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numeric("non-finite groupoid function value".into()));
        }
        Ok(Self { grid, values, epsilon })
    }

    pub fn from_fn(grid: Grid2D, epsilon: f64, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let (xs, ys) = (grid.q.points(), grid.p.points());
        let values = Array2::from_shape_fn(grid.shape(), |(i, k)| f(xs[i], ys[k]));
        Self::new(grid, values, epsilon)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn sup_diff(&self, other: &GroupoidFunction) -> Result<f64> {
        self.check_pair(other)?;
        Ok(crate::linalg::max_abs_diff(&self.values, &other.values))
    }

    fn check_pair(&self, other: &GroupoidFunction) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Dimension("groupoid functions on different grids".into()));
        }
        if self.epsilon != other.epsilon {
            return Err(Error::Invalid(format!("epsilon mismatch: {} vs {}", self.epsilon, other.epsilon)));
        }
        Ok(())
    }
}

/// Index of the node `0` of a symmetric odd grid, i.e. a centered lattice.
fn lattice_center(y: &Grid1D) -> Result<usize> {
    let n = y.len();
    if n % 2 == 0 || (y.lo() + y.hi()).abs() > 1e-12 * y.width() {
        return Err(Error::InvalidGrid("the y axis must be a centered lattice (odd, symmetric)".into()));
    }
    Ok((n - 1) / 2)
}

/// Column `k` of `values` shifted along `x` by `shift` grid steps.
fn shifted_column(values: &Array2<C64>, k: usize, shift: f64) -> Vec<C64> {
    let col: Vec<C64> = values.column(k).to_vec();
    if shift == 0.0 {
        col
    } else {
        fractional_shift(&col, shift)
    }
}

fn check_shift_window(f: &GroupoidFunction) -> Result<()> {
    let sup = f.sup_norm();
    let (xs, ys) = (f.grid.q.points(), f.grid.p.points());
    for ((i, l), z) in f.values.indexed_iter() {
        if z.norm() > SUPPORT_TOL * sup {
            let x = xs[i] + f.epsilon * ys[l];
            if !f.grid.q.contains(x) {
                return Err(Error::Truncation(format!(
                    "shift x + εy = {x:.4} leaves [{:.4}, {:.4}] where f is not negligible",
                    f.grid.q.lo(),
                    f.grid.q.hi()
                )));
            }
        }
    }
    Ok(())
}

/// The deformed convolution. `y − z` stays on the lattice; `x + εz` is
/// reached by trigonometric interpolation along `x`.
pub fn deformed_convolve(f: &GroupoidFunction, g: &GroupoidFunction) -> Result<GroupoidFunction> {
    f.check_pair(g)?;
    let c = lattice_center(&f.grid.p)?;
    check_shift_window(f)?;
    let (nx, ny) = f.grid.shape();
    let dy = f.grid.p.spacing();
    let dx = f.grid.q.spacing();
    let ys = f.grid.p.points();

    // One output column per task with a fixed summation order over `l`, so
    // results do not depend on how the work is split.
    let active: Vec<usize> =
        (0..ny).filter(|&l| f.values.column(l).iter().any(|z| *z != C64::new(0.0, 0.0))).collect();
    let mut out = Array2::<C64>::zeros((nx, ny));
    out.axis_iter_mut(Axis(1)).into_par_iter().enumerate().for_each(|(k, mut col)| {
        for &l in &active {
            // y_k − z_l is node k − l + c.
            let m = k as i64 - l as i64 + c as i64;
            if m < 0 || m >= ny as i64 {
                continue;
            }
            let gs = shifted_column(&g.values, m as usize, f.epsilon * ys[l] / dx);
            let fl = f.values.column(l);
            for i in 0..nx {
                col[i] += fl[i] * gs[i] * dy;
            }
        }
    });
    GroupoidFunction::new(f.grid, out, f.epsilon)
}

/// `f*(x, y) = conj f(x + εy, −y)`.
pub fn involution(f: &GroupoidFunction) -> Result<GroupoidFunction> {
    let c = lattice_center(&f.grid.p)?;
    check_shift_window(f)?;
    let (nx, ny) = f.grid.shape();
    let dx = f.grid.q.spacing();
    let ys = f.grid.p.points();
    let mut out = Array2::<C64>::zeros((nx, ny));
    out.axis_iter_mut(Axis(1)).into_par_iter().enumerate().for_each(|(k, mut col)| {
        let mirror = 2 * c - k;
        let vals = shifted_column(&f.values, mirror, f.epsilon * ys[k] / dx);
        for (o, v) in col.iter_mut().zip(vals) {
            *o = v.conj();
        }
    });
    GroupoidFunction::new(f.grid, out, f.epsilon)
}

/// Weights of `y`-samples reproducing `f(·, t)`; exact node hits use the
/// sample itself, points outside the `y` range get no weight.
fn y_weights(y: &Grid1D, t: f64) -> Option<Vec<(usize, f64)>> {
    let h = y.spacing();
    let s = (t - y.point(0)) / h;
    let r = s.round();
    if (s - r).abs() < 1e-9 {
        return if r >= 0.0 && (r as usize) < y.len() { Some(vec![(r as usize, 1.0)]) } else { None };
    }
    if !y.contains(t) {
        return None;
    }
    Some((0..y.len()).map(|j| (j, dirichlet(y.len(), s - j as f64))).collect())
}

/// `(π(f)ψ)(x) = ∫ f(x, y) ψ(x + εy) dy` as the kernel
/// `K(x, x′) = ε⁻¹ f(x, (x′ − x)/ε)` on the `x` grid. The stored `hbar` is `ε`.
pub fn semidirect_rep(f: &GroupoidFunction) -> Result<OperatorKernel> {
    if f.epsilon == 0.0 {
        return Err(Error::Invalid(
            "ε = 0 has no kernel on the x grid; use the fiberwise convolution family".into(),
        ));
    }
    let n = f.grid.q.len();
    let dx = f.grid.q.spacing();
    let eps = f.epsilon;
    // K[i][j] depends on the offset j − i through y = (j − i)Δx/ε.
    let offsets: Vec<Option<Vec<(usize, f64)>>> =
        (0..2 * n - 1).map(|d| y_weights(&f.grid.p, (d as f64 - (n - 1) as f64) * dx / eps)).collect();
    let mut m = Array2::<C64>::zeros((n, n));
    m.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(i, mut row)| {
        let fi = f.values.row(i);
        for (j, out) in row.iter_mut().enumerate() {
            if let Some(w) = &offsets[j + n - 1 - i] {
                let v: C64 = w.iter().map(|&(l, wl)| fi[l] * wl).sum();
                *out = v / eps;
            }
        }
    });
    OperatorKernel::new(f.grid.q, m, eps)
}

#[derive(Clone, Debug)]
pub struct WmCorrespondence {
    pub fhat: GroupoidFunction,
    /// `‖π(f̂_ħ) − Q^W_ħ(f)‖`.
    pub defect: f64,
    /// `‖Q^W_ħ(f)‖`.
    pub weyl_norm: f64,
}

/// `f̂_ħ(x, y) = ∫ dp/(2π) e^{−ipy} f(x + ħy/2, p)` on the `x` axis of `f` and
/// the centered `y` lattice with `Δy = Δx/ħ`, `2n − 1` points.
pub fn wm_fhat(f: &SampledFunction, hbar: f64) -> Result<GroupoidFunction> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Invalid(format!("hbar must be positive, got {hbar}")));
    }
    let symbol = f.require_symbol()?;
    let ratio = fiber_boundary_ratio(f);
    if ratio > REJECT_TOL {
        return Err(Error::NoDecay { ratio });
    }
    let x = f.grid.q;
    let n = x.len();
    let dx = x.spacing();
    let y = Grid1D::centered_lattice(dx / hbar, 2 * n - 1)?;
    let ps = f.grid.p.points();
    // x_i + ħ y_k / 2 runs over half-steps of x: row r = 2i + k holds
    // lo + (r − n + 2) Δx / 2.
    let rows = 4 * n - 3;
    let mut table = Array2::<C64>::zeros((rows, ps.len()));
    table.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(r, mut row)| {
        let xr = x.lo() + 0.5 * (r as f64 - n as f64 + 2.0) * dx;
        for (o, &p) in row.iter_mut().zip(&ps) {
            *o = symbol.eval(xr, p);
        }
    });
    let w = f.grid.p.spacing() / (2.0 * PI);
    let ys = y.points();
    let mut values = Array2::<C64>::zeros((n, 2 * n - 1));
    values.axis_iter_mut(Axis(1)).into_par_iter().enumerate().for_each(|(k, mut col)| {
        let e: Array1<C64> = ps.iter().map(|&p| C64::from_polar(w, -p * ys[k])).collect();
        let block = table.slice(s![k..k + 2 * n - 1;2, ..]);
        col.assign(&block.dot(&e));
    });
    GroupoidFunction::new(Grid2D::new(x, y), values, hbar)
}

pub fn wm_correspondence(f: &SampledFunction, hbar: f64) -> Result<WmCorrespondence> {
    let fhat = wm_fhat(f, hbar)?;
    let rep = semidirect_rep(&fhat)?;
    let weyl = weyl_kernel(f, hbar, &f.grid.q)?;
    let defect = op_norm(&rep.sub(&weyl)?)?;
    let weyl_norm = op_norm(&weyl)?;
    Ok(WmCorrespondence { fhat, defect, weyl_norm })
}

/// Kernels `K_ħ` along a decreasing schedule with a candidate boundary value
/// `f̃(q, v)` at `ħ = 0`.
#[derive(Clone, Debug)]
pub struct KernelFamily {
    pub hbars: Vec<f64>,
    pub kernels: Vec<OperatorKernel>,
    pub boundary_symbol: SampledFunction,
}

impl KernelFamily {
    pub fn new(hbars: Vec<f64>, kernels: Vec<OperatorKernel>, boundary_symbol: SampledFunction) -> Result<Self> {
        if hbars.len() != kernels.len() || hbars.is_empty() {
            return Err(Error::Dimension(format!("{} hbars vs {} kernels", hbars.len(), kernels.len())));
        }
        if hbars.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Invalid("hbars must be strictly decreasing".into()));
        }
        for k in &kernels[1..] {
            kernels[0].grid.same_as(&k.grid).then_some(()).ok_or_else(|| {
                Error::Dimension("kernels of a family must share a grid".into())
            })?;
        }
        Ok(Self { hbars, kernels, boundary_symbol })
    }

    /// Weyl kernels of `kernel_symbol` with a given boundary value.
    pub fn weyl(
        kernel_symbol: &Symbol,
        qgrid: Grid1D,
        p_half: f64,
        hbars: &[f64],
        boundary_symbol: SampledFunction,
    ) -> Result<Self> {
        let kernels = hbars
            .par_iter()
            .map(|&h| {
                let grid = resolving_grid(qgrid, p_half, h)?;
                weyl_kernel_symbol(kernel_symbol, h, &qgrid, &grid.p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(hbars.to_vec(), kernels, boundary_symbol)
    }

    /// The family `ħ ↦ Q^W_ħ(f)` with its own fiber transform `f̃` sampled
    /// from `f` on `boundary` (a `(q, p)` grid) as boundary value.
    pub fn canonical(f: &Symbol, qgrid: Grid1D, boundary: Grid2D, hbars: &[f64]) -> Result<Self> {
        let ft = fourier_fiber(&sample(f, boundary)?)?;
        Self::weyl(f, qgrid, boundary.p.hi(), hbars, ft.transform)
    }

    /// `K_ħ + ħ Q^W_ħ(noise)`.
    pub fn perturbed(&self, noise: &Symbol, p_half: f64) -> Result<Self> {
        let qgrid = self.kernels[0].grid;
        let kernels = self
            .hbars
            .par_iter()
            .zip(&self.kernels)
            .map(|(&h, k)| {
                let grid = resolving_grid(qgrid, p_half, h)?;
                let kn = weyl_kernel_symbol(noise, h, &qgrid, &grid.p)?;
                k.combine(C64::new(1.0, 0.0), &kn, C64::new(h, 0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.hbars.clone(), kernels, self.boundary_symbol.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentReport {
    pub hbars: Vec<f64>,
    /// `sup |ħ K_ħ(q + ħv/2, q − ħv/2) − f̃(q, v)|`.
    pub scaled: Vec<f64>,
    /// The same without the factor `ħ`.
    pub raw: Vec<f64>,
    /// Boundary grid points skipped because `q ± ħv/2` leaves the kernel grid.
    pub clipped: Vec<usize>,
}

fn boundary_defects(k: &OperatorKernel, hbar: f64, fb: &SampledFunction) -> Result<(f64, f64, usize)> {
    let qg = k.grid;
    let (qs, vs) = (fb.grid.q.points(), fb.grid.p.points());
    let mut xs = Vec::new();
    let mut xps = Vec::new();
    let mut targets = Vec::new();
    for (a, &q) in qs.iter().enumerate() {
        for (b, &v) in vs.iter().enumerate() {
            let (x, xp) = (q + 0.5 * hbar * v, q - 0.5 * hbar * v);
            if qg.contains(x) && qg.contains(xp) {
                xs.push(x);
                xps.push(xp);
                targets.push(fb.values[[a, b]]);
            }
        }
    }
    let clipped = qs.len() * vs.len() - targets.len();
    if targets.is_empty() {
        return Ok((0.0, 0.0, clipped));
    }
    // Complex product on purpose: some OpenBLAS builds ship a faulty real
    // dgemm kernel for newer x86 cores, while zgemm is unaffected.
    let wx = interpolation_matrix(&qg, &xs).mapv(|w| C64::new(w, 0.0));
    let wxp = interpolation_matrix(&qg, &xps);
    let m = wx.dot(&k.matrix);
    let (mut scaled, mut raw) = (0.0f64, 0.0f64);
    for (p, t) in targets.iter().enumerate() {
        let val: C64 = m.row(p).iter().zip(wxp.row(p)).map(|(z, w)| z * w).sum();
        scaled = scaled.max((val * hbar - t).norm());
        raw = raw.max((val - t).norm());
    }
    Ok((scaled, raw, clipped))
}

/// Sup-distance between the kernels, pulled back by `(q, v) ↦ (q + ħv/2,
/// q − ħv/2)`, and the boundary value, with and without the factor `ħ`.
pub fn tangent_boundary_check(family: &KernelFamily) -> Result<TangentReport> {
    let rows = family
        .hbars
        .par_iter()
        .zip(&family.kernels)
        .map(|(&h, k)| boundary_defects(k, h, &family.boundary_symbol))
        .collect::<Result<Vec<_>>>()?;
    Ok(TangentReport {
        hbars: family.hbars.clone(),
        scaled: rows.iter().map(|r| r.0).collect(),
        raw: rows.iter().map(|r| r.1).collect(),
        clipped: rows.iter().map(|r| r.2).collect(),
    })
}
