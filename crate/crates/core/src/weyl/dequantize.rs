use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{compose, weyl_kernel, OperatorKernel};
use crate::error::{Error, Result};
use crate::numerics::fourier::{fractional_shift, tail_energy_fraction};
use crate::numerics::{Grid1D, Grid2D, SampledFunction};

/// Largest tolerated spectral tail fraction along kernel diagonals.
pub const DEQUANT_TOL: f64 = 1e-6;

/// Momentum axis matched to the kernel: the band `|p| ≤ πħ/Δq` that the
/// position grid can resolve, with one sample per position point.
pub fn natural_p_axis(k: &OperatorKernel) -> Grid1D {
    let half = PI * k.hbar / k.grid.spacing();
    Grid1D::symmetric(half, k.grid.len()).expect("valid axis")
}

/// Symbol of a kernel, `f(q, p) = ∫ du e^{−ipu/ħ} K(q + u/2, q − u/2)`.
///
/// `u` runs over multiples of `Δq`. Even multiples hit grid points; odd ones
/// fall half a cell off the grid along each diagonal `x − y = const` and are
/// filled by trigonometric interpolation of that diagonal.
pub fn dequantize(k: &OperatorKernel, paxis: &Grid1D) -> Result<SampledFunction> {
    let n = k.dim();
    let ni = n as i64;
    let dq = k.grid.spacing();
    let m = &k.matrix;

    // Diagonal d holds K[a, a − d] for a in [max(0, d), min(n, n + d)).
    let diag = |d: i64| -> Vec<C64> {
        let lo = d.max(0);
        let hi = ni.min(ni + d);
        (lo..hi).map(|a| m[[a as usize, (a - d) as usize]]).collect()
    };

    let ds: Vec<i64> = (-(ni - 1)..ni).collect();
    let mut energy = 0.0;
    let mut tail = 0.0;
    // Half-shifted copies of the odd diagonals, indexed like `diag`.
    let shifted: Vec<Option<Vec<C64>>> = ds
        .par_iter()
        .map(|&d| if d.rem_euclid(2) == 1 { Some(fractional_shift(&diag(d), 0.5)) } else { None })
        .collect();
    for &d in &ds {
        let v = diag(d);
        let e: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if e > 0.0 {
            energy += e;
            tail += e * tail_energy_fraction(&v);
        }
    }
    let residual = if energy > 0.0 { tail / energy } else { 0.0 };
    if residual > DEQUANT_TOL {
        return Err(Error::Accuracy { residual, tol: DEQUANT_TOL });
    }

    // G[i, d] = K(q_i + dΔq/2, q_i − dΔq/2).
    let nd = ds.len();
    let mut g = Array2::<C64>::zeros((n, nd));
    for (di, &d) in ds.iter().enumerate() {
        let lo = d.max(0);
        let hi = ni.min(ni + d);
        if d.rem_euclid(2) == 0 {
            let e = d / 2;
            for i in 0..ni {
                let (a, b) = (i + e, i - e);
                if a >= 0 && a < ni && b >= 0 && b < ni {
                    g[[i as usize, di]] = m[[a as usize, b as usize]];
                }
            }
        } else {
            let e = (d - 1).div_euclid(2);
            let h = shifted[di].as_ref().expect("odd diagonal");
            for i in 0..ni {
                let a = i + e;
                if a >= lo && a < hi {
                    g[[i as usize, di]] = h[(a - lo) as usize];
                }
            }
        }
    }

    let ps = paxis.points();
    let mut e = Array2::<C64>::zeros((nd, ps.len()));
    e.axis_iter_mut(ndarray::Axis(0)).into_par_iter().zip(ds.par_iter()).for_each(|(mut row, &d)| {
        let u = d as f64 * dq / k.hbar;
        for (x, &p) in row.iter_mut().zip(&ps) {
            *x = C64::from_polar(dq, -p * u);
        }
    });
    let values = g.dot(&e);
    Ok(SampledFunction { grid: Grid2D::new(k.grid, *paxis), values, symbol: None })
}

/// `f ⋆_ħ g`: the symbol of the product of the two Weyl kernels, on `f`'s grid.
pub fn star_product(f: &SampledFunction, g: &SampledFunction, hbar: f64) -> Result<SampledFunction> {
    let q = f.grid.q;
    let kf = weyl_kernel(f, hbar, &q)?;
    let kg = weyl_kernel(g, hbar, &q)?;
    dequantize(&compose(&kf, &kg)?, &f.grid.p)
}
