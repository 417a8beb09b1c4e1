//! Fiberwise Fourier transforms, spectral derivatives and trigonometric
//! interpolation.
//!
//! Convention: `f̃(q, v) = ∫ dp/(2π) e^{ipv} f(q, p)`, inverse
//! `f(q, p) = ∫ dv e^{-ipv} f̃(q, v)`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{Grid1D, Grid2D};
use super::sampled::{check_same, SampledFunction};
use crate::error::{Error, Result};

/// Boundary/sup ratio above which the transform is flagged as truncated.
pub const DECAY_TOL: f64 = 1e-10;
/// Boundary/sup ratio above which the input is rejected outright.
pub const REJECT_TOL: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct FiberTransform {
    /// Values on the `(q, v)` grid.
    pub transform: SampledFunction,
    pub boundary_ratio: f64,
    pub truncated: bool,
}

/// The `v` axis conjugate to a `p` axis: same point count,
/// `Δv = 2π / (n Δp)`, symmetric about 0.
pub fn conjugate_axis(p: &Grid1D) -> Grid1D {
    let half = PI / p.spacing();
    Grid1D::symmetric(half, p.len()).expect("conjugate of a valid axis is valid")
}

/// Largest `|f|` on the first and last fiber samples relative to `sup |f|`.
pub fn fiber_boundary_ratio(f: &SampledFunction) -> f64 {
    let sup = f.sup_norm();
    if sup == 0.0 {
        return 0.0;
    }
    let np = f.grid.p.len();
    let edge = f
        .values
        .axis_iter(Axis(0))
        .fold(0.0f64, |m, row| m.max(row[0].norm()).max(row[np - 1].norm()));
    edge / sup
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// Exact discrete fiber transform per `q`-slice.
pub fn fourier_fiber(f: &SampledFunction) -> Result<FiberTransform> {
    let ratio = fiber_boundary_ratio(f);
    if ratio > REJECT_TOL {
        return Err(Error::NoDecay { ratio });
    }
    let p = f.grid.p;
    let v = conjugate_axis(&p);
    let n = p.len();
    let (dp, dv) = (p.spacing(), v.spacing());
    let (a, b) = (p.point(0), v.point(0));
    let pre: Vec<C64> = (0..n).map(|l| C64::from_polar(1.0, b * l as f64 * dp)).collect();
    let post: Vec<C64> =
        (0..n).map(|j| C64::from_polar(dp / (2.0 * PI), a * b + a * j as f64 * dv)).collect();
    let fft = plan(n, true);

    let mut values = f.values.clone();
    values.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        let mut buf: Vec<C64> = row.iter().zip(&pre).map(|(x, w)| x * w).collect();
        fft.process(&mut buf);
        for (j, x) in buf.into_iter().enumerate() {
            row[j] = x * post[j];
        }
    });
    Ok(FiberTransform {
        transform: SampledFunction { grid: Grid2D::new(f.grid.q, v), values, symbol: None },
        boundary_ratio: ratio,
        truncated: ratio > DECAY_TOL,
    })
}

/// Inverse of [`fourier_fiber`]; `p` is the momentum axis to return to.
pub fn inverse_fourier_fiber(ft: &SampledFunction, p: Grid1D) -> Result<SampledFunction> {
    let v = conjugate_axis(&p);
    if !v.same_as(&ft.grid.p) {
        return Err(Error::Dimension("fiber axis is not conjugate to the requested p axis".into()));
    }
    let n = p.len();
    let (dp, dv) = (p.spacing(), v.spacing());
    let (a, b) = (p.point(0), v.point(0));
    let pre: Vec<C64> = (0..n).map(|j| C64::from_polar(1.0, -a * j as f64 * dv)).collect();
    let post: Vec<C64> =
        (0..n).map(|l| C64::from_polar(dv, -a * b - b * l as f64 * dp)).collect();
    let fft = plan(n, false);

    let mut values = ft.values.clone();
    values.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        let mut buf: Vec<C64> = row.iter().zip(&pre).map(|(x, w)| x * w).collect();
        fft.process(&mut buf);
        for (l, x) in buf.into_iter().enumerate() {
            row[l] = x * post[l];
        }
    });
    Ok(SampledFunction { grid: Grid2D::new(ft.grid.q, p), values, symbol: None })
}

/// Angular wavenumbers of an `n`-point FFT with sample spacing `h`, with the
/// Nyquist mode set to zero.
fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let len = n as f64 * h;
    (0..n)
        .map(|m| {
            if 2 * m == n {
                0.0
            } else if 2 * m < n {
                2.0 * PI * m as f64 / len
            } else {
                2.0 * PI * (m as f64 - n as f64) / len
            }
        })
        .collect()
}

/// Spectral first derivative of a periodic sequence with spacing `h`.
pub fn spectral_derivative(values: &[C64], h: f64) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (x, k) in buf.iter_mut().zip(wavenumbers(n, h)) {
        *x *= C64::new(0.0, k * scale);
    }
    plan(n, true).process(&mut buf);
    buf
}

/// Spectral partial derivative of a 2-D array along `axis`.
pub fn spectral_partial(values: &Array2<C64>, axis: Axis, h: f64) -> Array2<C64> {
    let mut out = values.clone();
    out.lanes_mut(axis).into_iter().for_each(|mut lane| {
        let d = spectral_derivative(&lane.to_vec(), h);
        for (x, y) in lane.iter_mut().zip(d) {
            *x = y;
        }
    });
    out
}

/// Canonical bracket `∂_q f ∂_p g − ∂_p f ∂_q g` with spectral derivatives.
pub fn poisson_bracket(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    check_same(&f.grid, &g.grid)?;
    let (hq, hp) = (f.grid.q.spacing(), f.grid.p.spacing());
    let fq = spectral_partial(&f.values, Axis(0), hq);
    let fp = spectral_partial(&f.values, Axis(1), hp);
    let gq = spectral_partial(&g.values, Axis(0), hq);
    let gp = spectral_partial(&g.values, Axis(1), hp);
    let values = &fq * &gp - &fp * &gq;
    Ok(SampledFunction { grid: f.grid, values, symbol: None })
}

/// Periodic trigonometric interpolation kernel for `n` samples: the weight of
/// sample `j` at fractional position `s` is `dirichlet(n, s - j)`. For even `n`
/// the Nyquist mode is split into a cosine so node values are reproduced.
pub fn dirichlet(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    let x = PI * s / nf;
    let sx = x.sin();
    let modes = if n % 2 == 0 { nf - 1.0 } else { nf };
    // At multiples of n every retained mode contributes +1.
    let core = if sx.abs() < 1e-12 { modes } else { (modes * x).sin() / sx };
    let nyq = if n % 2 == 0 { (PI * s).cos() } else { 0.0 };
    (core + nyq) / nf
}

/// Interpolation weights (`targets × n`) for samples at the nodes of `grid`
/// evaluated at arbitrary `targets`, periodic with period `grid.width()`.
pub fn interpolation_matrix(grid: &Grid1D, targets: &[f64]) -> Array2<f64> {
    let n = grid.len();
    let (x0, h) = (grid.point(0), grid.spacing());
    let mut m = Array2::zeros((targets.len(), n));
    m.axis_iter_mut(Axis(0)).into_par_iter().zip(targets.par_iter()).for_each(|(mut row, &t)| {
        let s = (t - x0) / h;
        for (j, w) in row.iter_mut().enumerate() {
            *w = dirichlet(n, s - j as f64);
        }
    });
    m
}

/// Values of the trigonometric interpolant of `values` at positions `j + shift`.
pub fn fractional_shift(values: &[C64], shift: f64) -> Vec<C64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf = values.to_vec();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (m, x) in buf.iter_mut().enumerate() {
        let factor = if 2 * m == n {
            C64::new((PI * shift).cos(), 0.0)
        } else {
            let k = if 2 * m < n { m as f64 } else { m as f64 - n as f64 };
            C64::from_polar(1.0, 2.0 * PI * k * shift / n as f64)
        };
        *x *= factor * scale;
    }
    plan(n, true).process(&mut buf);
    buf
}

/// Fraction of spectral energy in modes with `|m| > n/4`; a cheap
/// resolution indicator for a sequence about to be interpolated.
pub fn tail_energy_fraction(values: &[C64]) -> f64 {
    let n = values.len();
    if n < 8 {
        return 0.0;
    }
    let mut buf = values.to_vec();
    plan(n, false).process(&mut buf);
    let (mut tail, mut total) = (0.0, 0.0);
    for (m, x) in buf.iter().enumerate() {
        let k = m.min(n - m);
        let e = x.norm_sqr();
        total += e;
        if 4 * k > n {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sampled::sample;
    use crate::numerics::symbol::Symbol;

    fn gauss_symbol() -> Symbol {
        Symbol::new(|q, p| C64::new(2.0 * (-q * q / 2.0 - p * p / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_fourier_pair() {
        let grid = Grid2D::square(16.0, 256).unwrap();
        let f = sample(&gauss_symbol(), grid).unwrap();
        let ft = fourier_fiber(&f).unwrap();
        assert!(!ft.truncated);
        let t = &ft.transform;
        let mut err = 0.0f64;
        for (i, q) in t.grid.q.points().into_iter().enumerate() {
            for (j, v) in t.grid.p.points().into_iter().enumerate() {
                let exact = 2.0 * (-q * q / 2.0).exp() * (-v * v / 2.0).exp() / (2.0 * PI).sqrt();
                err = err.max((t.values[[i, j]] - exact).norm());
            }
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn round_trip_and_rejection() {
        let grid = Grid2D::new(Grid1D::new(-6.0, 5.0, 40).unwrap(), Grid1D::new(-14.0, 17.0, 90).unwrap());
        let s = Symbol::new(|q, p| C64::new((-(p - 1.0).powi(2) / 3.0).exp() * q.cos(), q * (-p * p).exp()));
        let f = sample(&s, grid).unwrap();
        let ft = fourier_fiber(&f).unwrap();
        let back = inverse_fourier_fiber(&ft.transform, grid.p).unwrap();
        let err = (&back.values - &f.values).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-10, "{err}");

        let flat = sample(&Symbol::new(|q, _| C64::new((-q * q).exp(), 0.0)), grid).unwrap();
        assert!(matches!(fourier_fiber(&flat), Err(Error::NoDecay { .. })));
    }

    #[test]
    fn truncation_flag() {
        let grid = Grid2D::square(4.0, 64).unwrap();
        let f = sample(&Symbol::new(|_, p| C64::new((-p * p / 2.0).exp(), 0.0)), grid).unwrap();
        let ft = fourier_fiber(&f).unwrap();
        assert!(ft.truncated && ft.boundary_ratio > DECAY_TOL);
    }

    #[test]
    fn dirichlet_reproduces_nodes() {
        for n in [7usize, 8] {
            for j in 0..n {
                for s in -(n as i64)..(2 * n as i64) {
                    let w = dirichlet(n, s as f64 - j as f64);
                    let expect = if (s - j as i64).rem_euclid(n as i64) == 0 { 1.0 } else { 0.0 };
                    assert!((w - expect).abs() < 1e-12, "n={n} j={j} s={s} w={w}");
                }
            }
        }
    }

    #[test]
    fn interpolation_and_shift_agree() {
        let n = 48;
        let grid = Grid1D::new(-6.0, 6.0, n).unwrap();
        let xs = grid.points();
        let vals: Vec<C64> = xs.iter().map(|x| C64::new((-x * x).exp(), x * (-x * x).exp())).collect();
        let shifted = fractional_shift(&vals, 0.5);
        let targets: Vec<f64> = xs.iter().map(|x| x + 0.5 * grid.spacing()).collect();
        let m = interpolation_matrix(&grid, &targets);
        for (r, &t) in targets.iter().enumerate() {
            let via_m: C64 = (0..n).map(|j| vals[j] * m[[r, j]]).sum();
            let exact = C64::new((-t * t).exp(), t * (-t * t).exp());
            assert!((via_m - shifted[r]).norm() < 1e-12);
            if t < 5.5 {
                assert!((via_m - exact).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let grid = Grid1D::symmetric(10.0, 128).unwrap();
        let xs = grid.points();
        let vals: Vec<C64> = xs.iter().map(|x| C64::new((-x * x / 2.0).exp(), 0.0)).collect();
        let d = spectral_derivative(&vals, grid.spacing());
        for (x, z) in xs.iter().zip(d) {
            assert!((z.re + x * (-x * x / 2.0).exp()).abs() < 1e-10);
        }
    }
}
