//! Gaussian observables `f(q, p) = 2 e^{−(q−q0)²/2α} e^{−(p−p0)²/2β}`: closed-form
//! Weyl kernels and the positivity threshold at `αβ = (ħ/2)²`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{Grid1D, Symbol};
use crate::weyl::{op_norm, OperatorKernel, WaveFunction};

/// Relative tolerance of the positivity verdict (scaled by the operator norm).
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianObservable {
    pub q0: f64,
    pub p0: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussianObservable {
    pub fn new(q0: f64, p0: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Invalid(format!("alpha and beta must be positive, got {alpha}, {beta}")));
        }
        if !(q0.is_finite() && p0.is_finite()) {
            return Err(Error::Invalid("center must be finite".into()));
        }
        Ok(Self { q0, p0, alpha, beta })
    }

    /// Centered at the origin with `α = β = s`.
    pub fn isotropic(s: f64) -> Result<Self> {
        Self::new(0.0, 0.0, s, s)
    }

    /// `αβ / (ħ/2)²`; the threshold sits at 1.
    pub fn threshold_ratio(&self, hbar: f64) -> f64 {
        self.alpha * self.beta / (0.25 * hbar * hbar)
    }

    pub fn symbol(&self) -> Symbol {
        gaussian_symbol(*self)
    }
}

/// Evaluation oracle with analytic gradient.
pub fn gaussian_symbol(g: GaussianObservable) -> Symbol {
    let GaussianObservable { q0, p0, alpha, beta } = g;
    let value = move |q: f64, p: f64| 2.0 * (-(q - q0).powi(2) / (2.0 * alpha) - (p - p0).powi(2) / (2.0 * beta)).exp();
    Symbol::with_gradient(
        move |q, p| C64::new(value(q, p), 0.0),
        move |q, p| {
            let v = value(q, p);
            (C64::new(-(q - q0) / alpha * v, 0.0), C64::new(-(p - p0) / beta * v, 0.0))
        },
    )
}

/// `Θ = (1/4α)(4αβ/ħ² − 1)`.
pub fn theta(g: &GaussianObservable, hbar: f64) -> f64 {
    (4.0 * g.alpha * g.beta / (hbar * hbar) - 1.0) / (4.0 * g.alpha)
}

fn chi_amplitude(g: &GaussianObservable, hbar: f64) -> f64 {
    (2.0 * g.beta / (PI * hbar * hbar)).powf(0.25)
}

fn chi_at(g: &GaussianObservable, hbar: f64, q: f64) -> C64 {
    let x = q - g.q0;
    C64::from_polar(chi_amplitude(g, hbar) * (-x * x / (4.0 * g.alpha)).exp(), -g.p0 * x / hbar)
}

/// `χ(q) = (2β/πħ²)^{1/4} e^{−(q−q0)²/4α} e^{−ip0(q−q0)/ħ}`.
pub fn chi_vector(g: &GaussianObservable, hbar: f64, qgrid: &Grid1D) -> WaveFunction {
    WaveFunction::from_fn(*qgrid, |q| chi_at(g, hbar, q))
}

/// `‖χ‖² = 2√(αβ)/ħ`.
pub fn chi_norm_sqr(g: &GaussianObservable, hbar: f64) -> f64 {
    2.0 * (g.alpha * g.beta).sqrt() / hbar
}

/// `K(q, q′) = conj χ(q) χ(q′) e^{−(Θ/2)(q−q′)²}`.
pub fn gaussian_kernel_closed_form(g: &GaussianObservable, hbar: f64, qgrid: &Grid1D) -> OperatorKernel {
    let qs = qgrid.points();
    let chi: Vec<C64> = qs.iter().map(|&q| chi_at(g, hbar, q)).collect();
    let th = theta(g, hbar);
    let n = qs.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let d = qs[i] - qs[j];
            m[[i, j]] = chi[i].conj() * chi[j] * (-0.5 * th * d * d).exp();
        }
    }
    OperatorKernel { grid: *qgrid, matrix: m, hbar }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityIntermediates {
    pub theta: f64,
    pub dee: f64,
    pub sigma: f64,
}

/// `Θ`, and `D = (1/σ + 1/2α)(1/σ + 1/2α + 2Θ)`.
pub fn intermediates(g: &GaussianObservable, sigma: f64, hbar: f64) -> Result<PositivityIntermediates> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Degenerate(format!("sigma must be positive, got {sigma}")));
    }
    let th = theta(g, hbar);
    let a = 1.0 / sigma + 1.0 / (2.0 * g.alpha);
    let b = a + 2.0 * th;
    if b == 0.0 {
        return Err(Error::Degenerate("1/σ + 1/2α + 2Θ vanishes".into()));
    }
    Ok(PositivityIntermediates { theta: th, dee: a * b, sigma })
}

/// `ψ_σ(q) = (q−q0) e^{−(q−q0)²/2σ} e^{ip0 q/ħ}`.
pub fn psi_sigma(g: &GaussianObservable, sigma: f64, hbar: f64, qgrid: &Grid1D) -> WaveFunction {
    WaveFunction::from_fn(*qgrid, |q| {
        let x = q - g.q0;
        C64::from_polar(x * (-x * x / (2.0 * sigma)).exp(), g.p0 * q / hbar)
    })
}

/// `⟨ψ_σ, K ψ_σ⟩ = (2β/πħ²)^{1/2} · 2πΘ / D^{3/2}`.
///
/// This is the value of the Gaussian double integral: the quadratic form has
/// determinant `D` and off-diagonal inverse entry `Θ/D`.
pub fn expectation_closed_form(g: &GaussianObservable, sigma: f64, hbar: f64) -> Result<f64> {
    let PositivityIntermediates { theta, dee, .. } = intermediates(g, sigma, hbar)?;
    Ok(chi_amplitude(g, hbar).powi(2) * 2.0 * PI * theta / dee.powf(1.5))
}

/// Alternative closed forms `c · 2πΘ/D²` with `c = (2β/πħ²)^{1/4}` and
/// `c = (2β/πħ²)^{1/2}`, kept for comparison against
/// [`expectation_closed_form`].
pub fn expectation_candidates(g: &GaussianObservable, sigma: f64, hbar: f64) -> Result<[f64; 2]> {
    let PositivityIntermediates { theta, dee, .. } = intermediates(g, sigma, hbar)?;
    let base = 2.0 * PI * theta / (dee * dee);
    let a = chi_amplitude(g, hbar);
    Ok([a * base, a * a * base])
}

/// Direct double quadrature of `⟨ψ_σ, K ψ_σ⟩` with the closed-form kernel.
pub fn expectation_quadrature(g: &GaussianObservable, sigma: f64, hbar: f64, qgrid: &Grid1D) -> Result<f64> {
    let k = gaussian_kernel_closed_form(g, hbar, qgrid);
    let psi = psi_sigma(g, sigma, hbar, qgrid);
    let kpsi = crate::weyl::apply(&k, &psi)?;
    Ok(psi.inner(&kpsi).re)
}

/// `∫ χ ψ_σ dq`, the overlap of `ψ_σ` with the range vector `conj χ` of the
/// projector; zero by parity.
pub fn range_overlap(g: &GaussianObservable, sigma: f64, hbar: f64, qgrid: &Grid1D) -> C64 {
    let chi = chi_vector(g, hbar, qgrid);
    let psi = psi_sigma(g, sigma, hbar, qgrid);
    chi.values.iter().zip(psi.values.iter()).map(|(a, b)| a * b).sum::<C64>() * qgrid.spacing()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityVerdict {
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub positive: bool,
}

/// Smallest eigenvalue of the closed-form operator `K Δq`; positive when it
/// is at least `−1e−6 · ‖K‖`.
pub fn positivity_verdict(g: &GaussianObservable, hbar: f64, qgrid: &Grid1D) -> Result<PositivityVerdict> {
    let k = gaussian_kernel_closed_form(g, hbar, qgrid);
    let m = &k.matrix * C64::new(qgrid.spacing(), 0.0);
    let ev = linalg::hermitian_eigenvalues(&m)?;
    let scale = op_norm(&k)?;
    let min = ev[0];
    Ok(PositivityVerdict { min_eigenvalue: min, scale, positive: min >= -POSITIVITY_TOL * scale })
}
