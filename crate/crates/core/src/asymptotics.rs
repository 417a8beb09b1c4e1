//! Executable checks of the strict-quantization conditions along an `ħ`
//! schedule: Dirac, von Neumann, norm limit, norm continuity and the
//! classical limits of the star product.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Grid1D, Grid2D, HbarSchedule, Symbol};
use crate::weyl::{self, dequantize, resolving_grid, weyl_kernel_symbol, OperatorKernel};

/// Fraction of the classical scale the last defect must fall below.
pub const LIMIT_FRACTION: f64 = 0.05;
/// Cap on the momentum samples of the auto-sized quadrature axis.
pub const MAX_P_POINTS: usize = 16384;

pub const HBAR_ZERO_NOTE: &str = "hbar = 0 is not evaluated; only the approach along the schedule is checked";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Dirac,
    VonNeumann,
    NormLimit,
    NormContinuity,
    StarLimit,
}

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Dirac => "dirac",
            Axiom::VonNeumann => "vonneumann",
            Axiom::NormLimit => "norm_limit",
            Axiom::NormContinuity => "norm_continuity",
            Axiom::StarLimit => "star_limit",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    /// Which sequence of the axiom this is, e.g. `"product"` or `"bracket"`
    /// for the star limits; the axiom label otherwise.
    pub series: String,
    pub hbars: Vec<f64>,
    pub defects: Vec<f64>,
    pub classical_ref: f64,
    /// Scheduled values skipped because the grid cannot resolve them.
    pub clipped: Vec<f64>,
    pub note: &'static str,
}

impl AxiomReport {
    fn new(axiom: Axiom, series: &str, hbars: Vec<f64>, defects: Vec<f64>, classical_ref: f64, clipped: Vec<f64>) -> Self {
        Self { axiom, series: series.to_string(), hbars, defects, classical_ref, clipped, note: HBAR_ZERO_NOTE }
    }

    pub fn last(&self) -> Option<f64> {
        self.defects.last().copied()
    }

    /// The last defect is the smallest one.
    pub fn last_is_min(&self) -> bool {
        match self.last() {
            Some(l) => self.defects.iter().all(|&d| l <= d),
            None => false,
        }
    }

    /// `defects[start] > defects[start + 1] > …` (0-based).
    pub fn strictly_decreasing_from(&self, start: usize) -> bool {
        self.defects.iter().skip(start).collect::<Vec<_>>().windows(2).all(|w| w[1] < w[0])
    }

    /// Last defect below `LIMIT_FRACTION` of the classical scale and the
    /// smallest of the sequence.
    pub fn passes(&self) -> bool {
        match self.last() {
            Some(l) => l <= LIMIT_FRACTION * self.classical_ref && self.last_is_min(),
            None => false,
        }
    }
}

/// A quantization map realized on a position grid.
pub trait Quantizer: Sync {
    fn name(&self) -> &'static str;
    /// Smallest `ħ` the discretization can represent.
    fn min_hbar(&self) -> f64;
    fn quantize(&self, f: &Symbol, hbar: f64) -> Result<OperatorKernel>;
    fn compose(&self, a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel>;
    fn op_norm(&self, k: &OperatorKernel) -> Result<f64>;
    /// Sup of `|f|` over the phase-space region the quantizer samples.
    fn classical_sup(&self, f: &Symbol) -> f64;
}

/// Weyl quantization on `qgrid`; the momentum quadrature axis spans
/// `[-p_half, p_half]` and is refined per `ħ` to satisfy the aliasing guard.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeylQuantizer {
    pub qgrid: Grid1D,
    pub p_half: f64,
}

impl WeylQuantizer {
    pub fn new(qgrid: Grid1D, p_half: f64) -> Result<Self> {
        if !(p_half > 0.0) {
            return Err(Error::Invalid(format!("p_half must be positive, got {p_half}")));
        }
        Ok(Self { qgrid, p_half })
    }

    /// Square box `[-half, half]²` with `n` position points.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(Grid1D::symmetric(half, n)?, half)
    }

    /// Phase-space grid used at `hbar`.
    pub fn grid_at(&self, hbar: f64) -> Result<Grid2D> {
        resolving_grid(self.qgrid, self.p_half, hbar)
    }

    /// Momentum band `|p| ≤ πħ/Δq` representable on the position grid.
    pub fn band(&self, hbar: f64) -> f64 {
        (std::f64::consts::PI * hbar / self.qgrid.spacing()).min(self.p_half)
    }

    pub fn display_grid(&self) -> Grid2D {
        Grid2D::new(self.qgrid, Grid1D::symmetric(self.p_half, self.qgrid.len()).expect("valid"))
    }
}

fn sup_over(f: &Symbol, grid: &Grid2D) -> f64 {
    let ps = grid.p.points();
    grid.q
        .points()
        .par_iter()
        .map(|&q| ps.iter().fold(0.0f64, |m, &p| m.max(f.eval(q, p).norm())))
        .reduce(|| 0.0, f64::max)
}

impl Quantizer for WeylQuantizer {
    fn name(&self) -> &'static str {
        "weyl"
    }

    fn min_hbar(&self) -> f64 {
        let span = (self.qgrid.len() - 1) as f64 * self.qgrid.spacing();
        2.0 * self.p_half * span / (std::f64::consts::PI * (MAX_P_POINTS - 1) as f64)
    }

    fn quantize(&self, f: &Symbol, hbar: f64) -> Result<OperatorKernel> {
        let grid = self.grid_at(hbar)?;
        weyl_kernel_symbol(f, hbar, &self.qgrid, &grid.p)
    }

    fn compose(&self, a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
        weyl::compose(a, b)
    }

    fn op_norm(&self, k: &OperatorKernel) -> Result<f64> {
        weyl::op_norm(k)
    }

    fn classical_sup(&self, f: &Symbol) -> f64 {
        sup_over(f, &self.display_grid())
    }
}

/// Jordan product `(AB + BA)/2`.
pub fn jordan(a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
    jordan_with(&weyl::compose, a, b)
}

/// Quantum bracket `(AB − BA)/(iħ)`.
pub fn quantum_bracket(a: &OperatorKernel, b: &OperatorKernel, hbar: f64) -> Result<OperatorKernel> {
    bracket_with(&weyl::compose, a, b, hbar)
}

type ComposeFn<'a> = dyn Fn(&OperatorKernel, &OperatorKernel) -> Result<OperatorKernel> + 'a;

fn jordan_with(compose: &ComposeFn<'_>, a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
    let ab = compose(a, b)?;
    let ba = compose(b, a)?;
    ab.combine(C64::new(0.5, 0.0), &ba, C64::new(0.5, 0.0))
}

fn bracket_with(compose: &ComposeFn<'_>, a: &OperatorKernel, b: &OperatorKernel, hbar: f64) -> Result<OperatorKernel> {
    let ab = compose(a, b)?;
    let ba = compose(b, a)?;
    let c = C64::new(0.0, -1.0 / hbar);
    ab.combine(c, &ba, -c)
}

/// Splits a schedule into values the quantizer resolves and clipped ones.
fn usable(qz: &dyn Quantizer, schedule: &HbarSchedule) -> (Vec<f64>, Vec<f64>) {
    let floor = qz.min_hbar();
    schedule.values().into_iter().partition(|&h| h >= floor)
}

fn bracket_symbol(f: &Symbol, g: &Symbol) -> Result<Symbol> {
    f.bracket(g).ok_or(Error::MissingOracle("the Poisson bracket needs analytic gradients"))
}

/// `‖Q_ħ({f,g}) − [Q_ħ f, Q_ħ g]_ħ‖` along the schedule.
pub fn check_dirac(qz: &dyn Quantizer, f: &Symbol, g: &Symbol, schedule: &HbarSchedule) -> Result<AxiomReport> {
    let fg = bracket_symbol(f, g)?;
    let (hbars, clipped) = usable(qz, schedule);
    let compose = |a: &OperatorKernel, b: &OperatorKernel| qz.compose(a, b);
    let defects = hbars
        .par_iter()
        .map(|&h| {
            let kf = qz.quantize(f, h)?;
            let kg = qz.quantize(g, h)?;
            let lhs = qz.quantize(&fg, h)?;
            let rhs = bracket_with(&compose, &kf, &kg, h)?;
            qz.op_norm(&lhs.sub(&rhs)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport::new(Axiom::Dirac, "dirac", hbars, defects, qz.classical_sup(&fg), clipped))
}

/// `‖Q_ħ(fg) − Q_ħ f ∘ Q_ħ g‖` along the schedule.
pub fn check_vonneumann(qz: &dyn Quantizer, f: &Symbol, g: &Symbol, schedule: &HbarSchedule) -> Result<AxiomReport> {
    let prod = f.mul(g);
    let (hbars, clipped) = usable(qz, schedule);
    let compose = |a: &OperatorKernel, b: &OperatorKernel| qz.compose(a, b);
    let defects = hbars
        .par_iter()
        .map(|&h| {
            let kf = qz.quantize(f, h)?;
            let kg = qz.quantize(g, h)?;
            let lhs = qz.quantize(&prod, h)?;
            let rhs = jordan_with(&compose, &kf, &kg)?;
            qz.op_norm(&lhs.sub(&rhs)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport::new(Axiom::VonNeumann, "vonneumann", hbars, defects, qz.classical_sup(&prod), clipped))
}

fn norms(qz: &dyn Quantizer, f: &Symbol, hbars: &[f64]) -> Result<Vec<f64>> {
    hbars.par_iter().map(|&h| qz.op_norm(&qz.quantize(f, h)?)).collect()
}

/// `|‖Q_ħ f‖ − sup|f||` along the schedule.
pub fn check_norm_limit(qz: &dyn Quantizer, f: &Symbol, schedule: &HbarSchedule) -> Result<AxiomReport> {
    let (hbars, clipped) = usable(qz, schedule);
    let sup = qz.classical_sup(f);
    let defects = norms(qz, f, &hbars)?.into_iter().map(|n| (n - sup).abs()).collect();
    Ok(AxiomReport::new(Axiom::NormLimit, "norm_limit", hbars, defects, sup, clipped))
}

/// Operator norms along the schedule together with the norm-limit report.
pub fn norm_sequence(qz: &dyn Quantizer, f: &Symbol, schedule: &HbarSchedule) -> Result<(Vec<f64>, Vec<f64>)> {
    let (hbars, _) = usable(qz, schedule);
    let n = norms(qz, f, &hbars)?;
    Ok((hbars, n))
}

/// `|‖Q_{ħ_k} f‖ − ‖Q_{ħ_{k+1}} f‖|`, one entry per consecutive pair.
pub fn check_norm_continuity(qz: &dyn Quantizer, f: &Symbol, schedule: &HbarSchedule) -> Result<AxiomReport> {
    let (hbars, clipped) = usable(qz, schedule);
    let n = norms(qz, f, &hbars)?;
    let defects: Vec<f64> = n.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let hb = hbars.iter().take(defects.len()).copied().collect();
    Ok(AxiomReport::new(Axiom::NormContinuity, "norm_continuity", hb, defects, qz.classical_sup(f), clipped))
}

#[derive(Clone, Debug, Serialize)]
pub struct StarLimitReport {
    /// `sup |f ⋆ g − fg|`.
    pub product: AxiomReport,
    /// `sup |(f ⋆ g − g ⋆ f)/(iħ) − {f, g}|`.
    pub bracket: AxiomReport,
}

/// Sup of `|a − b|` over points with `|p| ≤ band` (and all `q`).
fn band_sup(a: &Array2<C64>, b: &Array2<C64>, p: &Grid1D, band: f64) -> f64 {
    let cols: Vec<usize> = (0..p.len()).filter(|&j| p.point(j).abs() <= band).collect();
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for &j in &cols {
            m = m.max((a[[i, j]] - b[[i, j]]).norm());
        }
    }
    m
}

fn sampled(f: &Symbol, grid: &Grid2D) -> Array2<C64> {
    let (qs, ps) = (grid.q.points(), grid.p.points());
    let mut out = Array2::zeros(grid.shape());
    for (i, &q) in qs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            out[[i, j]] = f.eval(q, p);
        }
    }
    out
}

/// Classical limits of the Weyl star product: `f ⋆ g → fg` and
/// `(f ⋆ g − g ⋆ f)/(iħ) → {f, g}`, measured on the representable band.
pub fn check_star_limits(qz: &WeylQuantizer, f: &Symbol, g: &Symbol, schedule: &HbarSchedule) -> Result<StarLimitReport> {
    let fg = f.mul(g);
    let br = bracket_symbol(f, g)?;
    let (hbars, clipped) = usable(qz, schedule);
    let pairs = hbars
        .par_iter()
        .map(|&h| {
            let grid = qz.grid_at(h)?;
            let kf = qz.quantize(f, h)?;
            let kg = qz.quantize(g, h)?;
            let s_fg = dequantize(&weyl::compose(&kf, &kg)?, &grid.p)?;
            let s_gf = dequantize(&weyl::compose(&kg, &kf)?, &grid.p)?;
            let band = qz.band(h);
            let prod = band_sup(&s_fg.values, &sampled(&fg, &grid), &grid.p, band);
            let comm = (&s_fg.values - &s_gf.values) * C64::new(0.0, -1.0 / h);
            let brk = band_sup(&comm, &sampled(&br, &grid), &grid.p, band);
            Ok((prod, brk))
        })
        .collect::<Result<Vec<_>>>()?;
    let (pd, bd): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(StarLimitReport {
        product: AxiomReport::new(Axiom::StarLimit, "product", hbars.clone(), pd, qz.classical_sup(&fg), clipped.clone()),
        bracket: AxiomReport::new(Axiom::StarLimit, "bracket", hbars, bd, qz.classical_sup(&br), clipped),
    })
}
