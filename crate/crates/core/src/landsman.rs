//! Quantization of `T*Q` for a one-dimensional Riemannian manifold `Q` through
//! geodesic midpoint charts. In one dimension geodesics are linear in
//! arclength `s(q) = ∫ √g`, so every map here goes through `s` and its
//! inverse.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{Quantizer, MAX_P_POINTS};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::numerics::{fourier_fiber, sample, Grid1D, Grid2D, SampledFunction, Symbol};
use crate::weyl::{OperatorKernel, WaveFunction};

/// Relative size below which `f̃` counts as outside its support.
pub const SUPPORT_TOL: f64 = 1e-10;
const TABLE_CELLS: usize = 4096;

const GL_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_W: [f64; 5] = [0.236_926_885_056_189_1, 0.478_628_670_499_366_5, 0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MetricDomain {
    Interval { lo: f64, hi: f64 },
    /// `[0, length)` with periodic `g`.
    Circle { length: f64 },
}

#[derive(Clone)]
pub struct Metric1D {
    name: String,
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: MetricDomain,
    nodes: Vec<f64>,
    table: Vec<f64>,
}

impl fmt::Debug for Metric1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric1D").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL_X.iter().zip(&GL_W).map(|(x, w)| w * f(m + r * x)).sum::<f64>()
}

impl Metric1D {
    pub fn new(name: &str, g: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: MetricDomain) -> Result<Self> {
        let (lo, hi) = match domain {
            MetricDomain::Interval { lo, hi } => (lo, hi),
            MetricDomain::Circle { length } => (0.0, length),
        };
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidGrid(format!("metric domain [{lo}, {hi}]")));
        }
        let h = (hi - lo) / TABLE_CELLS as f64;
        let nodes: Vec<f64> = (0..=TABLE_CELLS).map(|k| lo + k as f64 * h).collect();
        for &q in &nodes {
            let v = g(q);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("metric g({q}) = {v} is not positive")));
            }
        }
        let mut table = Vec::with_capacity(nodes.len());
        table.push(0.0);
        for k in 0..TABLE_CELLS {
            let ds = gauss_legendre(|q| g(q).sqrt(), nodes[k], nodes[k + 1]);
            table.push(table[k] + ds);
        }
        if table.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Numeric("arclength table is not increasing".into()));
        }
        Ok(Self { name: name.into(), g: Arc::new(g), domain, nodes, table })
    }

    pub fn flat(lo: f64, hi: f64) -> Result<Self> {
        Self::new("flat", |_| 1.0, MetricDomain::Interval { lo, hi })
    }

    /// `g(q) = e^{2q}`, for which `s(q) = e^q` up to a constant.
    pub fn exp2q(lo: f64, hi: f64) -> Result<Self> {
        Self::new("exp2q", |q| (2.0 * q).exp(), MetricDomain::Interval { lo, hi })
    }

    /// Flat circle of the given circumference.
    pub fn circle(length: f64) -> Result<Self> {
        Self::new("circle", |_| 1.0, MetricDomain::Circle { length })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn wrap(&self, q: f64) -> f64 {
        match self.domain {
            MetricDomain::Circle { length } => q.rem_euclid(length),
            MetricDomain::Interval { .. } => q,
        }
    }

    pub fn g(&self, q: f64) -> f64 {
        (self.g)(self.wrap(q))
    }

    pub fn sqrt_g(&self, q: f64) -> f64 {
        self.g(q).sqrt()
    }

    /// Arclength of the whole domain.
    pub fn total_length(&self) -> f64 {
        *self.table.last().expect("nonempty table")
    }

    fn lo(&self) -> f64 {
        self.nodes[0]
    }

    fn cell_of(&self, q: f64) -> usize {
        let h = self.nodes[1] - self.nodes[0];
        (((q - self.lo()) / h).floor().max(0.0) as usize).min(TABLE_CELLS - 1)
    }

    fn s_in_cell(&self, j: usize, q: f64) -> f64 {
        self.table[j] + gauss_legendre(|x| (self.g)(x).sqrt(), self.nodes[j], q)
    }

    /// `s(q)`, measured from the left end of the domain. On the circle `s` is
    /// extended by periodicity plus whole circumferences.
    pub fn arclength(&self, q: f64) -> Result<f64> {
        match self.domain {
            MetricDomain::Interval { lo, hi } => {
                if !(q >= lo && q <= hi) {
                    return Err(Error::Range(q));
                }
                Ok(self.s_in_cell(self.cell_of(q), q))
            }
            MetricDomain::Circle { length } => {
                let turns = (q / length).floor();
                let r = q - turns * length;
                Ok(self.s_in_cell(self.cell_of(r), r) + turns * self.total_length())
            }
        }
    }

    /// `s⁻¹(t)`; on the circle the result is wrapped into `[0, length)`.
    pub fn arclength_inverse(&self, t: f64) -> Result<f64> {
        let total = self.total_length();
        let t = match self.domain {
            MetricDomain::Interval { .. } => {
                let slack = 1e-14 * total;
                if !(t >= -slack && t <= total + slack) {
                    return Err(Error::Range(t));
                }
                t.clamp(0.0, total)
            }
            MetricDomain::Circle { .. } => t.rem_euclid(total),
        };
        let j = self.table.partition_point(|&s| s <= t).clamp(1, TABLE_CELLS) - 1;
        let (mut a, mut b) = (self.nodes[j], self.nodes[j + 1]);
        let mut x = a + (t - self.table[j]) / (self.table[j + 1] - self.table[j]) * (b - a);
        for _ in 0..60 {
            let fx = self.s_in_cell(j, x) - t;
            if fx > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let mut next = x - fx / (self.g)(x).sqrt();
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || b - a <= f64::EPSILON * x.abs().max(1.0) {
                return Ok(self.wrap(next));
            }
            x = next;
        }
        Err(Error::NoConvergence(t))
    }

    /// Geodesic `exp_q(X) = s⁻¹(s(q) + √g(q) X)`.
    pub fn exp_map(&self, q: f64, x: f64) -> Result<f64> {
        self.arclength_inverse(self.arclength(q)? + self.sqrt_g(q) * x)
    }

    /// `φ_ħ(q, X) = (exp_q(ħX/2), exp_q(−ħX/2))`.
    pub fn phi_hbar(&self, q: f64, x: f64, hbar: f64) -> Result<(f64, f64)> {
        Ok((self.exp_map(q, 0.5 * hbar * x)?, self.exp_map(q, -0.5 * hbar * x)?))
    }

    /// Geodesic midpoint `q` and tangent `X` with `φ_ħ(q, X) = (x, x′)`. On
    /// the circle the shorter arc is used.
    pub fn phi_hbar_inverse(&self, x: f64, xp: f64, hbar: f64) -> Result<(f64, f64)> {
        let (sx, sxp) = (self.arclength(x)?, self.arclength(xp)?);
        let (mid, d) = self.chord(sx, sxp);
        let q = self.arclength_inverse(mid)?;
        Ok((q, d / (hbar * self.sqrt_g(q))))
    }

    fn chord(&self, sx: f64, sxp: f64) -> (f64, f64) {
        match self.domain {
            MetricDomain::Interval { .. } => (0.5 * (sx + sxp), sx - sxp),
            MetricDomain::Circle { .. } => {
                let c = self.total_length();
                let d = (sx - sxp + 0.5 * c).rem_euclid(c) - 0.5 * c;
                (sxp + 0.5 * d, d)
            }
        }
    }

    /// Largest `ħ` for which `exp_q(±ħX/2)` stays in the chart for
    /// `|X| ≤ radius` at each of `base` points.
    fn hbar_bound(&self, base: &[f64], radius: f64) -> Result<f64> {
        if radius == 0.0 {
            return Ok(f64::INFINITY);
        }
        let mut bound = f64::INFINITY;
        for &q in base {
            let r = self.sqrt_g(q) * radius;
            let b = match self.domain {
                MetricDomain::Interval { .. } => {
                    let s = self.arclength(q)?;
                    2.0 * s.min(self.total_length() - s) / r
                }
                MetricDomain::Circle { .. } => 0.5 * self.total_length() / r,
            };
            bound = bound.min(b);
        }
        Ok(bound)
    }
}

/// `f̃(q, v) = ∫ dp/(2π√g(q)) e^{ipv} f(q, p)` sampled on `grid`, with the
/// symbol oracle and the momentum axis kept for off-grid evaluation.
#[derive(Clone, Debug)]
pub struct FiberSymbol {
    pub grid: Grid2D,
    pub values: Array2<C64>,
    /// Largest `|v|` where `|f̃|` exceeds `SUPPORT_TOL · sup |f̃|`.
    pub support_radius: f64,
    pub truncated: bool,
    symbol: Option<Symbol>,
    paxis: Grid1D,
}

impl FiberSymbol {
    /// `f̃(q, X)` by quadrature over the stored momentum axis.
    pub fn eval(&self, q: f64, x: f64, metric: &Metric1D) -> Result<C64> {
        let symbol = self.symbol.as_ref().ok_or(Error::MissingOracle("off-grid f̃ needs the T*Q symbol"))?;
        let w = self.paxis.spacing() / (2.0 * PI * metric.sqrt_g(q));
        Ok((0..self.paxis.len())
            .map(|l| {
                let p = self.paxis.point(l);
                C64::from_polar(w, p * x) * symbol.eval(q, p)
            })
            .sum())
    }

    /// Row indices of the base grid where `f̃` is not negligible.
    fn active_base(&self) -> Vec<f64> {
        let sup = self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let qs = self.grid.q.points();
        self.values
            .axis_iter(Axis(0))
            .zip(qs)
            .filter(|(row, _)| row.iter().any(|z| z.norm() > SUPPORT_TOL * sup))
            .map(|(_, q)| q)
            .collect()
    }
}

pub fn fiber_fourier(f: &SampledFunction, metric: &Metric1D) -> Result<FiberSymbol> {
    let ft = fourier_fiber(f)?;
    let mut values = ft.transform.values;
    for (row, q) in values.axis_iter_mut(Axis(0)).zip(f.grid.q.points()) {
        let s = metric.sqrt_g(q);
        row.into_iter().for_each(|z| *z /= s);
    }
    let sup = values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let vs = ft.transform.grid.p.points();
    let support_radius = values
        .indexed_iter()
        .filter(|(_, z)| z.norm() > SUPPORT_TOL * sup)
        .fold(0.0f64, |m, ((_, b), _)| m.max(vs[b].abs()));
    Ok(FiberSymbol {
        grid: ft.transform.grid,
        values,
        support_radius,
        truncated: ft.truncated,
        symbol: f.symbol.clone(),
        paxis: f.grid.p,
    })
}

/// The admissibility bound `ħ(f)`: the support of `f̃` maps into the chart
/// for every `ħ ≤ ħ(f)`.
pub fn admissible_hbar(fsym: &FiberSymbol, metric: &Metric1D) -> Result<f64> {
    metric.hbar_bound(&fsym.active_base(), fsym.support_radius)
}

/// `K(x_i, x_j) = ħ⁻¹ f̃(φ_ħ⁻¹(x_i, x_j))` on the base grid of `fsym`.
pub fn landsman_kernel(fsym: &FiberSymbol, hbar: f64, metric: &Metric1D) -> Result<OperatorKernel> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Invalid(format!("hbar must be positive, got {hbar}")));
    }
    let max_hbar = admissible_hbar(fsym, metric)?;
    if hbar > max_hbar {
        return Err(Error::Admissibility { hbar, max_hbar });
    }
    let grid = fsym.grid.q;
    let xs = grid.points();
    let n = xs.len();
    let mut m = Array2::<C64>::zeros((n, n));
    m.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .try_for_each(|(i, mut row)| -> Result<()> {
            for (j, out) in row.iter_mut().enumerate() {
                let (q, x) = metric.phi_hbar_inverse(xs[i], xs[j], hbar)?;
                *out = fsym.eval(q, x, metric)? / hbar;
            }
            Ok(())
        })?;
    OperatorKernel::new(grid, m, hbar)
}

fn weights(grid: &Grid1D, metric: &Metric1D) -> Array1<f64> {
    grid.points().iter().map(|&x| metric.sqrt_g(x) * grid.spacing()).collect()
}

/// `(Qψ)(x_i) = Σ_j K_ij ψ(x_j) √g(x_j) Δ`.
pub fn landsman_apply(k: &OperatorKernel, psi: &WaveFunction, metric: &Metric1D) -> Result<WaveFunction> {
    if !k.grid.same_as(&psi.grid) {
        return Err(Error::Dimension("kernel and wave function grids differ".into()));
    }
    let w = weights(&k.grid, metric);
    let weighted: Array1<C64> = psi.values.iter().zip(&w).map(|(z, w)| z * w).collect();
    WaveFunction::new(k.grid, k.matrix.dot(&weighted))
}

/// Composition in `L²(√g dx)`.
pub fn landsman_compose(a: &OperatorKernel, b: &OperatorKernel, metric: &Metric1D) -> Result<OperatorKernel> {
    a.check_compatible(b)?;
    let w = weights(&a.grid, metric);
    let mut bw = b.matrix.clone();
    for (mut row, &wk) in bw.axis_iter_mut(Axis(0)).zip(&w) {
        row.mapv_inplace(|z| z * wk);
    }
    OperatorKernel::new(a.grid, a.matrix.dot(&bw), a.hbar)
}

/// Operator norm on `L²(√g dx)`.
pub fn landsman_op_norm(k: &OperatorKernel, metric: &Metric1D) -> Result<f64> {
    let r: Vec<f64> = weights(&k.grid, metric).iter().map(|w| w.sqrt()).collect();
    let m = Array2::from_shape_fn(k.matrix.dim(), |(i, j)| k.matrix[[i, j]] * r[i] * r[j]);
    spectral_norm(&m)
}

/// [`landsman_kernel`] as a [`Quantizer`] on a fixed base grid. The
/// momentum axis `[-p_half, p_half]` is refined per `ħ` so that
/// `e^{ipX}` is resolved for every chart pair of the grid.
#[derive(Clone, Debug)]
pub struct LandsmanQuantizer {
    pub metric: Metric1D,
    pub qgrid: Grid1D,
    pub p_half: f64,
    /// `max |X|` over grid pairs at `ħ = 1`.
    chart_span: f64,
}

impl LandsmanQuantizer {
    pub fn new(metric: Metric1D, qgrid: Grid1D, p_half: f64) -> Result<Self> {
        if !(p_half > 0.0) {
            return Err(Error::Invalid(format!("p_half must be positive, got {p_half}")));
        }
        let xs = qgrid.points();
        let mut span = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            for &xp in &xs[..i] {
                span = span.max(metric.phi_hbar_inverse(x, xp, 1.0)?.1.abs());
            }
        }
        Ok(Self { metric, qgrid, p_half, chart_span: span })
    }

    pub fn paxis(&self, hbar: f64) -> Result<Grid1D> {
        let np = (2.0 * self.p_half * self.chart_span / (PI * hbar)).ceil() as usize + 1;
        Grid1D::symmetric(self.p_half, np.max(self.qgrid.len().min(64)).max(2))
    }

    pub fn fiber_symbol(&self, f: &Symbol, hbar: f64) -> Result<FiberSymbol> {
        fiber_fourier(&sample(f, Grid2D::new(self.qgrid, self.paxis(hbar)?))?, &self.metric)
    }
}

impl Quantizer for LandsmanQuantizer {
    fn name(&self) -> &'static str {
        "landsman"
    }

    fn min_hbar(&self) -> f64 {
        2.0 * self.p_half * self.chart_span / (PI * (MAX_P_POINTS - 1) as f64)
    }

    fn quantize(&self, f: &Symbol, hbar: f64) -> Result<OperatorKernel> {
        landsman_kernel(&self.fiber_symbol(f, hbar)?, hbar, &self.metric)
    }

    fn compose(&self, a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
        landsman_compose(a, b, &self.metric)
    }

    fn op_norm(&self, k: &OperatorKernel) -> Result<f64> {
        landsman_op_norm(k, &self.metric)
    }

    fn classical_sup(&self, f: &Symbol) -> f64 {
        let ps = Grid1D::symmetric(self.p_half, self.qgrid.len()).expect("valid").points();
        self.qgrid
            .points()
            .par_iter()
            .map(|&q| ps.iter().fold(0.0f64, |m, &p| m.max(f.eval(q, p).norm())))
            .reduce(|| 0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianObservable;
    use crate::linalg::max_abs_diff;
    use crate::weyl::{adjoint, weyl_kernel};

    #[test]
    fn flat_exp_map() {
        let m = Metric1D::flat(-10.0, 10.0).unwrap();
        assert!((m.exp_map(1.25, 0.5).unwrap() - 1.75).abs() < 1e-13);
        let (x, xp) = m.phi_hbar(0.3, 1.0, 0.5).unwrap();
        assert!((x - 0.55).abs() < 1e-13 && (xp - 0.05).abs() < 1e-13);
        let (q, v) = m.phi_hbar_inverse(x, xp, 0.5).unwrap();
        assert!((q - 0.3).abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp2q_closed_form() {
        let m = Metric1D::exp2q(-6.0, 4.0).unwrap();
        for &(q, x) in &[(0.0, 0.5), (-1.0, -0.7), (1.5, 2.0), (0.7, 0.0)] {
            let got = m.exp_map(q, x).unwrap();
            assert!((got - (q + f64::ln(1.0 + x))).abs() < 1e-10, "{q} {x}");
        }
        let (x, xp) = m.phi_hbar(0.4, 0.8, 0.5).unwrap();
        let (q, v) = m.phi_hbar_inverse(x, xp, 0.5).unwrap();
        assert!((q - 0.4).abs() < 1e-10 && (v - 0.8).abs() < 1e-10);
        assert!(matches!(m.exp_map(0.0, -1.5), Err(Error::Range(_))));
    }

    #[test]
    fn circle_wraps() {
        let m = Metric1D::circle(2.0).unwrap();
        assert!((m.exp_map(1.8, 0.5).unwrap() - 0.3).abs() < 1e-12);
        let (q, v) = m.phi_hbar_inverse(0.1, 1.9, 1.0).unwrap();
        assert!(q.min(2.0 - q) < 1e-12 && (v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn metric_scaling_halves_transform() {
        let g = GaussianObservable::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let f = sample(&g.symbol(), Grid2D::square(6.0, 64).unwrap()).unwrap();
        let a = fiber_fourier(&f, &Metric1D::flat(-10.0, 10.0).unwrap()).unwrap();
        let b = fiber_fourier(&f, &Metric1D::new("flat4", |_| 4.0, MetricDomain::Interval { lo: -10.0, hi: 10.0 }).unwrap())
            .unwrap();
        assert!(max_abs_diff(&a.values.mapv(|z| z * 0.5), &b.values) < 1e-15);
    }

    #[test]
    fn flat_matches_weyl() {
        let g = GaussianObservable::new(0.3, -0.2, 1.0, 0.6).unwrap();
        let grid = Grid2D::new(Grid1D::symmetric(8.0, 96).unwrap(), Grid1D::symmetric(8.0, 200).unwrap());
        let f = sample(&g.symbol(), grid).unwrap();
        let metric = Metric1D::flat(-40.0, 40.0).unwrap();
        let fs = fiber_fourier(&f, &metric).unwrap();
        let kl = landsman_kernel(&fs, 0.5, &metric).unwrap();
        let kw = weyl_kernel(&f, 0.5, &grid.q).unwrap();
        assert!(max_abs_diff(&kl.matrix, &kw.matrix) <= 1e-6 * kw.sup());
    }

    #[test]
    fn exp2q_kernel_is_hermitian() {
        let metric = Metric1D::exp2q(-8.0, 5.0).unwrap();
        let qz = LandsmanQuantizer::new(metric.clone(), Grid1D::symmetric(3.0, 64).unwrap(), 8.0).unwrap();
        let g = GaussianObservable::new(0.2, 0.3, 1.5, 0.5).unwrap();
        let k = qz.quantize(&g.symbol(), 0.2).unwrap();
        assert!(max_abs_diff(&k.matrix, &adjoint(&k).matrix) <= 1e-10 * k.sup());
        let big = qz.quantize(&g.symbol(), 4.0);
        assert!(matches!(big, Err(Error::Admissibility { .. })));
    }
}
