use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::grid::{Grid1D, Grid2D};
use super::symbol::Symbol;
use crate::error::{Error, Result};

/// Function sampled on a phase-space grid, `values[[i, j]] = f(q_i, p_j)`.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: Grid2D,
    pub values: Array2<C64>,
    pub symbol: Option<Symbol>,
}

/// Function sampled on a 1-D grid.
#[derive(Clone, Debug)]
pub struct SampledLine {
    pub grid: Grid1D,
    pub values: Array1<C64>,
}

impl SampledFunction {
    /// Wraps raw samples; there is no oracle.
    pub fn from_values(grid: Grid2D, values: Array2<C64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::Dimension(format!(
                "values {:?} vs grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        Ok(Self { grid, values, symbol: None })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: Array2::zeros(grid.shape()), symbol: None }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.mapv(|z| z.conj()),
            symbol: self.symbol.as_ref().map(Symbol::conj),
        }
    }

    pub fn require_symbol(&self) -> Result<&Symbol> {
        self.symbol.as_ref().ok_or(Error::MissingOracle("a sampled function without its symbol"))
    }

    /// Sup of `|self − other|` over grid points with `|q|, |p|` inside the
    /// given half-widths.
    pub fn sup_diff_within(&self, other: &SampledFunction, q_half: f64, p_half: f64) -> Result<f64> {
        check_same(&self.grid, &other.grid)?;
        let (qs, ps) = (self.grid.q.points(), self.grid.p.points());
        let mut m = 0.0f64;
        for (i, &q) in qs.iter().enumerate() {
            if q.abs() > q_half {
                continue;
            }
            for (j, &p) in ps.iter().enumerate() {
                if p.abs() <= p_half {
                    m = m.max((self.values[[i, j]] - other.values[[i, j]]).norm());
                }
            }
        }
        Ok(m)
    }
}

pub(crate) fn check_same(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::Dimension(format!("grid mismatch: {a:?} vs {b:?}")))
    }
}

fn checked(q: f64, p: f64, z: C64) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite { q, p, value: format!("{z}") })
    }
}

/// Samples `symbol` at every grid point and keeps it as the oracle.
pub fn sample(symbol: &Symbol, grid: Grid2D) -> Result<SampledFunction> {
    let (qs, ps) = (grid.q.points(), grid.p.points());
    let mut values = Array2::zeros(grid.shape());
    for (i, &q) in qs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            values[[i, j]] = checked(q, p, symbol.eval(q, p))?;
        }
    }
    Ok(SampledFunction { grid, values, symbol: Some(symbol.clone()) })
}

/// Samples a function of one variable.
pub fn sample_line(f: impl Fn(f64) -> C64, grid: Grid1D) -> Result<SampledLine> {
    let mut values = Array1::zeros(grid.len());
    for (j, x) in grid.points().into_iter().enumerate() {
        values[j] = checked(x, f64::NAN, f(x))?;
    }
    Ok(SampledLine { grid, values })
}

/// Midpoint rule: `Σ values · Δq Δp`.
pub fn quadrature(f: &SampledFunction) -> C64 {
    f.values.sum() * f.grid.cell_area()
}

pub fn quadrature_line(f: &SampledLine) -> C64 {
    f.values.sum() * f.grid.spacing()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(q0: f64, p0: f64, a: f64, b: f64) -> Symbol {
        Symbol::new(move |q, p| {
            C64::new(2.0 * (-(q - q0).powi(2) / (2.0 * a) - (p - p0).powi(2) / (2.0 * b)).exp(), 0.0)
        })
    }

    #[test]
    fn sample_constant_and_coordinate() {
        let grid = Grid2D::square(1.0, 4).unwrap();
        let one = sample(&Symbol::constant(C64::new(1.0, 0.0)), grid).unwrap();
        assert!(one.values.iter().all(|&z| z == C64::new(1.0, 0.0)));
        let q = sample(&Symbol::coordinate_q(), grid).unwrap();
        let col: Vec<f64> = (0..4).map(|i| q.values[[i, 2]].re).collect();
        assert_eq!(col, vec![-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn gaussian_peak_value() {
        assert_eq!(gaussian(0.0, 0.0, 1.0, 1.0).eval(0.0, 0.0), C64::new(2.0, 0.0));
    }

    #[test]
    fn non_finite_names_the_point() {
        let grid = Grid2D::square(1.0, 4).unwrap();
        let bad = Symbol::new(|q, _| C64::new(1.0 / (q - 0.25), 0.0));
        match sample(&bad, grid) {
            Err(Error::NonFinite { q, .. }) => assert_eq!(q, 0.25),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gaussian_integrals() {
        let line = sample_line(|q| C64::new((-q * q / 2.0).exp(), 0.0), Grid1D::new(-12.0, 12.0, 1024).unwrap())
            .unwrap();
        let v = quadrature_line(&line).re;
        assert!((v / (2.0 * PI).sqrt() - 1.0).abs() < 1e-10);

        let grid = Grid2D::square(16.0, 512).unwrap();
        let g = gaussian(0.4, -0.7, 1.0, 1.0);
        let sq = Symbol::new(move |q, p| C64::new(g.eval(q, p).norm_sqr(), 0.0));
        let v = quadrature(&sample(&sq, grid).unwrap()).re;
        assert!((v / (4.0 * PI) - 1.0).abs() < 1e-8);
        assert_eq!(quadrature(&SampledFunction::zeros(grid)), C64::new(0.0, 0.0));
    }

    #[test]
    fn midpoint_rule_is_second_order() {
        // ∫_0^1 e^x dx on a box where the integrand does not vanish at the ends.
        let exact = std::f64::consts::E - 1.0;
        let err = |n| {
            let s = sample_line(|x| C64::new(x.exp(), 0.0), Grid1D::new(0.0, 1.0, n).unwrap()).unwrap();
            (quadrature_line(&s).re - exact).abs()
        };
        let order = (err(32) / err(64)).log2();
        assert!(order > 1.9, "observed order {order}");
    }
}
