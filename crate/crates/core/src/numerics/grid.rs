use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform cell-midpoint grid on `[lo, hi]`.
///
/// Point `j` sits at `lo + (j + 1/2) * spacing`, so no point lies on the
/// boundary and the midpoint quadrature rule is second order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Grid of `n` points whose nodes are the integer multiples `k * spacing`,
    /// `k = -(n-1)/2 ..= (n-1)/2`. Requires odd `n`.
    pub fn centered_lattice(spacing: f64, n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::InvalidGrid("centered lattice needs an odd point count".into()));
        }
        let half = 0.5 * n as f64 * spacing;
        Self::new(-half, half, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn point(&self, j: usize) -> f64 {
        self.lo + (j as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Identical up to relative round-off in the bounds.
    pub fn same_as(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * self.width().max(other.width());
        self.n == other.n && (self.lo - other.lo).abs() <= tol && (self.hi - other.hi).abs() <= tol
    }
}

/// Phase-space grid: `q` along axis 0, `p` (or any fiber variable) along axis 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid2D {
    pub q: Grid1D,
    pub p: Grid1D,
}

impl Grid2D {
    pub fn new(q: Grid1D, p: Grid1D) -> Self {
        Self { q, p }
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let axis = Grid1D::symmetric(half_width, n)?;
        Ok(Self { q: axis, p: axis })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.q.len(), self.p.len())
    }

    pub fn cell_area(&self) -> f64 {
        self.q.spacing() * self.p.spacing()
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.q.same_as(&other.q) && self.p.same_as(&other.p)
    }
}

/// Geometric sequence `start * ratio^k`, `k < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HbarSchedule {
    start: f64,
    ratio: f64,
    count: usize,
}

impl HbarSchedule {
    pub fn new(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && start > 0.0) {
            return Err(Error::Invalid(format!("schedule start must be positive, got {start}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Invalid(format!("schedule ratio must lie in (0,1), got {ratio}")));
        }
        if count == 0 {
            return Err(Error::Invalid("schedule count must be positive".into()));
        }
        Ok(Self { start, ratio, count })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.start * self.ratio.powi(k as i32)).collect()
    }

    pub fn last(&self) -> f64 {
        self.start * self.ratio.powi(self.count as i32 - 1)
    }
}

impl Default for HbarSchedule {
    fn default() -> Self {
        Self { start: 1.0, ratio: 0.5, count: 7 }
    }
}
