//! Phase-space observables as evaluation oracles.
//!
//! A [`Symbol`] evaluates `f(q, p)` anywhere, and may also carry the analytic
//! gradient `(∂_q f, ∂_p f)`. Products and sums of symbols with gradients keep
//! their gradients, so Poisson brackets of such symbols can be evaluated
//! exactly at off-grid points (kernel midpoints).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

type ValueFn = dyn Fn(f64, f64) -> C64 + Send + Sync;
type GradFn = dyn Fn(f64, f64) -> (C64, C64) + Send + Sync;

#[derive(Clone)]
pub struct Symbol {
    value: Arc<ValueFn>,
    grad: Option<Arc<GradFn>>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("has_gradient", &self.grad.is_some()).finish()
    }
}

impl Symbol {
    pub fn new(value: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), grad: None }
    }

    pub fn with_gradient(
        value: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> (C64, C64) + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), grad: Some(Arc::new(grad)) }
    }

    pub fn constant(c: C64) -> Self {
        Self::with_gradient(move |_, _| c, |_, _| (C64::new(0.0, 0.0), C64::new(0.0, 0.0)))
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, q: f64, p: f64) -> C64 {
        (self.value)(q, p)
    }

    pub fn gradient(&self, q: f64, p: f64) -> Option<(C64, C64)> {
        self.grad.as_ref().map(|g| g(q, p))
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn conj(&self) -> Self {
        let v = self.value.clone();
        let value = move |q, p| v(q, p).conj();
        match &self.grad {
            Some(g) => {
                let g = g.clone();
                Self::with_gradient(value, move |q, p| {
                    let (a, b) = g(q, p);
                    (a.conj(), b.conj())
                })
            }
            None => Self::new(value),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let v = self.value.clone();
        let value = move |q, p| c * v(q, p);
        match &self.grad {
            Some(g) => {
                let g = g.clone();
                Self::with_gradient(value, move |q, p| {
                    let (a, b) = g(q, p);
                    (c * a, c * b)
                })
            }
            None => Self::new(value),
        }
    }

    pub fn add(&self, other: &Symbol) -> Self {
        let (va, vb) = (self.value.clone(), other.value.clone());
        let value = move |q, p| va(q, p) + vb(q, p);
        match (&self.grad, &other.grad) {
            (Some(ga), Some(gb)) => {
                let (ga, gb) = (ga.clone(), gb.clone());
                Self::with_gradient(value, move |q, p| {
                    let (a1, b1) = ga(q, p);
                    let (a2, b2) = gb(q, p);
                    (a1 + a2, b1 + b2)
                })
            }
            _ => Self::new(value),
        }
    }

    /// Pointwise product `f g`.
    pub fn mul(&self, other: &Symbol) -> Self {
        let (va, vb) = (self.value.clone(), other.value.clone());
        let value = {
            let (va, vb) = (va.clone(), vb.clone());
            move |q, p| va(q, p) * vb(q, p)
        };
        match (&self.grad, &other.grad) {
            (Some(ga), Some(gb)) => {
                let (ga, gb) = (ga.clone(), gb.clone());
                Self::with_gradient(value, move |q, p| {
                    let (fa, fb) = (va(q, p), vb(q, p));
                    let (qa, pa) = ga(q, p);
                    let (qb, pb) = gb(q, p);
                    (qa * fb + fa * qb, pa * fb + fa * pb)
                })
            }
            _ => Self::new(value),
        }
    }

    /// Canonical Poisson bracket `∂_q f ∂_p g − ∂_p f ∂_q g`, evaluated from the
    /// analytic gradients. `None` when either gradient is missing.
    pub fn bracket(&self, other: &Symbol) -> Option<Symbol> {
        let ga = self.grad.clone()?;
        let gb = other.grad.clone()?;
        Some(Self::new(move |q, p| {
            let (qa, pa) = ga(q, p);
            let (qb, pb) = gb(q, p);
            qa * pb - pa * qb
        }))
    }

    /// Coordinate function `q` (unbounded; pair with [`Symbol::window`]).
    pub fn coordinate_q() -> Self {
        Self::with_gradient(|q, _| C64::new(q, 0.0), |_, _| (C64::new(1.0, 0.0), C64::new(0.0, 0.0)))
    }

    /// Coordinate function `p`.
    pub fn coordinate_p() -> Self {
        Self::with_gradient(|_, p| C64::new(p, 0.0), |_, _| (C64::new(0.0, 0.0), C64::new(1.0, 0.0)))
    }

    /// Smooth plateau `W(q) W(p)` with
    /// `W(x) = (erf((x + plateau)/edge) − erf((x − plateau)/edge)) / 2`:
    /// equal to 1 to machine precision for `|x| ≤ plateau − 6·edge` and
    /// Gaussian-decaying outside the plateau.
    pub fn window(plateau: f64, edge: f64) -> Self {
        let w = move |x: f64| 0.5 * (erf((x + plateau) / edge) - erf((x - plateau) / edge));
        let dw = move |x: f64| {
            let c = 1.0 / (edge * std::f64::consts::PI.sqrt());
            c * ((-((x + plateau) / edge).powi(2)).exp() - (-((x - plateau) / edge).powi(2)).exp())
        };
        Self::with_gradient(
            move |q, p| C64::new(w(q) * w(p), 0.0),
            move |q, p| (C64::new(dw(q) * w(p), 0.0), C64::new(w(q) * dw(p), 0.0)),
        )
    }
}

fn erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}
