//! The prequantization operator on the torus of area `N`, acting exactly on
//! finite sums `Σ c · y^d · e^{2πi(ax + by)}`:
//!
//! `Q_N(f)φ = fφ − (i/2πN)[∂_y f (∂_x φ − 2πiN y φ) − ∂_x f ∂_y φ]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::rotation::TorusObservable as TrigObservable;

pub const DEFAULT_DEGREE_CAP: u32 = 8;

/// `ħ` in units `h = 1`.
pub const PREQUANT_HBAR: f64 = 1.0 / (2.0 * PI);

/// Finite sum of `c · y^d · e^{2πi(ax + by)}`, keyed by `(a, b, d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigSection {
    pub terms: BTreeMap<(i64, i64, u32), C64>,
    pub cap: u32,
}

impl TrigSection {
    pub fn zero(cap: u32) -> Self {
        Self { terms: BTreeMap::new(), cap }
    }

    /// `y^d e^{2πi(ax + by)}`.
    pub fn monomial(a: i64, b: i64, d: u32, cap: u32) -> Result<Self> {
        let mut s = Self::zero(cap);
        s.add_term((a, b, d), C64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn add_term(&mut self, key: (i64, i64, u32), c: C64) -> Result<()> {
        if key.2 > self.cap {
            return Err(Error::DegreeCap { cap: self.cap });
        }
        if c != C64::new(0.0, 0.0) {
            *self.terms.entry(key).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.2).max().unwrap_or(0)
    }

    pub fn add(&self, other: &TrigSection) -> Result<TrigSection> {
        let mut out = self.clone();
        out.cap = self.cap.max(other.cap);
        for (&k, &c) in &other.terms {
            out.add_term(k, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> TrigSection {
        Self { terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect(), cap: self.cap }
    }

    pub fn conj(&self) -> TrigSection {
        Self { terms: self.terms.iter().map(|(&(a, b, d), &v)| ((-a, -b, d), v.conj())).collect(), cap: self.cap }
    }

    /// Sup norm of the coefficients.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms
            .iter()
            .map(|(&(a, b, d), &c)| c * y.powi(d as i32) * C64::from_polar(1.0, 2.0 * PI * (a as f64 * x + b as f64 * y)))
            .sum()
    }

    pub fn dx(&self) -> TrigSection {
        let mut out = Self::zero(self.cap);
        for (&(a, b, d), &c) in &self.terms {
            out.add_term((a, b, d), c * C64::new(0.0, 2.0 * PI * a as f64)).expect("degree unchanged");
        }
        out
    }

    pub fn dy(&self) -> TrigSection {
        let mut out = Self::zero(self.cap);
        for (&(a, b, d), &c) in &self.terms {
            out.add_term((a, b, d), c * C64::new(0.0, 2.0 * PI * b as f64)).expect("degree unchanged");
            if d > 0 {
                out.add_term((a, b, d - 1), c * d as f64).expect("degree lowered");
            }
        }
        out
    }

    pub fn times_y(&self) -> Result<TrigSection> {
        let mut out = Self::zero(self.cap);
        for (&(a, b, d), &c) in &self.terms {
            out.add_term((a, b, d + 1), c)?;
        }
        Ok(out)
    }

    /// Product with a trigonometric polynomial.
    pub fn times(&self, f: &TrigObservable) -> TrigSection {
        let mut out = Self::zero(self.cap);
        for (&(a, b, d), &c) in &self.terms {
            for (&(m, k), &cf) in &f.terms {
                out.add_term((a + m, b + k, d), c * cf).expect("degree unchanged");
            }
        }
        out
    }
}

fn obs_dx(f: &TrigObservable) -> TrigObservable {
    TrigObservable::from_terms(f.terms.iter().map(|(&(m, k), &c)| ((m, k), c * C64::new(0.0, 2.0 * PI * m as f64))))
}

fn obs_dy(f: &TrigObservable) -> TrigObservable {
    TrigObservable::from_terms(f.terms.iter().map(|(&(m, k), &c)| ((m, k), c * C64::new(0.0, 2.0 * PI * k as f64))))
}

/// `Q_N(f)φ`. A negative `n` gives the operator on the conjugate bundle.
pub fn prequant_apply(f: &TrigObservable, phi: &TrigSection, n: i64) -> Result<TrigSection> {
    if n == 0 {
        return Err(Error::Invalid("N must be nonzero".into()));
    }
    let c = C64::new(0.0, -1.0 / (2.0 * PI * n as f64));
    let twist = C64::new(0.0, 2.0 * PI * n as f64);
    let fx = obs_dx(f);
    let fy = obs_dy(f);
    let mut bracket = phi.dy().times(&fx).scale(C64::new(-1.0, 0.0));
    if fy.terms.values().any(|z| *z != C64::new(0.0, 0.0)) {
        let inner = phi.dx().add(&phi.times_y()?.scale(-twist))?;
        bracket = bracket.add(&inner.times(&fy))?;
    }
    phi.times(f).add(&bracket.scale(c))
}

/// `{f, g} = (1/N)(∂_x f ∂_y g − ∂_y f ∂_x g)`.
pub fn poisson_torus(f: &TrigObservable, g: &TrigObservable, n: usize) -> TrigObservable {
    f.bracket(g, n)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiracCheck {
    /// Sup over sections and coefficients of
    /// `[Q(f), Q(g)]φ/(iħ) − Q({f,g})φ` with `ħ = 1/2π`.
    pub max_residual: f64,
    /// Least-squares `λ` in `[Q(f), Q(g)]φ ≈ λ Q({f,g})φ`; `None` when the
    /// right-hand side vanishes.
    pub closing_constant: Option<C64>,
}

pub fn dirac_identity_check(
    f: &TrigObservable,
    g: &TrigObservable,
    n: usize,
    sections: &[TrigSection],
) -> Result<DiracCheck> {
    let ni = n as i64;
    let fg = poisson_torus(f, g, n);
    let ih = C64::new(0.0, PREQUANT_HBAR);
    let mut resid = 0.0f64;
    let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
    for phi in sections {
        let qg = prequant_apply(g, phi, ni)?;
        let qf = prequant_apply(f, phi, ni)?;
        let comm = prequant_apply(f, &qg, ni)?.add(&prequant_apply(g, &qf, ni)?.scale(C64::new(-1.0, 0.0)))?;
        let rhs = prequant_apply(&fg, phi, ni)?;
        let diff = comm.scale(ih.inv()).add(&rhs.scale(C64::new(-1.0, 0.0)))?;
        resid = resid.max(diff.coefficient_norm());
        for (k, v) in &rhs.terms {
            let w = comm.terms.get(k).copied().unwrap_or_default();
            num += v.conj() * w;
            den += v.norm_sqr();
        }
    }
    let closing_constant = if den > 0.0 { Some(num / den) } else { None };
    Ok(DiracCheck { max_residual: resid, closing_constant })
}

/// Which trigonometric pair enters `Q²(sin 2πt) + Q²(cos 2πt) − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AnomalyPair {
    /// `t = x`.
    X,
    /// `t = y`.
    Y,
}

fn sin_cos(pair: AnomalyPair) -> (TrigObservable, TrigObservable) {
    let (p, m) = match pair {
        AnomalyPair::X => ((1, 0), (-1, 0)),
        AnomalyPair::Y => ((0, 1), (0, -1)),
    };
    let half = 0.5;
    let sin = TrigObservable::from_terms([(p, C64::new(0.0, -half)), (m, C64::new(0.0, half))]);
    let cos = TrigObservable::from_terms([(p, C64::new(half, 0.0)), (m, C64::new(half, 0.0))]);
    (sin, cos)
}

/// `(Q²(sin) + Q²(cos) − 1)φ`.
pub fn anomaly_on(pair: AnomalyPair, phi: &TrigSection, n: usize) -> Result<TrigSection> {
    let ni = n as i64;
    let (s, c) = sin_cos(pair);
    let ss = prequant_apply(&s, &prequant_apply(&s, phi, ni)?, ni)?;
    let cc = prequant_apply(&c, &prequant_apply(&c, phi, ni)?, ni)?;
    ss.add(&cc)?.add(&phi.scale(C64::new(-1.0, 0.0)))
}

/// Probe section `a` of the anomaly sequence: the operator for the `x` pair
/// acts through `∂_y`, so its probes are `e^{2πiay}`; the `y` pair acts
/// through `∂_x` and `y`, so its probes are `e^{2πiax}`.
pub fn anomaly_probe(pair: AnomalyPair, a: i64, cap: u32) -> Result<TrigSection> {
    match pair {
        AnomalyPair::X => TrigSection::monomial(0, a, 0, cap),
        AnomalyPair::Y => TrigSection::monomial(a, 0, 0, cap),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnomalyReport {
    pub pair: AnomalyPair,
    pub probes: Vec<i64>,
    /// Coefficient sup-norm of the anomaly applied to each probe.
    pub growth: Vec<f64>,
}

pub fn sin_cos_anomaly(n: usize, probe_range: i64, pair: AnomalyPair) -> Result<AnomalyReport> {
    let probes: Vec<i64> = (1..=probe_range).collect();
    let growth = probes
        .iter()
        .map(|&a| Ok(anomaly_on(pair, &anomaly_probe(pair, a, DEFAULT_DEGREE_CAP)?, n)?.coefficient_norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnomalyReport { pair, probes, growth })
}
