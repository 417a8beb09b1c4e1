//! The rotation algebra in the basis `F_{mk}`, its `N`-dimensional
//! representations for `θ = K/N`, and the torus quantization maps.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dagger, max_abs, max_abs_diff};

/// Tolerance for comparing `θ` values.
const THETA_TOL: f64 = 1e-12;

fn phase(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}

/// `e^{2πi a/N}` with the exponent reduced mod `N` first.
fn root_of_unity(a: i64, n: usize) -> C64 {
    let r = a.rem_euclid(n as i64);
    C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Finite combination `Σ c_{mk} F_{mk}` with deformation parameter `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotAlgElement {
    pub theta: f64,
    pub terms: BTreeMap<(i64, i64), C64>,
}

impl RotAlgElement {
    pub fn zero(theta: f64) -> Self {
        Self { theta, terms: BTreeMap::new() }
    }

    /// `F_{mk}`.
    pub fn basis(theta: f64, m: i64, k: i64) -> Self {
        Self::from_terms(theta, [((m, k), C64::new(1.0, 0.0))])
    }

    pub fn unit(theta: f64) -> Self {
        Self::basis(theta, 0, 0)
    }

    pub fn from_terms(theta: f64, terms: impl IntoIterator<Item = ((i64, i64), C64)>) -> Self {
        let mut e = Self::zero(theta);
        for (key, c) in terms {
            e.add_term(key, c);
        }
        e
    }

    pub fn add_term(&mut self, key: (i64, i64), c: C64) {
        *self.terms.entry(key).or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn coefficient(&self, m: i64, k: i64) -> C64 {
        self.terms.get(&(m, k)).copied().unwrap_or_default()
    }

    fn check_theta(&self, other: &RotAlgElement) -> Result<()> {
        if (self.theta - other.theta).abs() > THETA_TOL {
            return Err(Error::ThetaMismatch(self.theta, other.theta));
        }
        Ok(())
    }

    pub fn add(&self, other: &RotAlgElement) -> Result<RotAlgElement> {
        self.check_theta(other)?;
        let mut out = self.clone();
        for (&key, &c) in &other.terms {
            out.add_term(key, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> RotAlgElement {
        Self { theta: self.theta, terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect() }
    }

    /// Sup of coefficient differences.
    pub fn distance(&self, other: &RotAlgElement) -> f64 {
        let mut keys: Vec<_> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(m, k)| (self.coefficient(m, k) - other.coefficient(m, k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `F_{mk} ⋆ F_{m′k′} = e^{2πi m′kθ} F_{m+m′, k+k′}`, extended bilinearly.
pub fn convolve(a: &RotAlgElement, b: &RotAlgElement) -> Result<RotAlgElement> {
    a.check_theta(b)?;
    let mut out = RotAlgElement::zero(a.theta);
    for (&(m, k), &c) in &a.terms {
        for (&(m2, k2), &c2) in &b.terms {
            let ph = phase((m2 as f64) * (k as f64) * a.theta);
            out.add_term((m + m2, k + k2), c * c2 * ph);
        }
    }
    Ok(out)
}

/// `F_{mk}* = e^{2πi mkθ} F_{−m,−k}`, extended antilinearly.
pub fn involution(a: &RotAlgElement) -> RotAlgElement {
    let mut out = RotAlgElement::zero(a.theta);
    for (&(m, k), &c) in &a.terms {
        out.add_term((-m, -k), c.conj() * phase((m as f64) * (k as f64) * a.theta));
    }
    out
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The pair `U = diag(e^{2πij/N})`, `V: v^j ↦ v^{j−K mod N}`.
#[derive(Clone, Debug)]
pub struct TorusRep {
    pub n: usize,
    pub k: usize,
    pub u: Array2<C64>,
    pub v: Array2<C64>,
}

impl TorusRep {
    pub fn theta(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

pub fn validate_rep(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidRep { n, k, reason: "N must be positive" });
    }
    if k == 0 {
        return Err(Error::InvalidRep { n, k, reason: "K must be positive" });
    }
    if gcd(n, k) != 1 {
        return Err(Error::InvalidRep { n, k, reason: "K and N must be coprime" });
    }
    if !(n == 1 && k == 1) && 2 * k > n {
        return Err(Error::InvalidRep { n, k, reason: "K must not exceed N/2" });
    }
    Ok(())
}

pub fn rep_matrices(n: usize, k: usize) -> Result<TorusRep> {
    validate_rep(n, k)?;
    let mut u = Array2::zeros((n, n));
    let mut v = Array2::zeros((n, n));
    for j in 0..n {
        u[[j, j]] = root_of_unity(j as i64, n);
        v[[(j + n - k % n) % n, j]] = C64::new(1.0, 0.0);
    }
    Ok(TorusRep { n, k, u, v })
}

/// Matrix of `c U^m V^k` accumulated into `out`.
fn add_monomial(out: &mut Array2<C64>, rep: &TorusRep, m: i64, k: i64, c: C64) {
    let n = rep.n as i64;
    let shift = k * rep.k as i64;
    for j in 0..n {
        let row = (j - shift).rem_euclid(n);
        out[[row as usize, j as usize]] += c * root_of_unity(m * row, rep.n);
    }
}

/// `Σ c_{mk} U^m V^k`.
pub fn represent(a: &RotAlgElement, rep: &TorusRep) -> Result<Array2<C64>> {
    let t = rep.theta();
    let diff = (a.theta - t).rem_euclid(1.0);
    if diff.min(1.0 - diff) > THETA_TOL {
        return Err(Error::ThetaMismatch(a.theta, t));
    }
    let mut out = Array2::zeros((rep.n, rep.n));
    for (&(m, k), &c) in &a.terms {
        add_monomial(&mut out, rep, m, k, c);
    }
    Ok(out)
}

/// Trigonometric polynomial `Σ c_{mk} e^{2πi(mx + ky)}` on the torus.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TorusObservable {
    pub terms: BTreeMap<(i64, i64), C64>,
}

impl TorusObservable {
    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), C64)>) -> Self {
        let mut t = BTreeMap::new();
        for (key, c) in terms {
            *t.entry(key).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self { terms: t }
    }

    /// `e^{2πi(mx + ky)}`.
    pub fn mode(m: i64, k: i64) -> Self {
        Self::from_terms([((m, k), C64::new(1.0, 0.0))])
    }

    /// `c_{−m,−k} = conj c_{mk}` for every mode.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(m, k), &c)| {
            let partner = self.terms.get(&(-m, -k)).copied().unwrap_or_default();
            (partner - c.conj()).norm() <= tol
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms.iter().map(|(&(m, k), &c)| c * phase(m as f64 * x + k as f64 * y)).sum()
    }

    /// `(1/N)(∂_x f ∂_y g − ∂_y f ∂_x g)`.
    pub fn bracket(&self, other: &TorusObservable, n: usize) -> TorusObservable {
        let mut out = TorusObservable::default();
        let s = (2.0 * PI).powi(2) / n as f64;
        for (&(m, k), &c) in &self.terms {
            for (&(m2, k2), &c2) in &other.terms {
                // (2πi)² (m k2 − k m2) / N
                let w = -s * (m * k2 - k * m2) as f64;
                if w != 0.0 {
                    *out.terms.entry((m + m2, k + k2)).or_insert(C64::new(0.0, 0.0)) += c * c2 * w;
                }
            }
        }
        out
    }
}

/// `Q_{K/N}(f) = Σ c_{mk} e^{πi mkK/N} U^m V^k`.
pub fn quantize_torus(f: &TorusObservable, n: usize, k: usize) -> Result<Array2<C64>> {
    let rep = rep_matrices(n, k)?;
    Ok(quantize_with(f, &rep))
}

fn quantize_with(f: &TorusObservable, rep: &TorusRep) -> Array2<C64> {
    let mut out = Array2::zeros((rep.n, rep.n));
    for (&(m, kk), &c) in &f.terms {
        // e^{πi mkK/N} = e^{2πi mkK/(2N)}
        let ph = root_of_unity(m * kk * rep.k as i64, 2 * rep.n);
        add_monomial(&mut out, rep, m, kk, c * ph);
    }
    out
}

#[derive(Clone, Debug)]
pub struct DiracDefect {
    /// `2i(mnπ/N − sin(mnπ/N))`.
    pub scalar: C64,
    /// `scalar · Q(e^{2πi(mx+ny)})`.
    pub matrix: Array2<C64>,
    /// `[Q(e^{2πimx}), Q(e^{2πiny})] − (i/2π) Q({e^{2πimx}, e^{2πiny}})`
    /// assembled from matrices.
    pub direct: Array2<C64>,
}

impl DiracDefect {
    pub fn mismatch(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.direct)
    }
}

/// Convention used by [`dirac_defect`]: torus of area `N` with `h = 1`, so
/// `ħ = 1/2π` and `{f, g} = (1/N)(∂_x f ∂_y g − ∂_y f ∂_x g)`.
pub const TORUS_HBAR: f64 = 1.0 / (2.0 * PI);

pub fn dirac_defect(m: i64, n: i64, big_n: usize) -> Result<DiracDefect> {
    let rep = rep_matrices(big_n, 1)?;
    let x = m as f64 * n as f64 * PI / big_n as f64;
    let scalar = C64::new(0.0, 2.0 * (x - x.sin()));
    let matrix = quantize_with(&TorusObservable::mode(m, n), &rep) * scalar;

    let fx = TorusObservable::mode(m, 0);
    let gy = TorusObservable::mode(0, n);
    let a = quantize_with(&fx, &rep);
    let b = quantize_with(&gy, &rep);
    let comm = a.dot(&b) - b.dot(&a);
    let qb = quantize_with(&fx.bracket(&gy, big_n), &rep);
    let direct = comm - qb * C64::new(0.0, TORUS_HBAR);
    Ok(DiracDefect { scalar, matrix, direct })
}

/// `diag(f(j/N))` for `f` depending on `x` only.
pub fn multiplication_action(f: &TorusObservable, n: usize) -> Result<Array2<C64>> {
    if f.terms.keys().any(|&(_, k)| k != 0) {
        return Err(Error::Invalid("multiplication action needs a function of x alone".into()));
    }
    if n == 0 {
        return Err(Error::InvalidRep { n, k: 1, reason: "N must be positive" });
    }
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        out[[j, j]] = f.terms.iter().map(|(&(m, _), &c)| c * root_of_unity(m * j as i64, n)).sum();
    }
    Ok(out)
}

/// Permutation `ψ_j ↦ ψ_{j−shift mod N}`.
pub fn translation_action(shift: i64, n: usize) -> Result<Array2<C64>> {
    if n == 0 {
        return Err(Error::InvalidRep { n, k: 1, reason: "N must be positive" });
    }
    let mut out = Array2::zeros((n, n));
    for j in 0..n as i64 {
        out[[(j - shift).rem_euclid(n as i64) as usize, j as usize]] = C64::new(1.0, 0.0);
    }
    Ok(out)
}

/// `K = 1` quantization assembled from the multiplication and translation
/// actions: `e^{2πi(mx+ny)} ↦ e^{πimn/N} M(e^{2πimx}) T(n)`.
pub fn quantize_by_actions(f: &TorusObservable, n: usize) -> Result<Array2<C64>> {
    let mut out = Array2::zeros((n, n));
    for (&(m, k), &c) in &f.terms {
        let mult = multiplication_action(&TorusObservable::mode(m, 0), n)?;
        let trans = translation_action(k, n)?;
        out = out + mult.dot(&trans) * (c * root_of_unity(m * k, 2 * n));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CenterCheck {
    pub is_central: bool,
    /// `M[0, 0]`; the scalar when `M` is a multiple of the identity.
    pub scalar: C64,
    /// Distance of `M` from `scalar · I`.
    pub scalar_residual: f64,
}

/// Whether the image of `a` commutes with `U` and `V`.
pub fn centrality(a: &RotAlgElement, rep: &TorusRep) -> Result<CenterCheck> {
    let m = represent(a, rep)?;
    let scale = max_abs(&m).max(1.0);
    let cu = max_abs(&(m.dot(&rep.u) - rep.u.dot(&m)));
    let cv = max_abs(&(m.dot(&rep.v) - rep.v.dot(&m)));
    let scalar = m[[0, 0]];
    let mut resid = 0.0f64;
    for ((i, j), z) in m.indexed_iter() {
        let target = if i == j { scalar } else { C64::new(0.0, 0.0) };
        resid = resid.max((z - target).norm());
    }
    Ok(CenterCheck { is_central: cu.max(cv) <= 1e-13 * scale, scalar, scalar_residual: resid })
}

/// [`centrality`] of `F_{mN, kN}` at `θ = K/N`.
pub fn center_check(m: i64, k: i64, n: usize, kk: usize) -> Result<CenterCheck> {
    let rep = rep_matrices(n, kk)?;
    let a = RotAlgElement::basis(rep.theta(), m * n as i64, k * n as i64);
    centrality(&a, &rep)
}

/// `‖M M† − I‖` entrywise.
pub fn unitarity_defect(m: &Array2<C64>) -> f64 {
    let id = Array2::from_diag_elem(m.nrows(), C64::new(1.0, 0.0));
    max_abs_diff(&m.dot(&dagger(m)), &id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_products() {
        let t = 0.5;
        let p = convolve(&RotAlgElement::basis(t, 1, 0), &RotAlgElement::basis(t, 0, 1)).unwrap();
        assert_eq!(p.distance(&RotAlgElement::basis(t, 1, 1)), 0.0);
        let q = convolve(&RotAlgElement::basis(t, 0, 1), &RotAlgElement::basis(t, 1, 0)).unwrap();
        assert!(q.distance(&RotAlgElement::basis(t, 1, 1).scale(c(-1.0))) < 1e-15);
        assert!(convolve(&RotAlgElement::basis(0.1, 0, 1), &RotAlgElement::basis(0.2, 1, 0)).is_err());
    }

    #[test]
    fn involution_of_basis() {
        let a = involution(&RotAlgElement::basis(0.25, 1, 0));
        assert_eq!(a.distance(&RotAlgElement::basis(0.25, -1, 0)), 0.0);
        let b = involution(&RotAlgElement::basis(1.0 / 3.0, 1, 1));
        let expect = RotAlgElement::basis(1.0 / 3.0, -1, -1).scale(phase(1.0 / 3.0));
        assert!(b.distance(&expect) < 1e-15);
    }

    #[test]
    fn two_dimensional_rep() {
        let r = rep_matrices(2, 1).unwrap();
        assert!((r.u[[0, 0]] - c(1.0)).norm() < 1e-15 && (r.u[[1, 1]] - c(-1.0)).norm() < 1e-15);
        assert_eq!(r.v[[0, 1]], c(1.0));
        assert_eq!(r.v[[1, 0]], c(1.0));
        let vu = r.v.dot(&r.u);
        let uv = r.u.dot(&r.v);
        assert!(max_abs_diff(&vu, &(uv * c(-1.0))) < 1e-15);
        let one = rep_matrices(1, 1).unwrap();
        assert_eq!(one.u[[0, 0]], c(1.0));
        assert_eq!(one.v[[0, 0]], c(1.0));
    }

    #[test]
    fn invalid_reps() {
        assert!(rep_matrices(4, 2).is_err());
        assert!(rep_matrices(0, 1).is_err());
        assert!(rep_matrices(5, 0).is_err());
        assert!(rep_matrices(5, 3).is_err());
    }

    #[test]
    fn generators_and_powers() {
        for n in 2..=8usize {
            let r = rep_matrices(n, 1).unwrap();
            let t = r.theta();
            assert!(max_abs_diff(&represent(&RotAlgElement::basis(t, 1, 0), &r).unwrap(), &r.u) < 1e-15);
            assert!(max_abs_diff(&represent(&RotAlgElement::basis(t, 0, 1), &r).unwrap(), &r.v) < 1e-15);
            let mut un = Array2::from_diag_elem(n, c(1.0));
            let mut vn = un.clone();
            for _ in 0..n {
                un = un.dot(&r.u);
                vn = vn.dot(&r.v);
            }
            let id = Array2::from_diag_elem(n, c(1.0));
            assert!(max_abs_diff(&un, &id) < 1e-14 && max_abs_diff(&vn, &id) < 1e-14);
        }
    }

    #[test]
    fn dirac_defect_examples() {
        let d = dirac_defect(2, 4, 4).unwrap();
        assert!((d.scalar - C64::new(0.0, 4.0 * PI)).norm() < 1e-12);
        let d = dirac_defect(1, 1, 64).unwrap();
        let ratio = d.scalar.norm() * 64f64.powi(3) / (PI.powi(3) / 3.0);
        assert!((ratio - 1.0).abs() < 0.01);
        assert!(d.mismatch() < 1e-12);
    }

    #[test]
    fn actions() {
        let m = multiplication_action(&TorusObservable::mode(1, 0), 4).unwrap();
        let expect = [c(1.0), C64::new(0.0, 1.0), c(-1.0), C64::new(0.0, -1.0)];
        for j in 0..4 {
            assert!((m[[j, j]] - expect[j]).norm() < 1e-15);
        }
        assert!(multiplication_action(&TorusObservable::mode(0, 1), 4).is_err());
        let id = Array2::from_diag_elem(5, c(1.0));
        assert_eq!(translation_action(0, 5).unwrap(), id);
        assert_eq!(translation_action(5, 5).unwrap(), id);
        let r = rep_matrices(5, 1).unwrap();
        assert_eq!(translation_action(2, 5).unwrap(), r.v.dot(&r.v));
    }

    #[test]
    fn centers() {
        let cc = center_check(1, 0, 5, 2).unwrap();
        assert!(cc.is_central && (cc.scalar.norm() - 1.0).abs() < 1e-13 && cc.scalar_residual < 1e-13);
        assert!(center_check(0, 1, 5, 2).unwrap().is_central);
        let r = rep_matrices(3, 1).unwrap();
        assert!(!centrality(&RotAlgElement::basis(r.theta(), 1, 0), &r).unwrap().is_central);
    }
}
