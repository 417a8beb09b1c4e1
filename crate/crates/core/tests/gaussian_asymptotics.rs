mod common;

use common::gauss;
use strictq::asymptotics::{check_dirac, check_norm_continuity, check_norm_limit, check_vonneumann, Quantizer, WeylQuantizer};
use strictq::gaussian::{
    chi_norm_sqr, chi_vector, gaussian_kernel_closed_form, positivity_verdict, psi_sigma, GaussianObservable,
};
use strictq::linalg::max_abs_diff;
use strictq::numerics::{Grid1D, HbarSchedule, Symbol};
use strictq::C64;

#[test]
fn positivity_flips_at_the_threshold() {
    let hbar = 1.0;
    let q = Grid1D::symmetric(12.0, 256).unwrap();
    for ratio in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        // αβ = ratio · (ħ/2)² with α = β.
        let s = 0.5 * hbar * f64::sqrt(ratio);
        let g = GaussianObservable::new(0.2, -0.3, s, s).unwrap();
        let v = positivity_verdict(&g, hbar, &q).unwrap();
        assert_eq!(v.positive, ratio >= 1.0, "ratio {ratio}: {v:?}");
    }
}

#[test]
fn closed_form_kernel_matches_quadrature() {
    let qz = WeylQuantizer::square(8.0, 128).unwrap();
    for (g, hbar) in [
        (GaussianObservable::new(0.3, -0.2, 0.7, 1.1).unwrap(), 1.0),
        (GaussianObservable::new(-0.5, 0.4, 0.25, 1.0).unwrap(), 0.5),
    ] {
        let closed = gaussian_kernel_closed_form(&g, hbar, &qz.qgrid);
        let quad = qz.quantize(&g.symbol(), hbar).unwrap();
        assert!(max_abs_diff(&closed.matrix, &quad.matrix) < 1e-6);
    }
}

#[test]
fn chi_and_psi_sigma_overlap() {
    let hbar = 0.5;
    let q = Grid1D::symmetric(12.0, 512).unwrap();
    let g = GaussianObservable::new(0.3, 0.0, 0.8, 0.6).unwrap();
    let chi = chi_vector(&g, hbar, &q);
    assert!(chi.values.iter().all(|z| z.im == 0.0));
    assert!((chi.norm_sqr() / chi_norm_sqr(&g, hbar) - 1.0).abs() < 1e-6);
    // ψ_σ is odd about q0 and χ is even, so they are orthogonal.
    let psi = psi_sigma(&g, 0.7, hbar, &q);
    assert!(chi.inner(&psi).norm() < 1e-8);
}

#[test]
fn dirac_and_vonneumann_trivial_cases() {
    let qz = WeylQuantizer::square(6.0, 128).unwrap();
    let f = gauss(0.3, 0.2, 0.5, 0.5);
    let s = HbarSchedule::new(1.0, 0.5, 3).unwrap();
    let d = check_dirac(&qz, &f, &f, &s).unwrap();
    assert!(d.defects.iter().all(|&x| x <= 1e-10), "{:?}", d.defects);
    let v = check_vonneumann(&qz, &f, &f, &s).unwrap();
    assert!(v.defects.iter().all(|&x| x > 0.0));

    let z = Symbol::zero();
    assert!(check_norm_limit(&qz, &z, &s).unwrap().defects.iter().all(|&x| x == 0.0));
    assert!(check_norm_continuity(&qz, &z, &s).unwrap().defects.iter().all(|&x| x == 0.0));
    // Odd n puts a grid node on the peak.
    let odd = WeylQuantizer::square(6.0, 127).unwrap();
    assert_eq!(check_norm_limit(&odd, &gauss(0.0, 0.0, 1.0, 1.0), &s).unwrap().classical_ref, 2.0);
}

#[test]
fn reports_are_deterministic() {
    let qz = WeylQuantizer::square(6.0, 128).unwrap();
    let f = gauss(0.5, 0.3, 0.5, 0.5);
    let g = gauss(-0.4, -0.5, 0.5, 0.5).scale(C64::new(1.0, 0.0));
    let s = HbarSchedule::new(1.0, 0.5, 3).unwrap();
    let a = check_dirac(&qz, &f, &g, &s).unwrap();
    let b = check_dirac(&qz, &f, &g, &s).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.defects), bits(&b.defects));
}
