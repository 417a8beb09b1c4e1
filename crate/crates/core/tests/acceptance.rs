//! Acceptance criteria 1–10. Each test writes one `PASS`/`FAIL` line to
//! stdout (bypassing the test harness capture) and then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strictq::asymptotics::{check_dirac, check_norm_limit, check_star_limits, check_vonneumann, WeylQuantizer};
use strictq::gaussian::{expectation_closed_form, expectation_quadrature, positivity_verdict, theta, GaussianObservable};
use strictq::groupoid::{tangent_boundary_check, wm_correspondence, KernelFamily};
use strictq::landsman::{fiber_fourier, landsman_kernel, LandsmanQuantizer, Metric1D};
use strictq::linalg::{dagger, max_abs, max_abs_diff};
use strictq::numerics::{fourier_fiber, sample, Grid1D, Grid2D, HbarSchedule};
use strictq::prequant::{dirac_identity_check, sin_cos_anomaly, AnomalyPair, TrigObservable, TrigSection, PREQUANT_HBAR};
use strictq::rotation::{
    center_check, convolve, dirac_defect, gcd, involution, rep_matrices, represent, unitarity_defect, RotAlgElement,
};
use strictq::weyl::{hs_norm, resolving_grid, weyl_kernel};
use strictq::C64;

fn report(id: u32, name: &str, pass: bool, detail: String, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:>2} {verdict} {name}: {detail} ({:.1}s)\n", start.elapsed().as_secs_f64());
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn seq(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ")
}

#[test]
fn criterion_01_hilbert_schmidt_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let qgrid = Grid1D::symmetric(8.0, 512).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let g = GaussianObservable::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.4..1.5),
            rng.random_range(0.4..1.5),
        )
        .unwrap();
        // ∫|f|² for f = 2 e^{−(q−q0)²/2α − (p−p0)²/2β}.
        let l2 = 4.0 * PI * (g.alpha * g.beta).sqrt();
        for hbar in [1.0, 0.5, 0.25] {
            let grid = resolving_grid(qgrid, 8.0, hbar).unwrap();
            let f = sample(&g.symbol(), grid).unwrap();
            let k = weyl_kernel(&f, hbar, &qgrid).unwrap();
            let rel = (hs_norm(&k).powi(2) - l2 / (2.0 * PI * hbar)).abs() / l2;
            worst = worst.max(rel);
        }
    }
    let pass = worst <= 1e-4 && t.elapsed().as_secs_f64() <= 30.0;
    report(1, "hilbert-schmidt identity", pass, format!("max relative error {worst:.2e} (limit 1e-4, n=512)"), t);
    assert!(pass);
}

#[test]
fn criterion_02_gaussian_positivity_threshold() {
    let t = Instant::now();
    let qgrid = Grid1D::symmetric(10.0, 512).unwrap();
    let mut pass = true;
    let mut cells = Vec::new();
    for (ratio, expect_positive) in [(0.25, false), (0.5, false), (1.0, true), (1.5, true), (2.0, true)] {
        let g = GaussianObservable::isotropic(0.5 * f64::sqrt(ratio)).unwrap();
        let v = positivity_verdict(&g, 1.0, &qgrid).unwrap();
        let ok = if expect_positive {
            v.min_eigenvalue >= -1e-6 * v.scale
        } else {
            v.min_eigenvalue < -1e-6 * v.scale
        };
        pass &= ok;
        cells.push(format!("{ratio}:{:.2e}", v.min_eigenvalue / v.scale));
    }
    pass &= t.elapsed().as_secs_f64() <= 60.0;
    report(2, "gaussian positivity threshold", pass, format!("min_eig/scale by ratio {}", cells.join(" ")), t);
    assert!(pass);
}

#[test]
fn criterion_03_expectation_closed_form() {
    let t = Instant::now();
    let qgrid = Grid1D::symmetric(24.0, 1536).unwrap();
    let vals = [0.4, 1.0, 2.5];
    let (mut worst, mut signs) = (0.0f64, true);
    for &alpha in &vals {
        for &beta in &vals {
            for &sigma in &[0.5, 1.0, 2.0] {
                let g = GaussianObservable::new(0.3, -0.7, alpha, beta).unwrap();
                let cf = expectation_closed_form(&g, sigma, 1.0).unwrap();
                let quad = expectation_quadrature(&g, sigma, 1.0, &qgrid).unwrap();
                worst = worst.max((cf - quad).abs() / cf.abs());
                let th = theta(&g, 1.0).signum();
                signs &= cf.signum() == th && quad.signum() == th;
            }
        }
    }
    let pass = worst <= 1e-5 && signs;
    report(3, "expectation closed form", pass, format!("27 cells, max relative error {worst:.2e}, signs match: {signs}"), t);
    assert!(pass);
}

#[test]
fn criterion_04_strict_quantization_axioms() {
    let t = Instant::now();
    let qz = WeylQuantizer::square(6.0, 1024).unwrap();
    let f = GaussianObservable::new(0.5, 0.3, 0.5, 0.5).unwrap().symbol();
    let g = GaussianObservable::new(-0.4, -0.5, 0.5, 0.5).unwrap().symbol();
    let sched = HbarSchedule::new(1.0, 0.5, 7).unwrap();
    let dirac = check_dirac(&qz, &f, &g, &sched).unwrap();
    let vn = check_vonneumann(&qz, &f, &g, &sched).unwrap();
    let star = check_star_limits(&qz, &f, &g, &sched).unwrap();
    let norm = check_norm_limit(&qz, &f, &sched).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [&dirac, &vn, &star.product, &star.bracket] {
        let ok = r.defects.len() == 7 && r.strictly_decreasing_from(2) && r.last().unwrap() < 0.05 * r.classical_ref;
        pass &= ok;
        parts.push(format!("{} {:.2e}/{:.2}", r.series, r.last().unwrap(), r.classical_ref));
    }
    let norm_gap = norm.last().unwrap() / 2.0;
    pass &= norm.defects.len() == 7 && norm_gap <= 0.05;
    pass &= t.elapsed().as_secs_f64() <= 300.0;
    report(4, "strict-quantization axioms", pass, format!("{}; norm gap {:.2}%", parts.join(", "), 100.0 * norm_gap), t);
    assert!(pass);
}

fn random_element(rng: &mut ChaCha8Rng, theta: f64) -> RotAlgElement {
    let terms: Vec<((i64, i64), C64)> = (0..5)
        .map(|_| {
            let key = (rng.random_range(-3..=3), rng.random_range(-3..=3));
            (key, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    RotAlgElement::from_terms(theta, terms)
}

#[test]
fn criterion_05_rotation_algebra_exactness() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut center) = (0.0f64, 0.0f64);
    let mut reps = 0;
    for n in 1..=16usize {
        for k in 1..=n {
            if gcd(n, k) != 1 || (2 * k > n && n > 1) {
                continue;
            }
            reps += 1;
            let rep = rep_matrices(n, k).unwrap();
            let th = rep.theta();
            worst = worst.max(unitarity_defect(&rep.u)).max(unitarity_defect(&rep.v));
            let vu = rep.v.dot(&rep.u);
            let uv = rep.u.dot(&rep.v) * C64::from_polar(1.0, 2.0 * PI * th);
            worst = worst.max(max_abs_diff(&vu, &uv));
            for _ in 0..4 {
                let a = random_element(&mut rng, th);
                let b = random_element(&mut rng, th);
                let lhs = represent(&convolve(&a, &b).unwrap(), &rep).unwrap();
                let rhs = represent(&a, &rep).unwrap().dot(&represent(&b, &rep).unwrap());
                worst = worst.max(max_abs_diff(&lhs, &rhs));
                let star = represent(&involution(&a), &rep).unwrap();
                worst = worst.max(max_abs_diff(&star, &dagger(&represent(&a, &rep).unwrap())));
            }
            for m in -2..=2 {
                for kk in -2..=2 {
                    center = center.max(center_check(m, kk, n, k).unwrap().scalar_residual);
                }
            }
        }
    }
    let pass = worst <= 1e-12 && center <= 1e-13;
    report(5, "rotation algebra exactness", pass, format!("{reps} reps, max defect {worst:.2e}, center residual {center:.2e}"), t);
    assert!(pass);
}

#[test]
fn criterion_06_dirac_defect_scaling() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for big_n in 1..=16usize {
        for m in 0..=4 {
            for n in 0..=4 {
                worst = worst.max(dirac_defect(m, n, big_n).unwrap().mismatch());
            }
        }
    }
    let d = dirac_defect(1, 1, 64).unwrap();
    let scaled = d.scalar.norm() * 64f64.powi(3);
    let rel = (scaled - PI.powi(3) / 3.0).abs() / (PI.powi(3) / 3.0);
    let pass = worst <= 1e-12 && rel <= 0.01;
    report(6, "dirac defect scaling", pass, format!("matrix mismatch {worst:.2e}, |scalar|N³ at N=64 off by {:.3}%", 100.0 * rel), t);
    assert!(pass);
}

#[test]
fn criterion_07_prequantization_dirac_identity() {
    let t = Instant::now();
    let mut sections = Vec::new();
    for (a, b) in [(0, 0), (1, -1), (-2, 1)] {
        for d in 0..=2 {
            sections.push(TrigSection::monomial(a, b, d, 8).unwrap());
        }
    }
    let modes: Vec<(i64, i64)> = (-3..=3).flat_map(|m| (-3..=3).map(move |k| (m, k))).collect();
    let (mut worst, mut lam_dev) = (0.0f64, 0.0f64);
    for n in 1..=8usize {
        for &(m, k) in &modes {
            for &(m2, k2) in &modes {
                let r = dirac_identity_check(&TrigObservable::mode(m, k), &TrigObservable::mode(m2, k2), n, &sections).unwrap();
                worst = worst.max(r.max_residual);
                if let Some(l) = r.closing_constant {
                    lam_dev = lam_dev.max((l - C64::new(0.0, PREQUANT_HBAR)).norm());
                }
            }
        }
    }
    let anomaly = sin_cos_anomaly(1, 8, AnomalyPair::X).unwrap();
    let tail = &anomaly.growth[2..];
    let monotone = tail.windows(2).all(|w| w[1] > w[0]);
    let pass = worst <= 1e-10 && lam_dev <= 1e-10 && monotone;
    report(
        7,
        "prequantization dirac identity",
        pass,
        format!("residual {worst:.2e}, fitted constant off i/2π by {lam_dev:.1e}, anomaly 3..8 {:?}", tail.iter().map(|g| format!("{g:.1}")).collect::<Vec<_>>()),
        t,
    );
    assert!(pass);
}

#[test]
fn criterion_08_groupoid_correspondence() {
    let t = Instant::now();
    let g = GaussianObservable::new(0.3, -0.2, 0.7, 1.1).unwrap();
    let f = sample(&g.symbol(), Grid2D::square(8.0, 256).unwrap()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for hbar in [1.0, 0.5] {
        let r = wm_correspondence(&f, hbar).unwrap();
        pass &= r.defect <= 1e-5 * r.weyl_norm;
        parts.push(format!("ħ={hbar}: {:.2e}", r.defect / r.weyl_norm));
    }
    report(8, "groupoid correspondence", pass, format!("relative op-norm defect {}", parts.join(", ")), t);
    assert!(pass);
}

#[test]
fn criterion_09_tangent_groupoid_boundary() {
    let t = Instant::now();
    let fo = GaussianObservable::new(0.2, 0.1, 1.0, 1.0).unwrap();
    let go = GaussianObservable::new(-0.5, 0.4, 0.7, 1.3).unwrap();
    let q = Grid1D::symmetric(8.0, 384).unwrap();
    let boundary = Grid2D::new(Grid1D::symmetric(3.0, 24).unwrap(), Grid1D::symmetric(8.0, 64).unwrap());
    let hbars = [1.0, 0.5, 0.25, 0.125];
    let canonical = KernelFamily::canonical(&fo.symbol(), q, boundary, &hbars).unwrap();
    let can = tangent_boundary_check(&canonical).unwrap();
    let violating = KernelFamily::weyl(&go.symbol(), q, 8.0, &hbars, canonical.boundary_symbol.clone()).unwrap();
    let vio = tangent_boundary_check(&violating).unwrap();
    let gt = fourier_fiber(&sample(&go.symbol(), boundary).unwrap()).unwrap().transform;
    let dist = max_abs_diff(&canonical.boundary_symbol.values, &gt.values);
    let can_max = can.scaled.iter().cloned().fold(0.0, f64::max);
    let gap = vio.scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = can_max <= 1e-6 && gap >= 0.5 * dist;
    report(9, "tangent-groupoid boundary", pass, format!("canonical max {can_max:.2e}, violating gap {gap:.3} vs sup|f̃−g̃|/2 = {:.3}", 0.5 * dist), t);
    assert!(pass);
}

#[test]
fn criterion_10_landsman_flat_equivalence() {
    let t = Instant::now();
    let g = GaussianObservable::new(0.3, -0.2, 1.0, 1.0).unwrap();
    let qgrid = Grid1D::symmetric(8.0, 256).unwrap();
    let flat = Metric1D::flat(-60.0, 60.0).unwrap();
    let mut flat_worst = 0.0f64;
    for hbar in [1.0, 0.5, 0.25] {
        let f = sample(&g.symbol(), resolving_grid(qgrid, 8.0, hbar).unwrap()).unwrap();
        let kw = weyl_kernel(&f, hbar, &qgrid).unwrap();
        let kl = landsman_kernel(&fiber_fourier(&f, &flat).unwrap(), hbar, &flat).unwrap();
        flat_worst = flat_worst.max(max_abs(&(&kl.matrix - &kw.matrix)));
    }

    let qz = LandsmanQuantizer::new(Metric1D::exp2q(-10.0, 6.0).unwrap(), Grid1D::symmetric(3.0, 512).unwrap(), 8.0).unwrap();
    let a = GaussianObservable::new(0.3, 0.4, 0.25, 1.0).unwrap().symbol();
    let b = GaussianObservable::new(-0.3, -0.4, 0.25, 1.0).unwrap().symbol();
    // Starts below the admissibility bound ħ(fg) ≈ 0.2 of the product symbol.
    let sched = HbarSchedule::new(0.18, 0.5, 4).unwrap();
    let dirac = check_dirac(&qz, &a, &b, &sched).unwrap();
    let vn = check_vonneumann(&qz, &a, &b, &sched).unwrap();
    let decreasing = dirac.strictly_decreasing_from(0) && vn.strictly_decreasing_from(0) && dirac.defects.len() == 4;
    let pass = flat_worst <= 1e-5 && decreasing;
    report(
        10,
        "landsman flat equivalence",
        pass,
        format!("flat sup defect {flat_worst:.2e}; exp2q dirac [{}], vonneumann [{}]", seq(&dirac.defects), seq(&vn.defects)),
        t,
    );
    assert!(pass);
}
