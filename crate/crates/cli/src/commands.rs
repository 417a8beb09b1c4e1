//! The subcommands. Each returns a [`Report`] plus the list of failed
//! pass/fail predicates.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use strictq::asymptotics::{
    check_dirac, check_norm_continuity, check_norm_limit, check_star_limits, check_vonneumann, AxiomReport, Quantizer,
    WeylQuantizer, HBAR_ZERO_NOTE,
};
use strictq::gaussian::{positivity_verdict, GaussianObservable};
use strictq::groupoid::{tangent_boundary_check, wm_correspondence, KernelFamily};
use strictq::landsman::{LandsmanQuantizer, Metric1D};
use strictq::linalg::{max_abs, max_abs_diff};
use strictq::numerics::{sample, Grid1D, Grid2D, HbarSchedule};
use strictq::prequant::{dirac_identity_check, TrigObservable, TrigSection, PREQUANT_HBAR};
use strictq::rotation::{center_check, dirac_defect, rep_matrices, unitarity_defect, validate_rep};
use strictq::weyl::{adjoint, op_norm, resolving_grid, weyl_kernel_symbol};
use strictq::C64;

use crate::report::{flag, Report};
use crate::symbols::SymbolSpec;

/// A run either produced a report or could not start.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or an inadmissible configuration.
    Usage(String),
    /// The computation itself broke down.
    Numeric(String),
}

impl From<strictq::Error> for Failure {
    fn from(e: strictq::Error) -> Self {
        use strictq::Error::*;
        match e {
            InvalidGrid(_) | Aliasing { .. } | Degenerate(_) | InvalidRep { .. } | Range(_) | Admissibility { .. }
            | Invalid(_) | ThetaMismatch(..) | DegreeCap { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<(Report, Vec<String>), Failure>;

/// Resolved numerical settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub half: f64,
    pub schedule: HbarSchedule,
    pub seed: u64,
}

impl RunConfig {
    pub fn to_map(&self, format: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("n".into(), json!(self.n));
        m.insert("box".into(), json!(self.half));
        m.insert("hbar_start".into(), json!(self.schedule.start()));
        m.insert("hbar_ratio".into(), json!(self.schedule.ratio()));
        m.insert("hbar_count".into(), json!(self.schedule.count()));
        m.insert("seed".into(), json!(self.seed));
        m.insert("format".into(), json!(format));
        m.insert("conventions".into(), conventions());
        m
    }
}

/// Normalizations the checks rely on. The prequantization constant is
/// measured, not quoted.
fn conventions() -> Value {
    let sections: Vec<TrigSection> =
        [(0, 1, 0), (1, -1, 1), (2, 0, 2)].iter().map(|&(a, b, d)| TrigSection::monomial(a, b, d, 8).unwrap()).collect();
    let closing = dirac_identity_check(&TrigObservable::mode(1, 0), &TrigObservable::mode(0, 1), 1, &sections)
        .ok()
        .and_then(|c| c.closing_constant)
        .map(|z| json!([z.re, z.im]))
        .unwrap_or(Value::Null);
    json!({
        "fiber_fourier": "f~(q,v) = int dp/(2 pi) e^{ipv} f(q,p)",
        "gaussian_symbol": "2 exp(-(q-q0)^2/(2 alpha)) exp(-(p-p0)^2/(2 beta))",
        "gaussian_expectation": "(2 beta/(pi hbar^2))^{1/2} * 2 pi Theta / D^{3/2}",
        "prequant_hbar": PREQUANT_HBAR,
        "prequant_closing_constant": closing,
        "torus_bracket": "{f,g} = (1/N)(df/dx dg/dy - df/dy dg/dx), hbar = 1/(2 pi)",
        "tangent_hbar_factor": "hbar * K(q + hbar v/2, q - hbar v/2) compared with f~(q,v); raw values also reported",
        "hbar_zero": HBAR_ZERO_NOTE,
    })
}

fn clipped_note(config: &mut Map<String, Value>, clipped: &[f64]) {
    config.insert("clipped_hbars".into(), json!(clipped));
}

/// Last defect is the smallest of the sequence, up to round-off.
fn settles(r: &AxiomReport) -> bool {
    let floor = 1e-10 * r.classical_ref.max(1.0);
    match r.last() {
        Some(l) => r.defects.iter().all(|&d| l <= d + floor),
        None => true,
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn at(v: &[f64], i: usize) -> Option<f64> {
    v.get(i).copied()
}

pub fn axioms(cfg: &RunConfig, mut config: Map<String, Value>, f: SymbolSpec, g: SymbolSpec) -> Outcome {
    let qz = WeylQuantizer::square(cfg.half, cfg.n)?;
    let (fs, gs) = (f.symbol(), g.symbol());
    config.insert("f".into(), json!(f.describe()));
    config.insert("g".into(), json!(g.describe()));
    let dirac = check_dirac(&qz, &fs, &gs, &cfg.schedule)?;
    let vn = check_vonneumann(&qz, &fs, &gs, &cfg.schedule)?;
    let nl = check_norm_limit(&qz, &fs, &cfg.schedule)?;
    let nc = check_norm_continuity(&qz, &fs, &cfg.schedule)?;
    let star = check_star_limits(&qz, &fs, &gs, &cfg.schedule)?;
    clipped_note(&mut config, &dirac.clipped);
    config.insert(
        "classical_ref".into(),
        json!({
            "dirac": dirac.classical_ref,
            "vonneumann": vn.classical_ref,
            "norm_limit": nl.classical_ref,
        }),
    );

    let columns =
        vec!["hbar", "dirac", "vonneumann", "norm_limit", "norm_continuity", "star_product", "star_bracket"];
    let mut report = Report::new("axioms", config, columns);
    for (i, &h) in dirac.hbars.iter().enumerate() {
        report.push(vec![
            Some(h),
            at(&dirac.defects, i),
            at(&vn.defects, i),
            at(&nl.defects, i),
            at(&nc.defects, i),
            at(&star.product.defects, i),
            at(&star.bracket.defects, i),
        ]);
    }
    let mut failed = Vec::new();
    for r in [&dirac, &vn] {
        if !settles(r) {
            failed.push(format!("{} defects grow at small hbar: {:?}", r.series, r.defects));
        }
    }
    Ok((report, failed))
}

pub fn star(cfg: &RunConfig, mut config: Map<String, Value>, f: SymbolSpec, g: SymbolSpec) -> Outcome {
    let qz = WeylQuantizer::square(cfg.half, cfg.n)?;
    config.insert("f".into(), json!(f.describe()));
    config.insert("g".into(), json!(g.describe()));
    let r = check_star_limits(&qz, &f.symbol(), &g.symbol(), &cfg.schedule)?;
    clipped_note(&mut config, &r.product.clipped);
    let mut report = Report::new("star", config, vec!["hbar", "product", "bracket"]);
    for (i, &h) in r.product.hbars.iter().enumerate() {
        report.push(vec![Some(h), at(&r.product.defects, i), at(&r.bracket.defects, i)]);
    }
    let failed = [&r.product, &r.bracket]
        .into_iter()
        .filter(|s| !settles(s))
        .map(|s| format!("star {} defects grow at small hbar: {:?}", s.series, s.defects))
        .collect();
    Ok((report, failed))
}

/// `lo:hi:steps`, inclusive; zero steps is an empty range.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || format!("bad range {text:?}; expected lo:hi:steps");
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    Ok(match steps {
        0 => Vec::new(),
        1 => vec![lo],
        s => (0..s).map(|i| lo + (hi - lo) * i as f64 / (s - 1) as f64).collect(),
    })
}

pub fn positivity(cfg: &RunConfig, mut config: Map<String, Value>, alphas: &[f64], betas: &[f64]) -> Outcome {
    let q = Grid1D::symmetric(cfg.half, cfg.n)?;
    config.insert("alphas".into(), json!(alphas));
    config.insert("betas".into(), json!(betas));
    let hbars = cfg.schedule.values();
    let mut cells = Vec::new();
    for &a in alphas {
        for &b in betas {
            for &h in &hbars {
                cells.push((GaussianObservable::new(0.0, 0.0, a, b)?, h));
            }
        }
    }
    let verdicts = cells
        .par_iter()
        .map(|(g, h)| positivity_verdict(g, *h, &q))
        .collect::<strictq::Result<Vec<_>>>()?;

    let mut report = Report::new("positivity", config, vec!["alpha", "beta", "hbar", "min_eig", "positive"]);
    let mut failed = Vec::new();
    for ((g, h), v) in cells.iter().zip(&verdicts) {
        report.push(vec![Some(g.alpha), Some(g.beta), Some(*h), Some(v.min_eigenvalue), flag(v.positive)]);
        // Away from the threshold the verdict must follow αβ ≥ (ħ/2)².
        let ratio = g.threshold_ratio(*h);
        if (ratio < 1.0 - 1e-9 && v.positive) || (ratio > 1.0 + 1e-9 && !v.positive) {
            failed.push(format!(
                "alpha {} beta {} hbar {}: positive = {} at ratio {ratio}",
                g.alpha, g.beta, h, v.positive
            ));
        }
    }
    Ok((report, failed))
}

/// `lo:hi` inclusive, or a single level.
pub fn parse_levels(text: &str) -> Result<(usize, usize), String> {
    let bad = || format!("bad level range {text:?}; expected lo:hi or N");
    let parts: Vec<&str> = text.split(':').collect();
    let (lo, hi) = match parts.as_slice() {
        [one] => {
            let v = one.parse().map_err(|_| bad())?;
            (v, v)
        }
        [a, b] => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn torus(mut config: Map<String, Value>, levels: (usize, usize), m: i64, k: i64, rep_k: usize) -> Outcome {
    let ns: Vec<usize> = (levels.0..=levels.1).collect();
    for &n in &ns {
        validate_rep(n, rep_k)?;
    }
    config.insert("levels".into(), json!([levels.0, levels.1]));
    config.insert("m".into(), json!(m));
    config.insert("k".into(), json!(k));
    config.insert("rep_k".into(), json!(rep_k));
    let tol = 1e-12 * (1.0 + 4.0 * PI * PI * (m * k).abs() as f64);

    let rows = ns
        .par_iter()
        .map(|&n| -> strictq::Result<(Vec<Option<f64>>, Vec<String>)> {
            let d = dirac_defect(m, k, n)?;
            let rep = rep_matrices(n, rep_k)?;
            let q = C64::from_polar(1.0, 2.0 * PI * rep_k as f64 / n as f64);
            let comm = max_abs(&(rep.v.dot(&rep.u) - rep.u.dot(&rep.v) * q));
            let unit = unitarity_defect(&rep.u).max(unitarity_defect(&rep.v));
            let cx = center_check(1, 0, n, rep_k)?;
            let cy = center_check(0, 1, n, rep_k)?;
            let abs = d.scalar.norm();
            let mismatch = d.mismatch();
            let mut failed = Vec::new();
            if mismatch > tol {
                failed.push(format!("N {n}: direct and scalar defect differ by {mismatch:.3e}"));
            }
            if comm > 1e-13 || unit > 1e-14 {
                failed.push(format!("N {n}: commutation {comm:.3e}, unitarity {unit:.3e}"));
            }
            if !(cx.is_central && cy.is_central) {
                failed.push(format!("N {n}: F(N,0) or F(0,N) is not central"));
            }
            let row = vec![
                Some(n as f64),
                Some(d.scalar.re),
                Some(d.scalar.im),
                Some(abs),
                Some(abs * (n as f64).powi(3)),
                Some(mismatch),
                Some(comm),
                Some(unit),
                Some(cx.scalar.norm()),
                flag(cx.is_central && cy.is_central),
            ];
            Ok((row, failed))
        })
        .collect::<strictq::Result<Vec<_>>>()?;

    let columns = vec![
        "N",
        "defect_re",
        "defect_im",
        "defect_abs",
        "defect_abs_n3",
        "direct_mismatch",
        "commutation",
        "unitarity",
        "center_scalar_abs",
        "central",
    ];
    let mut report = Report::new("torus", config, columns);
    let mut failed = Vec::new();
    for (row, f) in rows {
        report.push(row);
        failed.extend(f);
    }
    Ok((report, failed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricName {
    Flat,
    Circle,
    Exp2q,
}

impl MetricName {
    pub fn label(self) -> &'static str {
        match self {
            MetricName::Flat => "flat",
            MetricName::Circle => "circle",
            MetricName::Exp2q => "exp2q",
        }
    }
}

/// Metric, position grid and momentum half-width for a named metric.
fn landsman_setup(metric: MetricName, cfg: &RunConfig) -> strictq::Result<(Metric1D, Grid1D, f64)> {
    let b = cfg.half;
    Ok(match metric {
        MetricName::Flat => (Metric1D::flat(-8.0 * b, 8.0 * b)?, Grid1D::symmetric(b, cfg.n)?, b),
        MetricName::Circle => (Metric1D::circle(2.0 * b)?, Grid1D::new(0.0, 2.0 * b, cfg.n)?, 8.0),
        // The chart reaches down to X = −1, i.e. far to the left of the grid.
        MetricName::Exp2q => (Metric1D::exp2q(-(b + 7.0), b + 3.0)?, Grid1D::symmetric(b, cfg.n)?, 8.0),
    })
}

pub fn landsman(
    cfg: &RunConfig,
    mut config: Map<String, Value>,
    metric: MetricName,
    f: SymbolSpec,
    g: SymbolSpec,
) -> Outcome {
    let (m, q, p_half) = landsman_setup(metric, cfg)?;
    config.insert("metric".into(), json!(metric.label()));
    config.insert("p_half".into(), json!(p_half));
    config.insert("f".into(), json!(f.describe()));
    config.insert("g".into(), json!(g.describe()));
    let qz = LandsmanQuantizer::new(m, q, p_half)?;
    let (fs, gs) = (f.symbol(), g.symbol());
    let dirac = check_dirac(&qz, &fs, &gs, &cfg.schedule)?;
    let vn = check_vonneumann(&qz, &fs, &gs, &cfg.schedule)?;
    clipped_note(&mut config, &dirac.clipped);

    let per_hbar = dirac
        .hbars
        .par_iter()
        .map(|&h| -> strictq::Result<(Option<f64>, f64)> {
            let k = qz.quantize(&fs, h)?;
            let herm = max_abs_diff(&k.matrix, &adjoint(&k).matrix) / max_abs(&k.matrix).max(f64::MIN_POSITIVE);
            let flat = if metric == MetricName::Flat {
                let w = weyl_kernel_symbol(&fs, h, &q, &qz.paxis(h)?)?;
                let norm = op_norm(&w)?;
                Some(op_norm(&k.sub(&w)?)? / norm.max(f64::MIN_POSITIVE))
            } else {
                None
            };
            Ok((flat, herm))
        })
        .collect::<strictq::Result<Vec<_>>>()?;

    let columns = vec!["hbar", "flat_defect", "hermitian_defect", "dirac", "vonneumann"];
    let mut report = Report::new("landsman", config, columns);
    let mut failed = Vec::new();
    for (i, (&h, &(flat, herm))) in dirac.hbars.iter().zip(&per_hbar).enumerate() {
        report.push(vec![Some(h), flat, Some(herm), at(&dirac.defects, i), at(&vn.defects, i)]);
        if flat.is_some_and(|d| d > 1e-5) {
            failed.push(format!("hbar {h}: flat defect {:.3e} above 1e-5", flat.unwrap()));
        }
        if herm > 1e-10 {
            failed.push(format!("hbar {h}: kernel of a real symbol is not Hermitian ({herm:.3e})"));
        }
    }
    if metric == MetricName::Exp2q {
        for r in [&dirac, &vn] {
            if !strictly_decreasing(&r.defects) {
                failed.push(format!("{} defects not decreasing: {:?}", r.series, r.defects));
            }
        }
    }
    Ok((report, failed))
}

pub fn groupoid(cfg: &RunConfig, mut config: Map<String, Value>, f: SymbolSpec) -> Outcome {
    let q = Grid1D::symmetric(cfg.half, cfg.n)?;
    let fs = f.symbol();
    let hbars = cfg.schedule.values();
    let boundary = Grid2D::new(Grid1D::symmetric((0.5 * cfg.half).min(3.0), 24)?, Grid1D::symmetric(cfg.half, 64)?);
    config.insert("f".into(), json!(f.describe()));
    config.insert("boundary_q_half".into(), json!(boundary.q.hi()));
    config.insert("boundary_v_half".into(), json!(boundary.p.hi()));

    let wm = hbars
        .par_iter()
        .map(|&h| -> strictq::Result<f64> {
            let r = wm_correspondence(&sample(&fs, resolving_grid(q, cfg.half, h)?)?, h)?;
            Ok(if r.weyl_norm > 0.0 { r.defect / r.weyl_norm } else { r.defect })
        })
        .collect::<strictq::Result<Vec<_>>>()?;
    let tangent = tangent_boundary_check(&KernelFamily::canonical(&fs, q, boundary, &hbars)?)?;

    let columns = vec!["hbar", "wm_defect", "tangent_scaled", "tangent_raw", "clipped"];
    let mut report = Report::new("groupoid", config, columns);
    let mut failed = Vec::new();
    for (i, &h) in hbars.iter().enumerate() {
        report.push(vec![
            Some(h),
            Some(wm[i]),
            Some(tangent.scaled[i]),
            Some(tangent.raw[i]),
            Some(tangent.clipped[i] as f64),
        ]);
        if wm[i] > 1e-5 {
            failed.push(format!("hbar {h}: groupoid and Weyl kernels differ by {:.3e}", wm[i]));
        }
        if tangent.scaled[i] > 1e-6 {
            failed.push(format!("hbar {h}: tangent boundary defect {:.3e}", tangent.scaled[i]));
        }
    }
    Ok((report, failed))
}
