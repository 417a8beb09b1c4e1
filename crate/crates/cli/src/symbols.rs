//! Symbol specifications given on the command line.
//!
//! `gauss:q0:p0:alpha:beta` is the displaced Gaussian
//! `2 e^{−(q−q0)²/2α} e^{−(p−p0)²/2β}`, `zero` the zero symbol, and `random`
//! a Gaussian drawn from the run seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strictq::gaussian::GaussianObservable;
use strictq::numerics::Symbol;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolSpec {
    Gauss(GaussianObservable),
    Zero,
}

impl SymbolSpec {
    pub fn symbol(&self) -> Symbol {
        match self {
            SymbolSpec::Gauss(g) => g.symbol(),
            SymbolSpec::Zero => Symbol::zero(),
        }
    }

    /// Canonical text form, as recorded in reports.
    pub fn describe(&self) -> String {
        match self {
            SymbolSpec::Gauss(g) => format!("gauss:{}:{}:{}:{}", g.q0, g.p0, g.alpha, g.beta),
            SymbolSpec::Zero => "zero".into(),
        }
    }
}

/// Parses a symbol description; `random` draws from `rng`, so the order of parsing
/// matters for reproducibility.
pub fn parse(spec: &str, rng: &mut ChaCha8Rng) -> Result<SymbolSpec, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[0] {
        "zero" if parts.len() == 1 => Ok(SymbolSpec::Zero),
        "random" if parts.len() == 1 => {
            let g = GaussianObservable::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.4..1.2),
                rng.random_range(0.4..1.2),
            )
            .expect("positive widths");
            Ok(SymbolSpec::Gauss(g))
        }
        "gauss" if parts.len() == 5 => {
            let v = parts[1..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| format!("bad number {s:?} in symbol {spec:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            GaussianObservable::new(v[0], v[1], v[2], v[3])
                .map(SymbolSpec::Gauss)
                .map_err(|e| format!("symbol {spec:?}: {e}"))
        }
        _ => Err(format!("unknown symbol {spec:?}; expected gauss:q0:p0:alpha:beta, zero or random")),
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
