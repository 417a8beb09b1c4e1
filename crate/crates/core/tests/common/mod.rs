#![allow(dead_code)]

use proptest::prelude::*;
use strictq::gaussian::GaussianObservable;
use strictq::numerics::Symbol;
use strictq::C64;

/// One weighted displaced Gaussian of a mixture.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub q0: f64,
    pub p0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub weight: (f64, f64),
}

pub fn bump() -> impl Strategy<Value = Bump> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.5..2.0f64, 0.5..2.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(q0, p0, alpha, beta, re, im)| Bump { q0, p0, alpha, beta, weight: (re, im) })
}

pub fn mixture() -> impl Strategy<Value = Vec<Bump>> {
    prop::collection::vec(bump(), 1..=3)
}

pub fn symbol_of(bumps: &[Bump]) -> Symbol {
    bumps.iter().fold(Symbol::zero(), |acc, b| {
        let g = GaussianObservable::new(b.q0, b.p0, b.alpha, b.beta).unwrap();
        acc.add(&g.symbol().scale(C64::new(b.weight.0, b.weight.1)))
    })
}

pub fn gauss(q0: f64, p0: f64, alpha: f64, beta: f64) -> Symbol {
    GaussianObservable::new(q0, p0, alpha, beta).unwrap().symbol()
}
