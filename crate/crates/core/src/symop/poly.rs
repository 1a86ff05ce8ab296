use std::collections::BTreeMap;
use std::ops::Add;

use super::Scalar;

/// Polynomial test function in `x, y, z`: exponent triple ↦ coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<[u32; 3], Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::monomial([0, 0, 0])
    }

    pub fn monomial(exps: [u32; 3]) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(exps, Scalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], &Scalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn add_term(&mut self, exps: [u32; 3], c: Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&exps) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(exps, sum);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e, v) in self.terms() {
            out.add_term(e, v * c);
        }
        out
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}
