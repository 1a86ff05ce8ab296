//! Exact Weyl algebra on `x, y, z, ∂x, ∂y, ∂z` with `ħ`-polynomial
//! Gaussian-rational coefficients.
//!
//! Every [`SymOp`] is stored in normal order — coordinates to the left of
//! derivatives — so equality of operators is equality of term maps.
//! Products use the closed-form reordering
//! `∂ᵐ xⁿ = Σₖ C(m,k) n!/(n−k)! xⁿ⁻ᵏ ∂ᵐ⁻ᵏ` per axis; [`normal_order`] is the
//! literal rewriter `∂ᵢ rⱼ → rⱼ ∂ᵢ + δᵢⱼ` on words, kept as a separate route.

mod parse;
mod poly;
mod print;
mod scalar;

pub use parse::{parse_operator, ParseError, ParseErrorKind};
pub use poly::Polynomial;
pub use scalar::{GaussRational, Scalar};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Axis;

/// `x^a y^b z^c ∂x^d ∂y^e ∂z^f`, always read in normal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub coord: [u32; 3],
    pub deriv: [u32; 3],
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial { coord: [0; 3], deriv: [0; 3] };

    pub fn coord(axis: Axis) -> Self {
        let mut m = Monomial::IDENTITY;
        m.coord[axis.index()] = 1;
        m
    }

    pub fn deriv(axis: Axis) -> Self {
        let mut m = Monomial::IDENTITY;
        m.deriv[axis.index()] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.coord.iter().chain(&self.deriv).sum()
    }

    pub fn is_identity(&self) -> bool {
        *self == Monomial::IDENTITY
    }
}

/// A single letter of a Weyl-algebra word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Coord(Axis),
    Deriv(Axis),
}

/// Normal-ordered differential operator with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymOp {
    terms: BTreeMap<Monomial, Scalar>,
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// `n (n−1) ⋯ (n−k+1)`.
pub(crate) fn falling(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

/// Normal-ordered expansion of `(r^α ∂^β)(r^γ ∂^δ)`.
fn mul_monomials(a: &Monomial, b: &Monomial) -> Vec<(Monomial, BigInt)> {
    let mut out = vec![(Monomial::IDENTITY, BigInt::one())];
    for ax in 0..3 {
        let (m, n) = (a.deriv[ax], b.coord[ax]);
        let mut next = Vec::with_capacity(out.len() * (m.min(n) as usize + 1));
        for (mono, c) in &out {
            for k in 0..=m.min(n) {
                let mut r = *mono;
                r.coord[ax] = a.coord[ax] + n - k;
                r.deriv[ax] = m - k + b.deriv[ax];
                next.push((r, c * binomial(m, k) * falling(n, k)));
            }
        }
        out = next;
    }
    out
}

impl SymOp {
    pub fn zero() -> Self {
        SymOp::default()
    }

    pub fn one() -> Self {
        SymOp::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        SymOp::term(Monomial::IDENTITY, c)
    }

    pub fn monomial(m: Monomial) -> Self {
        SymOp::term(m, Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SymOp { terms }
    }

    pub fn coord(axis: Axis) -> Self {
        SymOp::monomial(Monomial::coord(axis))
    }

    pub fn deriv(axis: Axis) -> Self {
        SymOp::monomial(Monomial::deriv(axis))
    }

    /// `pₖ = −iħ∂ₖ`.
    pub fn momentum(axis: Axis) -> Self {
        SymOp::term(Monomial::deriv(axis), -(&Scalar::i() * &Scalar::hbar()))
    }

    /// `L_x = −iħ(y∂z − z∂y)` and its cyclic variants.
    pub fn angular_momentum(axis: Axis) -> Self {
        let (j, k) = axis.cyclic_successors();
        let rotation = &(&SymOp::coord(j) * &SymOp::deriv(k)) - &(&SymOp::coord(k) * &SymOp::deriv(j));
        rotation.scale(&-(&Scalar::i() * &Scalar::hbar()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest total degree among the terms (0 for the zero operator).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> SymOp {
        let mut out = SymOp::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> SymOp {
        (0..k).fold(SymOp::one(), |acc, _| &acc * self)
    }

    /// `ab − ba`.
    pub fn commutator(a: &SymOp, b: &SymOp) -> SymOp {
        &(a * b) - &(b * a)
    }

    /// Applies the operator to a polynomial test function.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for (e, v) in p.terms() {
                if (0..3).any(|ax| m.deriv[ax] > e[ax]) {
                    continue;
                }
                let factor = (0..3).fold(BigInt::one(), |acc, ax| acc * falling(e[ax], m.deriv[ax]));
                let exps = [0, 1, 2].map(|ax| e[ax] - m.deriv[ax] + m.coord[ax]);
                out.add_term(exps, (c * v).scale_integer(&factor));
            }
        }
        out
    }
}

/// Normal form of `coeff · w₁ w₂ ⋯ wₙ` by repeated rewriting `∂ᵢ rⱼ → rⱼ ∂ᵢ + δᵢⱼ`.
pub fn normal_order(word: &[Generator], coeff: Scalar) -> SymOp {
    let mut out = SymOp::zero();
    if coeff.is_zero() {
        return out;
    }
    // multiset of pending words with integer multiplicities
    let mut pending: Vec<(Vec<Generator>, BigInt)> = vec![(word.to_vec(), BigInt::one())];
    while let Some((w, mult)) = pending.pop() {
        let unordered = w.windows(2).position(|p| {
            matches!((p[0], p[1]), (Generator::Deriv(_), Generator::Coord(_)))
        });
        match unordered {
            Some(k) => {
                let (Generator::Deriv(i), Generator::Coord(j)) = (w[k], w[k + 1]) else {
                    unreachable!()
                };
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                pending.push((swapped, mult.clone()));
                if i == j {
                    let mut contracted = w.clone();
                    contracted.drain(k..k + 2);
                    pending.push((contracted, mult));
                }
            }
            None => {
                let mut m = Monomial::IDENTITY;
                for g in &w {
                    match g {
                        Generator::Coord(a) => m.coord[a.index()] += 1,
                        Generator::Deriv(a) => m.deriv[a.index()] += 1,
                    }
                }
                out.add_term(m, coeff.scale_integer(&mult));
            }
        }
    }
    out
}

impl Add<&SymOp> for &SymOp {
    type Output = SymOp;
    fn add(self, rhs: &SymOp) -> SymOp {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&SymOp> for &SymOp {
    type Output = SymOp;
    fn sub(self, rhs: &SymOp) -> SymOp {
        self + &(-rhs)
    }
}

impl Neg for &SymOp {
    type Output = SymOp;
    fn neg(self) -> SymOp {
        SymOp { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul<&SymOp> for &SymOp {
    type Output = SymOp;
    fn mul(self, rhs: &SymOp) -> SymOp {
        let mut out = SymOp::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ca * cb;
                for (m, k) in mul_monomials(ma, mb) {
                    if !k.is_zero() {
                        out.add_term(m, c.scale_integer(&k));
                    }
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<SymOp> for SymOp {
            type Output = SymOp;
            fn $method(self, rhs: SymOp) -> SymOp {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for SymOp {
    type Output = SymOp;
    fn neg(self) -> SymOp {
        -&self
    }
}
