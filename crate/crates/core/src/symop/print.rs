//! Canonical text form.
//!
//! Terms are ordered by descending total degree, then by descending
//! coordinate exponents (x before y before z), then by descending derivative
//! exponents. Coefficients that are a single real or imaginary multiple of a
//! power of `ħ` are written inline (`-3/2iħx∂y`); anything else is
//! parenthesised (`(1 + 2i)x`). The output parses back to the same operator.

use std::cmp::Reverse;
use std::fmt;

use super::scalar::{superscript, Piece};
use super::{Monomial, SymOp};

const NAMES: [&str; 3] = ["x", "y", "z"];

fn factor(out: &mut String, base: &str, power: u32) {
    match power {
        0 => {}
        1 => out.push_str(base),
        k => {
            out.push_str(base);
            out.push_str(&superscript(k));
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (ax, name) in NAMES.iter().enumerate() {
            factor(&mut s, name, self.coord[ax]);
        }
        for (ax, name) in NAMES.iter().enumerate() {
            factor(&mut s, &format!("∂{name}"), self.deriv[ax]);
        }
        if s.is_empty() {
            s.push('1');
        }
        f.write_str(&s)
    }
}

fn print_key(m: &Monomial) -> (Reverse<u32>, Reverse<[u32; 3]>, Reverse<[u32; 3]>) {
    (Reverse(m.degree()), Reverse(m.coord), Reverse(m.deriv))
}

impl SymOp {
    /// Terms in canonical printing order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &super::Scalar)> {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|(m, _)| print_key(m));
        terms
    }
}

impl fmt::Display for SymOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let mono = if m.is_identity() { String::new() } else { m.to_string() };
            let mut pieces: Vec<Piece> = c.pieces();
            let (negative, body) = if pieces.len() == 1 {
                let p = pieces.pop().unwrap();
                (p.negative, p.render(&mono))
            } else {
                (false, format!("({c}){mono}"))
            };
            let sign = match (k, negative) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}
