//! Operator expression parser.
//!
//! ```text
//! expr   := sign? term (sign term)*
//! term   := factor (('*' | '·')? factor)*        juxtaposition multiplies
//! factor := atom ('^' digits | superscript)*
//! atom   := number | symbol | '(' expr ')' | '[' expr ',' expr ']' | sign factor
//! number := digits ('.' digits)? | digits '/' digits
//! symbol := x y z dx dy dz ∂x ∂y ∂z px py pz Lx Ly Lz i hbar ħ
//! ```
//!
//! Symbols are matched longest-first, so `xdy` is `x·∂y`. Commutators are
//! evaluated as they are parsed. Positions in errors are character offsets.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::{Scalar, SymOp};
use crate::Axis;

const MAX_EXPONENT: u32 = 16;
const MAX_DEPTH: usize = 64;
const MAX_TERMS: usize = 4_096;
const MAX_DEGREE: u32 = 256;
const MAX_LITERAL_DIGITS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEnd { expected: &'static str },
    UnexpectedToken { found: String, expected: &'static str },
    UnknownSymbol(String),
    InvalidNumber(String),
    ZeroDenominator,
    ExponentTooLarge { limit: u32 },
    TooDeep { limit: usize },
    TooLarge,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected '{found}', expected {expected}")
            }
            ParseErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol '{s}'"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            ParseErrorKind::ZeroDenominator => f.write_str("zero denominator"),
            ParseErrorKind::ExponentTooLarge { limit } => write!(f, "exponent exceeds {limit}"),
            ParseErrorKind::TooDeep { limit } => write!(f, "nesting deeper than {limit}"),
            ParseErrorKind::TooLarge => f.write_str("expression expands beyond the size limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Op(SymOp),
    Plus,
    Minus,
    Star,
    Caret,
    Sup(u32),
    Int(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => q.to_string(),
            Tok::Op(op) => op.to_string(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Caret => "^".into(),
            Tok::Sup(k) => super::scalar::superscript(*k),
            Tok::Int(k) => k.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::Comma => ",".into(),
        }
    }
}

fn symbol(name: &str) -> SymOp {
    use Axis::{X, Y, Z};
    match name {
        "x" => SymOp::coord(X),
        "y" => SymOp::coord(Y),
        "z" => SymOp::coord(Z),
        "dx" | "∂x" => SymOp::deriv(X),
        "dy" | "∂y" => SymOp::deriv(Y),
        "dz" | "∂z" => SymOp::deriv(Z),
        "px" => SymOp::momentum(X),
        "py" => SymOp::momentum(Y),
        "pz" => SymOp::momentum(Z),
        "Lx" => SymOp::angular_momentum(X),
        "Ly" => SymOp::angular_momentum(Y),
        "Lz" => SymOp::angular_momentum(Z),
        "i" => SymOp::scalar(Scalar::i()),
        "hbar" | "ħ" => SymOp::scalar(Scalar::hbar()),
        _ => unreachable!("not a terminal: {name}"),
    }
}

/// Terminals, longest first.
const TERMINALS: [&str; 18] = [
    "hbar", "Lx", "Ly", "Lz", "px", "py", "pz", "dx", "dy", "dz", "∂x", "∂y", "∂z", "x", "y", "z", "i", "ħ",
];

fn superscript_digit(c: char) -> Option<u32> {
    match c {
        '⁰' => Some(0),
        '¹' => Some(1),
        '²' => Some(2),
        '³' => Some(3),
        '⁴'..='⁹' => Some(c as u32 - '⁴' as u32 + 4),
        _ => None,
    }
}

fn digits_to_exponent(digits: &str, position: usize) -> Result<u32, ParseError> {
    match digits.parse::<u32>() {
        Ok(k) if k <= MAX_EXPONENT => Ok(k),
        _ => Err(ParseError { kind: ParseErrorKind::ExponentTooLarge { limit: MAX_EXPONENT }, position }),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let err = |kind, position| Err(ParseError { kind, position });
    while k < chars.len() {
        let c = chars[k];
        let start = k;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            k += 1;
            continue;
        }
        if superscript_digit(c).is_some() {
            let mut s = String::new();
            while let Some(d) = chars.get(k).and_then(|&c| superscript_digit(c)) {
                s.push(char::from_digit(d, 10).unwrap());
                k += 1;
            }
            out.push((Tok::Sup(digits_to_exponent(&s, start)?), start));
            continue;
        }
        if c.is_ascii_digit() {
            let run = |k: &mut usize| {
                let mut s = String::new();
                while let Some(&d) = chars.get(*k).filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    *k += 1;
                }
                s
            };
            let int = run(&mut k);
            // an integer right after '^' is an exponent, not a coefficient
            if matches!(out.last(), Some((Tok::Caret, _))) {
                out.push((Tok::Int(digits_to_exponent(&int, start)?), start));
                continue;
            }
            let next_is_digit = |k: usize| chars.get(k + 1).is_some_and(|d| d.is_ascii_digit());
            let (num, den) = match chars.get(k) {
                Some('.') if next_is_digit(k) => {
                    k += 1;
                    let frac = run(&mut k);
                    (format!("{int}{frac}"), format!("1{}", "0".repeat(frac.len())))
                }
                Some('/') if next_is_digit(k) => {
                    k += 1;
                    let den = run(&mut k);
                    (int, den)
                }
                _ => (int, "1".to_string()),
            };
            let literal: String = chars[start..k].iter().collect();
            if num.len() + den.len() > MAX_LITERAL_DIGITS {
                return err(ParseErrorKind::InvalidNumber(literal), start);
            }
            let (Some(n), Some(d)) = (BigInt::parse_bytes(num.as_bytes(), 10), BigInt::parse_bytes(den.as_bytes(), 10))
            else {
                return err(ParseErrorKind::InvalidNumber(literal), start);
            };
            if d.is_zero() {
                return err(ParseErrorKind::ZeroDenominator, start);
            }
            out.push((Tok::Num(BigRational::new(n, d)), start));
            continue;
        }
        let rest: String = chars[k..].iter().take(4).collect();
        match TERMINALS.iter().find(|t| rest.starts_with(**t)) {
            Some(t) => {
                out.push((Tok::Op(symbol(t)), start));
                k += t.chars().count();
            }
            None => {
                let word: String = chars[k..].iter().take_while(|c| c.is_alphanumeric() || **c == '∂').collect();
                let word = if word.is_empty() { c.to_string() } else { word };
                return err(ParseErrorKind::UnknownSymbol(word), start);
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { kind, position: self.position() })
    }

    fn unexpected<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.fail(ParseErrorKind::UnexpectedToken { found: t.describe(), expected }),
            None => self.fail(ParseErrorKind::UnexpectedEnd { expected }),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail(ParseErrorKind::TooDeep { limit: MAX_DEPTH });
        }
        Ok(())
    }

    fn guard(&self, op: SymOp, at: usize) -> Result<SymOp, ParseError> {
        if op.len() > MAX_TERMS || op.degree() > MAX_DEGREE {
            return Err(ParseError { kind: ParseErrorKind::TooLarge, position: at });
        }
        Ok(op)
    }

    fn product(&self, a: &SymOp, b: &SymOp, at: usize) -> Result<SymOp, ParseError> {
        if a.len().saturating_mul(b.len()) > 16 * MAX_TERMS || a.degree() + b.degree() > MAX_DEGREE {
            return Err(ParseError { kind: ParseErrorKind::TooLarge, position: at });
        }
        self.guard(a * b, at)
    }

    fn expr(&mut self) -> Result<SymOp, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let at = self.position();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.guard(&acc + &rhs, at)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.guard(&acc - &rhs, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Op(_) | Tok::LParen | Tok::LBracket))
    }

    fn term(&mut self) -> Result<SymOp, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let at = self.position();
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else if !self.starts_factor() {
                return Ok(acc);
            }
            let rhs = self.factor()?;
            acc = self.product(&acc, &rhs, at)?;
        }
    }

    fn factor(&mut self) -> Result<SymOp, ParseError> {
        let base = self.atom()?;
        let mut acc = base;
        loop {
            let at = self.position();
            let k = match self.peek() {
                Some(Tok::Sup(k)) => *k,
                Some(Tok::Caret) => {
                    self.pos += 1;
                    match self.peek() {
                        Some(Tok::Int(k)) => *k,
                        _ => return self.unexpected("an integer exponent"),
                    }
                }
                _ => return Ok(acc),
            };
            self.pos += 1;
            let base = acc;
            acc = SymOp::one();
            for _ in 0..k {
                acc = self.product(&acc, &base, at)?;
            }
        }
    }

    fn atom(&mut self) -> Result<SymOp, ParseError> {
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return self.unexpected("an operand");
        };
        match tok {
            Tok::Num(q) => {
                self.pos += 1;
                Ok(SymOp::scalar(Scalar::rational(q)))
            }
            Tok::Op(op) => {
                self.pos += 1;
                Ok(op)
            }
            Tok::Minus | Tok::Plus => {
                self.enter()?;
                self.pos += 1;
                let f = self.factor()?;
                self.depth -= 1;
                Ok(if tok == Tok::Minus { -f } else { f })
            }
            Tok::LParen => {
                self.enter()?;
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(e)
            }
            Tok::LBracket => {
                self.enter()?;
                let at = self.position();
                self.pos += 1;
                let a = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.expr()?;
                self.expect(Tok::RBracket, "']'")?;
                self.depth -= 1;
                let ab = self.product(&a, &b, at)?;
                let ba = self.product(&b, &a, at)?;
                self.guard(&ab - &ba, at)
            }
            _ => self.unexpected("an operand"),
        }
    }
}

/// Parses an operator expression into normal-ordered form.
pub fn parse_operator(text: &str) -> Result<SymOp, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0, end: text.chars().count() };
    let op = p.expr()?;
    if p.pos < p.toks.len() {
        return p.unexpected("an operator or end of input");
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symop::{Monomial, Polynomial};
    use Axis::{X, Y, Z};

    fn p(s: &str) -> SymOp {
        parse_operator(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn rotation_text() {
        let op = p("x*dy - y*dx");
        assert_eq!(op.to_string(), "x∂y - y∂x");
        assert_eq!(op, &(&SymOp::coord(X) * &SymOp::deriv(Y)) - &(&SymOp::coord(Y) * &SymOp::deriv(X)));
    }

    #[test]
    fn commutator_is_evaluated() {
        let got = p("[Lx, Ly]");
        let want = SymOp::angular_momentum(Z).scale(&(&Scalar::i() * &Scalar::hbar()));
        assert_eq!(got, want);
        assert!(p("[Lx,Ly] - i*hbar*Lz").is_zero());
        assert_eq!(p("[x, -i*hbar*dx]").to_string(), "iħ");
    }

    #[test]
    fn reordering_from_text() {
        assert_eq!(p("dx*x^2").to_string(), "x²∂x + 2x");
        // (x² ∂x + 2x) applied to 1 is 2x
        let out = p("dx*x^2").apply(&Polynomial::one());
        assert_eq!(out, Polynomial::monomial([1, 0, 0]).scale(&Scalar::integer(2)));
    }

    #[test]
    fn numbers_and_units() {
        assert_eq!(p("0.25*x"), p("1/4 x"));
        assert_eq!(p("3/2i").to_string(), "3/2i");
        assert_eq!(p("ħ²·x"), p("hbar^2 * x"));
        assert_eq!(p("(1+2i)x").to_string(), "(1 + 2i)x");
        assert_eq!(p("2 - 2"), SymOp::zero());
    }

    #[test]
    fn juxtaposition_and_unicode() {
        assert_eq!(p("x∂y"), p("x*dy"));
        assert_eq!(p("xdy"), p("x*dy"));
        assert_eq!(p("x²∂x²"), SymOp::monomial(Monomial { coord: [2, 0, 0], deriv: [2, 0, 0] }));
        assert_eq!(p("x − y"), p("x - y"));
        assert_eq!(p("-x^2"), -&p("x*x"));
        assert_eq!(p("px"), SymOp::momentum(X));
    }

    #[test]
    fn printed_forms_parse_back() {
        for s in ["x²∂x² + 3x∂x + 1", "-iħy∂z + iħz∂y", "(ħ + 1/3)x∂z - 7", "-3/2iħ²xyz∂x", "0"] {
            let op = p(s);
            assert_eq!(p(&op.to_string()), op, "{s}");
        }
    }

    #[test]
    fn error_positions() {
        let e = parse_operator("x + q").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(matches!(e.kind, ParseErrorKind::UnknownSymbol(ref s) if s == "q"));

        let e = parse_operator("x + ").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd { .. }));

        let e = parse_operator("[x, y").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd { .. }));

        let e = parse_operator("(x))").unwrap_err();
        assert_eq!(e.position, 3);

        assert!(matches!(parse_operator("x^17").unwrap_err().kind, ParseErrorKind::ExponentTooLarge { .. }));
        assert!(matches!(parse_operator("1/0").unwrap_err().kind, ParseErrorKind::ZeroDenominator));
        assert!(matches!(parse_operator("").unwrap_err().kind, ParseErrorKind::UnexpectedEnd { .. }));
        assert!(matches!(parse_operator("x^").unwrap_err().kind, ParseErrorKind::UnexpectedEnd { .. }));
    }

    #[test]
    fn resource_guards() {
        let deep = format!("{}x{}", "(".repeat(100), ")".repeat(100));
        assert!(matches!(parse_operator(&deep).unwrap_err().kind, ParseErrorKind::TooDeep { .. }));
        let big = "((x+y+z+dx+dy+dz)^16)^16";
        assert!(matches!(parse_operator(big).unwrap_err().kind, ParseErrorKind::TooLarge));
    }
}
