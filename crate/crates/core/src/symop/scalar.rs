use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Gaussian rational `p + q i` with `p, q ∈ ℚ`.
pub type GaussRational = Complex<BigRational>;

/// Exact coefficient: a polynomial in `ħ` with Gaussian-rational coefficients.
///
/// Stored sparsely as `ħ`-power ↦ coefficient; zero coefficients are never kept.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<u32, GaussRational>,
}

fn gauss_is_zero(z: &GaussRational) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_gauss(0, GaussRational::new(BigRational::one(), BigRational::zero()))
    }

    pub fn i() -> Self {
        Scalar::from_gauss(0, GaussRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn hbar() -> Self {
        Scalar::from_gauss(1, GaussRational::new(BigRational::one(), BigRational::zero()))
    }

    pub fn integer(n: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: BigRational) -> Self {
        Scalar::from_gauss(0, GaussRational::new(q, BigRational::zero()))
    }

    /// `c · ħ^power`.
    pub fn from_gauss(power: u32, c: GaussRational) -> Self {
        let mut terms = BTreeMap::new();
        if !gauss_is_zero(&c) {
            terms.insert(power, c);
        }
        Scalar { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one()
    }

    /// `(ħ-power, coefficient)` pairs in ascending power.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &GaussRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// The single `(power, coefficient)` pair when this is a monomial in `ħ`.
    pub fn as_monomial(&self) -> Option<(u32, &GaussRational)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    /// Value with `ħ` set to `hbar`, in floating point.
    pub fn to_complex64(&self, hbar: f64) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        self.terms()
            .map(|(k, c)| {
                let re = c.re.to_f64().unwrap_or(f64::NAN);
                let im = c.im.to_f64().unwrap_or(f64::NAN);
                num_complex::Complex64::new(re, im) * hbar.powi(k as i32)
            })
            .sum()
    }

    fn add_term(&mut self, power: u32, c: GaussRational) {
        if gauss_is_zero(&c) {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(GaussRational::zero);
        *entry = &*entry + c;
        if gauss_is_zero(entry) {
            self.terms.remove(&power);
        }
    }

    pub fn scale_integer(&self, k: &BigInt) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        let q = BigRational::from_integer(k.clone());
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (*p, GaussRational::new(&c.re * &q, &c.im * &q)))
                .collect(),
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect() }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Superscript rendering of an exponent, e.g. `12` → `¹²`.
pub(crate) fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

pub(crate) fn hbar_power(power: u32) -> String {
    match power {
        0 => String::new(),
        1 => "ħ".to_string(),
        k => format!("ħ{}", superscript(k)),
    }
}

/// One signed real-or-imaginary piece of a scalar: `sign`, magnitude, whether
/// it carries `i`, and its `ħ` power.
pub(crate) struct Piece {
    pub negative: bool,
    pub magnitude: BigRational,
    pub imaginary: bool,
    pub power: u32,
}

impl Piece {
    /// Renders without sign; the magnitude is dropped when it is one and
    /// something else (`suffix` included) follows.
    pub fn render(&self, suffix: &str) -> String {
        let tail = format!("{}{}{}", if self.imaginary { "i" } else { "" }, hbar_power(self.power), suffix);
        if self.magnitude.is_one() && !tail.is_empty() {
            tail
        } else {
            format!("{}{}", self.magnitude, tail)
        }
    }
}

impl Scalar {
    /// Pieces in printing order: descending `ħ` power, real before imaginary.
    pub(crate) fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        for (power, c) in self.terms().rev() {
            for (part, imaginary) in [(&c.re, false), (&c.im, true)] {
                if !part.is_zero() {
                    out.push(Piece {
                        negative: part.is_negative(),
                        magnitude: part.abs(),
                        imaginary,
                        power,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = self.pieces();
        if pieces.is_empty() {
            return f.write_str("0");
        }
        for (k, p) in pieces.iter().enumerate() {
            let sign = match (k, p.negative) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sign}{}", p.render(""))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::integer(-1));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = &Scalar::hbar() * &Scalar::i();
        assert!((&a - &a).is_zero());
        assert_eq!(format!("{}", &a - &a), "0");
    }

    #[test]
    fn display_forms() {
        assert_eq!((&Scalar::i() * &Scalar::hbar()).to_string(), "iħ");
        assert_eq!((-&Scalar::i()).to_string(), "-i");
        assert_eq!(Scalar::rational(q(3, 2)).to_string(), "3/2");
        let mixed = &Scalar::one() + &(&Scalar::integer(-2) * &Scalar::i());
        assert_eq!(mixed.to_string(), "1 - 2i");
        let h2 = &Scalar::hbar() * &Scalar::hbar();
        assert_eq!((&h2 + &Scalar::hbar()).to_string(), "ħ² + ħ");
    }

    #[test]
    fn numeric_value() {
        let s = &(&Scalar::i() * &Scalar::hbar()) + &Scalar::rational(q(1, 4));
        let z = s.to_complex64(2.0);
        assert_eq!(z, num_complex::Complex64::new(0.25, 2.0));
    }
}
