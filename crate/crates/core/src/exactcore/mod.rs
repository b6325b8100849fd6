//! Exact and high-precision arithmetic substrate.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Rationals are [`num_rational::BigRational`] values (always reduced,
//! positive denominator); reals are [`BigReal`] binary floats with a decimal
//! precision tag.

mod bernoulli;
mod bigreal;
mod matrix;
mod parse;
mod poly;
mod ratfunc;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use bernoulli::bernoulli;
pub use bigreal::{BigReal, DEFAULT_PRECISION};
pub use matrix::{bareiss_rank, ExactMatrix};
pub use parse::parse_rational_function;
pub use poly::Poly;
pub use ratfunc::RationalFunction;

/// Arbitrary-precision rational number in lowest terms.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serialises a rational as `"p/q"` (always with an explicit denominator).
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.25"` or `"1e3"`.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}0").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(digits);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// u-adic valuation: a finite order or `+∞` for the zero function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

/// Field elements usable as matrix entries.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Integral domain whose fraction field is `Self`; exact elimination runs there.
    type Ring: Domain;

    /// Multiplies a row by a common denominator so every entry lies in [`Field::Ring`].
    fn clear_denominators(row: &[Self]) -> Vec<Self::Ring>;

    fn from_ring(r: Self::Ring) -> Self;

    fn from_rational(r: &Rational) -> Self;
}

/// Integral domain with exact division, the arena for fraction-free elimination.
pub trait Domain: Clone + Debug + PartialEq + Zero + One {
    fn mul_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    /// Division that is known to be exact.
    fn exact_div(&self, other: &Self) -> Self;
}

impl Domain for BigInt {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn exact_div(&self, other: &Self) -> Self {
        debug_assert!((self % other).is_zero());
        self / other
    }
}

impl Field for Rational {
    type Ring = BigInt;

    fn clear_denominators(row: &[Self]) -> Vec<BigInt> {
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, r| num_integer::lcm(acc, r.denom().clone()));
        row.iter().map(|r| r.numer() * (&l / r.denom())).collect()
    }

    fn from_ring(r: BigInt) -> Self {
        Rational::from_integer(r)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// Rational as `f64` (lossy), for reporting only.
pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1e3").unwrap(), int(1000));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), rat(-3, 200));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn serialises_with_denominator() {
        assert_eq!(rat_to_string(&rat(-11, 27)), "-11/27");
        assert_eq!(rat_to_string(&int(3)), "3/1");
    }

    #[test]
    fn lossy_float_for_huge_values() {
        let big = Rational::new(factorial(200), factorial(198));
        assert!((rat_to_f64(&big) - 39800.0).abs() < 1e-6);
    }
}
