use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{bernoulli, Rational};

/// Default number of significant decimal digits.
pub const DEFAULT_PRECISION: u32 = 50;

/// Tag for values that are exact (integers and dyadic constants); they never
/// limit the precision of a result.
pub(crate) const EXACT: u32 = u32::MAX;

const GUARD_BITS: u64 = 24;

/// Binary floating-point real `mant·2^exp` carrying a decimal precision tag.
///
/// Each result is rounded to the working width of its tag, which is the
/// minimum of the operand tags.
#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn working_bits(prec: u32) -> u64 {
    (prec as f64 * std::f64::consts::LOG2_10).ceil() as u64 + GUARD_BITS
}

fn min_prec(a: u32, b: u32) -> u32 {
    a.min(b)
}

/// Precision used when an operation on exact operands has to round.
fn effective(prec: u32) -> u32 {
    if prec == EXACT {
        DEFAULT_PRECISION
    } else {
        prec
    }
}

/// Round-half-away right shift of a signed integer.
fn shr_round(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (s - 1);
    if m.is_negative() {
        -((-m + half) >> s)
    } else {
        (m + half) >> s
    }
}

impl BigReal {
    /// Precision tag of exact values; pass it to keep dyadic inputs exact.
    pub const EXACT: u32 = EXACT;

    fn raw(mant: BigInt, exp: i64, prec: u32) -> Self {
        let mut r = BigReal { mant, exp, prec };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if self.prec != EXACT {
            let wb = working_bits(self.prec);
            let bits = self.mant.bits();
            if bits > wb {
                let s = bits - wb;
                self.mant = shr_round(&self.mant, s);
                self.exp += s as i64;
            }
        }
        // Strip trailing zero bits so equal values share a representation.
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::raw(BigInt::from(n), 0, prec)
    }

    pub fn from_bigint(n: BigInt, prec: u32) -> Self {
        Self::raw(n, 0, prec)
    }

    /// Correctly rounded conversion of an exact rational.
    /// Dyadic rationals stay exact under the exact tag.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        if prec == EXACT && r.denom().magnitude().count_ones() == 1 {
            let k = r.denom().trailing_zeros().unwrap_or(0);
            return Self::raw(r.numer().clone(), -(k as i64), EXACT);
        }
        let prec = effective(prec);
        if r.is_zero() {
            return Self::raw(BigInt::zero(), 0, prec);
        }
        let wb = working_bits(prec) as i64 + 2;
        let shift = wb - r.numer().bits() as i64 + r.denom().bits() as i64;
        let q = if shift >= 0 {
            (r.numer() << shift as u64).div_floor(r.denom())
        } else {
            r.numer().div_floor(&(r.denom() << (-shift) as u64))
        };
        Self::raw(q, -shift, prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        let r = Rational::from_float(x).expect("finite float");
        Self::from_rational(&r, prec)
    }

    /// Parses any form accepted by [`super::parse_rational`].
    pub fn parse(s: &str, prec: u32) -> crate::Result<Self> {
        Ok(Self::from_rational(&super::parse_rational(s)?, prec))
    }

    pub fn prec(&self) -> u32 {
        effective(self.prec)
    }

    /// Re-tags the value, rounding if the new tag is narrower.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::raw(self.mant.clone(), self.exp, prec)
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Position of the leading bit: `2^(msb-1) ≤ |x| < 2^msb`.
    fn msb(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    /// Exact value as a rational (the mantissa is dyadic).
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let s = (bits - 60).max(0);
        let m = (&self.mant >> s as u64).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + s;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // Split to avoid overflow of the intermediate power.
        let half = (e / 2) as i32;
        m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    pub fn round(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_round(&self.mant, (-self.exp) as u64)
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.mant.is_zero() {
            return self.clone();
        }
        BigReal {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    pub fn mul_rat(&self, r: &Rational) -> Self {
        let p = effective(self.prec);
        self * &Self::from_rational(r, p)
    }

    pub fn recip(&self) -> Self {
        Self::from_i64(1, EXACT) / self.clone()
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip().with_prec(self.prec());
        }
        let mut base = self.clone();
        let mut acc = Self::from_i64(1, self.prec);
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^y = exp(y·ln self)` for `self > 0`.
    pub fn pow(&self, y: &BigReal) -> Self {
        (y * &self.ln()).exp()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative BigReal");
        if self.mant.is_zero() {
            return self.clone();
        }
        let prec = effective(self.prec);
        let wb = working_bits(prec) as i64;
        let mut s = (2 * wb + 4 - self.mant.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = (&self.mant << s as u64).sqrt();
        Self::raw(m, (self.exp - s) / 2, prec)
    }

    pub fn pi(prec: u32) -> Self {
        let prec = effective(prec);
        let f = working_bits(prec) + 16;
        let v = cached(&PI_CACHE, f, || {
            // Machin: π = 16·atan(1/5) − 4·atan(1/239)
            let a = atan_inv(5, f) * 16u32;
            let b = atan_inv(239, f) * 4u32;
            a - b
        });
        Self::raw(v, -(f as i64), prec)
    }

    pub fn ln2(prec: u32) -> Self {
        let prec = effective(prec);
        let f = working_bits(prec) + 16;
        let v = cached(&LN2_CACHE, f, || {
            let third = (BigInt::one() << f) / 3u32;
            atanh_fixed(&third, f) * 2u32
        });
        Self::raw(v, -(f as i64), prec)
    }

    /// Natural logarithm, `self > 0`.
    pub fn ln(&self) -> Self {
        assert!(self.signum() > 0, "logarithm of a non-positive BigReal");
        let prec = effective(self.prec);
        let f = working_bits(prec) + 16;
        // self = m·2^k with m ∈ [1/2, 1).
        let k = self.msb();
        let bits = self.mant.bits();
        let m_fixed = if bits >= f {
            shr_round(&self.mant, bits - f)
        } else {
            &self.mant << (f - bits)
        };
        let one = BigInt::one() << f;
        // ln m = 2·atanh((m−1)/(m+1)), |z| ≤ 1/3
        let z = ((&m_fixed - &one) << f) / (&m_fixed + &one);
        let ln_m = atanh_fixed(&z, f) * 2u32;
        let ln2 = Self::ln2(prec).with_prec(EXACT);
        let lm = Self::raw(ln_m, -(f as i64), EXACT);
        let r = &lm + &(&ln2 * &Self::from_i64(k, EXACT));
        r.with_prec(prec)
    }

    pub fn exp(&self) -> Self {
        let prec = effective(self.prec);
        if self.mant.is_zero() {
            return Self::from_i64(1, prec);
        }
        let wb = working_bits(prec);
        let ln2 = Self::ln2(prec + 10 + (self.msb().max(0) as u32) / 3);
        let x = self.with_prec(ln2.prec());
        let k = (&x / &ln2).round();
        let r = &x - &(&ln2 * &Self::from_bigint(k.clone(), EXACT));
        // Taylor on r/2^s, then square s times.
        let s: u64 = ((wb as f64).sqrt() as u64).max(4);
        let f = wb + s + 24;
        let r_fixed = {
            let shift = f as i64 + r.exp - s as i64;
            if shift >= 0 {
                &r.mant << shift as u64
            } else {
                shr_round(&r.mant, (-shift) as u64)
            }
        };
        let one = BigInt::one() << f;
        let mut sum = one.clone();
        let mut term = one;
        let mut j = 1u32;
        loop {
            term = (&term * &r_fixed) >> f;
            term /= j;
            if term.is_zero() {
                break;
            }
            sum += &term;
            j += 1;
        }
        for _ in 0..s {
            sum = (&sum * &sum) >> f;
        }
        let k = k.to_i64().expect("exponent out of range");
        Self::raw(sum, k - f as i64, prec)
    }

    /// `ln Γ(x)` for real `x > 0` by the Stirling series after an upward shift.
    pub fn ln_gamma(&self) -> Self {
        assert!(self.signum() > 0, "ln_gamma needs a positive argument");
        let prec = effective(self.prec);
        let wp = prec + 10;
        let wb = working_bits(wp) as f64;
        let x0 = (0.12 * wb).ceil() + 2.0;
        let mut x = self.with_prec(wp);
        let mut shift_prod = Self::from_i64(1, wp);
        let mut shifted = false;
        let xf = x.to_f64();
        if xf < x0 {
            let k = (x0 - xf).ceil() as i64;
            for _ in 0..k {
                shift_prod = &shift_prod * &x;
                x = &x + &Self::from_i64(1, EXACT);
            }
            shifted = true;
        }
        let half = Self::from_rational(&Rational::new(1.into(), 2.into()), EXACT);
        let ln_x = x.ln();
        let two_pi = Self::pi(wp).ldexp(1);
        let mut acc = &(&(&x - &half) * &ln_x) - &x;
        acc = &acc + &two_pi.ln().ldexp(-1);
        let tol = Self::from_i64(1, wp).ldexp(-(working_bits(wp) as i64));
        let inv_x = x.recip();
        let inv_x2 = &inv_x * &inv_x;
        let mut pw = inv_x;
        let mut prev_mag: Option<BigReal> = None;
        for j in 1..400u64 {
            let b = bernoulli(2 * j as usize);
            let c = b / Rational::from_integer(BigInt::from(2 * j * (2 * j - 1)));
            let term = pw.mul_rat(&c);
            let mag = term.abs();
            // The series is asymptotic: stop at the smallest term.
            if let Some(p) = &prev_mag {
                if mag > *p {
                    break;
                }
            }
            acc = &acc + &term;
            if mag < tol.abs() * acc.abs().max_one() {
                break;
            }
            prev_mag = Some(mag);
            pw = &pw * &inv_x2;
        }
        if shifted {
            acc = &acc - &shift_prod.ln();
        }
        acc.with_prec(prec)
    }

    fn max_one(&self) -> Self {
        let one = Self::from_i64(1, EXACT);
        if *self > one {
            self.clone()
        } else {
            one
        }
    }

    /// Absolute distance `|self − other|`.
    pub fn dist(&self, other: &BigReal) -> BigReal {
        (self - other).abs()
    }

    /// Scientific notation with `digits` significant digits, e.g. `1.6449e0`.
    pub fn to_sci_string(&self, digits: u32) -> String {
        let (neg, ds, e10) = match self.decimal_digits(digits.max(1)) {
            None => return "0".to_string(),
            Some(t) => t,
        };
        let sign = if neg { "-" } else { "" };
        let (head, tail) = ds.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }

    /// Plain or scientific decimal, whichever is natural for the magnitude.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let (neg, ds, e10) = match self.decimal_digits(digits.max(1)) {
            None => return "0".to_string(),
            Some(t) => t,
        };
        if !(-6..=24).contains(&e10) {
            return self.to_sci_string(digits);
        }
        let sign = if neg { "-" } else { "" };
        let s = if e10 < 0 {
            format!("0.{}{}", "0".repeat((-e10 - 1) as usize), ds)
        } else if (e10 as usize) + 1 >= ds.len() {
            format!("{}{}", ds, "0".repeat(e10 as usize + 1 - ds.len()))
        } else {
            let (a, b) = ds.split_at(e10 as usize + 1);
            format!("{a}.{b}")
        };
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        format!("{sign}{s}")
    }

    /// Sign, `digits` rounded decimal digits and the decimal exponent of the first.
    fn decimal_digits(&self, digits: u32) -> Option<(bool, String, i64)> {
        if self.mant.is_zero() {
            return None;
        }
        let neg = self.is_negative();
        let q = self.to_rational().abs();
        let ten = BigInt::from(10);
        let mut e10 = ((self.msb() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let s = digits as i64 - 1 - e10;
            let scaled = if s >= 0 {
                &q * Rational::from_integer(num_traits::pow(ten.clone(), s as usize))
            } else {
                &q / Rational::from_integer(num_traits::pow(ten.clone(), (-s) as usize))
            };
            let n = (scaled + Rational::new(1.into(), 2.into())).floor().to_integer();
            let ds = n.to_string();
            match ds.len().cmp(&(digits as usize)) {
                Ordering::Equal => return Some((neg, ds, e10)),
                Ordering::Greater => {
                    if ds.len() == digits as usize + 1 && ds[1..].bytes().all(|c| c == b'0') {
                        // Rounding carried into a new digit.
                        return Some((neg, ds[..digits as usize].to_string(), e10 + 1));
                    }
                    e10 += 1;
                }
                Ordering::Less => e10 -= 1,
            }
        }
    }
}

type FixedCache = OnceLock<Mutex<HashMap<u64, BigInt>>>;
static PI_CACHE: FixedCache = OnceLock::new();
static LN2_CACHE: FixedCache = OnceLock::new();

fn cached(cache: &FixedCache, f: u64, compute: impl FnOnce() -> BigInt) -> BigInt {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&f) {
        return v.clone();
    }
    let v = compute();
    map.lock().unwrap().insert(f, v.clone());
    v
}

/// `atanh(z)` in fixed point with `f` fractional bits, `|z| ≤ 1/3`.
fn atanh_fixed(z: &BigInt, f: u64) -> BigInt {
    let z2 = (z * z) >> f;
    let mut pw = z.clone();
    let mut sum = z.clone();
    let mut k = 1u64;
    loop {
        pw = (&pw * &z2) >> f;
        let t = &pw / (2 * k + 1);
        if t.is_zero() {
            break;
        }
        sum += t;
        k += 1;
    }
    sum
}

/// `atan(1/n)` in fixed point with `f` fractional bits.
fn atan_inv(n: u32, f: u64) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut pw = (BigInt::one() << f) / n;
    let mut sum = pw.clone();
    let mut k = 1u64;
    loop {
        pw /= &n2;
        if pw.is_zero() {
            break;
        }
        let t = &pw / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal {
            mant: BigInt::zero(),
            exp: 0,
            prec: EXACT,
        }
    }
    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal::from_i64(1, EXACT)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl BigReal {
    fn cmp_exact(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let by_mag = match self.msb().cmp(&other.msb()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.mant.abs() << (self.exp - e) as u64;
                let b = other.mant.abs() << (other.exp - e) as u64;
                a.cmp(&b)
            }
            o => o,
        };
        if sa > 0 {
            by_mag
        } else {
            by_mag.reverse()
        }
    }
}

impl Add for &BigReal {
    type Output = BigReal;
    fn add(self, o: &BigReal) -> BigReal {
        let prec = min_prec(self.prec, o.prec);
        if self.mant.is_zero() {
            return o.with_prec(prec);
        }
        if o.mant.is_zero() {
            return self.with_prec(prec);
        }
        if prec != EXACT {
            // An operand far below the rounding unit of the other cannot matter,
            // except through the rounding of the larger one, so keep one sticky bit.
            let wb = working_bits(prec) as i64 + 4;
            let (big, small) = if self.msb() >= o.msb() { (self, o) } else { (o, self) };
            if big.msb() - small.msb() > wb {
                let sticky = BigReal {
                    mant: BigInt::from(small.signum()),
                    exp: big.msb() - wb - 2,
                    prec: EXACT,
                };
                let e = big.exp.min(sticky.exp);
                let m = (&big.mant << (big.exp - e) as u64) + (&sticky.mant << (sticky.exp - e) as u64);
                return BigReal::raw(m, e, prec);
            }
        }
        let e = self.exp.min(o.exp);
        let m = (&self.mant << (self.exp - e) as u64) + (&o.mant << (o.exp - e) as u64);
        BigReal::raw(m, e, prec)
    }
}

impl Sub for &BigReal {
    type Output = BigReal;
    fn sub(self, o: &BigReal) -> BigReal {
        self + &(-o)
    }
}

impl Mul for &BigReal {
    type Output = BigReal;
    fn mul(self, o: &BigReal) -> BigReal {
        BigReal::raw(&self.mant * &o.mant, self.exp + o.exp, min_prec(self.prec, o.prec))
    }
}

impl Div for &BigReal {
    type Output = BigReal;
    fn div(self, o: &BigReal) -> BigReal {
        assert!(!o.mant.is_zero(), "BigReal division by zero");
        let prec = effective(min_prec(self.prec, o.prec));
        if self.mant.is_zero() {
            return BigReal::raw(BigInt::zero(), 0, prec);
        }
        let wb = working_bits(prec) as i64;
        let s = (wb + 2 + o.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let q = (&self.mant << s as u64) / &o.mant;
        BigReal::raw(q, self.exp - s - o.exp, prec)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mant: -&self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, o: BigReal) -> BigReal {
                (&self).$m(&o)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p as u32).unwrap_or(self.prec());
        write!(f, "{}", self.to_decimal_string(digits))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, P={})", self.to_sci_string(self.prec().min(30)), self.prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    const P: u32 = 50;

    fn close(a: &BigReal, b: &str, digits: i32) -> bool {
        let b = BigReal::parse(b, P + 10).unwrap();
        let tol = BigReal::from_i64(1, EXACT).mul_rat(&Rational::new(
            1.into(),
            num_traits::pow(BigInt::from(10), digits as usize),
        ));
        a.dist(&b) <= tol.with_prec(P)
    }

    #[test]
    fn constants() {
        let pi = "3.14159265358979323846264338327950288419716939937510582097494";
        let ln2 = "0.693147180559945309417232121458176568075500134360255254120680";
        assert!(close(&BigReal::pi(P), pi, 48));
        assert!(close(&BigReal::ln2(P), ln2, 48));
    }

    #[test]
    fn elementary_functions() {
        let e = BigReal::from_i64(1, P).exp();
        assert!(close(&e, "2.71828182845904523536028747135266249775724709369995957496697", 48));
        let ln10 = BigReal::from_i64(10, P).ln();
        assert!(close(&ln10, "2.30258509299404568401799145468436420760110148862877297603333", 47));
        let s2 = BigReal::from_i64(2, P).sqrt();
        assert!(close(&s2, "1.41421356237309504880168872420969807856967187537694807317668", 48));
        let back = BigReal::from_rational(&rat(-37, 3), P).exp().ln();
        assert!(close(&back, "-12.3333333333333333333333333333333333333333333333333333", 46));
        let big = BigReal::from_i64(100_000, P).ln();
        assert!(close(&big, "11.5129254649702284200899572734218210380055074431438648801", 46));
    }

    #[test]
    fn ln_gamma_values() {
        // ln Γ(1/2) = ln √π
        let half = BigReal::from_rational(&rat(1, 2), P);
        let expect = BigReal::pi(P + 10).ln().ldexp(-1);
        assert!(half.ln_gamma().dist(&expect).to_f64() < 1e-46);
        // ln Γ(11) = ln 10!
        let v = BigReal::from_i64(11, P).ln_gamma();
        let expect = BigReal::from_i64(3_628_800, P + 10).ln();
        assert!(v.dist(&expect).to_f64() < 1e-45);
        assert!(BigReal::from_i64(1, P).ln_gamma().abs().to_f64() < 1e-47);
    }

    #[test]
    fn decimal_io() {
        let x = BigReal::parse("-0.015625", P).unwrap();
        assert_eq!(x.to_decimal_string(10), "-0.015625");
        assert_eq!(BigReal::from_i64(1234, P).to_sci_string(3), "1.23e3");
        assert_eq!(BigReal::parse("9.9996", P).unwrap().to_sci_string(4), "1.000e1");
        assert_eq!(BigReal::from_i64(120, P).to_decimal_string(5), "120");
        assert_eq!(format!("{:.5}", BigReal::pi(P)), "3.1416");
    }

    #[test]
    fn precision_tags() {
        let a = BigReal::from_rational(&rat(1, 3), 30);
        let b = BigReal::from_rational(&rat(1, 7), 60);
        assert_eq!((&a + &b).prec(), 30);
        assert_eq!((&a * &b).prec(), 30);
        assert_eq!(BigReal::zero().prec(), DEFAULT_PRECISION);
        assert!(BigReal::from_rational(&rat(1, 3), 30) < BigReal::from_rational(&rat(1, 2), 30));
    }

    #[test]
    fn cancellation_keeps_small_addend() {
        let big = BigReal::from_i64(1, P);
        let tiny = BigReal::from_rational(&rat(1, 3), P).ldexp(-500);
        let s = &(&big + &tiny) - &big;
        assert!(s.signum() >= 0);
        assert!(s.abs().to_f64() < 1e-140);
    }
}
