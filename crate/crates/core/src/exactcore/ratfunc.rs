use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Field, Poly, Rational, Valuation};

/// Element of `Q(u)` kept as `num/den` with coprime parts and a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Builds and normalises `num/den`. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lead = d.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = Rational::one() / lead;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RationalFunction { num: n, den: d }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// `c·u^k` for any integer `k`.
    pub fn monomial(k: i64, c: Rational) -> Self {
        if k >= 0 {
            Self::from_poly(Poly::monomial(k as usize, c))
        } else {
            Self::new(Poly::constant(c), Poly::monomial((-k) as usize, Rational::one()))
        }
    }

    pub fn u() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// Order of vanishing at `u = 0` (negative for a pole).
    pub fn valuation(&self) -> Valuation {
        match self.num.low_order() {
            None => Valuation::Infinity,
            Some(a) => Valuation::Finite(a as i64 - self.den.low_order().unwrap() as i64),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_polynomial() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// `d/du`.
    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }

    /// Laurent coefficients at `u = 0` for the powers `v, v+1, ..., v+len-1`
    /// where `v` is the valuation. Empty for zero.
    pub fn laurent(&self, len: usize) -> (i64, Vec<Rational>) {
        let v = match self.valuation() {
            Valuation::Infinity => return (0, Vec::new()),
            Valuation::Finite(v) => v,
        };
        let a = self.num.low_order().unwrap();
        let b = self.den.low_order().unwrap();
        let n = self.num.unshift(a);
        let d = self.den.unshift(b);
        // Power series division n/d with d(0) != 0.
        let d0_inv = Rational::one() / d.coeff(0);
        let mut out: Vec<Rational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut c = n.coeff(k);
            for j in 1..=k.min(d.degree().unwrap_or(0)) {
                c -= d.coeff(j) * &out[k - j];
            }
            out.push(c * &d0_inv);
        }
        (v, out)
    }

    /// Coefficient of `u^k` in the Laurent expansion at `0`.
    pub fn laurent_coeff(&self, k: i64) -> Rational {
        let v = match self.valuation() {
            Valuation::Infinity => return Rational::zero(),
            Valuation::Finite(v) => v,
        };
        if k < v {
            return Rational::zero();
        }
        let (_, cs) = self.laurent((k - v) as usize + 1);
        cs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction::new(&self.num + &o.num, self.den.clone());
        }
        RationalFunction::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, o: &RationalFunction) -> RationalFunction {
        assert!(!o.is_zero(), "division by the zero rational function");
        RationalFunction::new(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl Field for RationalFunction {
    type Ring = Poly;

    fn clear_denominators(row: &[Self]) -> Vec<Poly> {
        let mut l = Poly::one();
        for r in row {
            if !r.is_zero() {
                let g = l.gcd(&r.den);
                l = (&l * &r.den).div_rem(&g).0;
            }
        }
        row.iter()
            .map(|r| &r.num * &l.div_rem(&r.den).0)
            .collect()
    }

    fn from_ring(r: Poly) -> Self {
        RationalFunction::new(r, Poly::one())
    }

    fn from_rational(r: &Rational) -> Self {
        RationalFunction::constant(r.clone())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            // den is monic of degree 0, hence 1.
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{int, rat};

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(
            Poly::new(n.iter().map(|&x| int(x)).collect()),
            Poly::new(d.iter().map(|&x| int(x)).collect()),
        )
    }

    #[test]
    fn normalises() {
        let a = rf(&[0, 2, 2], &[0, 0, 4, 4]);
        assert_eq!(a, rf(&[1], &[0, 2]));
        assert_eq!(a.denom(), &Poly::monomial(1, int(1)));
        assert_eq!(a.numer(), &Poly::constant(rat(1, 2)));
        assert_eq!(a.valuation(), Valuation::Finite(-1));
        assert_eq!(RationalFunction::zero().valuation(), Valuation::Infinity);
    }

    #[test]
    fn field_operations() {
        let a = rf(&[1], &[1, 1]);
        let b = rf(&[1], &[-1, 1]);
        // 1/(1+u) + 1/(u-1) = 2u/(u^2-1)
        assert_eq!(&a + &b, rf(&[0, 2], &[-1, 0, 1]));
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(rf(&[0, 0, 1], &[1]).derivative(), rf(&[0, 2], &[1]));
    }

    #[test]
    fn laurent_expansion() {
        // 1/(u^2 (1 - u)) = u^-2 + u^-1 + 1 + ...
        let f = rf(&[1], &[0, 0, 1, -1]);
        let (v, cs) = f.laurent(4);
        assert_eq!(v, -2);
        assert_eq!(cs, vec![int(1); 4]);
        assert_eq!(f.laurent_coeff(-3), int(0));
        assert_eq!(f.laurent_coeff(5), int(1));
    }

    #[test]
    fn clears_row_denominators() {
        let row = vec![rf(&[1], &[0, 1]), rf(&[1], &[0, 0, 1]), RationalFunction::zero()];
        let cleared = RationalFunction::clear_denominators(&row);
        assert_eq!(cleared[0], Poly::monomial(1, int(1)));
        assert_eq!(cleared[1], Poly::one());
        assert!(cleared[2].is_zero());
    }
}
