use num_traits::{One, Zero};

use super::{parse_rational, RationalFunction};
use crate::{Error, Result};

/// Parses an expression in `u` such as `(u^2 - 1)/(2*u) + 3/4` into an element
/// of `Q(u)`. Supports `+ - * / ^`, unary minus, parentheses, integer or
/// decimal literals and integer (possibly negative) exponents.
pub fn parse_rational_function(src: &str) -> Result<RationalFunction> {
    let mut p = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
        src,
    };
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let k: u32 = self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.err("expected integer exponent"))?;
        if neg && base.is_zero() {
            return Err(self.err("division by zero"));
        }
        let mut r = RationalFunction::one();
        for _ in 0..k {
            r = &r * &base;
        }
        Ok(if neg { &RationalFunction::one() / &r } else { r })
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some('u') => {
                self.pos += 1;
                Ok(RationalFunction::u())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                Ok(RationalFunction::constant(parse_rational(&lit)?))
            }
            _ => Err(self.err("expected number, `u` or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{int, rat, Poly, Valuation};

    #[test]
    fn parses_expressions() {
        let f = parse_rational_function("(u^2 - 1)/(2*u) + 3/4").unwrap();
        let expect = RationalFunction::new(
            Poly::new(vec![int(-2), int(3), int(2)]),
            Poly::new(vec![int(0), int(4)]),
        );
        assert_eq!(f, expect);
        let g = parse_rational_function("-16*u^-2 + 0.5").unwrap();
        assert_eq!(g.valuation(), Valuation::Finite(-2));
        assert_eq!(g.laurent_coeff(0), rat(1, 2));
        assert_eq!(parse_rational_function("-(u)").unwrap(), -RationalFunction::u());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational_function("u +").is_err());
        assert!(parse_rational_function("1/(u-u)").is_err());
        assert!(parse_rational_function("x").is_err());
        assert!(parse_rational_function("(u").is_err());
    }
}
