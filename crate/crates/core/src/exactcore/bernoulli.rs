use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

static TABLE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Bernoulli number `B_n` with `B_1 = −1/2`, exact and cached.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = TABLE.lock().unwrap();
    while table.len() <= n {
        let m = table.len();
        let b = if m == 0 {
            Rational::one()
        } else if m > 1 && m % 2 == 1 {
            Rational::zero()
        } else {
            // Σ_{k=0}^{m} C(m+1, k) B_k = 0
            let mut binom = BigInt::one();
            let mut s = Rational::zero();
            for (k, bk) in table.iter().enumerate() {
                if !bk.is_zero() {
                    s += bk * Rational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            -s / Rational::from_integer(BigInt::from(m + 1))
        };
        table.push(b);
    }
    table[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{int, rat};

    #[test]
    fn known_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(20), rat(-174611, 330));
    }
}
