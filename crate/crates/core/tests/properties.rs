//! Randomized invariants of the exact and high-precision layers.

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use qde_core::dmod::FormalConnection;
use qde_core::exactcore::{rat, BigReal, ExactMatrix, Poly, Rational, RationalFunction, Valuation};
use qde_core::mzv::{stuffle_expand, stuffle_product, sym_sum, zeta_partial, MzvCombination, MzvIndex, SymSumIndex};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| rat(p, q))
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 1..=max_len).prop_map(Poly::new)
}

fn nonzero_rf() -> impl Strategy<Value = RationalFunction> {
    (poly(4), poly(3), -3i64..=3)
        .prop_filter("nonzero", |(n, d, _)| !n.is_zero() && !d.is_zero())
        .prop_map(|(n, d, k)| {
            &RationalFunction::new(n, d) * &RationalFunction::monomial(k, Rational::from_integer(1.into()))
        })
}

fn composition(max_weight: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..=max_weight, 1..=max_weight as usize)
        .prop_filter("weight bound", move |v| v.iter().sum::<u32>() <= max_weight)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn valuation_is_additive(f in nonzero_rf(), g in nonzero_rf()) {
        let (Valuation::Finite(a), Valuation::Finite(b)) = (f.valuation(), g.valuation()) else {
            panic!("nonzero functions have finite valuation");
        };
        prop_assert_eq!((&f * &g).valuation(), Valuation::Finite(a + b));
    }

    #[test]
    fn solve_round_trip(n in 1usize..=5, entries in prop::collection::vec(small_rat(), 25), v in prop::collection::vec(small_rat(), 5)) {
        let rows: Vec<Vec<Rational>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        let m = ExactMatrix::from_rows(rows);
        let v = &v[..n];
        if let Some(x) = m.solve_linear(v) {
            prop_assert_eq!(m.mul_vec(&x), v.to_vec());
        } else {
            prop_assert!(m.rank() < n);
        }
    }

    #[test]
    fn bigreal_addition_error(a in -1_000_000i64..1_000_000, b in 1i64..10_000, c in -1_000_000i64..1_000_000, d in 1i64..10_000, p in 20u32..60) {
        let (x, y) = (rat(a, b), rat(c, d));
        let sum = &BigReal::from_rational(&x, p) + &BigReal::from_rational(&y, p);
        let exact = BigReal::from_rational(&(&x + &y), p + 30);
        let err = sum.with_prec(p + 30).dist(&exact);
        let scale = (&x.abs() + &y.abs()) * Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), (p - 2) as usize));
        prop_assert!(err <= BigReal::from_rational(&scale, p + 30), "err {} at P = {}", err, p);
    }

    #[test]
    fn weak_sums_expand_exactly(c in composition(5), d in 1u64..=15) {
        let idx = SymSumIndex::new(&c);
        prop_assert_eq!(sym_sum(d, &idx), stuffle_expand(&idx).evaluate(d));
    }

    #[test]
    fn stuffle_product_is_multiplicative(x in composition(4), y in composition(4), d in 1u64..=15) {
        let p = stuffle_product(&MzvCombination::zeta(&x), &MzvCombination::zeta(&y));
        prop_assert_eq!(p.evaluate(d), zeta_partial(d, &MzvIndex::new(&x)) * zeta_partial(d, &MzvIndex::new(&y)));
    }

    #[test]
    fn partial_values_nondecreasing(c in composition(6), d in 1u64..=40) {
        let idx = MzvIndex::new(&c);
        prop_assert!(zeta_partial(d + 1, &idx) >= zeta_partial(d, &idx));
    }

    #[test]
    fn twist_has_inverse(p in -50i64..50, q in 1i64..20) {
        let c = qde_core::dmod::y_block_connection(2, &rat(1, 1)).unwrap();
        let w = rat(p, q);
        let back: FormalConnection = c.twist(&w).twist(&-w);
        prop_assert_eq!(back, c);
    }
}

proptest! {
    // Generic rational-function entries make elimination expensive.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rational_function_solve_round_trip(entries in prop::collection::vec(nonzero_rf(), 9), v in prop::collection::vec(nonzero_rf(), 3)) {
        let rows: Vec<Vec<RationalFunction>> = (0..3).map(|i| entries[i * 3..(i + 1) * 3].to_vec()).collect();
        let m = ExactMatrix::from_rows(rows);
        if let Some(x) = m.solve_linear(&v) {
            prop_assert_eq!(m.mul_vec(&x), v);
        }
    }
}
