//! Deterministic invariants across modules.

use num_bigint::BigInt;
use num_traits::One;

use qde_core::cohmodel::{SpaceId, SpaceModel};
use qde_core::dmod::{connection_irregularity, exp_type_report, random_invertible, y_block_connection, FormalConnection};
use qde_core::exactcore::{factorial, int, rat, BigReal, Rational};
use qde_core::jfun::{j_coeff, quantum_period, DescendantKey, DescendantTable, Insertion};
use qde_core::mzv::harmonic;
use qde_core::peaks::{tail_ratios, PeakSeriesParams};
use rand::SeedableRng;

fn inv_dfact2(d: u64) -> Rational {
    let f = factorial(d);
    Rational::new(BigInt::one(), &f * &f)
}

#[test]
fn loop_euler_degree_two_is_minus_harmonic_c1() {
    for model in [SpaceModel::cpn(1), SpaceModel::cpn(3), SpaceModel::twistor()] {
        for n in [1u64, 2, 5, 17, 100] {
            let e = model.loop_euler_class(n);
            let deg2 = model.component(&e, 2);
            let expect: Vec<Rational> = model.c1.iter().map(|c| -(c * harmonic(n))).collect();
            assert_eq!(deg2.coeffs, expect, "{:?} n = {n}", model.id);
        }
    }
}

#[test]
fn vanishing_and_ladder_lemmas_to_degree_eight() {
    let mut t = DescendantTable::new(int(1));
    let vol = Insertion::alpha_vol(3);
    let av = Insertion::alpha_vol(1);
    for d in 2..=8u32 {
        assert_eq!(t.invariant(&DescendantKey::two(d, vol, Insertion::alpha(2))).unwrap(), int(0), "d = {d}");
        assert_eq!(t.invariant(&DescendantKey::two(d, vol, Insertion::alpha(3))).unwrap(), int(0), "d = {d}");
    }
    for d in 1..=8u32 {
        let f = inv_dfact2(d as u64);
        assert_eq!(t.invariant(&DescendantKey::two(d, av, Insertion::alpha(2))).unwrap(), int(8) * &f);
        assert_eq!(t.invariant(&DescendantKey::two(d, av, Insertion::alpha(3))).unwrap(), int(16 * d as i64) * &f);
    }
}

#[test]
fn twistor_point_pairing_is_quantum_period() {
    for d in 0..=8u64 {
        let j = j_coeff(SpaceId::Twistor, d).unwrap();
        assert_eq!(SpaceModel::twistor().pt_pairing(&j.raw), quantum_period(SpaceId::Twistor, d));
    }
}

#[test]
fn irregularity_additive_with_regular_summand() {
    let y = y_block_connection(2, &int(1)).unwrap();
    let regular = FormalConnection::from_polar(&[rat(3, 2)], &qde_core::exactcore::ExactMatrix::zeros(1, 1));
    let (irr_reg, _, _) = connection_irregularity(&regular, 1).unwrap();
    assert_eq!(irr_reg, 0);
    let (irr, _, _) = connection_irregularity(&y.direct_sum(&regular), 1).unwrap();
    assert_eq!(irr, 4);
}

#[test]
fn verdict_survives_constant_gauge_change() {
    let y = y_block_connection(2, &int(1)).unwrap();
    let base = exp_type_report(&y, 5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let g = random_invertible(4, &mut rng);
        let r = exp_type_report(&y.conjugate(&g).unwrap(), 5).unwrap();
        assert_eq!(r.verdict, base.verdict);
        assert_eq!(r.irregularity, base.irregularity);
    }
}

#[test]
fn y_block_twist_makes_leading_singular_and_lowers_irr() {
    let y = y_block_connection(2, &int(1)).unwrap();
    let r = exp_type_report(&y, 2).unwrap();
    assert!(r.leading_invertible);
    assert_eq!(r.irregularity, r.max_irregularity);
    let t = exp_type_report(&y.twist(&int(-2)), 2).unwrap();
    assert!(!t.leading_invertible);
    assert!(t.irregularity < 4);
}

/// With a window wider than the peak (ν < 1/(2κ)), head and tail
/// masses decay along a decade grid.
#[test]
fn tail_ratios_decrease_for_wide_windows() {
    let prec = 30;
    let nu = rat(1, 10);
    for params in [PeakSeriesParams::twistor_period(prec), PeakSeriesParams::cpn_period(2, prec)] {
        let rs: Vec<(f64, f64)> = [1_000i64, 10_000, 100_000]
            .iter()
            .map(|&x| {
                let t = tail_ratios(&params, &BigReal::from_i64(x, prec), &nu);
                let total = &(&t.head + &t.middle) + &t.tail;
                assert!((total.to_f64() - 1.0).abs() < 1e-20);
                (t.head.to_f64(), t.tail.to_f64())
            })
            .collect();
        for w in rs.windows(2) {
            assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "{rs:?}");
        }
    }
}
