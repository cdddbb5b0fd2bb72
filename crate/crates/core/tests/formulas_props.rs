use std::sync::Arc;

use bbp_core::algebra::bigreal::BigReal;
use bbp_core::algebra::poly::Polynomial;
use bbp_core::algebra::ring::RingElement;
use bbp_core::formulas::{combine, ctb, integerize, reduce_block, CtbFamily, CtbTerm, NamedConstant};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn tol(exp: u32) -> BigRational {
    BigRational::new(1.into(), BigInt::from(10).pow(exp))
}

fn close(a: &BigReal, b: &BigReal, exp: u32) -> bool {
    (a - b).abs_upper() <= tol(exp)
}

fn grid_families(b: usize) -> Vec<Arc<CtbFamily>> {
    vec![
        CtbFamily::rational(q(1, 2), b).unwrap(),
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(70, 100), q(71, 100), b).unwrap(),
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 3]), q(57, 100), q(58, 100), b).unwrap(),
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), b).unwrap(),
    ]
}

#[test]
fn series_matches_closed_form_on_grid() {
    let mut cases = 0;
    for b in [8, 12, 24] {
        for fam in grid_families(b) {
            for a in 0..=b {
                let t = CtbTerm::new(&fam, a).unwrap();
                let f = combine(&[(1, t.clone())]).unwrap();
                assert!(close(&f.eval_series(40).unwrap(), &t.arg(40), 38), "arg r={} b={b} a={a}", fam.spec());
                let logf = bbp_core::formulas::BbpFormula::new(1, f.base.clone(), t.log_vector().unwrap());
                assert!(close(&logf.eval_series(40).unwrap(), &t.logabs(40), 38), "log r={} b={b} a={a}", fam.spec());
                cases += 1;
            }
        }
    }
    assert!(cases >= 60);
}

#[test]
fn ctb_symmetries_are_exact() {
    for b in [8, 12, 24] {
        for fam in grid_families(b) {
            assert!(ctb(&fam, 0).unwrap().iter().all(RingElement::is_zero));
            assert!(ctb(&fam, b / 2).unwrap().iter().all(RingElement::is_zero));
            for a in 1..b {
                let (x, y) = (ctb(&fam, a).unwrap(), ctb(&fam, b - a).unwrap());
                assert!(x.iter().zip(&y).all(|(u, v)| u.add(v).unwrap().is_zero()));
            }
        }
    }
}

#[test]
fn golden_pi_formula_reduces_to_block_15() {
    let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 60).unwrap();
    let f = combine(&[(10, CtbTerm::new(&fam, 8).unwrap())]).unwrap();
    let g = reduce_block(&f).unwrap();
    assert_eq!(g.block, 15);
    let pi = NamedConstant::Pi.eval(45);
    assert!(close(&g.eval_series(40).unwrap(), &pi, 38));
    // the base is -phi^15; the unsigned base gives a different value
    let base = g.base.embed(40).re;
    assert!(base.is_negative());
    // phi^15 = (1364 + 610 sqrt 5) / 2
    let phi15 = (&BigReal::from_int(1364, 200) + &(&BigReal::from_int(610, 200) * &BigReal::from_int(5, 200).sqrt())).mul_pow2(-1);
    assert!(close(&(&base + &phi15), &BigReal::zero(200), 35));
    let mut unsigned = g.clone();
    unsigned.base = g.base.neg();
    assert!(!close(&unsigned.eval_series(40).unwrap(), &pi, 10));
}

fn rational_family(n: i64, d: i64, b: usize) -> Arc<CtbFamily> {
    CtbFamily::rational(q(n, d), b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn combination_is_linear(n in 1i64..9, c in prop::collection::vec(-4i64..5, 5)) {
        let fam = rational_family(n, 10, 12);
        let terms: Vec<(i64, CtbTerm)> = c.iter().enumerate().map(|(i, &k)| (k, CtbTerm::new(&fam, i + 1).unwrap())).collect();
        let f = combine(&terms).unwrap();
        let mut expect = BigReal::zero(200);
        for (k, t) in &terms {
            expect = &expect + &t.arg(45).mul_int(&(*k).into());
        }
        prop_assert!(close(&f.eval_series(40).unwrap(), &expect, 38));
    }

    #[test]
    fn integerize_round_trips(n in 1i64..20, d in 20i64..40, c1 in -5i64..6, c2 in -5i64..6) {
        prop_assume!(c1 != 0 || c2 != 0);
        let fam = rational_family(n, d, 6);
        let f = combine(&[(c1, CtbTerm::new(&fam, 1).unwrap()), (c2, CtbTerm::new(&fam, 2).unwrap())]).unwrap();
        prop_assume!(!f.is_zero());
        let int = integerize(&f).unwrap();
        let inv = int.lambda.inverse().unwrap();
        for (a, k) in f.coeffs.iter().zip(&int.coeffs) {
            let back = inv.scale(&BigRational::from_integer(k.clone()));
            prop_assert_eq!(&back, a);
        }
        let g = int.apply(&f).unwrap();
        prop_assert!(close(&g.eval_series(40).unwrap(), &f.eval_series(40).unwrap(), 38));
    }

    #[test]
    fn block_reduction_preserves_value(n in 1i64..10, bi in 0usize..3, a in 1usize..12) {
        let b = [8usize, 12, 24][bi];
        prop_assume!(a < b / 2);
        let fam = rational_family(n, 11, b);
        let f = combine(&[(1, CtbTerm::new(&fam, a).unwrap())]).unwrap();
        let g = reduce_block(&f).unwrap();
        prop_assert!(b % g.block == 0);
        if a % 2 == 1 {
            prop_assert!(g.block < b);
        }
        prop_assert!(close(&g.eval_series(40).unwrap(), &f.eval_series(40).unwrap(), 38));
    }
}
