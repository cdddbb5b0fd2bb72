use bbp_core::error::Error;
use bbp_core::formulas::BbpFormula;
use bbp_core::spigot::{extract_digit_values, extract_digits, DigitRequest};
use num_rational::BigRational;
use proptest::prelude::*;

fn formula(base: i64, coeffs: &[i64]) -> BbpFormula {
    let c: Vec<BigRational> = coeffs.iter().map(|&v| BigRational::from_integer(v.into())).collect();
    BbpFormula::rational(1, base, &c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shifted_windows_overlap(base in 2i64..17, c in prop::collection::vec(-9i64..10, 1..9), p in 1u64..200, k in 1u32..10) {
        let f = formula(base, &c);
        let long = extract_digits(&DigitRequest { formula: &f, position: p, count: k + 1 });
        let short = extract_digits(&DigitRequest { formula: &f, position: p + 1, count: k });
        match (long, short) {
            (Ok(l), Ok(s)) => prop_assert!(l.ends_with(&s)),
            (Err(Error::CarryAmbiguity(_)), _) | (_, Err(Error::CarryAmbiguity(_))) => {}
            (l, s) => prop_assert!(false, "{:?} {:?}", l, s),
        }
    }
}

#[test]
fn degree_two_formula() {
    // pi^2 = 9/8 sum 64^-k (16/(6k+1)^2 - 24/(6k+2)^2 - 8/(6k+3)^2 - 6/(6k+4)^2 + 1/(6k+5)^2)
    let c: Vec<BigRational> = [16, -24, -8, -6, 1, 0].iter().map(|&v| BigRational::from_integer(v.into())).collect();
    let mut f = BbpFormula::rational(2, 64, &c);
    f.scalar = f.scalar.scale(&BigRational::new(9.into(), 8.into()));
    let v = f.eval_series(30).unwrap();
    assert_eq!(v.to_decimal(20), "9.86960440108935861883");
    // base-64 digits of frac(pi^2), frozen from an independent 40-digit evaluation
    let d = extract_digit_values(&DigitRequest { formula: &f, position: 1, count: 6 }).unwrap();
    assert_eq!(d, vec![55, 41, 57, 36, 55, 50]);
    assert!(extract_digits(&DigitRequest { formula: &f, position: 1, count: 1 }).is_err());
}
