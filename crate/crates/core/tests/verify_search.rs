use std::sync::Arc;

use bbp_core::algebra::poly::Polynomial;
use bbp_core::formulas::{arg_eval, CtbFamily, RadiusSpec};
use bbp_core::relation::{Relation, Status};
use bbp_core::search::{dedup, run_search, RowSpan, SearchConfig};
use bbp_core::verify::{rearranged_products, residual_at, verify_exact, Realness};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn inv_sqrt2(b: usize) -> Arc<CtbFamily> {
    CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(70, 100), q(71, 100), b).unwrap()
}

fn golden_set() -> Vec<Relation> {
    let s2 = inv_sqrt2(24);
    let s3 = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 3]), q(57, 100), q(58, 100), 12).unwrap();
    let psi = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 2, 2]), q(36, 100), q(37, 100), 12).unwrap();
    let gold = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 60).unwrap();
    let s2_40 = inv_sqrt2(40);
    vec![
        Relation::new(&s2, &[(1, 5), (-1, 11)], 0).unwrap(),
        Relation::new(&s2, &[(3, 5), (3, 11)], 1).unwrap(),
        Relation::new(&s3, &[(1, 3), (-1, 5)], 0).unwrap(),
        Relation::new(&psi, &[(12, 2)], 1).unwrap(),
        Relation::new(&psi, &[(1, 2), (-1, 5)], 0).unwrap(),
        Relation::new(&gold, &[(10, 8)], 1).unwrap(),
        Relation::new(&gold, &[(1, 18), (-1, 24)], 0).unwrap(),
        Relation::new(&gold, &[(1, 8), (1, 9), (-1, 21)], 0).unwrap(),
        Relation::new(&s2_40, &[(1, 3), (1, 5), (1, 11), (-1, 13), (-1, 15), (1, 19)], 0).unwrap(),
    ]
}

#[test]
fn certificates_survive_high_precision_recheck() {
    let bound = BigRational::new(1.into(), BigInt::from(10).pow(150));
    for rel in golden_set() {
        let cert = verify_exact(&rel).unwrap();
        assert_eq!(cert.status, Status::Verified, "{rel}");
        assert_eq!(cert.realness, Realness::ProvenExact);
        let t = cert.winding.unwrap();
        assert!(residual_at(&rel, t, 200) <= bound, "{rel}");
        let again = verify_exact(&cert.relation).unwrap();
        assert_eq!((again.status, again.winding), (cert.status, cert.winding));
    }
}

#[test]
fn perturbed_lafont_relations_are_refuted() {
    let fam = inv_sqrt2(24);
    let base = [(1i64, 5usize), (-1, 11)];
    let mut variants = Vec::new();
    for a in 1..=11 {
        variants.push((a, 1));
    }
    for a in 1..=9 {
        variants.push((a, -1));
    }
    assert_eq!(variants.len(), 20);
    for (a, d) in variants {
        let mut terms = base.to_vec();
        terms.push((d, a));
        let rel = Relation::new(&fam, &terms, 0).unwrap();
        assert_eq!(verify_exact(&rel).unwrap().status, Status::Refuted, "{rel}");
    }
}

#[test]
fn arguments_stay_inside_the_half_plane() {
    let fam = inv_sqrt2(24);
    let r = fam.r_ball(200);
    for a in fam.search_indices() {
        let x = arg_eval(&fam, a, 30);
        // |arg(1 + r e^{iθ})| <= asin r, so sin |arg| <= r
        let (s, _) = x.abs().sin_cos();
        assert!(s.lower() <= r.upper(), "a = {a}");
    }
}

#[test]
fn search_is_deterministic_and_deduplicated() {
    let cfg = SearchConfig::new(RadiusSpec::MinPoly { q: Polynomial::from_ints(&[-1, 0, 2]), lo: q(70, 100), hi: q(71, 100) }, 24).unwrap();
    let one = run_search(&cfg).unwrap();
    let two = run_search(&cfg).unwrap();
    let show = |r: &bbp_core::search::SearchReport| {
        r.findings.iter().map(|f| (f.relation().to_string(), f.certificate.status, f.independent)).collect::<Vec<_>>()
    };
    assert_eq!(show(&one), show(&two));

    let verified: Vec<Relation> = one.verified().map(|f| f.relation().clone()).collect();
    let kept = dedup(&verified);
    let mut span = RowSpan::default();
    for r in &kept {
        assert!(span.insert(&r.dense()));
    }
    for r in &verified {
        assert!(span.contains(&r.dense()));
    }
    assert_eq!(kept.len(), one.independent().count());
}

#[test]
fn dedup_keeps_independent_golden_nulls() {
    let rels: Vec<Relation> = golden_set().into_iter().filter(|r| r.family.b() == 60 && r.is_null()).collect();
    let gold = &rels[0].family;
    let extra = [
        Relation::new(gold, &[(1, 14), (-1, 26)], 0).unwrap(),
        Relation::new(gold, &[(1, 8), (-1, 28)], 0).unwrap(),
        Relation::new(gold, &[(2, 18), (-2, 24)], 0).unwrap(),
    ];
    let all: Vec<Relation> = rels.iter().cloned().chain(extra).collect();
    assert_eq!(dedup(&all).len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rearranged_difference_is_imaginary(c in prop::collection::vec(-3i64..4, 5)) {
        prop_assume!(c.iter().any(|&v| v != 0));
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 2, 2]), q(36, 100), q(37, 100), 12).unwrap();
        let terms: Vec<(i64, usize)> = c.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
        let rel = Relation::new(&fam, &terms, 0).unwrap();
        let (p, pc) = rearranged_products(&rel).unwrap();
        prop_assert!(p.sub(&pc).unwrap().embed(30).re.contains_zero());
    }
}
