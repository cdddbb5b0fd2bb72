//! Exact verification of candidate relations.
//!
//! A relation Σ u_i arg(c_i) = t·π with c_i = 1 + r ζ^{a_i} holds iff the
//! product Π c_i^{u_i} is real and its argument sums to t·π. Realness is
//! decided in exact arithmetic by comparing P = Π_{u>0} c^u Π_{u<0} c̄^{|u|}
//! with its conjugate; the integer t is then pinned down by interval
//! evaluation of the arguments.

use std::fmt;

use num_traits::Zero;

use crate::algebra::bigreal::BigReal;
use crate::algebra::ring::RingElement;
use crate::error::{Error, Result};
use crate::formulas::{arg_eval, CtbFamily, NamedConstant};
use crate::relation::{Relation, Status};

/// Precision used for the winding computation and for numeric fallbacks.
pub const DEFAULT_DIGITS: u32 = 30;
/// Number of precision doublings before a numeric test gives up.
pub const ESCALATION_CAP: u32 = 4;

/// The point c = 1 + r ζ_b^a and its conjugate.
#[derive(Clone, Debug)]
pub struct VerificationPoint {
    pub a: usize,
    pub c: RingElement,
    pub c_conj: RingElement,
}

pub fn build_point(family: &CtbFamily, a: usize) -> Result<VerificationPoint> {
    family.check_index(a)?;
    let one = RingElement::one(family.ring());
    let c = one.add(&family.r().mul(&family.zeta_b(a as i64))?)?;
    let c_conj = c.conjugate();
    Ok(VerificationPoint { a, c, c_conj })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realness {
    /// P - conj(P) is exactly zero.
    ProvenExact,
    /// P - conj(P) is a nonzero element of a ring proven to be a field.
    FailedExact,
    /// The embedding of P - conj(P) is certified nonzero.
    FailedNumericSeparation,
    /// Unproven-field ring and the embedding could not be separated from zero.
    Inconclusive,
}

impl Realness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Realness::ProvenExact => "proven-exact",
            Realness::FailedExact => "failed-exact",
            Realness::FailedNumericSeparation => "failed-numeric-separation",
            Realness::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductSign {
    Positive,
    Negative,
    ZeroExact,
}

/// Exact verification artifact.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub relation: Relation,
    /// P = Π_{u>0} c^u Π_{u<0} c̄^{|u|}
    pub lhs: RingElement,
    /// conj(P)
    pub rhs: RingElement,
    pub realness: Realness,
    pub winding: Option<i64>,
    /// Enclosure of Σ u·arg(c) - t·π at `digits`.
    pub residual: Option<BigReal>,
    pub sign: Option<ProductSign>,
    pub digits: u32,
    pub conductor: u64,
    pub real_modulus: Option<String>,
    pub proven_field: bool,
    pub status: Status,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}; realness {}", self.relation, self.status.as_str(), self.realness.as_str())?;
        if let Some(t) = self.winding {
            write!(f, "; winding {t}")?;
        }
        write!(f, "; L = {}", self.conductor)?;
        if let Some(q) = &self.real_modulus {
            write!(f, ", q = {q}")?;
        }
        write!(f, "]")
    }
}

/// The conjugation-invariance pair (P, conj P) using only nonnegative powers.
pub fn rearranged_products(rel: &Relation) -> Result<(RingElement, RingElement)> {
    let fam = &rel.family;
    let mut p = RingElement::one(fam.ring());
    for &(u, a) in &rel.terms {
        let pt = build_point(fam, a)?;
        let factor = if u > 0 { pt.c.pow(u as u64) } else { pt.c_conj.pow(u.unsigned_abs()) };
        p = p.mul(&factor)?;
    }
    let q = p.conjugate();
    Ok((p, q))
}

/// Σ u_i arg(c_i) as an interval with radius at most about 10^-digits.
pub fn angle_sum(rel: &Relation, digits: u32) -> BigReal {
    let weight: u64 = rel.terms.iter().map(|t| t.0.unsigned_abs()).sum();
    let extra = (weight.max(1) as f64).log10().ceil() as u32 + 2;
    let mut s = BigReal::zero(64);
    for &(u, a) in &rel.terms {
        let x = arg_eval(&rel.family, a, digits + extra);
        s = &s + &x.mul_int(&u.into());
    }
    s
}

/// t = round(S/π) once the interval S/π has radius below 1/4.
pub fn determine_winding(rel: &Relation, digits: u32) -> Option<i64> {
    let quarter = num_rational::BigRational::new(1.into(), 4.into());
    let mut d = digits;
    for _ in 0..=ESCALATION_CAP {
        let s = angle_sum(rel, d);
        let pi = NamedConstant::Pi.eval(d + 4);
        let ratio = s.div(&pi);
        if ratio.radius() < quarter {
            let t = ratio.round_mid_half_even();
            return i64::try_from(t).ok();
        }
        d *= 2;
    }
    None
}

/// Sign of a conjugation-invariant element by interval evaluation.
pub fn certify_sign(e: &RingElement, digits: u32) -> Result<ProductSign> {
    if e.is_zero() {
        return Ok(ProductSign::ZeroExact);
    }
    let mut d = digits;
    for _ in 0..=ESCALATION_CAP {
        let z = e.embed(d).re;
        if z.is_positive() {
            return Ok(ProductSign::Positive);
        }
        if z.is_negative() {
            return Ok(ProductSign::Negative);
        }
        d *= 2;
    }
    Err(Error::InconclusiveSign)
}

fn numeric_separation(diff: &RingElement, digits: u32) -> bool {
    let mut d = digits;
    for _ in 0..=ESCALATION_CAP {
        let z = diff.embed(d);
        if !z.contains_zero() {
            return true;
        }
        d *= 2;
    }
    false
}

/// Decides a relation exactly where possible.
pub fn verify_exact(rel: &Relation) -> Result<Certificate> {
    verify_with_digits(rel, DEFAULT_DIGITS)
}

pub fn verify_with_digits(rel: &Relation, digits: u32) -> Result<Certificate> {
    let ring = rel.family.ring().clone();
    let (lhs, rhs) = rearranged_products(rel)?;
    let diff = lhs.sub(&rhs)?;
    let realness = if diff.is_zero() {
        Realness::ProvenExact
    } else if ring.is_proven_field() {
        Realness::FailedExact
    } else if numeric_separation(&diff, digits) {
        Realness::FailedNumericSeparation
    } else {
        Realness::Inconclusive
    };
    let mut cert = Certificate {
        relation: rel.clone(),
        lhs,
        rhs,
        realness,
        winding: None,
        residual: None,
        sign: None,
        digits,
        conductor: ring.conductor(),
        real_modulus: ring.real_modulus().map(|q| q.to_string()),
        proven_field: ring.is_proven_field(),
        status: Status::Candidate,
    };
    cert.status = match realness {
        Realness::FailedExact | Realness::FailedNumericSeparation => Status::Refuted,
        Realness::Inconclusive => Status::Unverified,
        Realness::ProvenExact => match determine_winding(rel, digits) {
            None => Status::Unverified,
            Some(t) => {
                cert.winding = Some(t);
                let s = angle_sum(rel, digits);
                let pi = NamedConstant::Pi.eval(digits + 4);
                cert.residual = Some(&s - &pi.mul_int(&t.into()));
                cert.sign = certify_sign(&cert.lhs, digits).ok();
                if t == rel.target {
                    Status::Verified
                } else {
                    Status::Refuted
                }
            }
        },
    };
    cert.relation.status = cert.status;
    Ok(cert)
}

/// Re-evaluates |Σ u·arg(c) - t·π| at the given precision; returns an upper bound.
pub fn residual_at(rel: &Relation, t: i64, digits: u32) -> num_rational::BigRational {
    let s = angle_sum(rel, digits);
    let pi = NamedConstant::Pi.eval(digits + 4);
    (&s - &pi.mul_int(&t.into())).abs_upper()
}

/// The expected sign of the real product P given the winding t: (-1)^t.
pub fn expected_sign(t: i64) -> ProductSign {
    if t.rem_euclid(2) == 0 {
        ProductSign::Positive
    } else {
        ProductSign::Negative
    }
}

/// True when every coefficient of the element vanishes or is rational and nonzero.
pub fn is_rational_nonzero(e: &RingElement) -> bool {
    e.as_rational().is_some_and(|q| !q.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Polynomial;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lafont_family() -> Arc<CtbFamily> {
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(7, 10), q(71, 100), 24).unwrap()
    }

    #[test]
    fn point_embedding() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(7, 10), q(71, 100), 8).unwrap();
        let p = build_point(&fam, 3).unwrap();
        let z = p.c.embed(20);
        assert_eq!(z.re.to_decimal(10), "0.5000000000");
        assert_eq!(z.im.to_decimal(10), "0.5000000000");
        let psi = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 2, 2]), q(36, 100), q(37, 100), 12).unwrap();
        let z = build_point(&psi, 2).unwrap().c.embed(20);
        assert_eq!(z.re.to_decimal(5), "1.18301");
        assert_eq!(z.im.to_decimal(5), "0.31699");
    }

    #[test]
    fn lafont_null_is_exact() {
        let fam = lafont_family();
        let rel = Relation::new(&fam, &[(1, 5), (-1, 11)], 0).unwrap();
        let cert = verify_exact(&rel).unwrap();
        assert_eq!(cert.realness, Realness::ProvenExact);
        assert_eq!(cert.winding, Some(0));
        assert_eq!(cert.status, Status::Verified);
        assert_eq!(cert.sign, Some(ProductSign::Positive));
    }

    #[test]
    fn sqrt3_pi_relation() {
        let fam = lafont_family();
        let rel = Relation::new(&fam, &[(3, 5), (3, 11)], 1).unwrap();
        let cert = verify_exact(&rel).unwrap();
        assert_eq!(cert.winding, Some(1));
        assert_eq!(cert.status, Status::Verified);
        assert_eq!(cert.sign, Some(expected_sign(1)));
        let wrong = Relation::new(&fam, &[(3, 5), (3, 11)], 2).unwrap();
        assert_eq!(verify_exact(&wrong).unwrap().status, Status::Refuted);
    }

    #[test]
    fn perturbed_relation_refuted() {
        let fam = lafont_family();
        let rel = Relation::new(&fam, &[(1, 5), (-1, 10)], 0).unwrap();
        let cert = verify_exact(&rel).unwrap();
        assert_eq!(cert.realness, Realness::FailedExact);
        assert_eq!(cert.status, Status::Refuted);
    }

    #[test]
    fn signs_of_constants() {
        let ring = lafont_family().ring().clone();
        assert_eq!(certify_sign(&RingElement::from_int(&ring, -1), 10).unwrap(), ProductSign::Negative);
        assert_eq!(certify_sign(&RingElement::zero(&ring), 10).unwrap(), ProductSign::ZeroExact);
    }

    #[test]
    fn rearranged_difference_is_imaginary() {
        let fam = lafont_family();
        let rel = Relation::new(&fam, &[(2, 3), (-1, 7), (1, 8)], 0).unwrap();
        let (p, c) = rearranged_products(&rel).unwrap();
        let z = p.sub(&c).unwrap().embed(30);
        assert!(z.re.contains_zero());
        assert!(!z.im.contains_zero());
    }

    #[test]
    fn unproven_ring_numeric_fallback() {
        // y^2 + 3y - 1 has root (sqrt 13 - 3)/2, outside the cyclotomic fast path
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 3, 1]), q(3, 10), q(31, 100), 12).unwrap();
        assert!(!fam.ring().is_proven_field());
        let rel = Relation::new(&fam, &[(1, 1), (-1, 2)], 0).unwrap();
        let cert = verify_exact(&rel).unwrap();
        assert_eq!(cert.realness, Realness::FailedNumericSeparation);
        assert_eq!(cert.status, Status::Refuted);
        assert!(is_rational_nonzero(&RingElement::one(fam.ring())));
    }
}
