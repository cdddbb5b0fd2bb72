//! Quadratic surds inside cyclotomic fields.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::bigreal::BigReal;
use super::poly::Polynomial;
use super::ring::{CompositeRing, RingElement};
use crate::error::{Error, Result};

/// Smallest conductor whose cyclotomic field contains sqrt(d), for d in {1, 2, 3, 5}.
pub fn surd_conductor(d: i64) -> Option<u64> {
    match d {
        1 => Some(1),
        2 => Some(8),
        3 => Some(12),
        5 => Some(5),
        _ => None,
    }
}

/// Positive square root of d in Q(ζ_L) for d in {2, 3, 5}.
pub fn sqrt_in_cyclotomic(ring: &Arc<CompositeRing>, d: i64) -> Result<RingElement> {
    let l = ring.conductor();
    let unsupported = Error::UnsupportedSurd { d, conductor: l };
    let c = surd_conductor(d).filter(|&c| c > 1).ok_or(unsupported.clone())?;
    if l % c != 0 {
        return Err(unsupported);
    }
    let k = (l / c) as i64;
    let two_cos = RingElement::zeta_pow(ring, k).add(&RingElement::zeta_pow(ring, -k))?;
    Ok(match d {
        // 2 cos(π/4), 2 cos(π/6)
        2 | 3 => two_cos,
        // 2 * 2 cos(2π/5) + 1
        _ => two_cos.scale(&BigRational::from_integer(2.into())).add(&RingElement::one(ring))?,
    })
}

/// Exact closed form a + b*sqrt(d) of a real algebraic number of degree <= 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: BigRational,
    pub b: BigRational,
    /// Squarefree radicand; 1 means the value is rational.
    pub d: i64,
}

impl QuadraticForm {
    pub fn rational(v: BigRational) -> Self {
        QuadraticForm { a: v, b: BigRational::zero(), d: 1 }
    }

    pub fn is_rational(&self) -> bool {
        self.d == 1 || self.b.is_zero()
    }

    pub fn ball(&self, prec: u32) -> BigReal {
        let a = BigReal::from_rational(&self.a, prec + 8);
        if self.is_rational() {
            return a.with_prec(prec);
        }
        let s = BigReal::from_int(self.d, prec + 8).sqrt();
        (&a + &(&BigReal::from_rational(&self.b, prec + 8) * &s)).with_prec(prec)
    }

    /// The value as an element of a cyclotomic ring that contains sqrt(d).
    pub fn to_element(&self, ring: &Arc<CompositeRing>) -> Result<RingElement> {
        let a = RingElement::from_rational(ring, self.a.clone());
        if self.is_rational() {
            return Ok(a);
        }
        a.add(&sqrt_in_cyclotomic(ring, self.d)?.scale(&self.b))
    }
}

/// Splits n > 0 as k^2 * s with s squarefree, when trial division finishes.
pub fn squarefree_decompose(n: &BigInt) -> Option<(BigInt, BigInt)> {
    const TRIAL_LIMIT: u64 = 1_000_000;
    assert!(n.is_positive());
    let mut rest = n.clone();
    let mut k = BigInt::one();
    let mut s = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT && BigInt::from(p) * BigInt::from(p) <= rest {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= &bp;
        }
        if e % 2 == 1 {
            s *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((k, s));
    }
    if BigInt::from(p) * BigInt::from(p) > rest {
        // rest is prime
        return Some((k, s * rest));
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        // leftover square of a large prime is the only case we still resolve
        return Some((k * r, s));
    }
    None
}

/// Closed form of the root of `q` (degree 1 or 2) inside [lo, hi] when it is
/// rational or lies in Q(sqrt d) for d in {2, 3, 5}.
pub fn classify_root(q: &Polynomial, lo: &BigRational, hi: &BigRational) -> Option<QuadraticForm> {
    match q.degree() {
        1 => Some(QuadraticForm::rational(-q.coeff(0) / q.coeff(1))),
        2 => {
            let (c, b, a) = (q.coeff(0), q.coeff(1), q.coeff(2));
            let disc = &b * &b - BigRational::from_integer(4.into()) * &a * &c;
            if !disc.is_positive() {
                return None;
            }
            // disc = n/m = (n*m)/m^2
            let nm = disc.numer() * disc.denom();
            let (k, s) = squarefree_decompose(&nm)?;
            let s = s.to_i64()?;
            if s != 1 && surd_conductor(s).is_none() {
                return None;
            }
            let two_a = BigRational::from_integer(2.into()) * &a;
            let center = -&b / &two_a;
            let spread = BigRational::new(k, disc.denom().clone()) / &two_a;
            let candidates = if s == 1 {
                [
                    QuadraticForm::rational(&center + &spread),
                    QuadraticForm::rational(&center - &spread),
                ]
            } else {
                [
                    QuadraticForm { a: center.clone(), b: spread.clone(), d: s },
                    QuadraticForm { a: center, b: -spread, d: s },
                ]
            };
            let mut prec = 64;
            loop {
                for f in &candidates {
                    if f.is_rational() {
                        if &f.a >= lo && &f.a <= hi {
                            return Some(f.clone());
                        }
                        continue;
                    }
                    let v = f.ball(prec);
                    if v.lower() >= *lo && v.upper() <= *hi {
                        return Some(f.clone());
                    }
                }
                if candidates.iter().all(QuadraticForm::is_rational) || prec > 4096 {
                    return None;
                }
                prec *= 2;
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn supported_surds_square_to_d() {
        for (d, l) in [(2, 8), (3, 12), (5, 5), (5, 60), (2, 24)] {
            let ring = CompositeRing::cyclotomic(l);
            let s = sqrt_in_cyclotomic(&ring, d).unwrap();
            assert!(s.pow(2).sub(&RingElement::from_int(&ring, d)).unwrap().is_zero());
            assert!(s.embed(20).re.is_positive());
        }
    }

    #[test]
    fn embeddings_of_surds() {
        let ring = CompositeRing::cyclotomic(5);
        let s = sqrt_in_cyclotomic(&ring, 5).unwrap();
        assert_eq!(s.embed(12).re.to_decimal(12), "2.236067977500");
    }

    #[test]
    fn unsupported_conductor() {
        let ring = CompositeRing::cyclotomic(12);
        assert_eq!(sqrt_in_cyclotomic(&ring, 2), Err(Error::UnsupportedSurd { d: 2, conductor: 12 }));
        assert!(sqrt_in_cyclotomic(&ring, 7).is_err());
    }

    #[test]
    fn classify_golden_and_psi() {
        let golden = Polynomial::from_ints(&[-1, 1, 1]);
        let f = classify_root(&golden, &q(61, 100), &q(62, 100)).unwrap();
        assert_eq!(f, QuadraticForm { a: q(-1, 2), b: q(1, 2), d: 5 });
        let psi = Polynomial::from_ints(&[-1, 2, 2]);
        let f = classify_root(&psi, &q(36, 100), &q(37, 100)).unwrap();
        assert_eq!(f, QuadraticForm { a: q(-1, 2), b: q(1, 2), d: 3 });
        let thirteen = Polynomial::from_ints(&[-1, 3, 1]);
        assert_eq!(classify_root(&thirteen, &q(3, 10), &q(31, 100)), None);
        let rat = Polynomial::from_ints(&[1, -6, 8]);
        assert_eq!(classify_root(&rat, &q(1, 5), &q(3, 10)), Some(QuadraticForm::rational(q(1, 4))));
    }

    #[test]
    fn squarefree_parts() {
        let (k, s) = squarefree_decompose(&BigInt::from(72)).unwrap();
        assert_eq!((k, s), (BigInt::from(6), BigInt::from(2)));
        let (k, s) = squarefree_decompose(&BigInt::from(13)).unwrap();
        assert_eq!((k, s), (BigInt::one(), BigInt::from(13)));
    }
}
