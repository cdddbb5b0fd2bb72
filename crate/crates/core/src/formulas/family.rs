use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::bigreal::BigReal;
use crate::algebra::cyclotomic::lcm;
use crate::algebra::poly::Polynomial;
use crate::algebra::ring::{CompositeRing, RingElement};
use crate::algebra::roots::{count_roots, RealRoot};
use crate::algebra::surd::{classify_root, surd_conductor, QuadraticForm};
use crate::error::{Error, Result};

/// How the radius r of the circle is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RadiusSpec {
    Rational(BigRational),
    /// Real root of `q` inside `[lo, hi]`.
    MinPoly { q: Polynomial, lo: BigRational, hi: BigRational },
}

impl fmt::Display for RadiusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusSpec::Rational(r) => write!(f, "{r}"),
            RadiusSpec::MinPoly { q, lo, hi } => write!(f, "root of {q} in [{lo}, {hi}]"),
        }
    }
}

/// The pair (r, b) shared by the CTB terms of one search, with the exact
/// ring in which its points live.
#[derive(Debug)]
pub struct CtbFamily {
    spec: RadiusSpec,
    b: usize,
    ring: Arc<CompositeRing>,
    r: RingElement,
    closed_form: Option<QuadraticForm>,
}

impl CtbFamily {
    pub fn new(spec: RadiusSpec, b: usize) -> Result<Arc<Self>> {
        if b == 0 || b % 2 == 1 {
            return Err(Error::OddBlock(b));
        }
        let base_l = lcm(b as u64, 4);
        let (ring, r, closed_form) = match &spec {
            RadiusSpec::Rational(v) => {
                if !v.is_positive() || v >= &BigRational::one() {
                    return Err(Error::RadiusOutOfRange(v.to_string()));
                }
                let ring = CompositeRing::cyclotomic(base_l);
                let r = RingElement::from_rational(&ring, v.clone());
                (ring, r, Some(QuadraticForm::rational(v.clone())))
            }
            RadiusSpec::MinPoly { q, lo, hi } => {
                let root = RealRoot::isolate(q, lo, hi)?;
                check_unit_interval(&root)?;
                match classify_root(q, lo, hi) {
                    Some(form) => {
                        let c = surd_conductor(form.d).unwrap_or(1);
                        let ring = CompositeRing::cyclotomic(lcm(base_l, c));
                        let r = form.to_element(&ring)?;
                        (ring, r, Some(form))
                    }
                    None => {
                        let ring = CompositeRing::with_real_modulus(base_l, q, (lo, hi))?;
                        let r = RingElement::y(&ring)?;
                        (ring, r, None)
                    }
                }
            }
        };
        Ok(Arc::new(CtbFamily { spec, b, ring, r, closed_form }))
    }

    pub fn rational(r: BigRational, b: usize) -> Result<Arc<Self>> {
        Self::new(RadiusSpec::Rational(r), b)
    }

    pub fn minpoly(q: Polynomial, lo: BigRational, hi: BigRational, b: usize) -> Result<Arc<Self>> {
        Self::new(RadiusSpec::MinPoly { q, lo, hi }, b)
    }

    pub fn spec(&self) -> &RadiusSpec {
        &self.spec
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn ring(&self) -> &Arc<CompositeRing> {
        &self.ring
    }

    pub fn conductor(&self) -> u64 {
        self.ring.conductor()
    }

    /// r as an exact ring element.
    pub fn r(&self) -> &RingElement {
        &self.r
    }

    pub fn closed_form(&self) -> Option<&QuadraticForm> {
        self.closed_form.as_ref()
    }

    /// Same (r, b) up to the way r was written down.
    pub fn same_as(&self, other: &CtbFamily) -> bool {
        self.b == other.b && self.ring.as_ref() == other.ring.as_ref() && self.r == other.r
    }

    /// ζ_b^k inside the working ring.
    pub fn zeta_b(&self, k: i64) -> RingElement {
        let step = (self.conductor() / self.b as u64) as i64;
        RingElement::zeta_pow(&self.ring, k * step)
    }

    /// The imaginary unit ζ_L^{L/4}.
    pub fn imag_unit(&self) -> RingElement {
        RingElement::zeta_pow(&self.ring, (self.conductor() / 4) as i64)
    }

    /// Ball around r with radius about 2^-prec.
    pub fn r_ball(&self, prec: u32) -> BigReal {
        match (&self.closed_form, &self.spec) {
            (Some(form), _) => form.ball(prec),
            (None, RadiusSpec::MinPoly { .. }) => {
                self.ring.real_root().expect("composite ring carries its root").to_ball(prec)
            }
            (None, RadiusSpec::Rational(v)) => BigReal::from_rational(v, prec),
        }
    }

    pub fn check_index(&self, a: usize) -> Result<()> {
        if a > self.b {
            Err(Error::IndexOutOfRange { a, b: self.b })
        } else {
            Ok(())
        }
    }

    /// Indices a = 1 .. b/2 - 1 that carry nonzero CTB vectors up to sign.
    pub fn search_indices(&self) -> std::ops::Range<usize> {
        1..self.b / 2
    }
}

fn check_unit_interval(root: &RealRoot) -> Result<()> {
    let (lo, hi) = root.bounds();
    let zero = BigRational::zero();
    let one = BigRational::one();
    let poly = root.poly();
    let in_range = if let Some(x) = root.exact() {
        x > &zero && x < &one
    } else {
        // the root is the unique one in (lo, hi); it lies in (0, 1) iff it lies in (max(lo,0), min(hi,1))
        let a = if lo > &zero { lo.clone() } else { zero.clone() };
        let b = if hi < &one { hi.clone() } else { one.clone() };
        a < b && !poly.eval(&b).is_zero() && count_roots(poly, &a, &b) == 1
    };
    if in_range {
        Ok(())
    } else {
        Err(Error::RadiusOutOfRange(format!("root of {poly} in [{lo}, {hi}]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn conductor_choice() {
        let half = CtbFamily::rational(q(1, 2), 6).unwrap();
        assert_eq!(half.conductor(), 12);
        let sqrt2 = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(7, 10), q(71, 100), 24).unwrap();
        assert_eq!(sqrt2.conductor(), 24);
        assert!(sqrt2.ring().real_modulus().is_none());
        let golden = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 60).unwrap();
        assert_eq!(golden.conductor(), 60);
        let thirteen = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 3, 1]), q(3, 10), q(31, 100), 12).unwrap();
        assert!(thirteen.ring().real_modulus().is_some());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(CtbFamily::rational(q(1, 2), 7).unwrap_err(), Error::OddBlock(7));
        assert!(matches!(CtbFamily::rational(q(3, 2), 8), Err(Error::RadiusOutOfRange(_))));
        // root 1 + sqrt 2 of y^2 - 2y - 1 lies outside (0, 1)
        let p = Polynomial::from_ints(&[-1, -2, 1]);
        assert!(matches!(CtbFamily::minpoly(p, q(2, 1), q(3, 1), 8), Err(Error::RadiusOutOfRange(_))));
    }

    #[test]
    fn r_ball_matches_exact_element() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 2, 2]), q(36, 100), q(37, 100), 12).unwrap();
        let exact = fam.r().embed(30).re;
        let ball = fam.r_ball(120);
        assert!((&exact - &ball).contains_zero());
    }
}
