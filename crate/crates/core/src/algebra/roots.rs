//! Real root isolation by Sturm sequences and exact bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bigreal::BigReal;
use super::poly::Polynomial;
use crate::error::{Error, Result};

fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&-BigRational::one()));
    }
    seq
}

fn sign_changes(seq: &[Polynomial], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots of a squarefree `p` in the half-open interval (lo, hi].
pub fn count_roots(p: &Polynomial, lo: &BigRational, hi: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    sign_changes(&seq, lo) - sign_changes(&seq, hi)
}

/// A real root of a squarefree polynomial together with an isolating interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    poly: Polynomial,
    lo: BigRational,
    hi: BigRational,
}

impl RealRoot {
    /// Isolates the unique root of `poly` in [lo, hi].
    pub fn isolate(poly: &Polynomial, lo: &BigRational, hi: &BigRational) -> Result<Self> {
        if !poly.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        if lo >= hi {
            return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
        }
        let at_lo = poly.eval(lo).is_zero();
        let count = count_roots(poly, lo, hi) + usize::from(at_lo);
        if count != 1 {
            return Err(Error::RootIsolation { lo: lo.to_string(), hi: hi.to_string(), count });
        }
        if at_lo {
            return Ok(RealRoot { poly: poly.clone(), lo: lo.clone(), hi: lo.clone() });
        }
        if poly.eval(hi).is_zero() {
            return Ok(RealRoot { poly: poly.clone(), lo: hi.clone(), hi: hi.clone() });
        }
        Ok(RealRoot { poly: poly.clone(), lo: lo.clone(), hi: hi.clone() })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn bounds(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval.
    pub fn refine(&self) -> Self {
        if self.lo == self.hi {
            return self.clone();
        }
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        let fm = self.poly.eval(&mid);
        if fm.is_zero() {
            return RealRoot { poly: self.poly.clone(), lo: mid.clone(), hi: mid };
        }
        let flo = self.poly.eval(&self.lo);
        if flo.is_positive() == fm.is_positive() {
            RealRoot { poly: self.poly.clone(), lo: mid, hi: self.hi.clone() }
        } else {
            RealRoot { poly: self.poly.clone(), lo: self.lo.clone(), hi: mid }
        }
    }

    /// Ball containing the root with radius at most about 2^-prec.
    pub fn to_ball(&self, prec: u32) -> BigReal {
        let target = BigRational::new(BigInt::one(), BigInt::one() << prec as usize);
        let mut r = self.clone();
        while r.width() > target {
            r = r.refine();
        }
        BigReal::from_bounds(&r.lo, &r.hi, prec)
    }

    /// The root if it is rational and already pinned exactly.
    pub fn exact(&self) -> Option<&BigRational> {
        (self.lo == self.hi).then_some(&self.lo)
    }
}
