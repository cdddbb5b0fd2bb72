use num_rational::BigRational;

use super::family::CtbFamily;
use crate::algebra::bigreal::{bits_for_digits, BigReal};
use crate::algebra::ring::RingElement;
use crate::error::Result;

/// Exact coefficient vector (a_1, ..., a_b).
pub type CoeffVector = Vec<RingElement>;

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// a_j = r^j (-1)^{j+1} sin(j θ) with θ = 2π a / b, for j = 1..b.
pub fn ctb(family: &CtbFamily, a: usize) -> Result<CoeffVector> {
    family.check_index(a)?;
    // sin(jθ) = -i (ζ^{ja} - ζ^{-ja}) / 2
    let minus_i_half = family.imag_unit().neg().scale(&half());
    trig_vector(family, |j| {
        let diff = family.zeta_b(j * a as i64).sub(&family.zeta_b(-j * (a as i64)))?;
        diff.mul(&minus_i_half)
    })
}

/// Real-part analogue: a_j = r^j (-1)^{j+1} cos(j θ).
pub fn ctb_log(family: &CtbFamily, a: usize) -> Result<CoeffVector> {
    family.check_index(a)?;
    trig_vector(family, |j| {
        Ok(family.zeta_b(j * a as i64).add(&family.zeta_b(-j * (a as i64)))?.scale(&half()))
    })
}

fn trig_vector(family: &CtbFamily, trig: impl Fn(i64) -> Result<RingElement>) -> Result<CoeffVector> {
    let mut out = Vec::with_capacity(family.b());
    let mut rpow = family.r().clone();
    for j in 1..=family.b() as i64 {
        let t = trig(j)?;
        let signed = if j % 2 == 1 { t } else { t.neg() };
        out.push(rpow.mul(&signed)?);
        rpow = rpow.mul(family.r())?;
    }
    Ok(out)
}

/// Real and imaginary parts of 1 + r e^{iθ} at precision `prec`.
fn point_ball(family: &CtbFamily, a: usize, prec: u32) -> (BigReal, BigReal, BigReal) {
    let r = family.r_ball(prec);
    let theta = BigReal::pi(prec).mul_int(&(2 * a as i64).into()).div_int(&(family.b() as i64).into());
    let (s, c) = theta.sin_cos();
    let x = &BigReal::from_int(1, prec) + &(&r * &c);
    let y = &r * &s;
    (x, y, r)
}

fn escalate(digits: u32, f: impl Fn(u32) -> BigReal) -> BigReal {
    let mut prec = bits_for_digits(digits) + 32;
    loop {
        let v = f(prec);
        if v.radius_within_digits(digits) {
            return v;
        }
        prec *= 2;
    }
}

/// arg(1 + r e^{iθ}) with radius at most 10^-digits.
pub fn arg_eval(family: &CtbFamily, a: usize, digits: u32) -> BigReal {
    escalate(digits, |prec| {
        let (x, y, _) = point_ball(family, a, prec);
        // x >= 1 - r > 0, so the argument is atan(y / x)
        y.div(&x).atan()
    })
}

/// log |1 + r e^{iθ}| = log(1 + r^2 + 2 r cos θ) / 2 with radius at most 10^-digits.
pub fn logabs_eval(family: &CtbFamily, a: usize, digits: u32) -> BigReal {
    escalate(digits, |prec| {
        let (x, y, _) = point_ball(family, a, prec);
        (&x.square() + &y.square()).ln().mul_pow2(-1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Polynomial;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn inv_sqrt2(b: usize) -> std::sync::Arc<CtbFamily> {
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 2]), q(7, 10), q(71, 100), b).unwrap()
    }

    #[test]
    fn golden_vector_b8_a3() {
        let fam = inv_sqrt2(8);
        let v = ctb(&fam, 3).unwrap();
        let expected = [q(1, 2), q(1, 2), q(1, 4), q(0, 1), q(-1, 8), q(-1, 8), q(-1, 16), q(0, 1)];
        let got: Vec<BigRational> = v.iter().map(|e| e.as_rational().unwrap()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn symmetric_indices_vanish() {
        let fam = inv_sqrt2(24);
        assert!(ctb(&fam, 0).unwrap().iter().all(RingElement::is_zero));
        assert!(ctb(&fam, 12).unwrap().iter().all(RingElement::is_zero));
        let a = ctb(&fam, 5).unwrap();
        let b = ctb(&fam, 19).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.add(y).unwrap().is_zero());
        }
        assert!(ctb(&fam, 25).is_err());
    }

    #[test]
    fn entries_are_real() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 10).unwrap();
        for a in 0..=10 {
            for e in ctb(&fam, a).unwrap().iter().chain(ctb_log(&fam, a).unwrap().iter()) {
                assert!(e.is_conjugate_fixed());
            }
        }
    }

    #[test]
    fn closed_forms() {
        let fam = inv_sqrt2(8);
        let x = arg_eval(&fam, 3, 30);
        let quarter_pi = BigReal::pi(200).mul_pow2(-2);
        assert!((&x - &quarter_pi).contains_zero());
        let l = logabs_eval(&fam, 3, 30);
        let half_ln2 = BigReal::ln2(200).mul_pow2(-1);
        assert!((&l + &half_ln2).contains_zero());
        let fam3 = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, 3]), q(57, 100), q(58, 100), 12).unwrap();
        assert_eq!(ctb(&fam3, 3).unwrap()[0], fam3.r().clone());
        assert_eq!(logabs_eval(&fam3, 3, 20).to_decimal(8), "0.14384104");
    }

    #[test]
    fn psi_reciprocal_gives_twelfth_of_pi() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 2, 2]), q(36, 100), q(37, 100), 12).unwrap();
        let x = arg_eval(&fam, 2, 30);
        let p12 = BigReal::pi(200).div_int(&12.into());
        assert!((&x - &p12).contains_zero());
        assert!((&x + &arg_eval(&fam, 10, 30)).contains_zero());
    }
}
