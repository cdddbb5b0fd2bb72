//! Ball arithmetic on fixed-point big integers.
//!
//! A [`BigReal`] is a midpoint `m` and a radius `r` (both integers) at a
//! binary precision `p`; it stands for every real in `[(m - r)/2^p, (m + r)/2^p]`.
//! Each operation rounds its midpoint and widens the radius by enough ulps
//! that the true result stays enclosed.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Internal guard bits added by the elementary functions.
const GUARD: u32 = 64;

fn pow2(s: u32) -> BigInt {
    BigInt::one() << s as usize
}

fn floor_shr(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    x.div_floor(&pow2(s))
}

/// ceil(x / 2^s) for x >= 0.
fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    let d = pow2(s);
    (x + &d - BigInt::one()).div_floor(&d)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    // a >= 0, b > 0
    (a + b - BigInt::one()).div_floor(b)
}

/// Series stop once the next term is below 2^-(wp - 32). Rounding keeps a
/// few ulps of radius on every term, so a cutoff at 2^-wp would never trigger;
/// callers carry `GUARD` extra bits to absorb the difference.
fn series_cutoff(wp: u32) -> BigRational {
    BigRational::new(BigInt::one(), pow2(wp.saturating_sub(32)))
}

/// Number of bits needed to write 10^digits, rounded up.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 1
}

/// Closed interval with dyadic endpoints, stored as midpoint and radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigReal {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal { mid: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Self {
        BigReal { mid: v.into() << prec as usize, rad: BigInt::zero(), prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let num = q.numer() << prec as usize;
        let (mid, rem) = num.div_mod_floor(q.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        BigReal { mid, rad, prec }
    }

    /// Ball enclosing the rational interval [lo, hi].
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Self {
        let scale = BigRational::from_integer(pow2(prec));
        let lo_s = (lo * &scale).floor().to_integer();
        let hi_s = (hi * &scale).ceil().to_integer();
        let sum = &lo_s + &hi_s;
        let mid = sum.div_floor(&BigInt::from(2));
        let rad = std::cmp::max(&hi_s - &mid, &mid - &lo_s);
        BigReal { mid, rad, prec }
    }

    pub fn from_parts(mid: BigInt, rad: BigInt, prec: u32) -> Self {
        assert!(!rad.is_negative());
        BigReal { mid, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid_raw(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad_raw(&self) -> &BigInt {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// The midpoint as an exact rational.
    pub fn center(&self) -> BigRational {
        BigRational::new(self.mid.clone(), pow2(self.prec))
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(self.rad.clone(), pow2(self.prec))
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, pow2(self.prec))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, pow2(self.prec))
    }

    /// Upper bound on |x| over the ball.
    pub fn abs_upper(&self) -> BigRational {
        BigRational::new(self.mid.abs() + &self.rad, pow2(self.prec))
    }

    /// Lower bound on |x| over the ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else {
            BigRational::new(self.mid.abs() - &self.rad, pow2(self.prec))
        }
    }

    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    /// True when the radius is at most 10^-digits.
    pub fn radius_within_digits(&self, digits: u32) -> bool {
        &self.rad * BigInt::from(10).pow(digits) <= pow2(self.prec)
    }

    pub fn midpoint(&self) -> Self {
        BigReal { mid: self.mid.clone(), rad: BigInt::zero(), prec: self.prec }
    }

    /// Re-expresses the ball at another precision, rounding outward.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                BigReal { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let mid = floor_shr(&self.mid, s);
                let exact = (&mid << s as usize) == self.mid;
                let mut rad = ceil_shr(&self.rad, s);
                if !exact {
                    rad += 1;
                }
                BigReal { mid, rad, prec }
            }
        }
    }

    /// Widens the radius by a nonnegative rational amount.
    pub fn widen(&self, amount: &BigRational) -> Self {
        let scaled = amount * BigRational::from_integer(pow2(self.prec));
        let extra = scaled.ceil().to_integer();
        BigReal { mid: self.mid.clone(), rad: &self.rad + extra, prec: self.prec }
    }

    fn align(&self, other: &Self) -> (BigReal, BigReal) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn abs(&self) -> Self {
        BigReal { mid: self.mid.abs(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        BigReal { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero());
        let ka = k.abs();
        let (mut mid, rem) = self.mid.div_mod_floor(&ka);
        let mut rad = ceil_div(&self.rad, &ka);
        if !rem.is_zero() {
            rad += 1;
        }
        if k.is_negative() {
            mid = -mid;
        }
        BigReal { mid, rad, prec: self.prec }
    }

    /// Multiplication by 2^k for k of either sign.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            BigReal { mid: &self.mid << k as usize, rad: &self.rad << k as usize, prec: self.prec }
        } else {
            let s = (-k) as u32;
            let scaled = BigReal { mid: self.mid.clone(), rad: self.rad.clone(), prec: self.prec + s };
            scaled.with_prec(self.prec)
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn div(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let p = a.prec;
        assert!(!b.contains_zero(), "division by a ball containing zero");
        let bm = b.mid.abs();
        let num = &a.mid << p as usize;
        let mut mid = num.div_floor(&b.mid);
        let exact = (&mid * &b.mid) == num;
        // |x/y - xm/ym| <= (ra*|ym| + |xm|*rb) / ((|ym| - rb) * |ym|), in ulps times 2^p.
        let err_num = (&a.rad * &bm + a.mid.abs() * &b.rad) << p as usize;
        let err_den = (&bm - &b.rad) * &bm;
        let mut rad = ceil_div(&err_num, &err_den);
        if !exact {
            rad += 1;
        }
        if mid.is_zero() && a.mid.is_zero() {
            mid = BigInt::zero();
        }
        BigReal { mid, rad, prec: p }
    }

    pub fn recip(&self) -> Self {
        BigReal::from_int(1, self.prec).div(self)
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BigReal::from_int(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Nearest integer to the midpoint, ties to even.
    pub fn round_mid_half_even(&self) -> BigInt {
        round_half_even(&self.center())
    }

    /// Rough f64 value of the midpoint (diagnostics only).
    pub fn to_f64(&self) -> f64 {
        let shift = self.mid.bits().saturating_sub(60);
        let top = floor_shr(&self.mid, shift as u32).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.prec as i32)
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = &self.mid * BigInt::from(10).pow(digits);
        let q = round_half_even(&BigRational::new(scaled, pow2(self.prec)));
        let neg = q.is_negative();
        let s = q.abs().to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Square root; the ball must lie strictly in the positive reals.
    pub fn sqrt(&self) -> Self {
        assert!(self.is_positive(), "sqrt of a ball touching zero");
        let p = self.prec;
        let s = (&self.mid << p as usize).sqrt();
        let exact = &s * &s == (&self.mid << p as usize);
        let low = ((&self.mid - &self.rad) << p as usize).sqrt();
        let mut rad = if self.rad.is_zero() {
            BigInt::zero()
        } else {
            ceil_div(&(&self.rad << p as usize), &(low * 2))
        };
        if !exact {
            rad += 1;
        }
        BigReal { mid: s, rad, prec: p }
    }

    /// π at the given precision (Machin's formula).
    pub fn pi(prec: u32) -> Self {
        let wp = prec + GUARD;
        let a = atan_small(&BigReal::from_rational(&BigRational::new(1.into(), 5.into()), wp));
        let b = atan_small(&BigReal::from_rational(&BigRational::new(1.into(), 239.into()), wp));
        let pi = &a.mul_int(&16.into()) - &b.mul_int(&4.into());
        pi.with_prec(prec)
    }

    /// ln 2 at the given precision.
    pub fn ln2(prec: u32) -> Self {
        let wp = prec + GUARD;
        let third = BigReal::from_rational(&BigRational::new(1.into(), 3.into()), wp);
        atanh_small(&third).mul_int(&2.into()).with_prec(prec)
    }

    pub fn atan(&self) -> Self {
        let p = self.prec;
        let m = self.midpoint().with_prec(p + GUARD);
        let r = atan_point(&m).with_prec(p);
        // |atan'| <= 1
        BigReal { rad: r.rad + &self.rad, ..r }
    }

    /// Natural logarithm; the ball must be strictly positive.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "ln of a ball touching zero");
        let p = self.prec;
        let wp = p + GUARD;
        // v = mid / 2^p = w * 2^k with w in [1, 2)
        let bl = self.mid.bits() as i64;
        let k = bl - 1 - p as i64;
        let mut w = BigReal { mid: self.mid.clone(), rad: BigInt::zero(), prec: (bl - 1) as u32 }.with_prec(wp);
        let mut k = k;
        // move w into [1/sqrt2, sqrt2): w^2 > 2  <=>  mid^2 > 2 * 4^wp
        if (&w.mid * &w.mid) > (pow2(2 * wp) << 1) {
            w = w.mul_pow2(-1);
            k += 1;
        }
        let one = BigReal::from_int(1, wp);
        let z = (&w - &one).div(&(&w + &one));
        let lnw = atanh_small(&z).mul_int(&2.into());
        let ln2 = BigReal::ln2(wp);
        let r = (&lnw + &ln2.mul_int(&k.into())).with_prec(p);
        // |ln'| <= 1 / lower
        if self.rad.is_zero() {
            r
        } else {
            let bound = self.radius() / self.lower();
            r.widen(&bound)
        }
    }

    /// (sin x, cos x)
    pub fn sin_cos(&self) -> (Self, Self) {
        let p = self.prec;
        let extra = (self.abs_upper().to_integer().bits() as u32) * 2;
        let wp = p + GUARD + extra;
        let x = self.midpoint().with_prec(wp);
        let mut sin = BigReal::zero(wp);
        let mut cos = BigReal::zero(wp);
        let mut term = BigReal::from_int(1, wp);
        let xa = x.abs_upper();
        let eps = series_cutoff(wp);
        let mut n: u32 = 0;
        loop {
            match n % 4 {
                0 => cos = &cos + &term,
                1 => sin = &sin + &term,
                2 => cos = &cos - &term,
                _ => sin = &sin - &term,
            }
            n += 1;
            term = (&term * &x).div_int(&n.into());
            let t_up = term.abs_upper();
            if BigRational::from_integer(n.into()) >= xa && t_up < eps {
                // Taylor remainder is bounded by the next term once n >= |x|.
                sin = sin.widen(&t_up);
                cos = cos.widen(&t_up);
                break;
            }
        }
        let (s, c) = (sin.with_prec(p), cos.with_prec(p));
        // Lipschitz constant 1.
        (BigReal { rad: s.rad + &self.rad, ..s }, BigReal { rad: c.rad + &self.rad, ..c })
    }
}

/// atan of a point ball (radius handled by the caller).
fn atan_point(m: &BigReal) -> BigReal {
    let wp = m.prec;
    let one = pow2(wp);
    if m.mid.abs() > one {
        let inv = m.recip();
        let half_pi = BigReal::pi(wp).mul_pow2(-1);
        let r = atan_point_small_range(&inv);
        if m.mid.is_positive() {
            &half_pi - &r
        } else {
            &(-&half_pi) - &r
        }
    } else {
        atan_point_small_range(m)
    }
}

/// atan for |t| <= 1 via eight angle halvings and the Taylor series.
fn atan_point_small_range(t: &BigReal) -> BigReal {
    const HALVINGS: i64 = 8;
    let wp = t.prec;
    let one = BigReal::from_int(1, wp);
    let mut t = t.clone();
    for _ in 0..HALVINGS {
        let root = (&one + &t.square()).sqrt();
        t = t.div(&(&one + &root));
    }
    atan_small(&t).mul_pow2(HALVINGS)
}

/// Taylor series of atan for |t| <= 1/2 with a rigorous tail bound.
fn atan_small(t: &BigReal) -> BigReal {
    let wp = t.prec;
    let t2 = t.square();
    let eps = series_cutoff(wp);
    let mut power = t.clone();
    let mut sum = BigReal::zero(wp);
    let mut k: u32 = 0;
    loop {
        let term = power.div_int(&(2 * k + 1).into());
        if k % 2 == 0 {
            sum = &sum + &term;
        } else {
            sum = &sum - &term;
        }
        power = &power * &t2;
        k += 1;
        let up = power.abs_upper();
        if up < eps {
            // sum_{j>=k} |t|^(2j+1) <= |t|^(2k+1) / (1 - t^2) <= (4/3) |t|^(2k+1)
            let tail = up * BigRational::new(4.into(), 3.into());
            return sum.widen(&tail);
        }
    }
}

/// atanh series for |z| <= 1/3.
fn atanh_small(z: &BigReal) -> BigReal {
    let wp = z.prec;
    let z2 = z.square();
    let eps = series_cutoff(wp);
    let mut power = z.clone();
    let mut sum = BigReal::zero(wp);
    let mut k: u32 = 0;
    loop {
        sum = &sum + &power.div_int(&(2 * k + 1).into());
        power = &power * &z2;
        k += 1;
        let up = power.abs_upper();
        if up < eps {
            // geometric tail with ratio z^2 <= 1/9
            let tail = up * BigRational::new(9.into(), 8.into());
            return sum.widen(&tail);
        }
    }
}

/// Round a rational to the nearest integer, ties to even.
pub fn round_half_even(q: &BigRational) -> BigInt {
    let fl = q.floor().to_integer();
    let frac = q - BigRational::from_integer(fl.clone());
    let half = BigRational::new(1.into(), 2.into());
    match frac.cmp(&half) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn add(self, other: &BigReal) -> BigReal {
        let (a, b) = self.align(other);
        BigReal { mid: a.mid + b.mid, rad: a.rad + b.rad, prec: a.prec }
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn sub(self, other: &BigReal) -> BigReal {
        let (a, b) = self.align(other);
        BigReal { mid: a.mid - b.mid, rad: a.rad + b.rad, prec: a.prec }
    }
}

impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn mul(self, other: &BigReal) -> BigReal {
        let (a, b) = self.align(other);
        let p = a.prec;
        let prod = &a.mid * &b.mid;
        let mid = floor_shr(&prod, p);
        let exact = (&mid << p as usize) == prod;
        let err = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let mut rad = ceil_shr(&err, p);
        if !exact {
            rad += 1;
        }
        BigReal { mid, rad, prec: p }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) / std::f64::consts::LOG2_10).floor() as u32;
        let digits = digits.min(f.precision().unwrap_or(30) as u32);
        write!(f, "{} +/- {:.3e}", self.to_decimal(digits), self.radius_f64())
    }
}

impl BigReal {
    fn radius_f64(&self) -> f64 {
        if self.rad.is_zero() {
            return 0.0;
        }
        let shift = self.rad.bits().saturating_sub(60);
        let top = floor_shr(&self.rad, shift as u32).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.prec as i32)
    }

    pub fn sign(&self) -> Option<Sign> {
        if self.is_positive() {
            Some(Sign::Plus)
        } else if self.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Complex ball as a pair of real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex { re: BigReal::zero(prec), im: BigReal::zero(prec) }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex { re, im: BigReal::zero(p) }
    }

    /// e^{2 pi i k / n}
    pub fn root_of_unity(k: i64, n: u64, prec: u32) -> Self {
        let wp = prec + 16;
        let angle = BigReal::pi(wp).mul_int(&(2 * k).into()).div_int(&n.into());
        let (s, c) = angle.sin_cos();
        BigComplex { re: c.with_prec(prec), im: s.with_prec(prec) }
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -&self.im }
    }

    pub fn add(&self, o: &Self) -> Self {
        BigComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigComplex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, k: &BigReal) -> Self {
        BigComplex { re: &self.re * k, im: &self.im * k }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn radius_within_digits(&self, digits: u32) -> bool {
        self.re.radius_within_digits(digits) && self.im.radius_within_digits(digits)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }
}
