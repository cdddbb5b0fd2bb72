//! BBP formulas, CTB vectors and the manipulations between them.

mod ctb;
mod family;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use ctb::{arg_eval, ctb, ctb_log, logabs_eval, CoeffVector};
pub use family::{CtbFamily, RadiusSpec};

use crate::algebra::bigreal::{bits_for_digits, BigReal};
use crate::algebra::ring::{CompositeRing, RingElement};
use crate::algebra::surd::squarefree_decompose;
use crate::error::{Error, Result};

/// One point C = 1 + r e^{2πia/b} on the circle of a [`CtbFamily`].
#[derive(Clone, Debug)]
pub struct CtbTerm {
    pub family: Arc<CtbFamily>,
    pub a: usize,
}

impl CtbTerm {
    pub fn new(family: &Arc<CtbFamily>, a: usize) -> Result<Self> {
        family.check_index(a)?;
        Ok(CtbTerm { family: family.clone(), a })
    }

    pub fn vector(&self) -> Result<CoeffVector> {
        ctb(&self.family, self.a)
    }

    pub fn log_vector(&self) -> Result<CoeffVector> {
        ctb_log(&self.family, self.a)
    }

    pub fn arg(&self, digits: u32) -> BigReal {
        arg_eval(&self.family, self.a, digits)
    }

    pub fn logabs(&self, digits: u32) -> BigReal {
        logabs_eval(&self.family, self.a, digits)
    }
}

/// Constants that may appear on the right-hand side of a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedConstant {
    Pi,
}

impl NamedConstant {
    pub fn name(&self) -> &'static str {
        match self {
            NamedConstant::Pi => "pi",
        }
    }

    pub fn eval(&self, digits: u32) -> BigReal {
        match self {
            NamedConstant::Pi => BigReal::pi(bits_for_digits(digits) + 8),
        }
    }
}

impl std::str::FromStr for NamedConstant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pi" | "π" => Ok(NamedConstant::Pi),
            other => Err(Error::Invalid(format!("unknown constant `{other}`"))),
        }
    }
}

/// value = scalar * Σ_{k>=0} base^{-k} Σ_{j=1}^{n} a_j / (k n + j)^d
#[derive(Clone, Debug, PartialEq)]
pub struct BbpFormula {
    pub degree: u32,
    pub base: RingElement,
    pub block: usize,
    pub coeffs: CoeffVector,
    pub scalar: RingElement,
}

impl BbpFormula {
    pub fn new(degree: u32, base: RingElement, coeffs: CoeffVector) -> Self {
        let scalar = RingElement::one(base.ring());
        BbpFormula { degree, block: coeffs.len(), base, coeffs, scalar }
    }

    /// A formula with integer base and rational coefficients in Q itself.
    pub fn rational(degree: u32, base: i64, coeffs: &[BigRational]) -> Self {
        let ring = CompositeRing::cyclotomic(1);
        let coeffs = coeffs.iter().map(|c| RingElement::from_rational(&ring, c.clone())).collect();
        Self::new(degree, RingElement::from_int(&ring, base), coeffs)
    }

    pub fn ring(&self) -> &Arc<CompositeRing> {
        self.base.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RingElement::is_zero)
    }

    /// Coefficients as rationals when they all are.
    pub fn rational_coeffs(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(RingElement::as_rational).collect()
    }

    /// Series value with radius at most 10^-digits.
    pub fn eval_series(&self, digits: u32) -> Result<BigReal> {
        eval_series(self, digits)
    }
}

fn ceil_log2(x: u64) -> u32 {
    64 - x.saturating_sub(1).leading_zeros()
}

pub fn eval_series(f: &BbpFormula, digits: u32) -> Result<BigReal> {
    let base10 = f.base.embed(12).re;
    if base10.abs_lower() <= BigRational::one() {
        return Err(Error::DivergentBase);
    }
    if f.is_zero() {
        return Ok(BigReal::zero(bits_for_digits(digits)));
    }
    // coefficient mass from 10-digit embeddings rounded up
    let scalar10 = f.scalar.embed(10).re.abs_upper();
    let mass: BigRational = f.coeffs.iter().map(|a| a.embed(10).re.abs_upper()).sum::<BigRational>() * &scalar10;
    let beta = base10.abs_lower();
    // smallest K with mass * beta^-(K+1) / (1 - 1/beta) <= 10^-digits / 2
    let ratio = BigRational::one() - beta.recip();
    let goal = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits) * 2);
    let beta_f = beta.to_f64().unwrap_or(f64::MAX).min(1e300);
    let guess = ((mass.to_f64().unwrap_or(1.0).max(1e-300) / (goal.to_f64().unwrap_or(0.0).max(1e-300) * ratio.to_f64().unwrap_or(1.0)))
        .log2()
        / beta_f.log2())
    .ceil()
    .max(0.0) as u64;
    let kmax = guess + 1;
    let mut prec = bits_for_digits(digits) + 32 + ceil_log2((kmax + 1) * f.block as u64);
    loop {
        let v = eval_series_at(f, kmax, prec)?;
        let tail = tail_bound(f, &mass, kmax, prec);
        let v = v.widen(&tail);
        if v.radius_within_digits(digits) {
            return Ok(v);
        }
        prec *= 2;
    }
}

/// mass * |B|^-(K+1) / (1 - |B|^-1), rigorously rounded up.
fn tail_bound(f: &BbpFormula, mass: &BigRational, kmax: u64, prec: u32) -> BigRational {
    let b = f.base.embed_prec(prec).re.abs();
    let lower = BigReal::from_rational(&b.abs_lower(), prec);
    let inv = lower.recip();
    let one = BigReal::from_int(1, prec);
    let t = &(&BigReal::from_rational(mass, prec) * &inv.pow((kmax + 1) as u32)).div(&(&one - &inv));
    t.abs_upper()
}

fn eval_series_at(f: &BbpFormula, kmax: u64, prec: u32) -> Result<BigReal> {
    let coeffs: Vec<Option<BigReal>> = f
        .coeffs
        .iter()
        .map(|a| (!a.is_zero()).then(|| a.embed_prec(prec).re))
        .collect();
    let inv = f.base.embed_prec(prec).re.recip();
    let mut scale = BigReal::from_int(1, prec);
    let mut total = BigReal::zero(prec);
    let n = f.block as u64;
    for k in 0..=kmax {
        let mut inner = BigReal::zero(prec);
        for (j, a) in coeffs.iter().enumerate() {
            if let Some(a) = a {
                let den = BigInt::from(k * n + j as u64 + 1).pow(f.degree);
                inner = &inner + &a.div_int(&den);
            }
        }
        total = &total + &(&inner * &scale);
        scale = &scale * &inv;
    }
    let s = f.scalar.embed_prec(prec).re;
    Ok(&total * &s)
}

/// Single formula Σ coeff_i CTB(a_i) with base r^{-b} and block b.
pub fn combine(terms: &[(i64, CtbTerm)]) -> Result<BbpFormula> {
    let family = match terms.first() {
        Some((_, t)) => t.family.clone(),
        None => return Err(Error::Invalid("empty relation".into())),
    };
    if terms.iter().any(|(_, t)| !t.family.same_as(&family)) {
        return Err(Error::MixedFamilies);
    }
    let ring = family.ring();
    let mut acc = vec![RingElement::zero(ring); family.b()];
    for (c, t) in terms {
        let k = BigRational::from_integer((*c).into());
        for (slot, v) in acc.iter_mut().zip(t.vector()?) {
            *slot = slot.add(&v.scale(&k))?;
        }
    }
    let base = family.r().pow(family.b() as u64).inverse()?;
    Ok(BbpFormula::new(1, base, acc))
}

/// Outcome of [`integerize`]: lambda * A = A' with A' primitive integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Integerized {
    pub lambda: RingElement,
    pub coeffs: Vec<BigInt>,
}

impl Integerized {
    /// The equivalent formula carrying A' and the scalar divided by lambda.
    pub fn apply(&self, f: &BbpFormula) -> Result<BbpFormula> {
        let ring = f.ring();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| RingElement::from_rational(ring, BigRational::from_integer(c.clone())))
            .collect();
        let scalar = f.scalar.mul(&self.lambda.inverse()?)?;
        Ok(BbpFormula { coeffs, scalar, ..f.clone() })
    }
}

/// Finds lambda with lambda * A primitive integral and lambda positive.
pub fn integerize(f: &BbpFormula) -> Result<Integerized> {
    let pivot = f.coeffs.iter().position(|c| !c.is_zero()).ok_or(Error::NotIntegerizable)?;
    let ap = &f.coeffs[pivot];
    let ap_inv = ap.inverse().map_err(|_| Error::NotIntegerizable)?;
    let ratios: Vec<BigRational> = f
        .coeffs
        .iter()
        .map(|c| c.mul(&ap_inv).ok().and_then(|e| e.as_rational()).ok_or(Error::NotIntegerizable))
        .collect::<Result<_>>()?;
    let den = ratios.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = ratios.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let mut coeffs: Vec<BigInt> = ints.iter().map(|v| v / &g).collect();
    // lambda = A'_p / A_p
    let mut lambda = ap_inv.scale(&BigRational::from_integer(coeffs[pivot].clone()));
    if lambda.embed(20).re.is_negative() {
        lambda = lambda.neg();
        coeffs.iter_mut().for_each(|c| *c = -&*c);
    }
    Ok(Integerized { lambda, coeffs })
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Rewrites a formula with block b as one with the smallest block n | b
/// for which the coefficients are exactly geometric across sub-blocks.
pub fn reduce_block(f: &BbpFormula) -> Result<BbpFormula> {
    let b = f.block;
    for n in divisors(b) {
        if n == b {
            break;
        }
        let Some(j0) = f.coeffs[..n].iter().position(|c| !c.is_zero()) else {
            continue;
        };
        let Ok(inv) = f.coeffs[j0].inverse() else {
            continue;
        };
        let rho = f.coeffs[j0 + n].mul(&inv)?;
        if rho.is_zero() {
            continue;
        }
        let mut periodic = true;
        for j in 0..b - n {
            if f.coeffs[j + n].sub(&rho.mul(&f.coeffs[j])?)?.is_zero() {
                continue;
            }
            periodic = false;
            break;
        }
        if !periodic || !rho.pow((b / n) as u64).mul(&f.base)?.is_one() {
            continue;
        }
        return Ok(BbpFormula {
            degree: f.degree,
            base: rho.inverse()?,
            block: n,
            coeffs: f.coeffs[..n].to_vec(),
            scalar: f.scalar.clone(),
        });
    }
    Ok(f.clone())
}

/// Renders an exact rational, writing large powers of two as 2^k.
pub fn format_rational(q: &BigRational) -> String {
    fn int(n: &BigInt) -> String {
        let a = n.abs();
        if a >= BigInt::from(1024) && (&a & (&a - 1u32)).is_zero() {
            let k = a.bits() - 1;
            format!("{}2^{k}", if n.is_negative() { "-" } else { "" })
        } else {
            n.to_string()
        }
    }
    if q.is_integer() {
        int(q.numer())
    } else {
        format!("{}/{}", int(q.numer()), int(q.denom()))
    }
}

/// Human-readable scalar: rational, `c*sqrt(d)`, or raw coordinates.
pub fn describe_scalar(e: &RingElement) -> String {
    if let Some(q) = e.as_rational() {
        return format_rational(&q);
    }
    if let Some(sq) = e.mul(e).ok().and_then(|s| s.as_rational()) {
        if sq.is_positive() {
            let nm = sq.numer() * sq.denom();
            if let Some((k, d)) = squarefree_decompose(&nm) {
                let mut c = BigRational::new(k, sq.denom().clone());
                if e.embed(20).re.is_negative() {
                    c = -c;
                }
                return if c.is_one() {
                    format!("sqrt({d})")
                } else if c == -BigRational::one() {
                    format!("-sqrt({d})")
                } else {
                    format!("{}*sqrt({d})", format_rational(&c))
                };
            }
        }
    }
    if let Some(text) = describe_quadratic(e) {
        return text;
    }
    let coords: Vec<String> = e.coords().iter().map(|c| c.to_string()).collect();
    format!("[{}]", coords.join(", "))
}

/// `a + b*sqrt(d)` when e satisfies e^2 = p e + q over the rationals.
fn describe_quadratic(e: &RingElement) -> Option<String> {
    let sq = e.mul(e).ok()?;
    let i = (1..e.coords().len()).find(|&i| !e.coords()[i].is_zero())?;
    let p = &sq.coords()[i] / &e.coords()[i];
    let rest = sq.sub(&e.scale(&p)).ok()?;
    let q = rest.as_rational()?;
    let a = &p / BigRational::from_integer(2.into());
    let disc = &q + &a * &a;
    if !disc.is_positive() {
        return None;
    }
    let (k, d) = squarefree_decompose(&(disc.numer() * disc.denom()))?;
    let mut b = BigRational::new(k, disc.denom().clone());
    let a_ball = BigReal::from_rational(&a, 80);
    if (&e.embed(20).re - &a_ball).is_negative() {
        b = -b;
    }
    let sign = if b.is_negative() { " - " } else { " + " };
    let mag = b.abs();
    let root = if mag.is_one() { format!("sqrt({d})") } else { format!("{}*sqrt({d})", format_rational(&mag)) };
    Some(if a.is_zero() {
        format!("{}{root}", if b.is_negative() { "-" } else { "" })
    } else {
        format!("{}{sign}{root}", format_rational(&a))
    })
}

impl fmt::Display for BbpFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| c.as_rational().map_or_else(|| describe_scalar(c), |q| format_rational(&q)))
            .collect();
        let prefix = if self.scalar.is_one() { String::new() } else { format!("{} * ", describe_scalar(&self.scalar)) };
        write!(
            f,
            "{prefix}BBP({}, {}, {}, ({}))",
            self.degree,
            describe_scalar(&self.base),
            self.block,
            coeffs.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Polynomial;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn inv_sqrt(d: i64, lo: BigRational, hi: BigRational, b: usize) -> Arc<CtbFamily> {
        CtbFamily::minpoly(Polynomial::from_ints(&[-1, 0, d]), lo, hi, b).unwrap()
    }

    #[test]
    fn quadratic_scalars() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 60).unwrap();
        let phi15 = fam.r().pow(15).inverse().unwrap();
        assert_eq!(describe_scalar(&phi15), "682 + 305*sqrt(5)");
        assert_eq!(describe_scalar(&fam.r().neg()), "1/2 - 1/2*sqrt(5)");
    }

    #[test]
    fn integerize_pi_quarter() {
        let fam = inv_sqrt(2, q(7, 10), q(71, 100), 8);
        let f = combine(&[(1, CtbTerm::new(&fam, 3).unwrap())]).unwrap();
        assert_eq!(f.base.as_rational(), Some(q(16, 1)));
        let z = integerize(&f).unwrap();
        assert_eq!(z.lambda.as_rational(), Some(q(16, 1)));
        assert_eq!(z.coeffs, ints(&[8, 8, 4, 0, -2, -2, -1, 0]));
    }

    #[test]
    fn adegoke_vector_and_scalar() {
        let fam = inv_sqrt(3, q(57, 100), q(58, 100), 12);
        let f = combine(&[(1, CtbTerm::new(&fam, 3).unwrap()), (-1, CtbTerm::new(&fam, 5).unwrap())]).unwrap();
        let z = integerize(&f).unwrap();
        assert_eq!(z.coeffs, ints(&[243, -243, -324, -81, 27, 0, -9, 9, 12, 3, -1, 0]));
        assert_eq!(describe_scalar(&z.lambda), "486*sqrt(3)");
        assert_eq!(describe_scalar(&f.base), "729");
    }

    #[test]
    fn not_integerizable() {
        let fam = CtbFamily::minpoly(Polynomial::from_ints(&[-1, 1, 1]), q(61, 100), q(62, 100), 10).unwrap();
        let f = combine(&[(1, CtbTerm::new(&fam, 2).unwrap())]).unwrap();
        assert_eq!(integerize(&f), Err(Error::NotIntegerizable));
    }

    #[test]
    fn mixed_families_rejected() {
        let a = inv_sqrt(2, q(7, 10), q(71, 100), 8);
        let b = inv_sqrt(2, q(7, 10), q(71, 100), 24);
        let err = combine(&[(1, CtbTerm::new(&a, 3).unwrap()), (1, CtbTerm::new(&b, 5).unwrap())]);
        assert_eq!(err.unwrap_err(), Error::MixedFamilies);
    }

    #[test]
    fn machin_like_formula_value() {
        let f = BbpFormula::rational(1, 16, &[q(4, 1), q(0, 1), q(0, 1), q(-2, 1), q(-1, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        let v = f.eval_series(50).unwrap();
        let pi = BigReal::pi(bits_for_digits(60));
        assert!((&v - &pi).abs_upper() < BigRational::new(1.into(), BigInt::from(10).pow(48)));
    }

    #[test]
    fn zero_formula_is_exact() {
        let f = BbpFormula::rational(1, 16, &vec![q(0, 1); 8]);
        assert!(f.eval_series(30).unwrap().is_exact());
        let slow = BbpFormula::rational(1, 1, &[q(1, 1)]);
        assert_eq!(slow.eval_series(5), Err(Error::DivergentBase));
    }

    #[test]
    fn reduce_block_leaves_generic_formula() {
        let fam = inv_sqrt(2, q(7, 10), q(71, 100), 24);
        // odd a flips sign every half block, even a does not, so a mix has no period
        let f = combine(&[(1, CtbTerm::new(&fam, 5).unwrap()), (2, CtbTerm::new(&fam, 4).unwrap())]).unwrap();
        assert_eq!(reduce_block(&f).unwrap().block, 24);
    }

    #[test]
    fn reduce_block_finds_period() {
        // CTB_24(1/sqrt2, 3) is CTB_8(1/sqrt2, 1) repeated geometrically
        let fam = inv_sqrt(2, q(7, 10), q(71, 100), 24);
        let f = combine(&[(1, CtbTerm::new(&fam, 3).unwrap())]).unwrap();
        let g = reduce_block(&f).unwrap();
        assert!(g.block < 24);
        let (x, y) = (f.eval_series(40).unwrap(), g.eval_series(40).unwrap());
        assert!((&x - &y).contains_zero());
    }

    #[test]
    fn scalar_rendering() {
        assert_eq!(format_rational(&q(9, 4096)), "9/2^12");
        assert_eq!(format_rational(&q(-2048, 1)), "-2^11");
        assert_eq!(format_rational(&q(3, 4)), "3/4");
    }
}
