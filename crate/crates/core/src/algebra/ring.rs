//! Exact arithmetic in Q[x, y] / (Φ_L(x), q(y)).
//!
//! The variable `x` stands for ζ_L = e^{2πi/L} and `y` for a designated real
//! root of `q`. Elements are dense coordinate vectors over the monomial
//! basis ζ^i y^j (0 <= i < φ(L), 0 <= j < deg q), stored at index i*deg(q) + j.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::bigreal::{bits_for_digits, BigComplex, BigReal};
use super::cyclotomic::CyclotomicField;
use super::poly::Polynomial;
use super::roots::RealRoot;
use crate::error::{Error, Result};

/// Quotient ring Q[x, y] / (Φ_L, q) with a chosen complex embedding.
#[derive(Debug)]
pub struct CompositeRing {
    cyclo: CyclotomicField,
    /// Monic real modulus, absent for a pure cyclotomic field.
    q: Option<Polynomial>,
    root: Option<RealRoot>,
    proven_field: bool,
    /// ζ^k reduced modulo Φ_L, for 0 <= k < L.
    zeta_table: Vec<Vec<BigRational>>,
}

impl PartialEq for CompositeRing {
    fn eq(&self, other: &Self) -> bool {
        self.cyclo == other.cyclo && self.q == other.q
    }
}

fn rational_root_exists(p: &Polynomial) -> Option<bool> {
    const LIMIT: i64 = 1_000_000_000_000;
    let ints = p.to_primitive_integer();
    let a0 = ints.first()?.to_i64()?.abs();
    let an = ints.last()?.to_i64()?.abs();
    if a0 == 0 {
        return Some(true);
    }
    if a0 > LIMIT || an > LIMIT {
        return None;
    }
    let divisors = |n: i64| -> Vec<i64> {
        let mut out = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                out.push(n / d);
            }
            d += 1;
        }
        out
    };
    for num in divisors(a0) {
        for den in divisors(an) {
            for s in [1, -1] {
                let x = BigRational::new(BigInt::from(s * num), BigInt::from(den));
                if p.eval(&x).is_zero() {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

/// Sufficient test that Q[x, y]/(Φ_L, q) is a field: q irreducible over Q
/// (decided here only for degree <= 3) with degree coprime to φ(L).
fn proves_field(q: &Polynomial, phi: usize) -> bool {
    let d = q.degree();
    if d <= 1 {
        return true;
    }
    if d > 3 || d.gcd(&phi) != 1 {
        return false;
    }
    rational_root_exists(q) == Some(false)
}

impl CompositeRing {
    /// The pure cyclotomic field Q(ζ_L).
    pub fn cyclotomic(conductor: u64) -> Arc<Self> {
        Arc::new(Self::build(CyclotomicField::new(conductor), None, None, true))
    }

    /// Q(ζ_L)[y]/(q) with the real root of `q` isolated in `interval`.
    pub fn with_real_modulus(
        conductor: u64,
        q: &Polynomial,
        interval: (&BigRational, &BigRational),
    ) -> Result<Arc<Self>> {
        if q.degree() == 0 {
            return Err(Error::Invalid("real modulus must have degree >= 1".into()));
        }
        let root = RealRoot::isolate(q, interval.0, interval.1)?;
        let cyclo = CyclotomicField::new(conductor);
        let proven = proves_field(q, cyclo.degree());
        Ok(Arc::new(Self::build(cyclo, Some(q.monic()), Some(root), proven)))
    }

    fn build(cyclo: CyclotomicField, q: Option<Polynomial>, root: Option<RealRoot>, proven_field: bool) -> Self {
        let phi = cyclo.degree();
        let l = cyclo.conductor() as usize;
        let m = cyclo.modulus().coeffs().to_vec();
        let mut table = Vec::with_capacity(l);
        let mut cur = vec![BigRational::zero(); phi];
        cur[0] = BigRational::one();
        for _ in 0..l {
            table.push(cur.clone());
            // multiply by x and reduce by the monic modulus
            let top = cur[phi - 1].clone();
            let mut next = vec![BigRational::zero(); phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for (i, n) in next.iter_mut().enumerate() {
                    *n -= &top * &m[i];
                }
            }
            cur = next;
        }
        CompositeRing { cyclo, q, root, proven_field, zeta_table: table }
    }

    pub fn conductor(&self) -> u64 {
        self.cyclo.conductor()
    }

    pub fn cyclotomic_field(&self) -> &CyclotomicField {
        &self.cyclo
    }

    pub fn phi(&self) -> usize {
        self.cyclo.degree()
    }

    /// Degree of the real modulus (1 when absent).
    pub fn real_degree(&self) -> usize {
        self.q.as_ref().map_or(1, |q| q.degree())
    }

    pub fn dimension(&self) -> usize {
        self.phi() * self.real_degree()
    }

    pub fn real_modulus(&self) -> Option<&Polynomial> {
        self.q.as_ref()
    }

    pub fn real_root(&self) -> Option<&RealRoot> {
        self.root.as_ref()
    }

    pub fn is_proven_field(&self) -> bool {
        self.proven_field
    }

    fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }

    fn mul_raw(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let phi = self.phi();
        let dq = self.real_degree();
        let nx = 2 * phi - 1;
        let ny = 2 * dq - 1;
        let mut t = vec![BigRational::zero(); nx * ny];
        for (ia, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let (i1, j1) = (ia / dq, ia % dq);
            for (ib, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let (i2, j2) = (ib / dq, ib % dq);
                t[(i1 + i2) * ny + j1 + j2] += ca * cb;
            }
        }
        if let Some(q) = &self.q {
            let qc = q.coeffs();
            for i in 0..nx {
                for j in (dq..ny).rev() {
                    let c = std::mem::take(&mut t[i * ny + j]);
                    if c.is_zero() {
                        continue;
                    }
                    for (s, qs) in qc.iter().enumerate().take(dq) {
                        t[i * ny + j - dq + s] -= &c * qs;
                    }
                }
            }
        }
        let m = self.cyclo.modulus().coeffs();
        for i in (phi..nx).rev() {
            for j in 0..dq {
                let c = std::mem::take(&mut t[i * ny + j]);
                if c.is_zero() {
                    continue;
                }
                for (s, ms) in m.iter().enumerate().take(phi) {
                    t[(i - phi + s) * ny + j] -= &c * ms;
                }
            }
        }
        let mut out = Vec::with_capacity(phi * dq);
        for i in 0..phi {
            for j in 0..dq {
                out.push(std::mem::take(&mut t[i * ny + j]));
            }
        }
        out
    }
}

/// Element of a [`CompositeRing`].
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<CompositeRing>,
    coords: Vec<BigRational>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        CompositeRing::same(&self.ring, &other.ring) && self.coords == other.coords
    }
}

impl Eq for RingElement {}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement(L={}, [", self.ring.conductor())?;
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "])")
    }
}

impl RingElement {
    pub fn zero(ring: &Arc<CompositeRing>) -> Self {
        RingElement { ring: ring.clone(), coords: vec![BigRational::zero(); ring.dimension()] }
    }

    pub fn from_rational(ring: &Arc<CompositeRing>, v: BigRational) -> Self {
        let mut e = Self::zero(ring);
        e.coords[0] = v;
        e
    }

    pub fn from_int(ring: &Arc<CompositeRing>, v: i64) -> Self {
        Self::from_rational(ring, BigRational::from_integer(v.into()))
    }

    pub fn one(ring: &Arc<CompositeRing>) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn from_coords(ring: &Arc<CompositeRing>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != ring.dimension() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                ring.dimension(),
                coords.len()
            )));
        }
        Ok(RingElement { ring: ring.clone(), coords })
    }

    /// ζ_L^k for any integer k.
    pub fn zeta_pow(ring: &Arc<CompositeRing>, k: i64) -> Self {
        let l = ring.conductor() as i64;
        let idx = k.rem_euclid(l) as usize;
        let dq = ring.real_degree();
        let mut e = Self::zero(ring);
        for (i, c) in ring.zeta_table[idx].iter().enumerate() {
            e.coords[i * dq] = c.clone();
        }
        e
    }

    /// The generator y (the designated real root of q).
    pub fn y(ring: &Arc<CompositeRing>) -> Result<Self> {
        let q = ring.q.as_ref().ok_or_else(|| Error::Invalid("ring has no real modulus".into()))?;
        if q.degree() == 1 {
            // y = -q_0 for monic linear q
            return Ok(Self::from_rational(ring, -q.coeff(0)));
        }
        let mut e = Self::zero(ring);
        e.coords[1] = BigRational::one();
        Ok(e)
    }

    pub fn ring(&self) -> &Arc<CompositeRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Coefficient of ζ^i y^j.
    pub fn coord(&self, i: usize, j: usize) -> &BigRational {
        &self.coords[i * self.ring.real_degree() + j]
    }

    fn check(&self, other: &Self) -> Result<()> {
        if CompositeRing::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(RingElement { ring: self.ring.clone(), coords })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(RingElement { ring: self.ring.clone(), coords })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(RingElement { ring: self.ring.clone(), coords: self.ring.mul_raw(&self.coords, &other.coords) })
    }

    pub fn neg(&self) -> Self {
        RingElement { ring: self.ring.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RingElement { ring: self.ring.clone(), coords: self.coords.iter().map(|c| c * k).collect() }
    }

    /// Square-and-multiply power.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = RingElement::one(&self.ring);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = RingElement { ring: self.ring.clone(), coords: self.ring.mul_raw(&acc.coords, &base.coords) };
            }
            n >>= 1;
            if n > 0 {
                base = RingElement { ring: self.ring.clone(), coords: self.ring.mul_raw(&base.coords, &base.coords) };
            }
        }
        acc
    }

    /// Image under ζ ↦ ζ^{L-1}, y ↦ y (complex conjugation of the embedding).
    pub fn conjugate(&self) -> Self {
        let ring = &self.ring;
        let phi = ring.phi();
        let dq = ring.real_degree();
        let l = ring.conductor() as usize;
        let mut out = vec![BigRational::zero(); phi * dq];
        for i in 0..phi {
            let img = &ring.zeta_table[(l - i) % l];
            for j in 0..dq {
                let c = &self.coords[i * dq + j];
                if c.is_zero() {
                    continue;
                }
                for (m, z) in img.iter().enumerate() {
                    if !z.is_zero() {
                        out[m * dq + j] += c * z;
                    }
                }
            }
        }
        RingElement { ring: ring.clone(), coords: out }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The element as a rational, if it has no ζ or y component.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// True when the element equals its conjugate exactly.
    pub fn is_conjugate_fixed(&self) -> bool {
        self.conjugate().coords == self.coords
    }

    /// Multiplicative inverse by solving the linear system e * z = 1.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.ring.dimension();
        // column k holds e * basis_k
        let mut mat = vec![vec![BigRational::zero(); n + 1]; n];
        for k in 0..n {
            let mut basis = vec![BigRational::zero(); n];
            basis[k] = BigRational::one();
            let col = self.ring.mul_raw(&self.coords, &basis);
            for (row, v) in col.into_iter().enumerate() {
                mat[row][k] = v;
            }
        }
        mat[0][n] = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !mat[r][col].is_zero()).ok_or(Error::NotInvertible)?;
            mat.swap(col, pivot);
            let inv = mat[col][col].recip();
            for v in mat[col].iter_mut().skip(col) {
                *v *= &inv;
            }
            for r in 0..n {
                if r != col && !mat[r][col].is_zero() {
                    let f = mat[r][col].clone();
                    for c in col..=n {
                        let d = &f * &mat[col][c];
                        mat[r][c] -= d;
                    }
                }
            }
        }
        let coords = mat.into_iter().map(|row| row[n].clone()).collect();
        Ok(RingElement { ring: self.ring.clone(), coords })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    /// Certified embedding at a fixed binary precision.
    pub fn embed_prec(&self, prec: u32) -> BigComplex {
        let ring = &self.ring;
        let phi = ring.phi();
        let dq = ring.real_degree();
        let wp = prec + 32;
        let ys: Vec<BigReal> = match &ring.root {
            Some(root) if dq > 1 => {
                let y = root.to_ball(wp);
                let mut v = vec![BigReal::from_int(1, wp)];
                for j in 1..dq {
                    let next = &v[j - 1] * &y;
                    v.push(next);
                }
                v
            }
            _ => vec![BigReal::from_int(1, wp)],
        };
        let zeta = BigComplex::root_of_unity(1, ring.conductor(), wp);
        let mut zpow = BigComplex::from_real(BigReal::from_int(1, wp));
        let mut acc = BigComplex::zero(wp);
        for i in 0..phi {
            let mut inner = BigReal::zero(wp);
            let mut any = false;
            for (j, yj) in ys.iter().enumerate() {
                let c = &self.coords[i * dq + j];
                if c.is_zero() {
                    continue;
                }
                any = true;
                let term = if j == 0 {
                    BigReal::from_rational(c, wp)
                } else {
                    &BigReal::from_rational(c, wp) * yj
                };
                inner = &inner + &term;
            }
            if any {
                acc = if i == 0 { acc.add(&BigComplex::from_real(inner)) } else { acc.add(&zpow.scale(&inner)) };
            }
            if i + 1 < phi {
                zpow = zpow.mul(&zeta);
            }
        }
        acc.with_prec(prec)
    }

    /// Certified embedding with radius at most 10^-digits.
    pub fn embed(&self, digits: u32) -> BigComplex {
        let mut prec = bits_for_digits(digits) + 16;
        loop {
            let z = self.embed_prec(prec);
            if z.radius_within_digits(digits) {
                return z;
            }
            prec *= 2;
        }
    }
}
