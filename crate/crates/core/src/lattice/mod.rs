//! Relation lattices and exact LLL reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::bigreal::{round_half_even, BigReal};
use crate::error::{Error, Result};

/// Rows v_i = (e_i, m_i) with m_i the nearest integer to N * x_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    pub rows: Vec<Vec<BigInt>>,
    pub scale: BigInt,
    /// Largest approximation radius among the x_i.
    pub epsilon: BigRational,
}

impl RelationLattice {
    pub fn dimension(&self) -> usize {
        self.rows.len() + 1
    }

    /// The rounded values m_i.
    pub fn last_column(&self) -> Vec<BigInt> {
        self.rows.iter().map(|r| r.last().cloned().unwrap_or_default()).collect()
    }
}

pub fn build_relation_lattice(xs: &[BigReal], scale: &BigInt) -> Result<RelationLattice> {
    if scale < &BigInt::from(2) {
        return Err(Error::Invalid("lattice scale N must be at least 2".into()));
    }
    let n = xs.len();
    let nq = BigRational::from_integer(scale.clone());
    let half = BigRational::new(1.into(), 2.into());
    let mut epsilon = BigRational::zero();
    let mut rows = Vec::with_capacity(n);
    for (i, x) in xs.iter().enumerate() {
        let rad = x.radius();
        if &rad * &nq >= half {
            return Err(Error::AmbiguousRounding);
        }
        if rad > epsilon {
            epsilon = rad;
        }
        let mut row = vec![BigInt::zero(); n + 1];
        row[i] = BigInt::one();
        row[n] = round_half_even(&(x.center() * &nq));
        rows.push(row);
    }
    Ok(RelationLattice { rows, scale: scale.clone(), epsilon })
}

/// Reduced basis together with the unimodular transform T (T * input = output).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub basis: Vec<Vec<BigInt>>,
    pub transform: Vec<Vec<BigInt>>,
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn floor_half(x: &BigRational) -> BigInt {
    (x + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

/// Exact rational Gram-Schmidt: (mu, squared norms of b*_i).
pub fn gram_schmidt(basis: &[Vec<BigInt>]) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let m = basis.len();
    let cols = basis.first().map_or(0, Vec::len);
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut mu = vec![vec![BigRational::zero(); m]; m];
    let mut g = Vec::with_capacity(m);
    for i in 0..m {
        let mut s: Vec<BigRational> = basis[i].iter().map(|v| BigRational::from_integer(v.clone())).collect();
        for j in 0..i {
            let d: BigRational = (0..cols).map(|z| &star[j][z] * BigRational::from_integer(basis[i][z].clone())).sum();
            mu[i][j] = d / &g[j];
            for z in 0..cols {
                let t = &mu[i][j] * &star[j][z];
                s[z] -= t;
            }
        }
        let norm: BigRational = s.iter().map(|v| v * v).sum();
        if norm.is_zero() {
            return Err(Error::DependentRows);
        }
        g.push(norm);
        star.push(s);
    }
    Ok((mu, g))
}

/// Textbook LLL with exact rational Gram-Schmidt data.
pub fn lll_reduce(basis: &[Vec<BigInt>], delta: &BigRational) -> Result<Reduced> {
    let quarter = BigRational::new(1.into(), 4.into());
    if delta <= &quarter || delta >= &BigRational::one() {
        return Err(Error::InvalidDelta);
    }
    let m = basis.len();
    if m > 0 && basis.iter().any(|r| r.len() != basis[0].len()) {
        return Err(Error::Invalid("ragged basis".into()));
    }
    if m > basis.first().map_or(0, Vec::len) {
        return Err(Error::DependentRows);
    }
    let mut y = basis.to_vec();
    let mut t: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if m == 0 {
        return Ok(Reduced { basis: y, transform: t });
    }
    let (mut mu, mut g) = gram_schmidt(basis)?;
    let half = BigRational::new(1.into(), 2.into());

    let reduce_row = |y: &mut Vec<Vec<BigInt>>, t: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<BigRational>>, k: usize, l: usize| {
        let r = floor_half(&mu[k][l]);
        if r.is_zero() {
            return;
        }
        let (yl, tl) = (y[l].clone(), t[l].clone());
        for (a, b) in y[k].iter_mut().zip(&yl) {
            *a -= &r * b;
        }
        for (a, b) in t[k].iter_mut().zip(&tl) {
            *a -= &r * b;
        }
        let rq = BigRational::from_integer(r);
        for z in 0..l {
            let d = &rq * &mu[l][z];
            mu[k][z] -= d;
        }
        mu[k][l] -= rq;
    };

    let mut k = 1;
    while k < m {
        if mu[k][k - 1].abs() > half {
            reduce_row(&mut y, &mut t, &mut mu, k, k - 1);
        }
        let nu = mu[k][k - 1].clone();
        if g[k] >= (delta - &nu * &nu) * &g[k - 1] {
            for l in (0..k.saturating_sub(1)).rev() {
                if mu[k][l].abs() > half {
                    reduce_row(&mut y, &mut t, &mut mu, k, l);
                }
            }
            k += 1;
        } else {
            let alpha = &g[k] + &nu * &nu * &g[k - 1];
            let beta = &g[k - 1] / &alpha;
            mu[k][k - 1] = &nu * &beta;
            g[k] = &g[k] * &beta;
            g[k - 1] = alpha;
            y.swap(k, k - 1);
            t.swap(k, k - 1);
            for z in 0..k - 1 {
                let tmp = std::mem::take(&mut mu[k][z]);
                mu[k][z] = std::mem::replace(&mut mu[k - 1][z], tmp);
            }
            for i in k + 1..m {
                let xi = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &nu * &xi;
                mu[i][k - 1] = &mu[k][k - 1] * &mu[i][k] + xi;
            }
            k = (k - 1).max(1);
        }
    }
    Ok(Reduced { basis: y, transform: t })
}

/// |mu_ij| <= 1/2 for all j < i.
pub fn is_size_reduced(basis: &[Vec<BigInt>]) -> Result<bool> {
    let (mu, _) = gram_schmidt(basis)?;
    let half = BigRational::new(1.into(), 2.into());
    Ok((0..basis.len()).all(|i| (0..i).all(|j| mu[i][j].abs() <= half)))
}

/// |b*_k|^2 >= (delta - mu_{k,k-1}^2) |b*_{k-1}|^2 for all k.
pub fn satisfies_lovasz(basis: &[Vec<BigInt>], delta: &BigRational) -> Result<bool> {
    let (mu, g) = gram_schmidt(basis)?;
    Ok((1..basis.len()).all(|k| g[k] >= (delta - &mu[k][k - 1] * &mu[k][k - 1]) * &g[k - 1]))
}

/// Exact determinant by fraction-free Gaussian elimination (Bareiss).
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// A reduced basis vector read as a candidate relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub coeffs: Vec<BigInt>,
    pub last: BigInt,
    /// Squared Euclidean norm of the full lattice vector.
    pub norm2: BigInt,
}

impl Candidate {
    pub fn from_row(row: &[BigInt]) -> Self {
        let (coeffs, last) = row.split_at(row.len() - 1);
        let mut coeffs = coeffs.to_vec();
        let mut last = last[0].clone();
        if coeffs.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            coeffs.iter_mut().for_each(|c| *c = -&*c);
            last = -last;
        }
        let norm2 = dot_int(&coeffs, &coeffs) + &last * &last;
        Candidate { coeffs, last, norm2 }
    }
}

/// Up to `max_count` basis vectors with |last| <= max_last, sorted by norm.
pub fn extract_candidates(basis: &[Vec<BigInt>], max_last: &BigInt, max_count: usize) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = basis
        .iter()
        .map(|r| Candidate::from_row(r))
        .filter(|c| c.last.abs() <= *max_last && c.coeffs.iter().any(|v| !v.is_zero()))
        .collect();
    out.sort_by(|a, b| a.norm2.cmp(&b.norm2).then_with(|| a.coeffs.cmp(&b.coeffs)));
    out.truncate(max_count);
    out
}

/// Upper bound on |Σ a_i x_i| for a candidate: s/N + s*ε when the last
/// coordinate vanishes, (3/2) s/N + s*ε otherwise.
pub fn residual_bound(c: &Candidate, scale: &BigInt, epsilon: &BigRational) -> BigRational {
    let s = BigRational::from_integer(c.norm2.clone());
    let lead = if c.last.is_zero() { s.clone() } else { &s * BigRational::new(3.into(), 2.into()) };
    lead / BigRational::from_integer(scale.clone()) + s * epsilon
}
