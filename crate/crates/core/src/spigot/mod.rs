//! Digit extraction for formulas with an integer base.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulas::BbpFormula;

/// Guard digit schedule; ambiguity after the last entry is an error.
pub const GUARD_SCHEDULE: [u32; 3] = [12, 24, 48];

const DIGIT_CHARS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Fractional digits `position ..= position + count - 1` (1-indexed) of a formula value.
#[derive(Clone, Debug)]
pub struct DigitRequest<'a> {
    pub formula: &'a BbpFormula,
    pub position: u64,
    pub count: u32,
}

/// Integer data of λ Σ_k B^{-k} Σ_j a_j / (kn + j)^d with λ a_j = w_j / v.
struct Prepared {
    base: BigInt,
    block: u64,
    degree: u32,
    weights: Vec<BigInt>,
    denom: BigInt,
}

fn prepare(f: &BbpFormula) -> Result<Prepared> {
    let base = f
        .base
        .as_rational()
        .filter(|b| b.is_integer() && b.to_integer() >= BigInt::from(2))
        .ok_or(Error::NonIntegerBase)?
        .to_integer();
    let scalar = f.scalar.as_rational().ok_or(Error::NonIntegerBase)?;
    let coeffs = f
        .rational_coeffs()
        .ok_or_else(|| Error::Invalid("digit extraction needs rational coefficients".into()))?;
    let scaled: Vec<BigRational> = coeffs.iter().map(|c| c * &scalar).collect();
    let denom = scaled.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let weights = scaled.iter().map(|c| (c * BigRational::from_integer(denom.clone())).to_integer()).collect();
    Ok(Prepared { base, block: f.block as u64, degree: f.degree.max(1), weights, denom })
}

/// floor(B^{g} * frac(B^{p-1} * value)) up to an error of `err` units.
fn scaled_fraction(pr: &Prepared, p: u64, g: u32) -> (BigInt, BigInt) {
    let modulus = pr.base.pow(g);
    let head: Vec<(BigInt, u64)> = (0..p)
        .into_par_iter()
        .fold(
            || (BigInt::zero(), 0u64),
            |(mut acc, mut terms), k| {
                let e = BigInt::from(p - 1 - k);
                for (j, w) in pr.weights.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    let den = &pr.denom * BigInt::from(k * pr.block + j as u64 + 1).pow(pr.degree);
                    let num = (w.mod_floor(&den) * pr.base.modpow(&e, &den)).mod_floor(&den);
                    acc += (num * &modulus) / &den;
                    terms += 1;
                }
                (acc.mod_floor(&modulus), terms)
            },
        )
        .collect();
    let mut acc = BigInt::zero();
    let mut err = BigInt::zero();
    for (a, t) in head {
        acc += a;
        err += t;
    }

    // tail k >= p: w_j B^{g-(k-p+1)} / (v (kn + j)^d)
    let mass: BigInt = pr.weights.iter().map(|w| w.abs()).sum();
    let mut k = p;
    loop {
        let shift = (k - p + 1) as i64;
        let pow_left = g as i64 - shift;
        if pow_left < 0 {
            // the remaining terms sum to at most mass / (v (B - 1)) units
            let rest = BigRational::new(mass.clone(), &pr.denom * (&pr.base - 1));
            err += rest.ceil().to_integer();
            break;
        } else {
            let scale = pr.base.pow(pow_left as u32);
            for (j, w) in pr.weights.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let den = &pr.denom * BigInt::from(k * pr.block + j as u64 + 1).pow(pr.degree);
                acc += (w * &scale).div_floor(&den);
                err += 1;
            }
        }
        k += 1;
    }
    (acc.mod_floor(&modulus), err)
}

fn digit_values(v: &BigInt, base: &BigInt, width: u32) -> Vec<u64> {
    let mut out = vec![0u64; width as usize];
    let mut v = v.clone();
    for slot in out.iter_mut().rev() {
        let (q, r) = v.div_mod_floor(base);
        *slot = r.to_u64().unwrap_or(0);
        v = q;
    }
    out
}

/// `count` base-B digit values starting at `position`.
pub fn extract_digit_values(req: &DigitRequest<'_>) -> Result<Vec<u64>> {
    if req.position == 0 || req.count == 0 {
        return Err(Error::Invalid("position and count must be at least 1".into()));
    }
    let pr = prepare(req.formula)?;
    if pr.base.to_u64().is_none() {
        return Err(Error::NonIntegerBase);
    }
    if pr.weights.iter().all(Zero::is_zero) {
        return Ok(vec![0; req.count as usize]);
    }
    for guard in GUARD_SCHEDULE {
        let g = req.count + guard;
        let (s, err) = scaled_fraction(&pr, req.position, g);
        let unit = pr.base.pow(guard);
        let modulus = pr.base.pow(g);
        let lo = (&s - &err).mod_floor(&modulus).div_floor(&unit);
        let hi = (&s + &err).mod_floor(&modulus).div_floor(&unit);
        if lo == hi {
            return Ok(digit_values(&lo, &pr.base, req.count));
        }
    }
    Err(Error::CarryAmbiguity(req.position))
}

/// Digits rendered with 0-9A-Z; bases above 36 are rejected.
pub fn extract_digits(req: &DigitRequest<'_>) -> Result<String> {
    if req.formula.base.as_rational().is_some_and(|b| b > BigRational::from_integer(36.into())) {
        return Err(Error::Invalid("bases above 36 have no digit alphabet".into()));
    }
    let values = extract_digit_values(req)?;
    Ok(values.iter().map(|&d| DIGIT_CHARS[d as usize] as char).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bigreal::BigReal;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bbp_pi() -> BbpFormula {
        let c: Vec<BigRational> = [4, 0, 0, -2, -1, -1, 0, 0].iter().map(|&v| q(v, 1)).collect();
        BbpFormula::rational(1, 16, &c)
    }

    // digits of the enclosure's center, read in base B
    fn oracle_digits(x: &BigReal, base: u32, count: usize) -> String {
        let mut frac = x.center() - x.center().floor();
        let mut out = String::new();
        for _ in 0..count {
            frac *= BigRational::from_integer(base.into());
            let d = frac.floor().to_integer();
            frac -= BigRational::from_integer(d.clone());
            out.push(DIGIT_CHARS[d.to_usize().unwrap()] as char);
        }
        out
    }

    #[test]
    fn hex_digits_of_pi() {
        let f = bbp_pi();
        let got = extract_digits(&DigitRequest { formula: &f, position: 1, count: 8 }).unwrap();
        assert_eq!(got, "243F6A88");
        let v = f.eval_series(50).unwrap();
        let reference = oracle_digits(&v, 16, 30);
        for p in 1..=20u64 {
            let d = extract_digits(&DigitRequest { formula: &f, position: p, count: 1 }).unwrap();
            assert_eq!(d, &reference[(p - 1) as usize..p as usize], "position {p}");
        }
    }

    #[test]
    fn deep_position() {
        // frozen from an independent 4,000,144-bit evaluation of pi
        let f = bbp_pi();
        let got = extract_digits(&DigitRequest { formula: &f, position: 1_000_001, count: 8 }).unwrap();
        assert_eq!(got, "6C65E52C");
    }

    #[test]
    fn zero_and_scaled() {
        let z = BbpFormula::rational(1, 16, &vec![q(0, 1); 4]);
        assert_eq!(extract_digits(&DigitRequest { formula: &z, position: 3, count: 5 }).unwrap(), "00000");
        let c: Vec<BigRational> = [8, 8, 4, 0, -2, -2, -1, 0].iter().map(|&v| q(v, 1)).collect();
        let f = BbpFormula::rational(1, 16, &c);
        let v = f.eval_series(40).unwrap();
        let got = extract_digits(&DigitRequest { formula: &f, position: 1, count: 12 }).unwrap();
        assert_eq!(got, oracle_digits(&v, 16, 12));
    }

    #[test]
    fn rejects_non_integer_base() {
        let c = vec![q(1, 1)];
        let mut f = BbpFormula::rational(1, 16, &c);
        f.base = f.base.scale(&q(1, 3));
        assert_eq!(extract_digits(&DigitRequest { formula: &f, position: 1, count: 1 }), Err(Error::NonIntegerBase));
    }
}
