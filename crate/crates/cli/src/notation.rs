//! Text forms: rationals, polynomials, CTB relations and BBP formulas.

use std::sync::Arc;

use bbp_core::algebra::poly::Polynomial;
use bbp_core::algebra::surd::QuadraticForm;
use bbp_core::formulas::{BbpFormula, CtbFamily};
use bbp_core::relation::Relation;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

fn fail<T>(input: &str, reason: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { input: input.to_string(), reason: reason.into() })
}

/// Integer with optional `base^exp`, e.g. `-2^5` or `10^15`.
pub fn parse_integer(s: &str) -> Result<BigInt, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let v = match body.split_once('^') {
        Some((b, e)) => {
            let b: BigInt = b.parse().or_else(|_| fail(s, "bad power base"))?;
            let e: u32 = e.parse().or_else(|_| fail(s, "bad exponent"))?;
            Pow::pow(b, e)
        }
        None => body.parse().or_else(|_| fail(s, "not an integer"))?,
    };
    Ok(if neg { -v } else { v })
}

/// `p`, `p/q` with each side an integer or power, e.g. `9/2^12`.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_integer(d)?;
            if d.is_zero() {
                return fail(s, "zero denominator");
            }
            Ok(BigRational::new(parse_integer(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_integer(s)?)),
    }
}

/// `c`, `sqrt(d)`, `c*sqrt(d)` or `c/sqrt(d)`.
pub fn parse_scalar(s: &str) -> Result<QuadraticForm, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(pos) = t.find("sqrt(") else {
        return Ok(QuadraticForm::rational(parse_rational(&t)?));
    };
    let inner_end = t[pos..].find(')').map(|i| pos + i).ok_or_else(|| ParseError {
        input: s.to_string(),
        reason: "unclosed sqrt(".into(),
    })?;
    if inner_end + 1 != t.len() {
        return fail(s, "trailing text after sqrt(..)");
    }
    let d: i64 = t[pos + 5..inner_end].parse().or_else(|_| fail(s, "sqrt of a non-integer"))?;
    let lead = &t[..pos];
    let zero = BigRational::zero();
    let coeff = if lead.is_empty() {
        BigRational::one()
    } else if let Some(c) = lead.strip_suffix('*') {
        if c == "-" {
            -BigRational::one()
        } else {
            parse_rational(c)?
        }
    } else if let Some(c) = lead.strip_suffix('/') {
        // c / sqrt(d) = (c/d) sqrt(d)
        parse_rational(c)? / BigRational::from_integer(d.into())
    } else if lead == "-" {
        -BigRational::one()
    } else {
        return fail(s, "expected `*` or `/` before sqrt");
    };
    Ok(QuadraticForm { a: zero, b: coeff, d })
}

/// Polynomial in one variable (`x` or `y`), e.g. `2*y^2 + 2*y - 1`.
pub fn parse_polynomial(s: &str) -> Result<Polynomial, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return fail(s, "empty polynomial");
    }
    let mut coeffs: Vec<BigRational> = Vec::new();
    for (sign, term) in split_signed(&t) {
        let (c, deg) = parse_monomial(s, term)?;
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, BigRational::zero());
        }
        coeffs[deg] += if sign < 0 { -c } else { c };
    }
    Ok(Polynomial::new(coeffs))
}

fn parse_monomial(src: &str, term: &str) -> Result<(BigRational, usize), ParseError> {
    let var = term.find(['x', 'y']);
    let Some(v) = var else {
        return Ok((parse_rational(term)?, 0));
    };
    let coeff = match &term[..v] {
        "" => BigRational::one(),
        c => parse_rational(c.strip_suffix('*').unwrap_or(c))?,
    };
    let deg = match &term[v + 1..] {
        "" => 1,
        e => e.strip_prefix('^').and_then(|e| e.parse().ok()).ok_or_else(|| ParseError {
            input: src.to_string(),
            reason: format!("bad exponent in `{term}`"),
        })?,
    };
    Ok((coeff, deg))
}

/// Splits at top-level `+`/`-` (not inside parentheses or after `^`).
fn split_signed(t: &str) -> Vec<(i32, &str)> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    let mut sign = 1;
    let bytes = t.as_bytes();
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && !matches!(bytes[i - 1], b'^' | b'*' | b'/') => {
                out.push((sign, &t[start..i]));
                sign = if ch == b'-' { -1 } else { 1 };
                start = i + 1;
            }
            b'+' | b'-' if depth == 0 && i == 0 => {
                sign = if ch == b'-' { -1 } else { 1 };
                start = 1;
            }
            _ => {}
        }
    }
    out.push((sign, &t[start..]));
    out
}

/// Terms and target of `3*CTB(5) + 3*CTB(11) = pi`; a missing right side is None.
pub fn parse_relation_terms(s: &str) -> Result<(Vec<(i64, usize)>, Option<i64>), ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (lhs, rhs) = match t.split_once('=') {
        Some((l, r)) => (l.to_string(), Some(r.to_string())),
        None => (t.clone(), None),
    };
    let mut terms = Vec::new();
    for (sign, term) in split_signed(&lhs) {
        let Some(body) = term.strip_suffix(')') else {
            return fail(s, format!("expected CTB(a) in `{term}`"));
        };
        let Some(pos) = body.find("CTB(") else {
            return fail(s, format!("expected CTB(a) in `{term}`"));
        };
        let a: usize = body[pos + 4..].parse().or_else(|_| fail(s, format!("bad index in `{term}`")))?;
        let c: i64 = match &body[..pos] {
            "" => 1,
            c => c.strip_suffix('*').unwrap_or(c).parse().or_else(|_| fail(s, format!("bad coefficient in `{term}`")))?,
        };
        terms.push((sign as i64 * c, a));
    }
    let target = match rhs.as_deref() {
        None => None,
        Some("0") => Some(0),
        Some(r) => {
            let body = r.strip_suffix("pi").or_else(|| r.strip_suffix('π')).ok_or_else(|| ParseError {
                input: s.to_string(),
                reason: "right-hand side must be 0 or an integer multiple of pi".into(),
            })?;
            Some(match body {
                "" | "+" => 1,
                "-" => -1,
                c => c.strip_suffix('*').unwrap_or(c).parse().or_else(|_| fail(s, "bad multiple of pi"))?,
            })
        }
    };
    Ok((terms, target))
}

pub fn parse_relation(s: &str, family: &Arc<CtbFamily>) -> Result<Relation, ParseError> {
    let (terms, target) = parse_relation_terms(s)?;
    let target = target.ok_or_else(|| ParseError { input: s.to_string(), reason: "missing `= ...`".into() })?;
    Relation::new(family, &terms, target).map_err(|e| ParseError { input: s.to_string(), reason: e.to_string() })
}

/// `[scalar*]BBP(d, base, n, (a_1, ..., a_n))` with rational entries.
pub fn parse_formula(s: &str) -> Result<BbpFormula, ParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let pos = t.find("BBP(").ok_or_else(|| ParseError { input: s.to_string(), reason: "expected BBP(".into() })?;
    let scalar = match &t[..pos] {
        "" => BigRational::one(),
        c => parse_rational(c.strip_suffix('*').unwrap_or(c))?,
    };
    let body = t[pos + 4..].strip_suffix(')').ok_or_else(|| ParseError { input: s.to_string(), reason: "unclosed BBP(".into() })?;
    let open = body.find('(').ok_or_else(|| ParseError { input: s.to_string(), reason: "missing coefficient list".into() })?;
    let head: Vec<&str> = body[..open].trim_end_matches(',').split(',').collect();
    if head.len() != 3 {
        return fail(s, "expected BBP(d, base, n, (...))");
    }
    let degree: u32 = head[0].parse().or_else(|_| fail(s, "bad degree"))?;
    let base = parse_rational(head[1])?;
    let n: usize = head[2].parse().or_else(|_| fail(s, "bad block length"))?;
    let list = body[open + 1..].strip_suffix(')').ok_or_else(|| ParseError { input: s.to_string(), reason: "unclosed list".into() })?;
    let coeffs: Vec<BigRational> = list.split(',').map(parse_rational).collect::<Result<_, _>>()?;
    if coeffs.len() != n {
        return fail(s, format!("block length {n} but {} coefficients", coeffs.len()));
    }
    if !base.is_integer() {
        return fail(s, "only integer bases are accepted here");
    }
    let base_i: i64 = base.to_integer().try_into().or_else(|_| fail(s, "base too large"))?;
    let mut f = BbpFormula::rational(degree, base_i, &coeffs);
    f.scalar = f.scalar.scale(&scalar);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals_and_powers() {
        assert_eq!(parse_rational("9/2^12").unwrap(), q(9, 4096));
        assert_eq!(parse_rational("-2^5").unwrap(), q(-32, 1));
        assert_eq!(parse_integer("10^15").unwrap(), BigInt::from(10u64.pow(15)));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn polynomials() {
        assert_eq!(parse_polynomial("2*y^2 + 2*y - 1").unwrap(), Polynomial::from_ints(&[-1, 2, 2]));
        assert_eq!(parse_polynomial("x^4 - x^3 - 1").unwrap(), Polynomial::from_ints(&[-1, 0, 0, -1, 1]));
        assert_eq!(parse_polynomial("-y+1/2").unwrap(), Polynomial::new(vec![q(1, 2), q(-1, 1)]));
        assert!(parse_polynomial("y^").is_err());
    }

    #[test]
    fn scalars() {
        let s = parse_scalar("3*sqrt(3)").unwrap();
        assert_eq!((s.b, s.d), (q(3, 1), 3));
        assert_eq!(parse_scalar("1/sqrt(2)").unwrap().b, q(1, 2));
        assert!(parse_scalar("9/2^12").unwrap().is_rational());
    }

    #[test]
    fn relations() {
        let (t, r) = parse_relation_terms("3*CTB(5) + 3*CTB(11) = pi").unwrap();
        assert_eq!((t, r), (vec![(3, 5), (3, 11)], Some(1)));
        let (t, r) = parse_relation_terms("-CTB(1) - 2*CTB(4) = -2*pi").unwrap();
        assert_eq!((t, r), (vec![(-1, 1), (-2, 4)], Some(-2)));
        assert_eq!(parse_relation_terms("CTB(5) - CTB(11)").unwrap().1, None);
        assert!(parse_relation_terms("CTB(5) = e").is_err());
    }

    #[test]
    fn formulas() {
        let f = parse_formula("BBP(1, 16, 8, (4, 0, 0, -2, -1, -1, 0, 0))").unwrap();
        assert_eq!(f.block, 8);
        let g = parse_formula("9/2^12*BBP(1,2^12,2,(2^11,-1))").unwrap();
        assert_eq!(g.scalar.as_rational().unwrap(), q(9, 4096));
        assert!(parse_formula("BBP(1,16,3,(1,2))").is_err());
    }
}
