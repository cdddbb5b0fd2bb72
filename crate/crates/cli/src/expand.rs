//! Relation to single-vector BBP form.

use bbp_core::algebra::ring::RingElement;
use bbp_core::algebra::surd::QuadraticForm;
use bbp_core::formulas::{
    combine, describe_scalar, format_rational, integerize, reduce_block, BbpFormula, CtbTerm,
};
use bbp_core::relation::Relation;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

/// `scale * Σ (u_i / g) CTB(a_i)` written as `coefficient * BBP(1, base, n, A')`,
/// where g is the gcd of the relation's coefficients.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub formula: BbpFormula,
    /// Primitive integer vector A' when the coefficients integerize.
    pub integer_vector: Option<Vec<BigInt>>,
    /// λ with λ A = A' (A being the scaled CTB combination).
    pub lambda: Option<RingElement>,
    /// The multiplier in front of BBP(..., A') (equals 1/λ).
    pub coefficient: Option<RingElement>,
    pub scale: RingElement,
    /// Value of the expanded side: scale * target / g * pi.
    pub value: RingElement,
}

pub fn expand(rel: &Relation, scale: Option<&QuadraticForm>, reduce: bool) -> bbp_core::Result<Expansion> {
    let ring = rel.family.ring();
    let scale = match scale {
        Some(s) => s.to_element(ring)?,
        None => RingElement::one(ring),
    };
    let g = rel.terms.iter().fold(0i64, |acc, &(c, _)| acc.gcd(&c));
    let primitive: Vec<(i64, CtbTerm)> =
        rel.ctb_terms()?.into_iter().map(|(c, t)| (c / g, t)).collect();
    let mut f = combine(&primitive)?;
    let value = scale.scale(&BigRational::new(rel.target.into(), g.into()));
    f.coeffs = f.coeffs.iter().map(|c| c.mul(&scale)).collect::<bbp_core::Result<_>>()?;
    if reduce {
        f = reduce_block(&f)?;
    }
    match integerize(&f) {
        Ok(int) => {
            let g = int.apply(&f)?;
            Ok(Expansion {
                coefficient: Some(g.scalar.clone()),
                formula: g,
                integer_vector: Some(int.coeffs),
                lambda: Some(int.lambda),
                scale,
                value,
            })
        }
        Err(_) => Ok(Expansion { formula: f, integer_vector: None, lambda: None, coefficient: None, scale, value }),
    }
}

impl Expansion {
    /// Value side, e.g. `0`, `pi`, `sqrt(3)*pi`.
    pub fn value_text(&self) -> String {
        if self.value.is_zero() {
            return "0".into();
        }
        match describe_scalar(&self.value).as_str() {
            "1" => "pi".into(),
            "-1" => "-pi".into(),
            t => format!("{t}*pi"),
        }
    }

    pub fn vector_text(&self) -> String {
        match &self.integer_vector {
            Some(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            None => self.formula.coeffs.iter().map(describe_scalar).collect::<Vec<_>>().join(","),
        }
    }

    pub fn base_text(&self) -> String {
        match self.formula.base.as_rational() {
            Some(q) => format_rational(&q),
            None => describe_base(&self.formula.base),
        }
    }

    /// `value = [c*]BBP(1,base,n,(A'))`; null relations drop the multiplier.
    pub fn render(&self, rel: &Relation) -> String {
        let value = self.value_text();
        let coeff = match (&self.coefficient, rel.is_null()) {
            (_, true) | (None, _) => String::new(),
            (Some(c), false) if c.is_one() => String::new(),
            (Some(c), false) => format!("{}*", describe_scalar(c)),
        };
        format!(
            "{value} = {coeff}BBP({},{},{},({}))",
            self.formula.degree,
            self.base_text(),
            self.formula.block,
            self.vector_text()
        )
    }
}

/// Negative quadratic bases print as `-(a + b*sqrt(d))`.
pub fn describe_base(b: &RingElement) -> String {
    if b.embed(20).re.is_negative() {
        format!("-({})", describe_scalar(&b.neg()))
    } else {
        describe_scalar(b)
    }
}
