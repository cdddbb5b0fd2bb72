use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::formulas::{combine, BbpFormula, CtbFamily, CtbTerm};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Candidate,
    Verified,
    Refuted,
    Unverified,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Candidate => "candidate",
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Unverified => "unverified",
        }
    }
}

impl std::str::FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "candidate" => Ok(Status::Candidate),
            "verified" => Ok(Status::Verified),
            "refuted" => Ok(Status::Refuted),
            "unverified" => Ok(Status::Unverified),
            other => Err(Error::Invalid(format!("unknown status `{other}`"))),
        }
    }
}

/// Search parameters a relation was found with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub scale: BigInt,
    pub digits: u32,
    pub delta: BigRational,
}

/// Σ coeff_a · x_a = target · π over the CTB terms of one family,
/// where x_a = arg(1 + r e^{2πia/b}).
#[derive(Clone, Debug)]
pub struct Relation {
    pub family: Arc<CtbFamily>,
    /// (coefficient, a) with nonzero coefficients and strictly increasing a.
    pub terms: Vec<(i64, usize)>,
    pub target: i64,
    pub status: Status,
    pub provenance: Option<Provenance>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.family.same_as(&other.family)
            && self.terms == other.terms
            && self.target == other.target
            && self.status == other.status
            && self.provenance == other.provenance
    }
}

impl Relation {
    pub fn new(family: &Arc<CtbFamily>, terms: &[(i64, usize)], target: i64) -> Result<Self> {
        let half = family.b() / 2;
        let mut dense = vec![0i64; half];
        for &(c, a) in terms {
            if a == 0 || a >= half {
                return Err(Error::IndexOutOfRange { a, b: family.b() });
            }
            dense[a] = dense[a]
                .checked_add(c)
                .ok_or_else(|| Error::Invalid("coefficient overflow".into()))?;
        }
        let terms: Vec<(i64, usize)> =
            dense.iter().enumerate().filter(|(_, &c)| c != 0).map(|(a, &c)| (c, a)).collect();
        if terms.is_empty() {
            return Err(Error::Invalid("relation has no nonzero CTB coefficient".into()));
        }
        Ok(Relation { family: family.clone(), terms, target, status: Status::Candidate, provenance: None })
    }

    /// Builds a relation from a dense vector over a = 1 .. b/2 - 1 and the
    /// π coefficient v of Σ u_a x_a + v π = 0.
    pub fn from_lattice_vector(family: &Arc<CtbFamily>, coeffs: &[i64], pi_coeff: i64) -> Result<Self> {
        let terms: Vec<(i64, usize)> = coeffs.iter().enumerate().map(|(i, &c)| (c, i + 1)).collect();
        Relation::new(family, &terms, -pi_coeff)
    }

    /// Sign-normalized copy: the first coefficient is positive.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        if out.terms[0].0 < 0 {
            out.terms.iter_mut().for_each(|t| t.0 = -t.0);
            out.target = -out.target;
        }
        out
    }

    pub fn is_null(&self) -> bool {
        self.target == 0
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    /// Dense vector (u_1, ..., u_{b/2-1}, -target).
    pub fn dense(&self) -> Vec<i64> {
        let half = self.family.b() / 2;
        let mut v = vec![0i64; half];
        for &(c, a) in &self.terms {
            v[a - 1] = c;
        }
        v[half - 1] = -self.target;
        v
    }

    pub fn norm2(&self) -> i128 {
        self.dense().iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    pub fn ctb_terms(&self) -> Result<Vec<(i64, CtbTerm)>> {
        self.terms.iter().map(|&(c, a)| Ok((c, CtbTerm::new(&self.family, a)?))).collect()
    }

    /// The single formula Σ coeff · CTB(a); its value is target · π.
    pub fn formula(&self) -> Result<BbpFormula> {
        combine(&self.ctb_terms()?)
    }
}

impl fmt::Display for Relation {
    /// CTB notation, e.g. `3*CTB(5) + 3*CTB(11) = pi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(c, a)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            let sign = match (i, c < 0) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            if mag == 1 {
                write!(f, "{sign}CTB({a})")?;
            } else {
                write!(f, "{sign}{mag}*CTB({a})")?;
            }
        }
        match self.target {
            0 => write!(f, " = 0"),
            1 => write!(f, " = pi"),
            -1 => write!(f, " = -pi"),
            t => write!(f, " = {t}*pi"),
        }
    }
}
