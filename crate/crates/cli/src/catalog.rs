//! JSON catalog of verified relations.

use std::path::Path;

use bbp_core::formulas::{describe_scalar, format_rational, CtbFamily, RadiusSpec};
use bbp_core::relation::{Relation, Status};
use bbp_core::verify::Certificate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

use crate::expand::{describe_base, expand};
use crate::notation::{parse_polynomial, parse_rational, parse_relation};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusRecord {
    Rational { r: String },
    Minpoly { q: String, interval: [String; 2] },
}

impl RadiusRecord {
    pub fn from_spec(spec: &RadiusSpec) -> Self {
        match spec {
            RadiusSpec::Rational(r) => RadiusRecord::Rational { r: r.to_string() },
            RadiusSpec::MinPoly { q, lo, hi } => {
                RadiusRecord::Minpoly { q: q.to_string(), interval: [lo.to_string(), hi.to_string()] }
            }
        }
    }

    pub fn to_spec(&self) -> anyhow::Result<RadiusSpec> {
        Ok(match self {
            RadiusRecord::Rational { r } => RadiusSpec::Rational(parse_rational(r)?),
            RadiusRecord::Minpoly { q, interval } => RadiusSpec::MinPoly {
                q: parse_polynomial(q)?,
                lo: parse_rational(&interval[0])?,
                hi: parse_rational(&interval[1])?,
            },
        })
    }

    fn key(&self) -> String {
        match self {
            RadiusRecord::Rational { r } => format!("r={r}"),
            RadiusRecord::Minpoly { q, interval } => format!("q={q};[{},{}]", interval[0], interval[1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaRecord {
    pub degree: u32,
    /// |base| as an exact string.
    pub base: String,
    pub base_sign: i8,
    pub block: usize,
    pub vector: Vec<String>,
    /// λ with λ·A = vector, when A integerizes.
    pub lambda: Option<String>,
    /// Multiplier in front of BBP(..., vector).
    pub coefficient: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub conductor: u64,
    pub real_modulus: Option<String>,
    pub proven_field: bool,
    pub realness: String,
    pub winding: Option<i64>,
    pub digits: u32,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceRecord {
    #[serde(rename = "N")]
    pub scale: String,
    pub digits: u32,
    pub delta: String,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub id: String,
    pub radius: RadiusRecord,
    pub b: usize,
    pub relation: String,
    /// (coefficient, a) pairs.
    pub coefficients: Vec<(i64, usize)>,
    pub target: i64,
    pub formula: FormulaRecord,
    pub status: String,
    pub certificate: CertificateRecord,
    pub provenance: Option<ProvenanceRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    pub schema_version: u32,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub created: String,
    pub config_hashes: Vec<String>,
    pub entries: Vec<CatalogEntry>,
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn config_hash(text: &str) -> String {
    sha256_hex(text)
}

/// Digest over everything the exact check established.
pub fn certificate_digest(c: &Certificate) -> String {
    let coords = |e: &bbp_core::algebra::ring::RingElement| {
        e.coords().iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
    };
    sha256_hex(&format!(
        "{c}|{}|{:?}|{}|{}|{}",
        c.digits,
        c.sign,
        c.proven_field,
        coords(&c.lhs),
        coords(&c.rhs)
    ))
}

pub fn entry_id(radius: &RadiusRecord, b: usize, relation: &str) -> String {
    sha256_hex(&format!("{}|b={b}|{relation}", radius.key()))[..16].to_string()
}

impl CatalogEntry {
    pub fn from_certificate(cert: &Certificate) -> anyhow::Result<Self> {
        let rel = cert.relation.canonical();
        let radius = RadiusRecord::from_spec(rel.family.spec());
        let relation = rel.to_string();
        let exp = expand(&rel, None, true)?;
        let base = &exp.formula.base;
        let negative = base.embed(20).re.is_negative();
        let magnitude = if negative { base.neg() } else { base.clone() };
        let formula = FormulaRecord {
            degree: exp.formula.degree,
            base: match magnitude.as_rational() {
                Some(q) => format_rational(&q),
                None => describe_base(&magnitude),
            },
            base_sign: if negative { -1 } else { 1 },
            block: exp.formula.block,
            vector: match &exp.integer_vector {
                Some(v) => v.iter().map(|x| x.to_string()).collect(),
                None => exp.formula.coeffs.iter().map(describe_scalar).collect(),
            },
            lambda: exp.lambda.as_ref().map(describe_scalar),
            coefficient: exp.coefficient.as_ref().map(describe_scalar),
        };
        let certificate = CertificateRecord {
            conductor: cert.conductor,
            real_modulus: cert.real_modulus.clone(),
            proven_field: cert.proven_field,
            realness: cert.realness.as_str().to_string(),
            winding: cert.winding,
            digits: cert.digits,
            digest: certificate_digest(cert),
        };
        let provenance = rel.provenance.as_ref().map(|p| ProvenanceRecord {
            scale: p.scale.to_string(),
            digits: p.digits,
            delta: p.delta.to_string(),
            tool_version: TOOL_VERSION.to_string(),
        });
        Ok(CatalogEntry {
            id: entry_id(&radius, rel.family.b(), &relation),
            radius,
            b: rel.family.b(),
            coefficients: rel.terms.clone(),
            target: rel.target,
            relation,
            formula,
            status: cert.status.as_str().to_string(),
            certificate,
            provenance,
        })
    }

    pub fn family(&self) -> anyhow::Result<Arc<CtbFamily>> {
        Ok(CtbFamily::new(self.radius.to_spec()?, self.b)?)
    }

    /// Re-parses the stored relation text.
    pub fn relation(&self) -> anyhow::Result<Relation> {
        let rel = parse_relation(&self.relation, &self.family()?)?;
        Ok(rel.with_status(self.status.parse::<Status>()?))
    }
}

impl Catalog {
    pub fn new(config_hashes: Vec<String>) -> Self {
        let created = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string();
        Catalog {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            created,
            config_hashes,
            entries: Vec::new(),
        }
    }

    /// Adds an entry unless one with the same id exists; returns whether it was added.
    pub fn insert(&mut self, entry: CatalogEntry) -> bool {
        if self.entries.iter().any(|e| e.id == entry.id) {
            return false;
        }
        self.entries.push(entry);
        true
    }

    pub fn find(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id || (id.len() >= 4 && e.id.starts_with(id)))
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let c: Catalog = serde_json::from_str(text)?;
        if c.schema_version != SCHEMA_VERSION {
            anyhow::bail!("unsupported catalog schema_version {}", c.schema_version);
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
