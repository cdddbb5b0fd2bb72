//! TOML search configuration with `[[search]]` blocks.

use bbp_core::formulas::{NamedConstant, RadiusSpec};
use bbp_core::search::SearchConfig;
use num_bigint::BigInt;
use serde::Deserialize;

use crate::notation::{parse_integer, parse_polynomial, parse_rational};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    search: Vec<SearchBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum IntLike {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchBlock {
    name: Option<String>,
    minpoly: Option<String>,
    root_interval: Option<[String; 2]>,
    r_rational: Option<String>,
    b: usize,
    #[serde(rename = "N")]
    scale: Option<IntLike>,
    digits: Option<u32>,
    delta: Option<String>,
    targets: Option<Vec<String>>,
    max_last: Option<IntLike>,
    max_count: Option<usize>,
    escalation: Option<Vec<IntLike>>,
    probe_support: Option<usize>,
    residual_threshold: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("config has no [[search]] blocks")]
    Empty,
    #[error("search block {index} ({name}): field `{field}`: {reason}")]
    Field { index: usize, name: String, field: &'static str, reason: String },
}

/// One named search ready to run, plus the block's radius descriptor.
#[derive(Debug, Clone)]
pub struct NamedSearch {
    pub name: String,
    pub config: SearchConfig,
}

fn int_like(v: &IntLike) -> Result<BigInt, String> {
    match v {
        IntLike::Int(i) => Ok(BigInt::from(*i)),
        IntLike::Text(s) => parse_integer(s).map_err(|e| e.to_string()),
    }
}

pub fn parse_config(text: &str) -> Result<Vec<NamedSearch>, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    if file.search.is_empty() {
        return Err(ConfigError::Empty);
    }
    file.search.iter().enumerate().map(|(i, b)| block_to_search(i + 1, b)).collect()
}

fn block_to_search(index: usize, blk: &SearchBlock) -> Result<NamedSearch, ConfigError> {
    let name = blk.name.clone().unwrap_or_else(|| format!("search-{index}"));
    let err = |field: &'static str, reason: String| ConfigError::Field { index, name: name.clone(), field, reason };
    let spec = match (&blk.minpoly, &blk.root_interval, &blk.r_rational) {
        (Some(q), Some([lo, hi]), None) => RadiusSpec::MinPoly {
            q: parse_polynomial(q).map_err(|e| err("minpoly", e.to_string()))?,
            lo: parse_rational(lo).map_err(|e| err("root_interval", e.to_string()))?,
            hi: parse_rational(hi).map_err(|e| err("root_interval", e.to_string()))?,
        },
        (Some(_), None, None) => return Err(err("root_interval", "required with minpoly".into())),
        (None, None, Some(r)) => RadiusSpec::Rational(parse_rational(r).map_err(|e| err("r_rational", e.to_string()))?),
        (None, None, None) => return Err(err("minpoly", "one of minpoly or r_rational is required".into())),
        _ => return Err(err("r_rational", "give either minpoly/root_interval or r_rational".into())),
    };
    let mut cfg = SearchConfig::new(spec, blk.b).map_err(|e| err("b", e.to_string()))?;
    if let Some(n) = &blk.scale {
        cfg.scale = int_like(n).map_err(|e| err("N", e))?;
    }
    cfg.digits = blk.digits;
    if let Some(d) = &blk.delta {
        cfg.delta = parse_rational(d).map_err(|e| err("delta", e.to_string()))?;
    }
    if let Some(ts) = &blk.targets {
        cfg.targets = ts
            .iter()
            .map(|t| t.parse::<NamedConstant>().map_err(|e| err("targets", e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    if let Some(m) = &blk.max_last {
        cfg.max_last = Some(int_like(m).map_err(|e| err("max_last", e))?);
    }
    if let Some(m) = blk.max_count {
        cfg.max_count = m;
    }
    if let Some(list) = &blk.escalation {
        cfg.escalation = list.iter().map(|v| int_like(v).map_err(|e| err("escalation", e))).collect::<Result<_, _>>()?;
    }
    if let Some(p) = blk.probe_support {
        cfg.probe_support = p;
    }
    if let Some(t) = &blk.residual_threshold {
        cfg.residual_threshold = parse_rational(t).map_err(|e| err("residual_threshold", e.to_string()))?;
    }
    cfg.validate().map_err(|e| err("digits", e.to_string()))?;
    Ok(NamedSearch { name, config: cfg })
}
