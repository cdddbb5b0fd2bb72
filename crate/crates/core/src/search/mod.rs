//! Lattice search for relations among CTB arguments and π.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::formulas::{arg_eval, integerize, CtbFamily, NamedConstant, RadiusSpec};
use crate::lattice::{build_relation_lattice, extract_candidates, lll_reduce, residual_bound};
use crate::relation::{Provenance, Relation, Status};
use crate::verify::{verify_exact, Certificate};

/// Parameters of one search over a fixed (r, b).
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: Arc<CtbFamily>,
    pub scale: BigInt,
    /// Evaluation precision; derived from the scale when absent.
    pub digits: Option<u32>,
    pub delta: BigRational,
    pub targets: Vec<NamedConstant>,
    /// Largest admissible |last coordinate|; ⌊N^{1/4}⌋ when absent.
    pub max_last: Option<BigInt>,
    pub max_count: usize,
    /// Further scales whose findings are merged into the report.
    pub escalation: Vec<BigInt>,
    /// Largest number of CTB terms in a target probe lattice.
    pub probe_support: usize,
    pub residual_threshold: BigRational,
}

impl SearchConfig {
    pub fn new(spec: RadiusSpec, b: usize) -> Result<Self> {
        Ok(SearchConfig {
            family: CtbFamily::new(spec, b)?,
            scale: BigInt::from(10u64.pow(10)),
            digits: None,
            delta: BigRational::new(19.into(), 20.into()),
            targets: vec![NamedConstant::Pi],
            max_last: None,
            max_count: 32,
            escalation: Vec::new(),
            probe_support: 2,
            residual_threshold: BigRational::new(1.into(), 1_000_000.into()),
        })
    }

    pub fn with_scale(mut self, scale: BigInt) -> Self {
        self.scale = scale;
        self
    }

    pub fn without_targets(mut self) -> Self {
        self.targets.clear();
        self
    }

    pub fn digits_for(&self, scale: &BigInt) -> u32 {
        self.digits.unwrap_or_else(|| 3 + decimal_ceil_log(scale) + 10)
    }

    pub fn max_last_for(&self, scale: &BigInt) -> BigInt {
        self.max_last.clone().unwrap_or_else(|| scale.nth_root(4))
    }

    pub fn validate(&self) -> Result<()> {
        for n in std::iter::once(&self.scale).chain(&self.escalation) {
            if n < &BigInt::from(2) {
                return Err(Error::Invalid("scale N must be at least 2".into()));
            }
            // 10^-digits * N < 1/2
            let digits = self.digits_for(n);
            if BigInt::from(2) * n >= BigInt::from(10).pow(digits) {
                return Err(Error::Invalid(format!("digits {digits} too small for N = {n}")));
            }
        }
        let quarter = BigRational::new(1.into(), 4.into());
        if self.delta <= quarter || self.delta >= BigRational::from_integer(1.into()) {
            return Err(Error::InvalidDelta);
        }
        Ok(())
    }
}

fn decimal_ceil_log(n: &BigInt) -> u32 {
    let mut p = BigInt::from(1);
    let mut k = 0;
    while &p < n {
        p *= 10;
        k += 1;
    }
    k
}

/// x_a = arg(1 + r ζ_b^a) for a = 1 .. b/2 - 1, followed by the targets.
pub fn compute_xs(cfg: &SearchConfig, digits: u32) -> Vec<BigReal> {
    let fam = &cfg.family;
    let mut xs: Vec<BigReal> = fam.search_indices().into_par_iter().map(|a| arg_eval(fam, a, digits)).collect();
    xs.extend(cfg.targets.iter().map(|t| t.eval(digits)));
    xs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Reduction of the full lattice.
    Main,
    /// A small lattice over a few CTB terms and π.
    Probe,
}

#[derive(Clone, Debug)]
pub struct Finding {
    pub certificate: Certificate,
    pub source: Source,
    /// Verified and not in the span of earlier verified findings.
    pub independent: bool,
    /// The combined formula has a rational multiple of integer coefficients.
    pub integerizable: bool,
}

impl Finding {
    pub fn relation(&self) -> &Relation {
        &self.certificate.relation
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub family: Arc<CtbFamily>,
    pub scales: Vec<BigInt>,
    pub digits: u32,
    pub delta: BigRational,
    pub findings: Vec<Finding>,
    pub candidates_examined: usize,
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn verified(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.certificate.status == Status::Verified)
    }

    pub fn independent(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.independent)
    }

    /// Independent verified relations with value 0.
    pub fn null_count(&self) -> usize {
        self.independent().filter(|f| f.relation().is_null()).count()
    }

    /// Independent verified null relations whose formula integerizes.
    pub fn integer_null_count(&self) -> usize {
        self.independent().filter(|f| f.relation().is_null() && f.integerizable).count()
    }

    /// Independent verified relations with a nonzero multiple of π.
    pub fn target_count(&self) -> usize {
        self.independent().filter(|f| !f.relation().is_null()).count()
    }
}

fn lattice_candidates(
    xs: &[BigReal],
    scale: &BigInt,
    delta: &BigRational,
    max_last: &BigInt,
    max_count: usize,
    threshold: &BigRational,
) -> Result<Vec<Vec<i64>>> {
    let lat = build_relation_lattice(xs, scale)?;
    let red = lll_reduce(&lat.rows, delta)?;
    Ok(extract_candidates(&red.basis, max_last, max_count)
        .into_iter()
        .filter(|c| &residual_bound(c, scale, &lat.epsilon) < threshold)
        .filter_map(|c| c.coeffs.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>())
        .collect())
}

fn supports(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Candidate relations at one scale, as (relation, source).
fn candidates_at(cfg: &SearchConfig, scale: &BigInt) -> Result<(Vec<(Relation, Source)>, usize)> {
    let digits = cfg.digits_for(scale);
    let xs = compute_xs(cfg, digits);
    let n = cfg.family.search_indices().len();
    let with_pi = cfg.targets.contains(&NamedConstant::Pi);
    let max_last = cfg.max_last_for(scale);
    let prov = Provenance { scale: scale.clone(), digits, delta: cfg.delta.clone() };
    let to_relation = |dense: &[i64], pi: i64| -> Option<Relation> {
        Relation::from_lattice_vector(&cfg.family, dense, pi)
            .ok()
            .map(|r| r.canonical().with_provenance(prov.clone()))
    };

    let mut out = Vec::new();
    let mut examined = 0;
    let main_xs: Vec<BigReal> = if with_pi { xs.clone() } else { xs[..n].to_vec() };
    for v in lattice_candidates(&main_xs, scale, &cfg.delta, &max_last, cfg.max_count, &cfg.residual_threshold)? {
        examined += 1;
        let pi = if with_pi { v[n] } else { 0 };
        if let Some(r) = to_relation(&v[..n], pi) {
            out.push((r, Source::Main));
        }
    }

    if with_pi {
        let pi_x = xs[n].clone();
        let subsets: Vec<Vec<usize>> = (1..=cfg.probe_support.min(n)).flat_map(|k| supports(n, k)).collect();
        let probed: Vec<Vec<(Vec<i64>, i64)>> = subsets
            .par_iter()
            .map(|s| {
                let mut sub: Vec<BigReal> = s.iter().map(|&i| xs[i].clone()).collect();
                sub.push(pi_x.clone());
                let found = lattice_candidates(&sub, scale, &cfg.delta, &max_last, cfg.max_count, &cfg.residual_threshold)
                    .unwrap_or_default();
                found
                    .into_iter()
                    .filter(|v| v[s.len()] != 0)
                    .map(|v| {
                        let mut dense = vec![0i64; n];
                        for (k, &i) in s.iter().enumerate() {
                            dense[i] = v[k];
                        }
                        (dense, v[s.len()])
                    })
                    .collect()
            })
            .collect();
        for (dense, pi) in probed.into_iter().flatten() {
            examined += 1;
            if let Some(r) = to_relation(&dense, pi) {
                out.push((r, Source::Probe));
            }
        }
    }
    Ok((out, examined))
}

/// Runs the full pipeline: evaluate, reduce, filter, verify, deduplicate.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let start = Instant::now();
    let scales: Vec<BigInt> = std::iter::once(cfg.scale.clone()).chain(cfg.escalation.iter().cloned()).collect();

    let mut seen = HashSet::new();
    let mut pending = Vec::new();
    let mut examined = 0;
    for scale in &scales {
        let (cands, count) = candidates_at(cfg, scale)?;
        examined += count;
        for (rel, src) in cands {
            if seen.insert((rel.dense(), rel.target)) {
                pending.push((rel, src));
            }
        }
    }

    let certified: Vec<(Certificate, Source)> = pending
        .par_iter()
        .map(|(rel, src)| verify_exact(rel).map(|c| (c, *src)))
        .collect::<Result<_>>()?;

    let mut findings: Vec<Finding> = certified
        .into_iter()
        .map(|(certificate, source)| {
            let integerizable = certificate.status == Status::Verified
                && certificate.relation.is_null()
                && certificate.relation.formula().ok().is_some_and(|f| integerize(&f).is_ok());
            Finding { certificate, source, independent: false, integerizable }
        })
        .collect();
    findings.sort_by(|a, b| rank_key(a.relation()).cmp(&rank_key(b.relation())));

    let mut span = RowSpan::default();
    for f in findings.iter_mut().filter(|f| f.certificate.status == Status::Verified) {
        f.independent = span.insert(&f.relation().dense());
    }

    Ok(SearchReport {
        family: cfg.family.clone(),
        scales: scales.clone(),
        digits: cfg.digits_for(&cfg.scale),
        delta: cfg.delta.clone(),
        findings,
        candidates_examined: examined,
        elapsed: start.elapsed(),
    })
}

/// Nulls before targets, then by squared norm, then lexicographically.
fn rank_key(r: &Relation) -> (bool, i128, Vec<i64>) {
    (!r.is_null(), r.norm2(), r.dense())
}

/// Keeps a maximal linearly independent subset, preferring nulls, small
/// norms and lexicographically smaller vectors.
pub fn dedup(rels: &[Relation]) -> Vec<Relation> {
    let mut sorted: Vec<&Relation> = rels.iter().collect();
    sorted.sort_by_key(|r| rank_key(r));
    let mut span = RowSpan::default();
    sorted.into_iter().filter(|r| span.insert(&r.dense())).cloned().collect()
}

/// Incremental exact row echelon form over the rationals.
#[derive(Default, Clone, Debug)]
pub struct RowSpan {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl RowSpan {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The vector reduced against the current echelon rows.
    fn reduce(&self, v: &[i64]) -> Vec<BigRational> {
        let mut w: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = &w[*p] / &row[*p];
            for (a, b) in w.iter_mut().zip(row) {
                *a -= &f * b;
            }
        }
        w
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; false when it already lies in the span.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let w = self.reduce(v);
        match w.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}
