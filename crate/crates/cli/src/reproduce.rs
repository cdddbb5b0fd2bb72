//! Built-in searches behind the two count tables.

use bbp_core::algebra::poly::Polynomial;
use bbp_core::formulas::RadiusSpec;
use bbp_core::search::{run_search, SearchConfig, SearchReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Count {
    /// Independent nulls that integerize.
    IntegerNulls,
    /// Independent nulls.
    Nulls,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub label: &'static str,
    pub radius: RadiusSpec,
    pub b: usize,
    pub exponent: u32,
    pub reference: usize,
    pub count: Count,
}

#[derive(Debug)]
pub struct RowResult {
    pub row: Row,
    pub recovered: usize,
    pub report: SearchReport,
}

impl RowResult {
    pub fn matches(&self) -> bool {
        self.recovered == self.row.reference
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Root of `coeffs` (ascending) in [lo, hi] / 1000.
fn root(coeffs: &[i64], lo: i64, hi: i64) -> RadiusSpec {
    RadiusSpec::MinPoly { q: Polynomial::from_ints(coeffs), lo: q(lo, 1000), hi: q(hi, 1000) }
}

pub fn table1() -> Vec<Row> {
    let sqrt_half = || root(&[-1, 0, 2], 700, 710);
    let row = |label, radius, b, reference| Row { label, radius, b, exponent: 10, reference, count: Count::IntegerNulls };
    vec![
        row("2^4", sqrt_half(), 8, 0),
        row("2^6", RadiusSpec::Rational(q(1, 2)), 6, 0),
        row("2^12", sqrt_half(), 24, 1),
        row("2^20", sqrt_half(), 40, 1),
        row("3^6", root(&[-1, 0, 3], 570, 580), 12, 1),
    ]
}

/// r is the reciprocal of the Pisot root, so each radius polynomial is the
/// reversal of the listed one.
pub fn table2() -> Vec<Row> {
    let row = |label, radius, b, exponent, reference| Row { label, radius, b, exponent, reference, count: Count::Nulls };
    vec![
        row("x^2-x-1", root(&[-1, 1, 1], 610, 620), 60, 10, 12),
        row("x^2-2x-2", root(&[-1, 2, 2], 360, 370), 60, 10, 1),
        row("x^2-2x-1", root(&[-1, 2, 1], 410, 420), 60, 10, 0),
        row("x^2-3x+1", root(&[1, -3, 1], 380, 390), 60, 10, 2),
        row("x^2-3x+1", root(&[1, -3, 1], 380, 390), 60, 15, 4),
        row("x^2-3x-1", root(&[-1, 3, 1], 300, 310), 60, 10, 0),
        row("x^2-4x+2", root(&[1, -4, 2], 290, 300), 60, 10, 0),
        row("x^3-x-1", root(&[-1, 0, 1, 1], 750, 760), 60, 10, 3),
        row("x^4-x^3-1", root(&[-1, 1, 0, 0, 1], 720, 730), 24, 10, 1),
    ]
}

pub fn run_row(row: &Row) -> anyhow::Result<RowResult> {
    let cfg = SearchConfig::new(row.radius.clone(), row.b)?.with_scale(BigInt::from(10).pow(row.exponent));
    let report = run_search(&cfg)?;
    let recovered = match row.count {
        Count::IntegerNulls => report.integer_null_count(),
        Count::Nulls => report.null_count(),
    };
    Ok(RowResult { row: row.clone(), recovered, report })
}

pub fn run_table(rows: &[Row]) -> anyhow::Result<Vec<RowResult>> {
    rows.par_iter().map(run_row).collect()
}

pub fn render(table: u8, results: &[RowResult]) -> String {
    let mut out = String::new();
    let title = match table {
        1 => "Null formulas in integer bases (integer coefficients only)",
        _ => "Null formulas in Pisot bases (r = 1/root)",
    };
    out.push_str(title);
    out.push('\n');
    out.push_str(&format!("{:<12} {:>4} {:>6} {:>9} {:>9}  {}\n", "row", "b", "N", "expected", "recovered", ""));
    for r in results {
        out.push_str(&format!(
            "{:<12} {:>4} {:>6} {:>9} {:>9}  {}\n",
            r.row.label,
            r.row.b,
            format!("10^{}", r.row.exponent),
            r.row.reference,
            r.recovered,
            if r.matches() { "match" } else { "MISMATCH" }
        ));
    }
    out
}
