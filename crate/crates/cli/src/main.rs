use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use bbp_cli::catalog::{certificate_digest, config_hash, Catalog, CatalogEntry};
use bbp_cli::config::parse_config;
use bbp_cli::expand::expand;
use bbp_cli::notation::{parse_formula, parse_polynomial, parse_rational, parse_relation, parse_scalar};
use bbp_cli::{reproduce, sketch};
use bbp_core::formulas::{BbpFormula, CtbFamily, NamedConstant, RadiusSpec};
use bbp_core::relation::{Relation, Status};
use bbp_core::search::{run_search, Source};
use bbp_core::spigot::{extract_digit_values, extract_digits, DigitRequest};
use bbp_core::verify::{verify_with_digits, DEFAULT_DIGITS};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "bbp", version, about = "Search, verify and evaluate BBP-type formulas built from circle triangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every [[search]] block of a TOML config.
    Search {
        config: PathBuf,
        /// Catalog to create or extend.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Worker threads for running blocks.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Exactly verify a relation (exit 2 when refuted).
    Verify {
        #[command(flatten)]
        source: RelationSource,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        digits: u32,
    },
    /// Evaluate a formula or a relation's single-formula form.
    Eval {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Digits of a formula value starting at a 1-indexed position.
    Digits {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 1)]
        position: u64,
        #[arg(long, default_value_t = 8)]
        count: u32,
    },
    /// Rewrite a relation as one BBP formula with an integer vector.
    Expand {
        #[command(flatten)]
        source: RelationSource,
        /// Multiply both sides first, e.g. `3*sqrt(3)`.
        #[arg(long)]
        scale: Option<String>,
        /// Compress to the smallest geometric block.
        #[arg(long)]
        reduce: bool,
    },
    /// Draw the triangles of a relation as SVG.
    Sketch {
        #[command(flatten)]
        source: RelationSource,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Re-run the built-in count tables.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: u8,
    },
}

#[derive(Args)]
struct RelationSource {
    /// Relation in CTB notation, e.g. `CTB(5) - CTB(11) = 0`.
    #[arg(long, requires = "b", conflicts_with_all = ["catalog", "id"])]
    relation: Option<String>,
    /// Rational radius r.
    #[arg(long, conflicts_with = "minpoly")]
    r: Option<String>,
    /// Minimal polynomial of r in y.
    #[arg(long, requires = "interval")]
    minpoly: Option<String>,
    /// Isolating interval for r.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    interval: Option<Vec<String>>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, requires = "id")]
    catalog: Option<PathBuf>,
    #[arg(long, requires = "catalog")]
    id: Option<String>,
}

#[derive(Args)]
struct FormulaInput {
    /// `[c*]BBP(d, base, n, (a_1, ..., a_n))` with an integer base.
    #[arg(long, conflicts_with = "relation")]
    formula: Option<String>,
    #[command(flatten)]
    source: RelationSource,
}

/// A relation together with its stored catalog entry, if any.
struct Resolved {
    relation: Relation,
    entry: Option<CatalogEntry>,
}

impl RelationSource {
    fn family(&self) -> anyhow::Result<Arc<CtbFamily>> {
        let b = self.b.ok_or_else(|| anyhow!("--b is required"))?;
        let spec = match (&self.r, &self.minpoly, &self.interval) {
            (Some(r), None, _) => RadiusSpec::Rational(parse_rational(r)?),
            (None, Some(q), Some(iv)) => {
                RadiusSpec::MinPoly { q: parse_polynomial(q)?, lo: parse_rational(&iv[0])?, hi: parse_rational(&iv[1])? }
            }
            _ => bail!("give --r or --minpoly with --interval"),
        };
        Ok(CtbFamily::new(spec, b)?)
    }

    fn is_given(&self) -> bool {
        self.relation.is_some() || self.id.is_some()
    }

    fn resolve(&self) -> anyhow::Result<Resolved> {
        if let (Some(path), Some(id)) = (&self.catalog, &self.id) {
            let cat = Catalog::load(path).with_context(|| format!("reading {}", path.display()))?;
            let entry = cat.find(id).ok_or_else(|| anyhow!("no entry with id `{id}` in {}", path.display()))?.clone();
            return Ok(Resolved { relation: entry.relation()?, entry: Some(entry) });
        }
        let text = self.relation.as_ref().ok_or_else(|| anyhow!("give --relation or --catalog with --id"))?;
        Ok(Resolved { relation: parse_relation(text, &self.family()?)?, entry: None })
    }
}

impl FormulaInput {
    fn formula(&self) -> anyhow::Result<BbpFormula> {
        if let Some(f) = &self.formula {
            return Ok(parse_formula(f)?);
        }
        if !self.source.is_given() {
            bail!("give --formula, --relation or --catalog with --id");
        }
        let rel = self.source.resolve()?.relation;
        Ok(expand(&rel, None, false)?.formula)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Search { config, catalog, jobs } => cmd_search(&config, catalog.as_deref(), jobs),
        Command::Verify { source, digits } => cmd_verify(&source, digits),
        Command::Eval { input, digits } => {
            let f = input.formula()?;
            println!("{}", f.eval_series(digits)?.to_decimal(digits));
            Ok(ExitCode::SUCCESS)
        }
        Command::Digits { input, position, count } => {
            let f = input.formula()?;
            let req = DigitRequest { formula: &f, position, count };
            match extract_digits(&req) {
                Ok(d) => println!("{d}"),
                Err(_) if f.base.as_rational().is_some() => {
                    let values = extract_digit_values(&req)?;
                    println!("{}", values.iter().map(u64::to_string).collect::<Vec<_>>().join(" "));
                }
                Err(e) => return Err(e.into()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Expand { source, scale, reduce } => {
            let rel = source.resolve()?.relation;
            let scale = scale.as_deref().map(parse_scalar).transpose()?;
            let exp = expand(&rel, scale.as_ref(), reduce)?;
            println!("{rel}");
            match &exp.lambda {
                Some(l) => println!("lambda = {}", bbp_core::formulas::describe_scalar(l)),
                None => println!("lambda = none (coefficients do not integerize)"),
            }
            println!("{}", exp.render(&rel));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sketch { source, out } => {
            let rel = source.resolve()?.relation;
            std::fs::write(&out, sketch::render(&rel)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce { table } => {
            let rows = if table == 1 { reproduce::table1() } else { reproduce::table2() };
            let results = reproduce::run_table(&rows)?;
            print!("{}", reproduce::render(table, &results));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_verify(source: &RelationSource, digits: u32) -> anyhow::Result<ExitCode> {
    let resolved = source.resolve()?;
    let cert = verify_with_digits(&resolved.relation, digits)?;
    println!("{cert}");
    if let Some(r) = &cert.residual {
        println!("residual <= {}", bbp_core::formulas::format_rational(&r.abs_upper()));
    }
    let digest = certificate_digest(&cert);
    println!("digest {digest}");
    if let Some(entry) = &resolved.entry {
        let same = entry.certificate.digest == digest;
        println!("catalog digest {}", if same { "matches" } else { "differs" });
    }
    Ok(if cert.status == Status::Refuted { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_search(config: &std::path::Path, catalog_path: Option<&std::path::Path>, jobs: usize) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let searches = parse_config(&text).map_err(|e| anyhow!("{}: {e}", config.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let reports = pool.install(|| {
        searches.par_iter().map(|s| run_search(&s.config).map(|r| (s, r))).collect::<Result<Vec<_>, _>>()
    })?;

    let mut catalog = match catalog_path {
        Some(p) if p.exists() => Catalog::load(p)?,
        _ => Catalog::new(Vec::new()),
    };
    let hash = config_hash(&text);
    if !catalog.config_hashes.contains(&hash) {
        catalog.config_hashes.push(hash);
    }
    let mut added = 0;
    for (s, rep) in &reports {
        let has_pi = s.config.targets.contains(&NamedConstant::Pi);
        println!(
            "== {} (r = {}, b = {}, N = {}, digits = {}, delta = {}) ==",
            s.name,
            s.config.family.spec(),
            s.config.family.b(),
            rep.scales.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
            rep.digits,
            rep.delta
        );
        println!(
            "{} independent null formulas, {} integer null formulas{}; {} candidates in {:.2?}",
            rep.null_count(),
            rep.integer_null_count(),
            if has_pi { format!(", {} pi formulas", rep.target_count()) } else { String::new() },
            rep.candidates_examined,
            rep.elapsed
        );
        for f in rep.verified() {
            let tag = match (f.source, f.independent) {
                (Source::Main, true) => "",
                (Source::Probe, true) => "  [probe]",
                (_, false) => "  [dependent]",
            };
            println!("  {}{tag}", f.relation());
            let entry = CatalogEntry::from_certificate(&f.certificate)?;
            if catalog.insert(entry) {
                added += 1;
            }
        }
    }
    if let Some(p) = catalog_path {
        catalog.save(p)?;
        println!("catalog {}: {} entries ({added} new)", p.display(), catalog.entries.len());
    }
    Ok(ExitCode::SUCCESS)
}
