//! The `sylowlab` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 computation budget
//! exceeded, 3 internal invariant violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{require_prime, v2};
use crate::cache::{ResultCache, CACHE_ENV};
use crate::dsl::{parse, EvalBudget, StatementProperty};
use crate::families::FamilySpec;
use crate::harness::{evaluate_family, prufer_check};
use crate::matrix::{gl2_order, Gl2};
use crate::report::{Format, Report};
use crate::sylow::{conjugacy_witness, find_sylow, sylow_order, sylow_report};
use crate::volvachev::{classify_conjugacy, volvachev_finite};
use crate::{Error, Result, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Extra seeds, after `--seed`, used to cross-check Sylow conjugacy.
const CONJUGACY_SEEDS: u64 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sylowlab",
    version,
    about = "Sylow 2-subgroups of GL2(F_p) along families of primes"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// JSON-lines result cache.
    #[arg(long, env = CACHE_ENV, global = true)]
    pub cache: Option<PathBuf>,

    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKindArg {
    #[value(name = "I")]
    I,
    #[value(name = "J")]
    J,
    #[value(name = "staircase")]
    Staircase,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List family members with v2(p-1) and v2(p+1).
    Families {
        #[arg(long, value_enum)]
        kind: FamilyKindArg,
        #[arg(long = "N", value_name = "N")]
        n: Option<u32>,
        #[arg(long)]
        limit: u64,
    },
    /// Sylow ell-order of GL2(F_p), optionally by construction.
    Sylow {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        enumerate: bool,
    },
    /// V1, V2, V3 for F_p.
    Volvachev {
        #[arg(long)]
        p: u64,
    },
    /// Evaluate a statement along a family and aggregate a verdict.
    Evidence {
        #[arg(long)]
        family: String,
        #[arg(long)]
        stmt: String,
        #[arg(long)]
        limit: u64,
    },
    /// Classify Sylow 2-conjugacy over the family's limit field.
    Conjugacy {
        #[arg(long)]
        family: String,
        #[arg(long)]
        limit: u64,
    },
    /// Element-order counts in C_{p^i}.
    Prufer {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        levels: u32,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else if e.is_invariant() {
        EXIT_INVARIANT
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first), runs the command, writes the report.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli, err).and_then(|r| r.render(cli.format));
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn base_report(cli: &Cli, command: &str, columns: &[&str]) -> Report {
    let mut r = Report::new(command, columns);
    r.meta("tool_version", TOOL_VERSION).meta("seed", cli.seed);
    r
}

pub fn execute(cli: &Cli, err: &mut dyn Write) -> Result<Report> {
    match &cli.command {
        Command::Families { kind, n, limit } => families(cli, *kind, *n, *limit, err),
        Command::Sylow { p, ell, enumerate } => sylow(cli, *p, *ell, *enumerate),
        Command::Volvachev { p } => volvachev(cli, *p),
        Command::Evidence {
            family,
            stmt,
            limit,
        } => evidence(cli, family, stmt, *limit, err),
        Command::Conjugacy { family, limit } => conjugacy(cli, family, *limit),
        Command::Prufer { p, levels } => prufer(cli, *p, *levels),
    }
}

fn families(
    cli: &Cli,
    kind: FamilyKindArg,
    n: Option<u32>,
    limit: u64,
    err: &mut dyn Write,
) -> Result<Report> {
    let family = match (kind, n) {
        (FamilyKindArg::J, Some(n)) => FamilySpec::family_j(n)?,
        (FamilyKindArg::J, None) => {
            return Err(Error::InvalidArgument("--kind J requires --N".into()))
        }
        (_, Some(_)) => {
            return Err(Error::InvalidArgument(
                "--N applies only to --kind J".into(),
            ))
        }
        (FamilyKindArg::I, None) => FamilySpec::family_i(),
        (FamilyKindArg::Staircase, None) => FamilySpec::staircase(),
    };
    let members = family.members(limit)?;
    if members.is_empty() {
        let _ = writeln!(err, "warning: family {family} has no members ≤ {limit}");
    }
    let mut r = base_report(cli, "families", &["p", "v2_p_minus_1", "v2_p_plus_1"]);
    r.meta("family", family.to_string())
        .meta("limit", limit)
        .meta("count", members.len());
    for m in members {
        let p = m.p as u128;
        r.row(vec![json!(m.p), json!(v2(p - 1)), json!(v2(p + 1))]);
    }
    Ok(r)
}

fn sylow(cli: &Cli, p: u64, ell: u64, enumerate: bool) -> Result<Report> {
    require_prime(p)?;
    require_prime(ell)?;
    let order = gl2_order(p)?;
    let mut r = base_report(cli, "sylow", &["element", "order"]);
    r.meta("p", p)
        .meta("ell", ell)
        .meta("group_order", order.to_string());
    r.meta("sylow_order", sylow_order(order, ell)?.to_string());
    r.meta("enumerated", enumerate);
    if !enumerate {
        r.columns.clear();
        return Ok(r);
    }
    let ambient = Gl2::enumerate(p)?;
    let rep = sylow_report(ell, &ambient, cli.seed)?;
    let mut conjugate = true;
    for s in 1..=CONJUGACY_SEEDS {
        let other = find_sylow(ell, &ambient, cli.seed.wrapping_add(s))?;
        conjugate &= conjugacy_witness(&rep.subgroup, &other, &ambient)?.is_some();
    }
    r.meta("constructed_order", rep.subgroup.order());
    r.meta("n_p", rep.n_p.map(|n| n.to_string()));
    r.meta("maximality_checked", rep.maximality_checked);
    r.meta("conjugacy_seeds", CONJUGACY_SEEDS + 1);
    r.meta("conjugacy_verified", conjugate);
    r.meta(
        "generators",
        rep.subgroup
            .generators()
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    for g in rep.subgroup.elements() {
        r.row(vec![json!(g.to_string()), json!(g.order().to_string())]);
    }
    Ok(r)
}

fn volvachev(cli: &Cli, p: u64) -> Result<Report> {
    require_prime(p)?;
    let v = volvachev_finite(p)?;
    let mut r = base_report(cli, "volvachev", &[]);
    r.meta("p", p).meta("v1", v.v1);
    r.meta(
        "v1_witness",
        v.v1_witness.map(|(a, b)| format!("{a}^2 + {b}^2 = -1")),
    );
    r.meta("v2", v.v2);
    match &v.v3 {
        Some(v3) => {
            r.meta("v3", v3.holds)
                .meta("two_part_order", v3.two_part_order.to_string());
            match &v3.counterexample {
                Some(w) => {
                    r.meta("v3_witness", w.element.to_string())
                        .meta("v3_witness_order", w.order.to_string())
                        .meta("v3_witness_norm", w.norm);
                }
                None => {
                    r.meta("v3_witness", Value::Null);
                }
            }
        }
        None => {
            r.meta("v3", Value::Null)
                .meta("v3_note", "undefined: p ≡ 1 (mod 4) puts i in F_p");
        }
    }
    Ok(r)
}

fn open_cache(cli: &Cli, err: &mut dyn Write) -> Result<Option<ResultCache>> {
    let Some(path) = &cli.cache else {
        return Ok(None);
    };
    let cache = ResultCache::open(path)?;
    if cache.skipped_lines() > 0 {
        let _ = writeln!(
            err,
            "warning: skipped {} unreadable line(s) in cache {}",
            cache.skipped_lines(),
            path.display()
        );
    }
    Ok(Some(cache))
}

fn evidence(
    cli: &Cli,
    family: &str,
    stmt: &str,
    limit: u64,
    err: &mut dyn Write,
) -> Result<Report> {
    let statement = parse(stmt)?;
    let family = FamilySpec::parse(family)?;
    if family.members(limit)?.is_empty() {
        let _ = writeln!(err, "warning: family {family} has no members ≤ {limit}");
    }
    let cache = open_cache(cli, err)?;
    let property = StatementProperty::new(statement, EvalBudget::default());
    let e = evaluate_family(&family, &property, limit, cache.as_ref())?;
    let mut r = base_report(cli, "evidence", &["p", "outcome"]);
    r.meta("family", family.to_string())
        .meta("statement", e.property_id.clone())
        .meta("sample_bound", limit)
        .meta("holds", e.holds_count)
        .meta("fails", e.fails_count)
        .meta("errors", e.error_count)
        .meta("verdict", e.verdict.kind.to_string())
        .meta("exceptions", json!(e.verdict.exceptions))
        .meta("threshold", e.verdict.threshold);
    for row in &e.per_index {
        r.row(vec![json!(row.p), json!(row.outcome.to_string())]);
    }
    Ok(r)
}

fn conjugacy(cli: &Cli, family: &str, limit: u64) -> Result<Report> {
    let family = FamilySpec::parse(family)?;
    let c = classify_conjugacy(&family, limit)?;
    let mut r = base_report(
        cli,
        "conjugacy",
        &[
            "p",
            "v2_p_minus_1",
            "v2_p_plus_1",
            "sylow2_order",
            "v1",
            "v2",
            "v3_finite",
        ],
    );
    r.meta("family", family.to_string())
        .meta("sample_bound", limit)
        .meta("verdict", c.verdict.to_string())
        .meta("rule", c.rule.clone())
        .meta("note", c.note.clone())
        .meta("sylow_bound", sylow_bound_text(&c.sylow_bound.verdict))
        .meta(
            "v3_limit",
            c.v3_limit.as_ref().map(|v| v.verdict.to_string()),
        );
    for row in &c.rows {
        r.row(vec![
            json!(row.p),
            json!(row.v2_p_minus_1),
            json!(row.v2_p_plus_1),
            json!(row.sylow2_order.to_string()),
            json!(row.v1),
            json!(row.v2),
            json!(row.v3_finite),
        ]);
    }
    r.detail("sylow_bound_report", serde_json::to_value(&c.sylow_bound)?);
    r.detail("v3_limit_report", serde_json::to_value(&c.v3_limit)?);
    Ok(r)
}

fn sylow_bound_text(b: &crate::harness::SylowBound) -> String {
    match b {
        crate::harness::SylowBound::Bounded { order } => format!("BOUNDED({order})"),
        crate::harness::SylowBound::GrowingEvidence => "GROWING".into(),
    }
}

fn prufer(cli: &Cli, p: u64, levels: u32) -> Result<Report> {
    let pr = prufer_check(p, levels)?;
    let mut r = base_report(
        cli,
        "prufer",
        &["level", "j", "count", "expected", "dividing_count"],
    );
    r.meta("p", p)
        .meta("max_level", levels)
        .meta("counts_match", pr.counts_match)
        .meta("embeddings_ok", pr.embeddings_ok);
    for row in &pr.rows {
        r.row(vec![
            json!(row.level),
            json!(row.j),
            json!(row.count.to_string()),
            json!(row.expected.to_string()),
            json!(row.dividing_count.to_string()),
        ]);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("sylowlab").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn families_rows() {
        let (code, out, _) = run_args(&[
            "families", "--kind", "I", "--limit", "60", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let ps: Vec<&str> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(ps, ["3", "11", "19", "43", "59"]);
        let (_, out, _) = run_args(&[
            "--format", "csv", "families", "--kind", "J", "--N", "4", "--limit", "200",
        ]);
        let ps: Vec<&str> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(ps, ["31", "47", "79", "127", "191"]);
    }

    #[test]
    fn families_edge_cases() {
        let (code, _, err) = run_args(&["families", "--kind", "I", "--limit", "2"]);
        assert_eq!(code, 0);
        assert!(err.contains("warning"));
        let (code, _, _) = run_args(&["families", "--kind", "I", "--N", "3", "--limit", "20"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_args(&["families", "--kind", "K", "--limit", "20"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("Usage"));
    }

    #[test]
    fn sylow_and_errors() {
        let (code, out, _) = run_args(&[
            "sylow",
            "--p",
            "3",
            "--ell",
            "2",
            "--enumerate",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["sylow_order"], "16");
        assert_eq!(v["constructed_order"], 16);
        assert_eq!(v["n_p"], "3");
        assert_eq!(v["conjugacy_verified"], true);
        let (code, _, err) = run_args(&["sylow", "--p", "4", "--ell", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("4 is not prime"));
        let (code, _, _) = run_args(&["sylow", "--p", "2003", "--ell", "2", "--enumerate"]);
        assert_eq!(code, EXIT_BUDGET);
    }

    #[test]
    fn evidence_parse_error_is_verbatim() {
        let (code, _, err) = run_args(&[
            "evidence",
            "--family",
            "I",
            "--stmt",
            "sylow2(GL2) == 16)",
            "--limit",
            "50",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("position 17"), "{err}");
    }
}
