//! Reports and their two renderings: an aligned text summary and JSON with
//! a versioned schema.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use eqsteenrod::selftest::CriterionReport;
use eqsteenrod::steenrod::ops::ClassValue;
use eqsteenrod::suites::SuiteReport;

use crate::commands::Command;

pub const SCHEMA: &str = "eqsteenrod-report/1";

/// Everything a command produced. Sections a command does not fill are
/// empty arrays, never absent.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Command,
    pub problem: Option<ProblemSummary>,
    pub cohomology: Vec<DegreeSummary>,
    pub cup_products: Vec<CupRow>,
    pub operations: Vec<OperationRow>,
    pub suites: Vec<SuiteReport>,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
    /// wall-clock time, shown in text output only so that JSON is
    /// reproducible
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn new(command: Command, problem: Option<ProblemSummary>) -> Self {
        Self {
            schema: SCHEMA,
            command,
            problem,
            cohomology: Vec::new(),
            cup_products: Vec::new(),
            operations: Vec::new(),
            suites: Vec::new(),
            criteria: Vec::new(),
            passed: true,
            elapsed: Duration::ZERO,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemSummary {
    pub name: String,
    pub prime: u32,
    pub group_order: usize,
    pub top_dim: usize,
    pub subgroups: Vec<SubgroupSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupSummary {
    pub members: Vec<String>,
    /// nondegenerate simplices of `X^H` per dimension
    pub simplices: Vec<usize>,
    pub algebra_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSummary {
    pub degree: usize,
    pub dimension: usize,
    pub classes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CupRow {
    pub left: ClassValue,
    pub right: ClassValue,
    pub product: ClassValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperationRow {
    pub operation: String,
    pub input: ClassValue,
    /// the `D_i` index used
    pub index: i64,
    pub scalar: u32,
    pub value: ClassValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Process exit status: 0 when every requested check passed, 1 otherwise.
/// Errors exit with 2.
pub fn exit_status(report: &Report) -> u8 {
    if report.passed {
        0
    } else {
        1
    }
}

/// Label of the basis class `k` of `H^q`, matching the labels used by the
/// property suites.
pub fn basis_label(q: usize, dim: usize, k: usize) -> String {
    let mut coords = vec![0u32; dim];
    coords[k] = 1;
    format!("H^{q}{coords:?}")
}

fn class(v: &ClassValue) -> String {
    format!("H^{}{:?}", v.degree, v.coords)
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => emit_text(report),
    }
}

fn emit_text(r: &Report) -> String {
    let mut out = String::new();
    if let Some(p) = &r.problem {
        let _ = writeln!(
            out,
            "problem {}: p = {}, |G| = {}, truncated at dimension {}",
            p.name, p.prime, p.group_order, p.top_dim
        );
        for h in &p.subgroups {
            let _ = writeln!(
                out,
                "  H = {{{}}}: simplices {:?}, coefficient dimension {}",
                h.members.join(","),
                h.simplices,
                h.algebra_dim
            );
        }
    }
    if !r.cohomology.is_empty() {
        let _ = writeln!(out, "cohomology");
        for d in &r.cohomology {
            let _ = writeln!(out, "  H^{:<3} dim {:<3} {}", d.degree, d.dimension, d.classes.join(" "));
        }
    }
    if !r.cup_products.is_empty() {
        let _ = writeln!(out, "cup products");
        for row in &r.cup_products {
            let _ = writeln!(out, "  {} · {} = {}", class(&row.left), class(&row.right), class(&row.product));
        }
    }
    if !r.operations.is_empty() {
        let _ = writeln!(out, "operations");
        for row in &r.operations {
            let _ = writeln!(
                out,
                "  {}({}) = {}    [D_{}, scalar {}]",
                row.operation,
                class(&row.input),
                class(&row.value),
                row.index,
                row.scalar
            );
        }
    }
    for s in &r.suites {
        suite_text(&mut out, s, "");
    }
    for c in &r.criteria {
        let _ = writeln!(out, "{}", c.line());
        for s in &c.suites {
            if !s.passed() {
                suite_text(&mut out, s, "  ");
            }
        }
        for f in c.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(out, "    FAIL {}: {}", f.label, f.detail);
        }
    }
    let _ = writeln!(
        out,
        "result: {} ({:.2} s)",
        if r.passed { "PASS" } else { "FAIL" },
        r.elapsed.as_secs_f64()
    );
    out
}

fn suite_text(out: &mut String, s: &SuiteReport, indent: &str) {
    let _ = writeln!(
        out,
        "{indent}suite {} on {}: {} ({} checks, {} skipped)",
        s.suite,
        s.fixture,
        if s.passed() { "PASS" } else { "FAIL" },
        s.checks.len(),
        s.skipped.len()
    );
    for f in s.failures() {
        let _ = writeln!(out, "{indent}  FAIL {}: {}", f.label, f.detail);
    }
    for k in &s.skipped {
        let _ = writeln!(out, "{indent}  skipped {k}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqsteenrod::suites::SuiteReport;

    #[test]
    fn failing_suite_sets_the_exit_status_and_keeps_the_counterexample() {
        let mut suite = SuiteReport::new("cartan", "toy");
        suite.check("P^1(xy)", false, "lhs [1], rhs [0]");
        let mut report = Report::new(Command::Check, None);
        report.passed = suite.passed();
        report.suites.push(suite);
        assert_eq!(exit_status(&report), 1);
        let json: serde_json::Value = serde_json::from_str(&emit(&report, Format::Json)).unwrap();
        assert_eq!(json["passed"], false);
        assert_eq!(json["suites"][0]["checks"][0]["detail"], "lhs [1], rhs [0]");
        assert!(emit(&report, Format::Text).contains("FAIL P^1(xy): lhs [1], rhs [0]"));
    }
}
