use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use eqsteenrod::bredon::{BredonModel, ModelCohomology};
use eqsteenrod::chains::Apex;
use eqsteenrod::cover::RhoModel;
use eqsteenrod::fixtures::Fixture;
use eqsteenrod::linalg::PrimeField;
use eqsteenrod::selftest::Selftest;
use eqsteenrod::steenrod::ops::{power_index, ClassValue, ModelKind};
use eqsteenrod::steenrod::phi::{Lift, PhiTable};
use eqsteenrod::suites::{self, FixtureEngine};

use crate::error::{CliError, CliResult};
use crate::report::{basis_label, CupRow, DegreeSummary, OperationRow, ProblemSummary, Report, SubgroupSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Bredon–Illman cochains
    Bredon,
    /// cochains on the equivariant cover
    Cover,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Bredon => ModelKind::Bredon,
            Model::Cover => ModelKind::Cover,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Cartan,
    Adem,
    Mu,
    Phi,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub max_degree: usize,
    /// largest `s` in the Cartan formula
    pub max_s: i64,
    /// the Adem relation checked is the one for `P^a P^b`
    pub a: i64,
    pub b: i64,
    /// random cup pairs per degree in the μ suite
    pub pairs: usize,
    pub seed: u64,
    /// Φ lift: `cone-first`, `cone-last` or `solve-N`
    pub lift: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    Check,
    Cohomology { max_degree: usize, model: Model },
    Cup { max_degree: usize, model: Model },
    Power { s: i64, beta: bool, max_degree: usize, model: Model },
    Verify(VerifyOptions),
    Selftest { only: Vec<u8> },
}

pub fn parse_lift(label: &str) -> CliResult<Lift> {
    match label {
        "cone-first" => Ok(Lift::Contraction(Apex::First)),
        "cone-last" => Ok(Lift::Contraction(Apex::Last)),
        _ => label
            .strip_prefix("solve-")
            .and_then(|n| n.parse().ok())
            .map(|max_total| Lift::LinearSolve { max_total })
            .ok_or_else(|| CliError::Usage(format!("unknown lift `{label}`; use cone-first, cone-last or solve-N"))),
    }
}

fn operation_name(p: u32, s: i64, beta: bool) -> String {
    match (p, beta) {
        (2, _) => format!("Sq^{s}"),
        (_, true) => format!("βP^{s}"),
        (_, false) => format!("P^{s}"),
    }
}

/// Highest output degree of `P^s`/`βP^s` on classes of degree at most
/// `max_degree`, over the degrees where the operation is not zero by index.
fn power_output_degree(p: u32, s: i64, beta: bool, max_degree: usize) -> usize {
    (0..=max_degree)
        .filter_map(|q| {
            let i = power_index(p, s, q, beta);
            let n = p as i64 * q as i64 - i;
            (i >= 0 && n >= 0).then_some(n as usize)
        })
        .max()
        .unwrap_or(0)
}

/// Smallest truncation that answers `cmd` over `Z/p`: degree-`Q` answers
/// need `top_dim ≥ Q + 1`, operations need one more than their highest
/// output degree.
pub fn required_top_dim(cmd: &Command, p: u32) -> usize {
    let step = if p == 2 { 1 } else { 2 * (p as usize - 1) };
    let need = match cmd {
        Command::Check | Command::Selftest { .. } => 1,
        Command::Cohomology { max_degree, .. } | Command::Cup { max_degree, .. } => max_degree + 1,
        Command::Power { s, beta, max_degree, .. } => {
            power_output_degree(p, *s, *beta, *max_degree).max(*max_degree) + 1
        }
        Command::Verify(v) => match v.suite {
            Suite::Axioms => p as usize * v.max_degree + 1,
            Suite::Cartan => v.max_degree + step * v.max_s.max(0) as usize + 1,
            Suite::Adem | Suite::Mu => v.max_degree + 1,
            Suite::Phi => 1,
        },
    };
    need.max(1)
}

fn enforce(cmd: &Command, fx: &Fixture) -> CliResult<usize> {
    let p = fx.coefficients.field().p();
    let need = required_top_dim(cmd, p);
    let have = fx.space.top_dim();
    if have < need {
        return Err(CliError::Truncation(format!(
            "`{}` needs the space truncated at dimension at least {need}, have {have}",
            command_name(cmd)
        )));
    }
    Ok(need)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check => "check",
        Command::Cohomology { .. } => "cohomology",
        Command::Cup { .. } => "cup",
        Command::Power { .. } => "power",
        Command::Verify(_) => "verify",
        Command::Selftest { .. } => "selftest",
    }
}

pub fn summarize(fx: &Fixture) -> ProblemSummary {
    let space = &fx.space;
    let g = space.category().group();
    ProblemSummary {
        name: fx.name.clone(),
        prime: fx.coefficients.field().p(),
        group_order: g.order(),
        top_dim: space.top_dim(),
        subgroups: (0..space.subgroup_count())
            .map(|h| SubgroupSummary {
                members: space
                    .category()
                    .subgroup(h)
                    .members()
                    .iter()
                    .map(|&m| g.name(m).to_string())
                    .collect(),
                simplices: space.space(h).counts().to_vec(),
                algebra_dim: fx.coefficients.algebra(h).dim(),
            })
            .collect(),
    }
}

fn engine(fx: &Fixture, max_degree: usize, lift: Lift) -> CliResult<FixtureEngine> {
    let table = Arc::new(PhiTable::new(fx.coefficients.field(), lift)?);
    Ok(FixtureEngine::new(fx.clone(), max_degree, table)?)
}

fn basis(dim: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..dim).map(move |k| {
        let mut v = vec![0; dim];
        v[k] = 1;
        v
    })
}

/// Runs a command on a validated problem.
pub fn run(cmd: &Command, fx: &Fixture) -> CliResult<Report> {
    let started = Instant::now();
    let need = enforce(cmd, fx)?;
    let mut report = Report::new(cmd.clone(), Some(summarize(fx)));
    let p = fx.coefficients.field().p();
    match cmd {
        Command::Check => {}
        Command::Selftest { .. } => return Err(CliError::Usage("selftest takes no problem".into())),
        Command::Cohomology { max_degree, model } => {
            let h = match model {
                Model::Bredon => {
                    ModelCohomology::compute(&BredonModel::new(fx.space.clone(), fx.coefficients.clone())?, *max_degree)?
                }
                Model::Cover => {
                    ModelCohomology::compute(&RhoModel::new(fx.space.clone(), fx.coefficients.clone())?, *max_degree)?
                }
            };
            report.cohomology = degree_summaries(&h, *max_degree);
        }
        Command::Cup { max_degree, model } => {
            let fe = engine(fx, *max_degree, Lift::Contraction(Apex::First))?;
            let e = &fe.engine;
            let kind = ModelKind::from(*model);
            let h = e.cohomology(kind);
            report.cohomology = degree_summaries(h, *max_degree);
            for n in 0..=*max_degree {
                for m in 0..=max_degree - n {
                    for x in basis(h.dimension(n)) {
                        for y in basis(h.dimension(m)) {
                            let product = e.cup(kind, n, &x, m, &y)?;
                            report.cup_products.push(CupRow {
                                left: class(n, x.clone()),
                                right: class(m, y),
                                product,
                            });
                        }
                    }
                }
            }
        }
        Command::Power { s, beta, max_degree, model } => {
            if p == 2 && *beta {
                return Err(CliError::Usage("--beta needs an odd prime".into()));
            }
            let fe = engine(fx, need - 1, Lift::Contraction(Apex::First))?;
            let e = &fe.engine;
            let kind = ModelKind::from(*model);
            let h = e.cohomology(kind);
            report.cohomology = degree_summaries(h, *max_degree);
            for q in 0..=*max_degree {
                for x in basis(h.dimension(q)) {
                    let r = e.power(kind, *s, *beta, q, &x)?;
                    report.operations.push(OperationRow {
                        operation: operation_name(p, *s, *beta),
                        input: class(q, x),
                        index: r.index,
                        scalar: r.scalar,
                        value: r.value,
                    });
                }
            }
        }
        Command::Verify(v) => {
            let lift = parse_lift(&v.lift)?;
            let q = v.max_degree;
            let suite = match v.suite {
                Suite::Mu => suites::mu_suite(fx, q, v.pairs, v.seed)?,
                Suite::Phi => {
                    let table = PhiTable::new(PrimeField::new(p)?, lift)?;
                    suites::phi_suite(&table, q as u32)?
                }
                Suite::Axioms => suites::axioms(&engine(fx, need - 1, lift)?, q)?,
                Suite::Cartan => suites::cartan(&engine(fx, need - 1, lift)?, q, v.max_s)?,
                Suite::Adem => {
                    let top = fx.space.top_dim() - 1;
                    suites::adem(&engine(fx, top, lift)?, q, v.a, v.b)?
                }
            };
            report.passed = suite.passed();
            report.suites.push(suite);
        }
    }
    report.elapsed = started.elapsed();
    Ok(report)
}

/// Runs the acceptance criteria, all of them when `only` is empty.
pub fn selftest(only: &[u8]) -> CliResult<Report> {
    let started = Instant::now();
    let mut t = Selftest::new()?;
    let mut report = Report::new(Command::Selftest { only: only.to_vec() }, None);
    let numbers: Vec<u8> = if only.is_empty() { (1..=9).collect() } else { only.to_vec() };
    for n in numbers {
        if !(1..=9).contains(&n) {
            return Err(CliError::Usage(format!("there is no criterion {n}")));
        }
        let c = t.run(n)?;
        report.passed &= c.passed || c.optional;
        report.criteria.push(c);
    }
    report.elapsed = started.elapsed();
    Ok(report)
}

fn class(degree: usize, coords: Vec<u32>) -> ClassValue {
    ClassValue {
        degree: degree as i64,
        coords,
    }
}

fn degree_summaries(h: &ModelCohomology, max_degree: usize) -> Vec<DegreeSummary> {
    (0..=max_degree)
        .map(|q| {
            let dim = h.dimension(q);
            DegreeSummary {
                degree: q,
                dimension: dim,
                classes: (0..dim).map(|k| basis_label(q, dim, k)).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_bounds() {
        let power = Command::Power {
            s: 1,
            beta: false,
            max_degree: 3,
            model: Model::Bredon,
        };
        // P^1 on degree 3 lands in degree 7
        assert_eq!(required_top_dim(&power, 3), 8);
        let coh = Command::Cohomology {
            max_degree: 3,
            model: Model::Bredon,
        };
        assert_eq!(required_top_dim(&coh, 3), 4);
    }

    #[test]
    fn lift_labels_round_trip() {
        for label in ["cone-first", "cone-last", "solve-6"] {
            assert_eq!(parse_lift(label).unwrap().label(), label);
        }
        assert!(parse_lift("solve-x").is_err());
    }
}
