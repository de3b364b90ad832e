//! The JSON problem file: a prime, an acting group, a one-vertex
//! G-simplicial set and a coefficient system, each either spelled out or
//! given by a builder directive.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use eqsteenrod::bredon::{validate_coefficients, CoefficientAlgebra, CoefficientSystem, EquivariantSpace};
use eqsteenrod::fixtures::Fixture;
use eqsteenrod::linalg::{Matrix, PrimeField};
use eqsteenrod::orbit::{FiniteGroup, Subgroup};
use eqsteenrod::simplex::{nerve, standard_simplex, GSimplicialSet, NerveCoding, PresentedSimplicialSet, SimplexInstance};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub prime: u32,
    /// The acting group `G`; trivial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub space: SpaceSpec,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
}

/// A finite group, either `{"cyclic": n}` or an element list with a
/// multiplication table of element names, `mult[a][b] = a·b`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mult: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// `counts[n]` nondegenerate `n`-simplices; `faces[n-1][id]` lists the
    /// `n+1` faces of `(n, id)`; `action[g][n]` is the permutation of the
    /// `n`-simplices by `g` (the identity may be omitted).
    Explicit {
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<SimplexSpec>>>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        action: BTreeMap<String, Vec<Vec<usize>>>,
    },
    /// The nerve of `group` truncated at `top_dim`; `action[g]` lists the
    /// images of the elements of `group` under the automorphism by which
    /// `g` acts.
    Nerve {
        group: GroupSpec,
        top_dim: usize,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        action: BTreeMap<String, Vec<String>>,
    },
    /// `Δ[dim]`, which is one-vertex only for `dim = 0`.
    StandardSimplex { dim: usize },
}

/// `s_{degeneracies}` applied to the nondegenerate simplex `(dim, id)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexSpec {
    pub dim: usize,
    pub id: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degeneracies: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    /// `Z/p` everywhere, trivial actions, identity transfers.
    #[default]
    Constant,
    /// On the nerve of `Γ` with trivial `G`: the algebra
    /// `Z/p[t]/(t^d + c_{d-1}t^{d-1} + … + c_0)` with `modulus = [c_0, …]`,
    /// the edge `(γ)` acting by `Frob^{-exponents[γ]}`.
    GroupGalois {
        modulus: Vec<u32>,
        exponents: BTreeMap<String, i64>,
    },
    Explicit {
        subgroups: Vec<SubgroupCoefficients>,
        transfers: Vec<TransferSpec>,
    },
}

/// Coefficients over one subgroup `H`: its algebra and `Ψ` of every edge of
/// `X^H`, edges in increasing order of their ids in `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupCoefficients {
    pub members: Vec<String>,
    pub algebra: AlgebraSpec,
    pub psi: Vec<Vec<Vec<u32>>>,
}

/// Structure constants `e_a · e_b = Σ_c mult[a][b][c] e_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub labels: Vec<String>,
    pub unit: Vec<u32>,
    pub mult: Vec<Vec<Vec<u32>>>,
}

/// The transfer `M₀(K) → M₀(H)` of the orbit morphism `G/H → G/K`,
/// `gH ↦ g·via·K`, as a matrix of rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSpec {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub via: String,
    pub matrix: Vec<Vec<u32>>,
}

pub fn parse_str(text: &str) -> CliResult<ProblemFile> {
    serde_json::from_str(text).map_err(CliError::from_json)
}

pub fn parse(path: &Path) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text)
}

/// Pretty JSON in the input format.
pub fn to_json(problem: &ProblemFile) -> String {
    serde_json::to_string_pretty(problem).expect("problem files serialize")
}

fn resolve_group(spec: &GroupSpec, at: &str) -> CliResult<FiniteGroup> {
    if let Some(n) = spec.cyclic {
        if !spec.elements.is_empty() || !spec.mult.is_empty() {
            return Err(CliError::schema(at, "give either `cyclic` or `elements` and `mult`, not both"));
        }
        if n == 0 {
            return Err(CliError::schema(format!("{at}.cyclic"), "order must be positive"));
        }
        return Ok(FiniteGroup::cyclic(n));
    }
    let names = &spec.elements;
    if names.is_empty() {
        return Err(CliError::schema(format!("{at}.elements"), "empty element list"));
    }
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(CliError::schema(format!("{at}.elements"), format!("duplicate element `{name}`")));
        }
    }
    let lookup = |name: &str, loc: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::schema(loc, format!("unknown element `{name}`")))
    };
    let mut mult = Vec::with_capacity(names.len());
    for (a, name) in names.iter().enumerate() {
        let loc = format!("{at}.mult[{a}]");
        let row = spec
            .mult
            .get(a)
            .ok_or_else(|| CliError::schema(format!("{at}.mult"), format!("missing row for element `{name}`")))?;
        if row.len() != names.len() {
            return Err(CliError::schema(
                loc,
                format!("row for element `{name}` has {} entries, expected {}", row.len(), names.len()),
            ));
        }
        mult.push(
            row.iter()
                .enumerate()
                .map(|(b, c)| lookup(c, &format!("{at}.mult[{a}][{b}]")))
                .collect::<CliResult<Vec<_>>>()?,
        );
    }
    if spec.mult.len() > names.len() {
        return Err(CliError::schema(
            format!("{at}.mult"),
            format!("{} rows for {} elements", spec.mult.len(), names.len()),
        ));
    }
    Ok(FiniteGroup::new(names.clone(), mult)?)
}

fn element(g: &FiniteGroup, name: &str, at: &str) -> CliResult<usize> {
    g.element(name)
        .ok_or_else(|| CliError::schema(at, format!("unknown element `{name}`")))
}

fn members(g: &FiniteGroup, names: &[String], at: &str) -> CliResult<Subgroup> {
    let ids = names
        .iter()
        .map(|n| element(g, n, at))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Subgroup::new(g, ids)?)
}

fn matrix(f: PrimeField, rows: &[Vec<u32>], at: &str) -> CliResult<Matrix> {
    Matrix::from_rows(f, rows).map_err(|_| CliError::schema(at, "rows have different lengths"))
}

fn build_space(file: &ProblemFile, g: &FiniteGroup) -> CliResult<GSimplicialSet> {
    match &file.space {
        SpaceSpec::StandardSimplex { dim } => {
            if *dim > 20 {
                return Err(CliError::schema("space.dim", "at most 20 supported"));
            }
            let s = standard_simplex(*dim);
            let action = identity_action(g, &s);
            Ok(GSimplicialSet::new(s, g.clone(), action)?)
        }
        SpaceSpec::Nerve { group, top_dim, action } => {
            let gamma = resolve_group(group, "space.group")?;
            for name in action.keys() {
                element(g, name, "space.action")?;
            }
            let mut images = Vec::with_capacity(g.order());
            for a in g.elements() {
                let name = g.name(a);
                let at = format!("space.action.{name}");
                match action.get(name) {
                    Some(list) => {
                        if list.len() != gamma.order() {
                            return Err(CliError::schema(
                                at,
                                format!("{} images for a group of order {}", list.len(), gamma.order()),
                            ));
                        }
                        images.push(
                            list.iter()
                                .map(|n| element(&gamma, n, &at))
                                .collect::<CliResult<Vec<_>>>()?,
                        );
                    }
                    None if a == g.identity() => images.push(gamma.elements().collect()),
                    None => return Err(CliError::schema("space.action", format!("missing images for element `{name}`"))),
                }
            }
            let acting = (g.order() > 1).then(|| (g.clone(), images));
            Ok(nerve(&gamma, *top_dim, acting)?)
        }
        SpaceSpec::Explicit { counts, faces, action } => {
            if counts.is_empty() {
                return Err(CliError::schema("space.counts", "no dimensions"));
            }
            if faces.len() + 1 != counts.len() {
                return Err(CliError::schema(
                    "space.faces",
                    format!("{} dimensions of faces for top dimension {}", faces.len(), counts.len() - 1),
                ));
            }
            let mut table = vec![Vec::new()];
            for per_dim in faces {
                table.push(
                    per_dim
                        .iter()
                        .map(|row| row.iter().map(instance).collect())
                        .collect(),
                );
            }
            let s = PresentedSimplicialSet::new(counts.clone(), table)?;
            for name in action.keys() {
                element(g, name, "space.action")?;
            }
            let mut perms = Vec::with_capacity(g.order());
            let identity = identity_action(g, &s);
            for a in g.elements() {
                match action.get(g.name(a)) {
                    Some(p) => perms.push(p.clone()),
                    None if a == g.identity() => perms.push(identity[a].clone()),
                    None => {
                        return Err(CliError::schema(
                            "space.action",
                            format!("missing permutations for element `{}`", g.name(a)),
                        ))
                    }
                }
            }
            Ok(GSimplicialSet::new(s, g.clone(), perms)?)
        }
    }
}

fn instance(s: &SimplexSpec) -> SimplexInstance {
    SimplexInstance {
        degeneracies: s.degeneracies.clone(),
        base_dim: s.dim,
        base: s.id,
    }
}

fn identity_action(g: &FiniteGroup, s: &PresentedSimplicialSet) -> Vec<Vec<Vec<usize>>> {
    let one: Vec<Vec<usize>> = (0..=s.top_dim()).map(|n| (0..s.count(n)).collect()).collect();
    vec![one; g.order()]
}

fn build_coefficients(file: &ProblemFile, f: PrimeField, space: &EquivariantSpace) -> CliResult<CoefficientSystem> {
    let g = space.category().group();
    match &file.coefficients {
        CoefficientSpec::Constant => Ok(CoefficientSystem::constant(f, space)),
        CoefficientSpec::GroupGalois { modulus, exponents } => {
            let SpaceSpec::Nerve { group, .. } = &file.space else {
                return Err(CliError::schema("coefficients", "`group_galois` needs a nerve space"));
            };
            if g.order() != 1 {
                return Err(CliError::schema("coefficients", "`group_galois` needs a trivial acting group"));
            }
            if modulus.is_empty() {
                return Err(CliError::schema("coefficients.modulus", "empty modulus"));
            }
            let gamma = resolve_group(group, "space.group")?;
            for name in exponents.keys() {
                element(&gamma, name, "coefficients.exponents")?;
            }
            let alg = CoefficientAlgebra::quotient_ring(f, modulus);
            let frob = alg.frobenius(f);
            let d = modulus.len() as i64;
            let coding = NerveCoding::new(&gamma);
            let mut psi = vec![Matrix::identity(alg.dim()); coding.count(1)];
            for a in gamma.elements() {
                let name = gamma.name(a);
                let k = exponents.get(name).copied();
                if a == gamma.identity() {
                    if k.is_some_and(|k| k.rem_euclid(d) != 0) {
                        return Err(CliError::schema(
                            format!("coefficients.exponents.{name}"),
                            "the identity must act trivially",
                        ));
                    }
                    continue;
                }
                let k = k.ok_or_else(|| {
                    CliError::schema("coefficients.exponents", format!("missing exponent for element `{name}`"))
                })?;
                let e = (-k).rem_euclid(d) as usize;
                psi[coding.id(&[a])] = (0..e).fold(Matrix::identity(alg.dim()), |acc, _| acc.mul(f, &frob));
            }
            let transfers = space
                .morphisms()
                .iter()
                .map(|&m| (m, Matrix::identity(alg.dim())))
                .collect();
            Ok(CoefficientSystem::new(f, space, vec![alg], vec![psi], transfers)?)
        }
        CoefficientSpec::Explicit { subgroups, transfers } => {
            let cat = space.category();
            let n = space.subgroup_count();
            let mut algebras: Vec<Option<CoefficientAlgebra>> = vec![None; n];
            let mut psi: Vec<Vec<Matrix>> = vec![Vec::new(); n];
            for (k, sc) in subgroups.iter().enumerate() {
                let at = format!("coefficients.subgroups[{k}]");
                let h = members(g, &sc.members, &format!("{at}.members"))?;
                let idx = cat
                    .index_of(&h)
                    .ok_or_else(|| CliError::schema(format!("{at}.members"), "not a subgroup"))?;
                if algebras[idx].is_some() {
                    return Err(CliError::schema(format!("{at}.members"), format!("subgroup {h} listed twice")));
                }
                let a = &sc.algebra;
                algebras[idx] = Some(
                    CoefficientAlgebra::new(a.labels.clone(), a.unit.clone(), a.mult.clone())
                        .map_err(|e| CliError::schema(format!("{at}.algebra"), e.to_string()))?,
                );
                psi[idx] = sc
                    .psi
                    .iter()
                    .enumerate()
                    .map(|(e, rows)| matrix(f, rows, &format!("{at}.psi[{e}]")))
                    .collect::<CliResult<_>>()?;
            }
            let algebras = algebras
                .into_iter()
                .enumerate()
                .map(|(h, a)| {
                    a.ok_or_else(|| {
                        let names: Vec<&str> = cat.subgroup(h).members().iter().map(|&m| g.name(m)).collect();
                        CliError::schema("coefficients.subgroups", format!("no entry for subgroup {{{}}}", names.join(",")))
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut table = BTreeMap::new();
            for (k, t) in transfers.iter().enumerate() {
                let at = format!("coefficients.transfers[{k}]");
                let source = members(g, &t.source, &format!("{at}.source"))?;
                let target = members(g, &t.target, &format!("{at}.target"))?;
                let (Some(s), Some(tg)) = (cat.index_of(&source), cat.index_of(&target)) else {
                    return Err(CliError::schema(at, "unknown subgroup"));
                };
                let via = element(g, &t.via, &format!("{at}.via"))?;
                let m = cat.morphism(s, tg, via)?;
                if table.insert(m, matrix(f, &t.matrix, &format!("{at}.matrix"))?).is_some() {
                    return Err(CliError::schema(at, "morphism listed twice"));
                }
            }
            Ok(CoefficientSystem::new(f, space, algebras, psi, table)?)
        }
    }
}

/// Builds and validates the space and coefficient system.
pub fn build(file: &ProblemFile, name: &str) -> CliResult<Fixture> {
    let f = PrimeField::new(file.prime).map_err(|e| CliError::schema("prime", e.to_string()))?;
    let g = match &file.group {
        Some(spec) => resolve_group(spec, "group")?,
        None => FiniteGroup::cyclic(1),
    };
    let space = EquivariantSpace::new(build_space(file, &g)?);
    let coefficients = build_coefficients(file, f, &space)?;
    let report = validate_coefficients(&space, &coefficients);
    if !report.is_valid() {
        return Err(CliError::Validation {
            failures: report.failures,
        });
    }
    Ok(Fixture {
        name: name.into(),
        space,
        coefficients,
    })
}

fn group_spec(g: &FiniteGroup) -> GroupSpec {
    GroupSpec {
        cyclic: None,
        elements: g.names().to_vec(),
        mult: g
            .mult_table()
            .iter()
            .map(|row| row.iter().map(|&c| g.name(c).to_string()).collect())
            .collect(),
    }
}

fn rows(m: &Matrix) -> Vec<Vec<u32>> {
    m.to_rows()
}

/// The fully explicit problem file describing `fx`.
pub fn export(fx: &Fixture) -> ProblemFile {
    let space = &fx.space;
    let x = space.x();
    let g = x.group();
    let s = x.space();
    let cat = space.category();
    let coeffs = &fx.coefficients;
    let names = |h: &Subgroup| h.members().iter().map(|&m| g.name(m).to_string()).collect::<Vec<_>>();
    let faces = s.face_table()[1..]
        .iter()
        .map(|per_dim| {
            per_dim
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|y| SimplexSpec {
                            dim: y.base_dim,
                            id: y.base,
                            degeneracies: y.degeneracies.clone(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let action = g
        .elements()
        .filter(|&a| a != g.identity())
        .map(|a| (g.name(a).to_string(), x.action_table()[a].clone()))
        .collect();
    let subgroups = (0..space.subgroup_count())
        .map(|h| {
            let alg = coeffs.algebra(h);
            SubgroupCoefficients {
                members: names(cat.subgroup(h)),
                algebra: AlgebraSpec {
                    labels: alg.labels().to_vec(),
                    unit: alg.unit().to_vec(),
                    mult: alg.structure_constants().to_vec(),
                },
                psi: coeffs.psi_table()[h].iter().map(rows).collect(),
            }
        })
        .collect();
    let transfers = space
        .morphisms()
        .iter()
        .enumerate()
        .map(|(k, m)| TransferSpec {
            source: names(cat.subgroup(m.source)),
            target: names(cat.subgroup(m.target)),
            via: g.name(m.rep).to_string(),
            matrix: rows(coeffs.transfer(k)),
        })
        .collect();
    ProblemFile {
        prime: coeffs.field().p(),
        group: (g.order() > 1).then(|| group_spec(g)),
        space: SpaceSpec::Explicit {
            counts: s.counts().to_vec(),
            faces,
            action,
        },
        coefficients: CoefficientSpec::Explicit { subgroups, transfers },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_shorthand_and_table_agree() {
        let table = GroupSpec {
            elements: vec!["e".into(), "g".into()],
            mult: vec![vec!["e".into(), "g".into()], vec!["g".into(), "e".into()]],
            ..GroupSpec::default()
        };
        let short = GroupSpec {
            cyclic: Some(2),
            ..GroupSpec::default()
        };
        let a = resolve_group(&table, "group").unwrap();
        let b = resolve_group(&short, "group").unwrap();
        assert_eq!(a.mult_table(), b.mult_table());
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let err = parse_str(r#"{"prime": 3, "space": {"kind": "standard_simplex", "dim": 0}, "extra": 1}"#).unwrap_err();
        assert_eq!(err.class(), "schema");
    }
}
