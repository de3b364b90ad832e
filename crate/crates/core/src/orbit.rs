//! Finite groups given by multiplication tables, their subgroup lattice, and
//! the category of canonical orbits `O_G`.
//!
//! A morphism `G/H -> G/K` is determined by an element `a` with
//! `a⁻¹Ha ⊆ K`, up to right multiplication by `K`. Morphisms are stored with
//! the least element id of the coset `aK` as representative.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group presented by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    names: Vec<String>,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Builds a group from element names and a multiplication table
    /// `mult[a][b] = a·b`, checking the group axioms exhaustively.
    pub fn new(names: Vec<String>, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty element list".into()));
        }
        if mult.len() != n {
            return Err(Error::InvalidGroup(format!(
                "multiplication table has {} rows, expected {n}",
                mult.len()
            )));
        }
        for (a, row) in mult.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row for element `{}` has {} entries, expected {n}",
                    names[a],
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&c| c >= n) {
                return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mult[e][a] == a && mult[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mult[a][b] == identity && mult[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("`{}` has no inverse", names[a])))?;
            inv[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails on ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(Self {
            names,
            mult,
            inv,
            identity,
        })
    }

    /// The cyclic group `Z_n` with elements `e, g, g^2, ...`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let names = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{k}"),
            })
            .collect();
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(names, mult).expect("cyclic group table is valid")
    }

    /// The symmetric group on three letters, elements ordered as
    /// permutations in lexicographic order of their one-line notation.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let idx = |q: [usize; 3]| perms.iter().position(|&r| r == q).unwrap();
        // (a·b)(i) = a(b(i))
        let mult = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| idx([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|q| format!("{}{}{}", q[0], q[1], q[2]))
            .collect();
        Self::new(names, mult).expect("S3 table is valid")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    /// `a⁻¹ h a`
    pub fn conjugate(&self, h: usize, a: usize) -> usize {
        self.mul(self.mul(self.inv(a), h), a)
    }

    /// Smallest subgroup containing `gens`, as a sorted member list.
    pub fn closure(&self, gens: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut members: BTreeSet<usize> = BTreeSet::new();
        members.insert(self.identity);
        let mut frontier: Vec<usize> = gens.into_iter().collect();
        while let Some(x) = frontier.pop() {
            if !members.insert(x) {
                continue;
            }
            let current: Vec<usize> = members.iter().copied().collect();
            for y in current {
                for z in [self.mul(x, y), self.mul(y, x)] {
                    if !members.contains(&z) {
                        frontier.push(z);
                    }
                }
            }
        }
        members.into_iter().collect()
    }

    /// Checks that `f` (given as images of all elements) is a group
    /// automorphism.
    pub fn is_automorphism(&self, f: &[usize]) -> bool {
        if f.len() != self.order() {
            return false;
        }
        let mut seen = vec![false; self.order()];
        for &y in f {
            if y >= self.order() || seen[y] {
                return false;
            }
            seen[y] = true;
        }
        self.elements()
            .all(|a| self.elements().all(|b| f[self.mul(a, b)] == self.mul(f[a], f[b])))
    }
}

/// A subgroup, stored as its sorted list of member ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Validates closure, identity and inverses.
    pub fn new(group: &FiniteGroup, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if !set.contains(&group.identity()) {
            return Err(Error::InvalidGroup("subgroup lacks the identity".into()));
        }
        for &a in &set {
            if a >= group.order() || !set.contains(&group.inv(a)) {
                return Err(Error::InvalidGroup("subgroup not closed under inverses".into()));
            }
            for &b in &set {
                if !set.contains(&group.mul(a, b)) {
                    return Err(Error::InvalidGroup(
                        "subgroup not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(Self {
            members: set.into_iter().collect(),
        })
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self {
            members: vec![group.identity()],
        }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self {
            members: group.elements().collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&a| other.contains(a))
    }

    /// Whether `a⁻¹ H a ⊆ K`.
    pub fn subconjugate_into(&self, group: &FiniteGroup, a: usize, k: &Subgroup) -> bool {
        self.members
            .iter()
            .all(|&h| k.contains(group.conjugate(h, a)))
    }

    /// The left coset `aK` as a sorted list.
    pub fn left_coset(&self, group: &FiniteGroup, a: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.members.iter().map(|&k| group.mul(a, k)).collect();
        c.sort_unstable();
        c
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// All subgroups of `g`, sorted by order and then lexicographically by
/// member ids.
pub fn subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack = vec![vec![g.identity()]];
    while let Some(s) = stack.pop() {
        if !found.insert(s.clone()) {
            continue;
        }
        for a in g.elements() {
            if s.binary_search(&a).is_err() {
                let bigger = g.closure(s.iter().copied().chain(std::iter::once(a)));
                if !found.contains(&bigger) {
                    stack.push(bigger);
                }
            }
        }
    }
    let mut out: Vec<Subgroup> = found
        .into_iter()
        .map(|members| Subgroup { members })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    out
}

/// A morphism `â: G/H -> G/K` of the orbit category. Subgroups are referred
/// to by their index in a fixed subgroup list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitMorphism {
    pub source: usize,
    pub target: usize,
    /// Least element id of the coset `aK`.
    pub rep: usize,
}

/// The orbit category of a finite group over the full subgroup list.
#[derive(Clone, Debug)]
pub struct OrbitCategory {
    group: FiniteGroup,
    subgroups: Vec<Subgroup>,
}

impl OrbitCategory {
    pub fn new(group: FiniteGroup) -> Self {
        let subgroups = subgroups(&group);
        Self { group, subgroups }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup(&self, idx: usize) -> &Subgroup {
        &self.subgroups[idx]
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.subgroups.iter().position(|s| s == h)
    }

    pub fn trivial_index(&self) -> usize {
        0
    }

    /// Canonical representative of the coset `aK`.
    pub fn canonical_rep(&self, a: usize, target: usize) -> usize {
        self.subgroups[target].left_coset(&self.group, a)[0]
    }

    /// Builds the morphism with representative `a`, checking subconjugacy.
    pub fn morphism(&self, source: usize, target: usize, a: usize) -> Result<OrbitMorphism> {
        let (h, k) = (&self.subgroups[source], &self.subgroups[target]);
        if !h.subconjugate_into(&self.group, a, k) {
            return Err(Error::Subconjugacy {
                element: self.group.name(a).to_string(),
                subgroup: h.to_string(),
                target: k.to_string(),
            });
        }
        Ok(OrbitMorphism {
            source,
            target,
            rep: self.canonical_rep(a, target),
        })
    }

    pub fn identity_morphism(&self, h: usize) -> OrbitMorphism {
        OrbitMorphism {
            source: h,
            target: h,
            rep: self.canonical_rep(self.group.identity(), h),
        }
    }

    /// One morphism per coset `aK` with `a⁻¹Ha ⊆ K`.
    pub fn orbit_morphisms(&self, source: usize, target: usize) -> Vec<OrbitMorphism> {
        orbit_morphisms(&self.group, &self.subgroups[source], &self.subgroups[target])
            .into_iter()
            .map(|rep| OrbitMorphism {
                source,
                target,
                rep,
            })
            .collect()
    }

    /// Every morphism of the category, ordered by (source, target, rep).
    pub fn all_morphisms(&self) -> Vec<OrbitMorphism> {
        let n = self.subgroups.len();
        let mut out = Vec::new();
        for s in 0..n {
            for t in 0..n {
                out.extend(self.orbit_morphisms(s, t));
            }
        }
        out
    }

    /// The composite `G/H --f--> G/K --g--> G/L`, represented by `a₁a₂`.
    pub fn compose(&self, f: OrbitMorphism, g: OrbitMorphism) -> Result<OrbitMorphism> {
        if f.target != g.source {
            return Err(Error::MorphismMismatch);
        }
        let a = self.group.mul(f.rep, g.rep);
        self.morphism(f.source, g.target, a)
    }
}

/// Canonical representatives of all cosets `aK` with `a⁻¹Ha ⊆ K`.
pub fn orbit_morphisms(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Vec<usize> {
    let mut reps: BTreeSet<usize> = BTreeSet::new();
    for a in g.elements() {
        if h.subconjugate_into(g, a, k) {
            reps.insert(k.left_coset(g, a)[0]);
        }
    }
    reps.into_iter().collect()
}
