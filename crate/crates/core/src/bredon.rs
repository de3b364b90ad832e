//! Equivariant local coefficients on one-vertex G-simplicial sets and the
//! Bredon–Illman cochain complex.
//!
//! A coefficient system assigns to every subgroup `H` a commutative
//! `Z/p`-algebra `M₀(H)`, to every nondegenerate edge `y` of `X^H` an
//! automorphism `Ψ_H(y)`, and to every orbit morphism `â: G/H → G/K` a
//! transfer `M₀(â): M₀(K) → M₀(H)`. The fundamental group of `X^H` acts on
//! `M₀(H)` through `Act(y) = Ψ_H(y)^{-1}`.
//!
//! Cochains of degree `n` are stored in full coordinates: for each subgroup
//! (in subgroup order) and each nondegenerate `n`-simplex of `X^H` (in id
//! order), the coordinates of the value in the basis of `M₀(H)`.
//! Equivariant cochains form the subspace cut out by the compatibility
//! constraints `f_H(a·y) = M₀(â) f_K(y)`.

use std::collections::BTreeMap;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, PrimeField};
use crate::sparse::{sparse_axpy, sparse_from_dense, sparse_to_dense, SparseCohomology, SparseVec};
use crate::orbit::{OrbitCategory, OrbitMorphism};
use crate::simplex::{
    fixed_points, translation_between, FixedPoints, GSimplicialSet, PresentedSimplicialSet,
    SimplexInstance, ValidationReport,
};

/// A G-simplicial set together with its fixed-point complexes and the
/// translation maps of every orbit morphism.
#[derive(Clone, Debug)]
pub struct EquivariantSpace {
    x: GSimplicialSet,
    category: OrbitCategory,
    fixed: Vec<FixedPoints>,
    morphisms: Vec<OrbitMorphism>,
    /// `translations[k][n][local id in X^K] = local id in X^H` for
    /// `morphisms[k]: H → K`.
    translations: Vec<Vec<Vec<usize>>>,
    /// `cofaces[h][n][y]`: the `(n+1)`-simplices of `X^H` having the
    /// nondegenerate `n`-simplex `y` as a face
    cofaces: Vec<Vec<Vec<Vec<usize>>>>,
}

fn coface_index(s: &PresentedSimplicialSet) -> Vec<Vec<Vec<usize>>> {
    (0..s.top_dim())
        .map(|n| {
            let mut out = vec![Vec::new(); s.count(n)];
            for x in 0..s.count(n + 1) {
                for j in 0..=n + 1 {
                    let y = s.stored_face(n + 1, x, j);
                    if !y.is_degenerate() && out[y.base].last() != Some(&x) {
                        out[y.base].push(x);
                    }
                }
            }
            out
        })
        .collect()
}

impl EquivariantSpace {
    pub fn new(x: GSimplicialSet) -> Self {
        let category = OrbitCategory::new(x.group().clone());
        let fixed: Vec<FixedPoints> = category
            .subgroups()
            .iter()
            .map(|h| fixed_points(&x, h))
            .collect();
        let morphisms = category.all_morphisms();
        let translations = morphisms
            .iter()
            .map(|m| translation_between(&x, m.rep, &fixed[m.source], &fixed[m.target]))
            .collect();
        let cofaces = fixed.iter().map(|fp| coface_index(&fp.space)).collect();
        Self {
            x,
            category,
            fixed,
            morphisms,
            translations,
            cofaces,
        }
    }

    /// The `(n+1)`-simplices of `X^H` with `y` among their faces.
    pub fn cofaces(&self, h: usize, n: usize, y: usize) -> &[usize] {
        &self.cofaces[h][n][y]
    }

    pub fn x(&self) -> &GSimplicialSet {
        &self.x
    }

    pub fn category(&self) -> &OrbitCategory {
        &self.category
    }

    pub fn subgroup_count(&self) -> usize {
        self.fixed.len()
    }

    pub fn fixed(&self, h: usize) -> &FixedPoints {
        &self.fixed[h]
    }

    /// `X^H` as a presented simplicial set.
    pub fn space(&self, h: usize) -> &PresentedSimplicialSet {
        &self.fixed[h].space
    }

    pub fn top_dim(&self) -> usize {
        self.x.space().top_dim()
    }

    pub fn morphisms(&self) -> &[OrbitMorphism] {
        &self.morphisms
    }

    pub fn morphism_index(&self, m: &OrbitMorphism) -> Option<usize> {
        self.morphisms.binary_search(m).ok()
    }

    /// Local id of `a·y` in `X^H` for `y` a nondegenerate simplex of `X^K`.
    pub fn translate(&self, morphism: usize, dim: usize, id: usize) -> usize {
        self.translations[morphism][dim][id]
    }

    pub fn translate_instance(&self, morphism: usize, y: &SimplexInstance) -> SimplexInstance {
        SimplexInstance {
            degeneracies: y.degeneracies.clone(),
            base_dim: y.base_dim,
            base: self.translate(morphism, y.base_dim, y.base),
        }
    }
}

/// The edge of `x` spanning vertices `{0, 1}`.
pub fn edge01(s: &PresentedSimplicialSet, x: &SimplexInstance) -> SimplexInstance {
    debug_assert!(x.dim() >= 1);
    s.restrict(x, &[0, 1])
}

/// A finite-dimensional commutative unital `Z/p`-algebra given by structure
/// constants `e_a · e_b = Σ_c mult[a][b][c] e_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientAlgebra {
    labels: Vec<String>,
    unit: Vec<u32>,
    mult: Vec<Vec<Vec<u32>>>,
}

impl CoefficientAlgebra {
    pub fn new(labels: Vec<String>, unit: Vec<u32>, mult: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let r = labels.len();
        if r == 0 || unit.len() != r || mult.len() != r {
            return Err(Error::InvalidCoefficients("algebra tables have inconsistent sizes".into()));
        }
        if mult.iter().any(|row| row.len() != r || row.iter().any(|v| v.len() != r)) {
            return Err(Error::InvalidCoefficients("structure constants have wrong shape".into()));
        }
        Ok(Self { labels, unit, mult })
    }

    /// `Z/p` itself.
    pub fn prime_field() -> Self {
        Self {
            labels: vec!["1".into()],
            unit: vec![1],
            mult: vec![vec![vec![1]]],
        }
    }

    /// `Z/p[t]/(m(t))` for a monic `m(t) = t^d + c_{d−1}t^{d−1} + ⋯ + c_0`,
    /// given as `[c_0, …, c_{d−1}]`.
    pub fn quotient_ring(f: PrimeField, modulus: &[u32]) -> Self {
        let d = modulus.len();
        assert!(d >= 1);
        let reduce = |mut poly: Vec<u32>| -> Vec<u32> {
            for deg in (d..poly.len()).rev() {
                let c = poly[deg];
                if c != 0 {
                    poly[deg] = 0;
                    for (k, &m) in modulus.iter().enumerate() {
                        let idx = deg - d + k;
                        poly[idx] = f.sub(poly[idx], f.mul(c, m));
                    }
                }
            }
            poly.truncate(d);
            poly
        };
        let mult = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let mut poly = vec![0; 2 * d];
                        poly[a + b] = 1;
                        reduce(poly)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..d)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            })
            .collect();
        let mut unit = vec![0; d];
        unit[0] = 1;
        Self { labels, unit, mult }
    }

    /// `A × B` with componentwise multiplication.
    pub fn product(a: &Self, b: &Self) -> Self {
        let (ra, rb) = (a.dim(), b.dim());
        let r = ra + rb;
        let mut mult = vec![vec![vec![0; r]; r]; r];
        for x in 0..ra {
            for y in 0..ra {
                mult[x][y][..ra].copy_from_slice(&a.mult[x][y]);
            }
        }
        for x in 0..rb {
            for y in 0..rb {
                mult[ra + x][ra + y][ra..].copy_from_slice(&b.mult[x][y]);
            }
        }
        let labels = a
            .labels
            .iter()
            .map(|l| format!("({l},0)"))
            .chain(b.labels.iter().map(|l| format!("(0,{l})")))
            .collect();
        let unit = a.unit.iter().chain(&b.unit).copied().collect();
        Self { labels, unit, mult }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<u32>>] {
        &self.mult
    }

    pub fn mul(&self, f: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
        let r = self.dim();
        let mut out = vec![0; r];
        for a in 0..r {
            if x[a] == 0 {
                continue;
            }
            for b in 0..r {
                if y[b] == 0 {
                    continue;
                }
                f.axpy(&mut out, f.mul(x[a], y[b]), &self.mult[a][b]);
            }
        }
        out
    }

    fn basis(&self, a: usize) -> Vec<u32> {
        let mut e = vec![0; self.dim()];
        e[a] = 1;
        e
    }

    /// The Frobenius `x ↦ x^p`, which is `Z/p`-linear.
    pub fn frobenius(&self, f: PrimeField) -> Matrix {
        let r = self.dim();
        let cols: Vec<Vec<u32>> = (0..r)
            .map(|a| {
                let e = self.basis(a);
                let mut acc = self.unit.clone();
                for _ in 0..f.p() {
                    acc = self.mul(f, &acc, &e);
                }
                acc
            })
            .collect();
        Matrix::from_columns(r, &cols)
    }

    /// Associativity, commutativity and unit laws on basis elements.
    pub fn check(&self, f: PrimeField) -> Vec<String> {
        let r = self.dim();
        let mut failures = Vec::new();
        for a in 0..r {
            let ea = self.basis(a);
            if self.mul(f, &self.unit, &ea) != ea {
                failures.push(format!("unit law fails on basis element {}", self.labels[a]));
            }
            for b in 0..r {
                let eb = self.basis(b);
                if self.mul(f, &ea, &eb) != self.mul(f, &eb, &ea) {
                    failures.push(format!(
                        "not commutative on ({}, {})",
                        self.labels[a], self.labels[b]
                    ));
                }
                for c in 0..r {
                    let ec = self.basis(c);
                    let l = self.mul(f, &self.mul(f, &ea, &eb), &ec);
                    let rr = self.mul(f, &ea, &self.mul(f, &eb, &ec));
                    if l != rr {
                        failures.push(format!(
                            "not associative on ({}, {}, {})",
                            self.labels[a], self.labels[b], self.labels[c]
                        ));
                    }
                }
            }
        }
        failures
    }

    /// Whether `m: self → target` is a unital algebra map.
    pub fn is_algebra_map(&self, f: PrimeField, m: &Matrix, target: &Self) -> bool {
        if m.rows() != target.dim() || m.cols() != self.dim() {
            return false;
        }
        if m.mul_vec(f, &self.unit) != target.unit {
            return false;
        }
        (0..self.dim()).all(|a| {
            (0..self.dim()).all(|b| {
                let ea = self.basis(a);
                let eb = self.basis(b);
                m.mul_vec(f, &self.mul(f, &ea, &eb))
                    == target.mul(f, &m.mul_vec(f, &ea), &m.mul_vec(f, &eb))
            })
        })
    }
}

/// Coefficient data over an [`EquivariantSpace`].
#[derive(Clone, Debug)]
pub struct CoefficientSystem {
    field: PrimeField,
    algebras: Vec<CoefficientAlgebra>,
    /// `psi[h][local edge id]`
    psi: Vec<Vec<Matrix>>,
    /// `act[h][local edge id] = psi⁻¹`
    act: Vec<Vec<Matrix>>,
    /// indexed like [`EquivariantSpace::morphisms`]
    transfers: Vec<Matrix>,
}

impl CoefficientSystem {
    /// Checks shapes and invertibility; the algebraic laws are checked by
    /// [`validate_coefficients`].
    pub fn new(
        field: PrimeField,
        space: &EquivariantSpace,
        algebras: Vec<CoefficientAlgebra>,
        psi: Vec<Vec<Matrix>>,
        transfers: BTreeMap<OrbitMorphism, Matrix>,
    ) -> Result<Self> {
        let n = space.subgroup_count();
        if algebras.len() != n || psi.len() != n {
            return Err(Error::InvalidCoefficients(format!(
                "expected data for {n} subgroups"
            )));
        }
        let mut act = Vec::with_capacity(n);
        for h in 0..n {
            let edges = space.space(h).count(1);
            let r = algebras[h].dim();
            if psi[h].len() != edges {
                return Err(Error::InvalidCoefficients(format!(
                    "subgroup {}: {} edge matrices for {edges} edges",
                    space.category().subgroup(h),
                    psi[h].len()
                )));
            }
            let mut inv = Vec::with_capacity(edges);
            for (e, m) in psi[h].iter().enumerate() {
                if m.rows() != r || m.cols() != r {
                    return Err(Error::InvalidCoefficients(format!(
                        "subgroup {}: edge {e} matrix has the wrong size",
                        space.category().subgroup(h)
                    )));
                }
                inv.push(m.inverse(field).map_err(|_| {
                    Error::InvalidCoefficients(format!(
                        "subgroup {}: edge {e} acts by a singular matrix",
                        space.category().subgroup(h)
                    ))
                })?);
            }
            act.push(inv);
        }
        let mut ordered = Vec::with_capacity(space.morphisms().len());
        for m in space.morphisms() {
            let t = transfers.get(m).cloned().ok_or_else(|| {
                Error::InvalidCoefficients(format!(
                    "missing transfer for morphism {} → {} via `{}`",
                    space.category().subgroup(m.source),
                    space.category().subgroup(m.target),
                    space.category().group().name(m.rep)
                ))
            })?;
            if t.rows() != algebras[m.source].dim() || t.cols() != algebras[m.target].dim() {
                return Err(Error::InvalidCoefficients(format!(
                    "transfer {} → {} has the wrong size",
                    space.category().subgroup(m.source),
                    space.category().subgroup(m.target)
                )));
            }
            ordered.push(t);
        }
        Ok(Self {
            field,
            algebras,
            psi,
            act,
            transfers: ordered,
        })
    }

    /// `Z/p` everywhere with trivial actions and identity transfers.
    pub fn constant(field: PrimeField, space: &EquivariantSpace) -> Self {
        let n = space.subgroup_count();
        let algebras = vec![CoefficientAlgebra::prime_field(); n];
        let psi = (0..n)
            .map(|h| vec![Matrix::identity(1); space.space(h).count(1)])
            .collect();
        let transfers = space
            .morphisms()
            .iter()
            .map(|&m| (m, Matrix::identity(1)))
            .collect();
        Self::new(field, space, algebras, psi, transfers).expect("constant system is well formed")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn algebra(&self, h: usize) -> &CoefficientAlgebra {
        &self.algebras[h]
    }

    pub fn algebras(&self) -> &[CoefficientAlgebra] {
        &self.algebras
    }

    pub fn psi_table(&self) -> &[Vec<Matrix>] {
        &self.psi
    }

    pub fn transfer_table(&self) -> &[Matrix] {
        &self.transfers
    }

    /// `Ψ_H(y)` for an edge instance; `None` for degenerate edges.
    pub fn psi(&self, h: usize, edge: &SimplexInstance) -> Option<&Matrix> {
        (!edge.is_degenerate()).then(|| &self.psi[h][edge.base])
    }

    /// `Act(y) = Ψ_H(y)^{-1}`; `None` for degenerate edges.
    pub fn act(&self, h: usize, edge: &SimplexInstance) -> Option<&Matrix> {
        (!edge.is_degenerate()).then(|| &self.act[h][edge.base])
    }

    pub fn transfer(&self, morphism: usize) -> &Matrix {
        &self.transfers[morphism]
    }

    /// Applies an optional matrix (identity when `None`).
    pub fn apply(&self, m: Option<&Matrix>, v: &[u32]) -> Vec<u32> {
        match m {
            Some(m) => m.mul_vec(self.field, v),
            None => v.to_vec(),
        }
    }
}

/// Checks algebra laws, that edges act by algebra automorphisms, the
/// 2-simplex relations, functoriality of transfers, and naturality of the
/// action.
pub fn validate_coefficients(space: &EquivariantSpace, m: &CoefficientSystem) -> ValidationReport {
    let f = m.field;
    let cat = space.category();
    let mut report = ValidationReport::default();
    for h in 0..space.subgroup_count() {
        let hname = cat.subgroup(h).to_string();
        for msg in m.algebras[h].check(f) {
            report.failures.push(format!("M₀({hname}): {msg}"));
        }
        let alg = &m.algebras[h];
        for (e, psi) in m.psi[h].iter().enumerate() {
            if !alg.is_algebra_map(f, psi, alg) {
                report
                    .failures
                    .push(format!("Ψ_{hname}(edge {e}) is not an algebra automorphism"));
            }
        }
        let s = space.space(h);
        if s.top_dim() >= 2 {
            for z in 0..s.count(2) {
                let x = SimplexInstance::nondegenerate(2, z);
                let e01 = s.restrict(&x, &[0, 1]);
                let e12 = s.restrict(&x, &[1, 2]);
                let e02 = s.restrict(&x, &[0, 2]);
                let id = Matrix::identity(alg.dim());
                let get = |e: &SimplexInstance| m.psi(h, e).cloned().unwrap_or_else(|| id.clone());
                if get(&e02) != get(&e12).mul(f, &get(&e01)) {
                    report.failures.push(format!(
                        "2-simplex relation fails on simplex (2,{z}) of X^{hname}: Ψ(e02) ≠ Ψ(e12)Ψ(e01)"
                    ));
                }
            }
        }
    }
    for (k, mor) in space.morphisms().iter().enumerate() {
        let t = &m.transfers[k];
        let src = &m.algebras[mor.source];
        let tgt = &m.algebras[mor.target];
        let label = format!(
            "{} → {} via `{}`",
            cat.subgroup(mor.source),
            cat.subgroup(mor.target),
            cat.group().name(mor.rep)
        );
        if !tgt.is_algebra_map(f, t, src) {
            report
                .failures
                .push(format!("transfer {label} is not a unital algebra map"));
        }
        if *mor == cat.identity_morphism(mor.source) && *t != Matrix::identity(src.dim()) {
            report.failures.push(format!("transfer of identity {label} is not the identity"));
        }
        // naturality on edges of X^K
        let sk = space.space(mor.target);
        if sk.top_dim() >= 1 {
            for y in 0..sk.count(1) {
                let ay = space.translate(k, 1, y);
                let lhs = m.psi[mor.source][ay].mul(f, t);
                let rhs = t.mul(f, &m.psi[mor.target][y]);
                if lhs != rhs {
                    report.failures.push(format!(
                        "naturality fails for {label} on edge {y} of X^{}",
                        cat.subgroup(mor.target)
                    ));
                }
            }
        }
    }
    for (k1, f1) in space.morphisms().iter().enumerate() {
        for (k2, f2) in space.morphisms().iter().enumerate() {
            if f1.target != f2.source {
                continue;
            }
            let comp = cat.compose(*f1, *f2).expect("composable");
            let kc = space.morphism_index(&comp).expect("composite is listed");
            let lhs = &m.transfers[kc];
            let rhs = m.transfers[k1].mul(f, &m.transfers[k2]);
            if *lhs != rhs {
                report.failures.push(format!(
                    "transfer functoriality fails for composite {} → {}",
                    cat.subgroup(f1.source),
                    cat.subgroup(f2.target)
                ));
            }
        }
    }
    report
}

/// Offsets of full cochain coordinates in each degree.
#[derive(Clone, Debug)]
pub struct CochainLayout {
    /// `offsets[n][h]` start of the `H` block; `offsets[n][last]` = total.
    offsets: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl CochainLayout {
    pub fn new(space: &EquivariantSpace, coeffs: &CoefficientSystem) -> Self {
        let dims: Vec<usize> = coeffs.algebras.iter().map(CoefficientAlgebra::dim).collect();
        let offsets = (0..=space.top_dim())
            .map(|n| {
                let mut acc = 0;
                let mut v = Vec::with_capacity(dims.len() + 1);
                for (h, &r) in dims.iter().enumerate() {
                    v.push(acc);
                    acc += space.space(h).count(n) * r;
                }
                v.push(acc);
                v
            })
            .collect();
        Self { offsets, dims }
    }

    pub fn len(&self, n: usize) -> usize {
        *self.offsets[n].last().unwrap()
    }

    pub fn is_empty(&self, n: usize) -> bool {
        self.len(n) == 0
    }

    pub fn alg_dim(&self, h: usize) -> usize {
        self.dims[h]
    }

    /// Coordinate range of `f_H` on the nondegenerate simplex `(n, id)`.
    #[inline]
    pub fn range(&self, n: usize, h: usize, id: usize) -> std::ops::Range<usize> {
        let r = self.dims[h];
        let start = self.offsets[n][h] + id * r;
        start..start + r
    }

    /// The `(subgroup, simplex id)` owning a full coordinate.
    pub fn locate(&self, n: usize, c: usize) -> (usize, usize) {
        let offs = &self.offsets[n];
        let h = offs[..self.dims.len()].partition_point(|&start| start <= c) - 1;
        (h, (c - offs[h]) / self.dims[h])
    }

    /// Value on a simplex instance, zero when degenerate.
    pub fn value(&self, f: &[u32], h: usize, x: &SimplexInstance) -> Vec<u32> {
        if x.is_degenerate() {
            vec![0; self.dims[h]]
        } else {
            f[self.range(x.base_dim, h, x.base)].to_vec()
        }
    }
}

/// The subspace of compatible cochains in one degree. Each constraint row
/// is solved for its largest coordinate; the remaining free coordinates are
/// the subspace coordinates.
#[derive(Clone, Debug)]
pub struct CompatibleSubspace {
    full_dim: usize,
    free: Vec<usize>,
    /// `position[c]` index of `c` among the free coordinates
    position: Vec<Option<usize>>,
    /// `x_pivot = Σ coeff · x_free`, in terms of free coordinates
    solved: Vec<(usize, SparseVec)>,
    /// `basis[k]` is the compatible cochain with free coordinates `e_k`
    basis: Vec<SparseVec>,
}

impl CompatibleSubspace {
    pub fn new(
        f: PrimeField,
        space: &EquivariantSpace,
        coeffs: &CoefficientSystem,
        layout: &CochainLayout,
        n: usize,
    ) -> Self {
        let full = layout.len(n);
        let cat = space.category();
        let mut pivots: FxHashMap<usize, SparseVec> = FxHashMap::default();
        for (k, mor) in space.morphisms().iter().enumerate() {
            if *mor == cat.identity_morphism(mor.source) {
                continue;
            }
            let t = coeffs.transfer(k);
            for y in 0..space.space(mor.target).count(n) {
                let ay = space.translate(k, n, y);
                let src = layout.range(n, mor.source, ay);
                let tgt = layout.range(n, mor.target, y);
                for (i, row_idx) in src.enumerate() {
                    let mut row: SparseVec = vec![(row_idx, 1)];
                    for (c, col_idx) in tgt.clone().enumerate() {
                        let v = t.get(i, c);
                        if v != 0 {
                            row = sparse_axpy(f, &row, f.neg(v), &vec![(col_idx, 1)]);
                        }
                    }
                    // forward reduction against earlier pivots
                    while let Some(&(l, x)) = row.last() {
                        match pivots.get(&l) {
                            Some(p) => row = sparse_axpy(f, &row, f.neg(x), p),
                            None => {
                                let inv = f.inv(x);
                                for e in row.iter_mut() {
                                    e.1 = f.mul(e.1, inv);
                                }
                                pivots.insert(l, row);
                                break;
                            }
                        }
                    }
                }
            }
        }
        // back substitution in increasing pivot order leaves each row with
        // its pivot and free coordinates only
        let mut order: Vec<usize> = pivots.keys().copied().collect();
        order.sort_unstable();
        let mut done: FxHashMap<usize, SparseVec> = FxHashMap::default();
        for &p in &order {
            let mut row = pivots.remove(&p).unwrap();
            loop {
                let hit = row
                    .iter()
                    .find(|&&(c, _)| c != p && done.contains_key(&c))
                    .copied();
                match hit {
                    Some((c, x)) => row = sparse_axpy(f, &row, f.neg(x), &done[&c]),
                    None => break,
                }
            }
            done.insert(p, row);
        }
        let mut position = vec![None; full];
        let mut free = Vec::new();
        for c in 0..full {
            if !done.contains_key(&c) {
                position[c] = Some(free.len());
                free.push(c);
            }
        }
        let mut basis: Vec<SparseVec> = free.iter().map(|&c| vec![(c, 1)]).collect();
        let mut solved = Vec::with_capacity(order.len());
        for &p in &order {
            let row = &done[&p];
            let mut expr = SparseVec::new();
            for &(c, x) in row {
                if c != p {
                    let k = position[c].expect("reduced rows involve free columns");
                    expr.push((k, f.neg(x)));
                    basis[k].push((p, f.neg(x)));
                }
            }
            expr.sort_unstable();
            solved.push((p, expr));
        }
        for b in basis.iter_mut() {
            b.sort_unstable();
        }
        Self {
            full_dim: full,
            free,
            position,
            solved,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Full coordinates of `Σ c_k b_k`.
    pub fn embed(&self, f: PrimeField, coords: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.full_dim];
        for (&c, &k) in coords.iter().zip(&self.free) {
            out[k] = c;
        }
        for (p, expr) in &self.solved {
            out[*p] = expr.iter().fold(0, |acc, &(k, x)| f.add(acc, f.mul(x, coords[k])));
        }
        out
    }

    pub fn embed_sparse(&self, f: PrimeField, coords: &SparseVec) -> Vec<u32> {
        self.embed(f, &sparse_to_dense(coords, self.dim()))
    }

    /// Coordinates of a compatible cochain.
    pub fn coords(&self, full: &[u32]) -> Vec<u32> {
        self.free.iter().map(|&c| full[c]).collect()
    }

    /// Coordinates of a compatible cochain given sparsely.
    pub fn coords_sparse(&self, full: &SparseVec) -> SparseVec {
        full.iter()
            .filter_map(|&(c, x)| self.position[c].map(|k| (k, x)))
            .collect()
    }

    pub fn basis_vector(&self, k: usize) -> &SparseVec {
        &self.basis[k]
    }

    pub fn contains(&self, f: PrimeField, full: &[u32]) -> bool {
        self.solved.iter().all(|(p, expr)| {
            full[*p] == expr.iter().fold(0, |acc, &(k, x)| f.add(acc, f.mul(x, full[self.free[k]])))
        })
    }
}

/// A cochain model on an equivariant space: a coboundary and a cup product
/// on full coordinates, evaluated one simplex at a time.
pub trait CochainModel: Sync {
    fn space(&self) -> &EquivariantSpace;
    fn coefficients(&self) -> &CoefficientSystem;
    fn layout(&self) -> &CochainLayout;

    /// `(δf)_H` on the nondegenerate `(n+1)`-simplex `id` of `X^H`.
    fn coboundary_at(&self, f: &[u32], n: usize, h: usize, id: usize) -> Vec<u32>;

    /// `(a ∪ b)_H` on the nondegenerate `(n+m)`-simplex `id` of `X^H`.
    fn cup_at(&self, a: &[u32], n: usize, b: &[u32], m: usize, h: usize, id: usize) -> Vec<u32>;

    fn coboundary(&self, f: &[u32], n: usize) -> Vec<u32> {
        let layout = self.layout();
        let mut out = vec![0; layout.len(n + 1)];
        for h in 0..self.space().subgroup_count() {
            for id in 0..self.space().space(h).count(n + 1) {
                let v = self.coboundary_at(f, n, h, id);
                out[layout.range(n + 1, h, id)].copy_from_slice(&v);
            }
        }
        out
    }

    fn cup(&self, a: &[u32], n: usize, b: &[u32], m: usize) -> Vec<u32> {
        let layout = self.layout();
        let mut out = vec![0; layout.len(n + m)];
        for h in 0..self.space().subgroup_count() {
            for id in 0..self.space().space(h).count(n + m) {
                let v = self.cup_at(a, n, b, m, h, id);
                out[layout.range(n + m, h, id)].copy_from_slice(&v);
            }
        }
        out
    }
}

/// The Bredon–Illman model `S_G(X; M)`.
#[derive(Clone, Debug)]
pub struct BredonModel {
    space: EquivariantSpace,
    coeffs: CoefficientSystem,
    layout: CochainLayout,
}

impl BredonModel {
    pub fn new(space: EquivariantSpace, coeffs: CoefficientSystem) -> Result<Self> {
        validate_coefficients(&space, &coeffs).into_result(Error::InvalidCoefficients)?;
        let layout = CochainLayout::new(&space, &coeffs);
        Ok(Self {
            space,
            coeffs,
            layout,
        })
    }
}

impl CochainModel for BredonModel {
    fn space(&self) -> &EquivariantSpace {
        &self.space
    }

    fn coefficients(&self) -> &CoefficientSystem {
        &self.coeffs
    }

    fn layout(&self) -> &CochainLayout {
        &self.layout
    }

    /// `(δf)_H(x) = Act(edge01 x) f_H(d₀x) + Σ_{j≥1} (−1)^j f_H(d_j x)`.
    fn coboundary_at(&self, fv: &[u32], n: usize, h: usize, id: usize) -> Vec<u32> {
        let f = self.coeffs.field();
        let s = self.space.space(h);
        let x = SimplexInstance::nondegenerate(n + 1, id);
        let d0 = s.apply_face(&x, 0).expect("face index in range");
        let v = self.layout.value(fv, h, &d0);
        let mut val = self.coeffs.apply(self.coeffs.act(h, &edge01(s, &x)), &v);
        for j in 1..=n + 1 {
            let dj = s.apply_face(&x, j).expect("face index in range");
            if !dj.is_degenerate() {
                f.axpy(&mut val, f.sign(j), &fv[self.layout.range(n, h, dj.base)]);
            }
        }
        val
    }

    /// `(f ∪ g)_H(x) = f_H(front_n x) · Act(edge_{0n} x) g_H(back_m x)`.
    fn cup_at(&self, a: &[u32], n: usize, b: &[u32], m: usize, h: usize, id: usize) -> Vec<u32> {
        let f = self.coeffs.field();
        let s = self.space.space(h);
        let x = SimplexInstance::nondegenerate(n + m, id);
        let front = s.restrict(&x, &(0..=n).collect::<Vec<_>>());
        let back = s.restrict(&x, &(n..=n + m).collect::<Vec<_>>());
        let fv = self.layout.value(a, h, &front);
        let gv = self.layout.value(b, h, &back);
        if fv.iter().all(|&c| c == 0) || gv.iter().all(|&c| c == 0) {
            return vec![0; self.layout.alg_dim(h)];
        }
        let moved = if n == 0 {
            gv
        } else {
            self.coeffs.apply(self.coeffs.act(h, &s.restrict(&x, &[0, n])), &gv)
        };
        self.coeffs.algebra(h).mul(f, &fv, &moved)
    }
}

/// The unit cochain `v ↦ 1` in degree 0.
pub fn unit_cochain(space: &EquivariantSpace, coeffs: &CoefficientSystem, layout: &CochainLayout) -> Vec<u32> {
    let mut out = vec![0; layout.len(0)];
    for h in 0..space.subgroup_count() {
        out[layout.range(0, h, 0)].copy_from_slice(coeffs.algebra(h).unit());
    }
    out
}

/// Cohomology of a cochain model up to a maximal degree, with cochains
/// restricted to the compatible subspaces.
#[derive(Clone, Debug)]
pub struct ModelCohomology {
    field: PrimeField,
    subspaces: Vec<CompatibleSubspace>,
    reduction: SparseCohomology,
}

impl ModelCohomology {
    /// Requires `top_dim ≥ max_degree + 1`.
    pub fn compute<M: CochainModel>(model: &M, max_degree: usize) -> Result<Self> {
        let space = model.space();
        let available = space.top_dim();
        if available < max_degree + 1 {
            return Err(Error::InsufficientTruncation {
                degree: max_degree,
                required: max_degree + 1,
                available,
            });
        }
        let coeffs = model.coefficients();
        let f = coeffs.field();
        let layout = model.layout();
        let subspaces: Vec<CompatibleSubspace> = (0..=max_degree + 1)
            .map(|n| CompatibleSubspace::new(f, space, coeffs, layout, n))
            .collect();
        let deltas: Vec<Vec<SparseVec>> = (0..=max_degree)
            .map(|n| sparse_coboundary_columns(model, &subspaces[n], &subspaces[n + 1], n))
            .collect();
        let dims = subspaces.iter().map(CompatibleSubspace::dim).collect();
        let reduction = SparseCohomology::new(f, dims, &deltas)?;
        Ok(Self {
            field: f,
            subspaces,
            reduction,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.reduction.max_degree()
    }

    pub fn dimension(&self, n: usize) -> usize {
        self.reduction.dimension(n)
    }

    pub fn dimensions(&self) -> Vec<usize> {
        (0..=self.max_degree()).map(|n| self.dimension(n)).collect()
    }

    pub fn subspace(&self, n: usize) -> &CompatibleSubspace {
        &self.subspaces[n]
    }

    /// Full-coordinate representative of a class.
    pub fn representative(&self, n: usize, coords: &[u32]) -> Vec<u32> {
        let s = self.reduction.representative(n, coords);
        self.subspaces[n].embed_sparse(self.field, &s)
    }

    /// Class of a full-coordinate cocycle.
    pub fn class_of(&self, n: usize, cocycle: &[u32]) -> Result<Vec<u32>> {
        if !self.subspaces[n].contains(self.field, cocycle) {
            return Err(Error::Internal(format!("degree {n} cochain is not compatible")));
        }
        let coords = sparse_from_dense(&self.subspaces[n].coords(cocycle));
        self.reduction.class_of(n, &coords)
    }

    /// A uniformly random compatible cochain.
    pub fn random_cochain(&self, n: usize, rng: &mut impl Rng) -> Vec<u32> {
        let s = &self.subspaces[n];
        let coords: Vec<u32> = (0..s.dim()).map(|_| rng.gen_range(0..self.field.p())).collect();
        s.embed(self.field, &coords)
    }

    /// Product of two classes, as class coordinates in degree `n + m`.
    pub fn cup_classes<M: CochainModel>(
        &self,
        model: &M,
        n: usize,
        x: &[u32],
        m: usize,
        y: &[u32],
    ) -> Result<Vec<u32>> {
        let a = self.representative(n, x);
        let b = self.representative(m, y);
        self.class_of(n + m, &model.cup(&a, n, &b, m))
    }
}

/// Coboundaries of the basis of `src`, in the coordinates of `dst`. Only
/// simplices having a face in the support of a basis cochain are visited.
fn sparse_coboundary_columns<M: CochainModel>(
    model: &M,
    src: &CompatibleSubspace,
    dst: &CompatibleSubspace,
    n: usize,
) -> Vec<SparseVec> {
    let space = model.space();
    let layout = model.layout();
    let f = model.coefficients().field();
    let mut full = vec![0; src.full_dim()];
    let mut columns = Vec::with_capacity(src.dim());
    for k in 0..src.dim() {
        let b = src.basis_vector(k);
        for &(c, x) in b {
            full[c] = x;
        }
        let mut touched: Vec<(usize, usize)> = Vec::new();
        for &(c, _) in b {
            let (h, y) = layout.locate(n, c);
            touched.extend(space.cofaces(h, n, y).iter().map(|&x| (h, x)));
        }
        touched.sort_unstable();
        touched.dedup();
        let mut image = SparseVec::new();
        for (h, x) in touched {
            let v = model.coboundary_at(&full, n, h, x);
            let start = layout.range(n + 1, h, x).start;
            for (i, &val) in v.iter().enumerate() {
                if val != 0 {
                    image.push((start + i, val));
                }
            }
        }
        image.sort_unstable();
        debug_assert!(
            dst.contains(f, &sparse_to_dense(&image, dst.full_dim())),
            "coboundary left the compatible subspace"
        );
        columns.push(dst.coords_sparse(&image));
        for &(c, _) in b {
            full[c] = 0;
        }
    }
    columns
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orbit::FiniteGroup;
    use crate::simplex::{nerve, GSimplicialSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn leibniz_and_dd<M: CochainModel>(model: &M, max: usize, samples: usize) {
        let f = model.coefficients().field();
        let h = ModelCohomology::compute(model, max).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..max {
            for _ in 0..samples {
                let a = h.random_cochain(n, &mut rng);
                let da = model.coboundary(&a, n);
                assert!(h.subspace(n + 1).contains(f, &da));
                assert!(model.coboundary(&da, n + 1).iter().all(|&x| x == 0), "δδ ≠ 0");
                for m in 0..max - n {
                    let b = h.random_cochain(m, &mut rng);
                    let db = model.coboundary(&b, m);
                    let lhs = model.coboundary(&model.cup(&a, n, &b, m), n + m);
                    let mut rhs = model.cup(&da, n + 1, &b, m);
                    let right = model.cup(&a, n, &db, m + 1);
                    f.axpy(&mut rhs, f.sign(n), &right);
                    assert_eq!(lhs, rhs, "Leibniz fails in degrees ({n},{m})");
                    assert!(h.subspace(n + m).contains(f, &model.cup(&a, n, &b, m)));
                }
            }
        }
    }

    #[test]
    fn constant_coefficients_on_bz3() {
        let f = f3();
        let space = EquivariantSpace::new(nerve(&FiniteGroup::cyclic(3), 5, None).unwrap());
        let coeffs = CoefficientSystem::constant(f, &space);
        let model = BredonModel::new(space, coeffs).unwrap();
        let h = ModelCohomology::compute(&model, 3).unwrap();
        assert_eq!(h.dimensions(), vec![1, 1, 1, 1]);
        leibniz_and_dd(&model, 4, 10);
    }

    #[test]
    fn frobenius_coefficients_on_bz3() {
        let fx = fixtures::frobenius_bz3(5).unwrap();
        let validation = validate_coefficients(&fx.space, &fx.coefficients);
        assert!(validation.is_valid(), "{:?}", validation.failures);
        let model = BredonModel::new(fx.space, fx.coefficients).unwrap();
        let h = ModelCohomology::compute(&model, 3).unwrap();
        assert_eq!(h.dimensions(), vec![1, 0, 0, 0]);
        leibniz_and_dd(&model, 4, 10);
    }

    #[test]
    fn z2_on_nerve_fixtures() {
        for fx in [
            fixtures::z2_on_bz3_constant(5).unwrap(),
            fixtures::z2_on_bz3_f27(5).unwrap(),
        ] {
            let v = validate_coefficients(&fx.space, &fx.coefficients);
            assert!(v.is_valid(), "{}: {:?}", fx.name, v.failures);
            let model = BredonModel::new(fx.space, fx.coefficients).unwrap();
            leibniz_and_dd(&model, 4, 8);
        }
    }

    #[test]
    fn broken_two_simplex_relation_is_reported() {
        let f = f3();
        let space = EquivariantSpace::new(nerve(&FiniteGroup::cyclic(3), 3, None).unwrap());
        let mut coeffs = CoefficientSystem::constant(f, &space);
        coeffs.psi[0][0] = Matrix::from_rows(f, &[vec![2]]).unwrap();
        coeffs.act[0][0] = Matrix::from_rows(f, &[vec![2]]).unwrap();
        let report = validate_coefficients(&space, &coeffs);
        assert!(report.failures.iter().any(|m| m.contains("2-simplex relation")));
    }

    #[test]
    fn trivial_z2_action_matches_nonequivariant() {
        let f = f3();
        let gamma = FiniteGroup::cyclic(3);
        let g = FiniteGroup::cyclic(2);
        let trivial = vec![vec![0, 1, 2]; 2];
        let x = nerve(&gamma, 5, Some((g, trivial))).unwrap();
        let space = EquivariantSpace::new(x);
        let coeffs = CoefficientSystem::constant(f, &space);
        let model = BredonModel::new(space, coeffs).unwrap();
        let eq = ModelCohomology::compute(&model, 4).unwrap();
        let plain = EquivariantSpace::new(GSimplicialSet::untwisted(nerve(&gamma, 5, None).unwrap().space().clone()).unwrap());
        let c = CoefficientSystem::constant(f, &plain);
        let plain_model = BredonModel::new(plain, c).unwrap();
        let ne = ModelCohomology::compute(&plain_model, 4).unwrap();
        assert_eq!(eq.dimensions(), ne.dimensions());
    }

    #[test]
    fn edge01_examples() {
        let g = FiniteGroup::cyclic(3);
        let x = nerve(&g, 3, None).unwrap();
        let s = x.space();
        let coding = crate::simplex::NerveCoding::new(&g);
        let y = SimplexInstance::nondegenerate(1, 0);
        assert_eq!(edge01(s, &y), y);
        let z = SimplexInstance::nondegenerate(2, coding.id(&[1, 2]));
        assert_eq!(edge01(s, &z), coding.instance(&[1]));
        let v = SimplexInstance::nondegenerate(0, 0).degenerate(0);
        assert!(edge01(s, &v).is_degenerate());
    }

    #[test]
    fn insufficient_truncation_is_an_error() {
        let f = f3();
        let space = EquivariantSpace::new(nerve(&FiniteGroup::cyclic(3), 3, None).unwrap());
        let coeffs = CoefficientSystem::constant(f, &space);
        let model = BredonModel::new(space, coeffs).unwrap();
        assert!(matches!(
            ModelCohomology::compute(&model, 3),
            Err(Error::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn f27_is_a_field_with_order_three_frobenius() {
        let f = f3();
        let a = fixtures::f27();
        assert!(a.check(f).is_empty());
        let fr = a.frobenius(f);
        assert!(a.is_algebra_map(f, &fr, &a));
        assert_eq!(fr.mul(f, &fr).mul(f, &fr), Matrix::identity(3));
        assert_ne!(fr, Matrix::identity(3));
    }
}
