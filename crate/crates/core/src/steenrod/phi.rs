//! Universal values of the equivariant diagonal `Φ: W ⊗ C(L^p) → W ⊗ C(L)^{⊗p}`.
//!
//! By naturality `Φ` is determined by its values on `e_i ⊗ (ι_j, …, ι_j)`,
//! the diagonal generic simplex of `Δ[j]^p`. These are built by induction
//! on `(i, j)`: the boundary of the sought value is forced by the chain-map
//! equation and assembled from earlier entries, then lifted through a
//! contraction of `W ⊗ C(Δ[j])^{⊗p}` (or, for small entries, by solving the
//! linear system directly).

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::w::{w_contraction_gen, w_diff_gen, WGen};
use crate::chains::{aw_universal, mask_dim, Apex, ConeContraction, MaskWord};
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix, PrimeField};
use crate::sparse::{sparse_axpy, SparseSolver, SparseVec};

/// How entries with `i, j ≥ 1` are lifted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lift {
    /// `s_W ⊗ 1 + ηε ⊗ h` with `h` the cone contraction at the given apex.
    Contraction(Apex),
    /// Exact linear solve for entries with `i + j ≤ max_total`, contraction
    /// at vertex 0 above.
    LinearSolve { max_total: u32 },
}

impl Lift {
    pub fn label(&self) -> String {
        match self {
            Lift::Contraction(Apex::First) => "cone-first".into(),
            Lift::Contraction(Apex::Last) => "cone-last".into(),
            Lift::LinearSolve { max_total } => format!("solve-{max_total}"),
        }
    }
}

pub(crate) type Acc = FxHashMap<(WGen, MaskWord), u32>;

fn acc_add(f: PrimeField, acc: &mut Acc, key: (WGen, MaskWord), c: u32) {
    if c == 0 {
        return;
    }
    let e = acc.entry(key).or_insert(0);
    *e = f.add(*e, c);
    if *e == 0 {
        acc.remove(&key);
    }
}

fn signed(f: PrimeField, odd: bool, c: u32) -> u32 {
    if odd {
        f.neg(c)
    } else {
        c
    }
}

/// `Φ(e_i ⊗ ι_j)`: a combination of `α^a e_m ⊗ (x_1 ⊗ ⋯ ⊗ x_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEntry {
    pub i: u32,
    pub j: u32,
    terms: Vec<(WGen, MaskWord, u32)>,
    /// `(ε ⊗ 1)` of the entry.
    augmented: Vec<(MaskWord, u32)>,
}

impl PhiEntry {
    fn from_acc(f: PrimeField, i: u32, j: u32, acc: Acc) -> Self {
        let mut terms: Vec<(WGen, MaskWord, u32)> =
            acc.into_iter().map(|((w, m), c)| (w, m, c)).collect();
        terms.sort_unstable();
        let mut aug: BTreeMap<MaskWord, u32> = BTreeMap::new();
        for &(w, m, c) in &terms {
            if w.index == 0 {
                let e = aug.entry(m).or_insert(0);
                *e = f.add(*e, c);
            }
        }
        let augmented = aug.into_iter().filter(|&(_, c)| c != 0).collect();
        Self {
            i,
            j,
            terms,
            augmented,
        }
    }

    pub fn terms(&self) -> &[(WGen, MaskWord, u32)] {
        &self.terms
    }

    pub fn augmented(&self) -> &[(MaskWord, u32)] {
        &self.augmented
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Total differential on `W ⊗ C(Δ)^{⊗p}`:
/// `d(w ⊗ x) = dw ⊗ x + (−1)^{|w|} w ⊗ ∂x`.
pub(crate) fn total_diff(f: PrimeField, p: usize, terms: impl Iterator<Item = ((WGen, MaskWord), u32)>) -> Acc {
    let mut out = Acc::default();
    for ((w, m), c) in terms {
        for (dw, a) in w_diff_gen(f, w).terms() {
            acc_add(f, &mut out, (dw, m), f.mul(a, c));
        }
        let odd_w = w.index % 2 == 1;
        for (odd, dm) in m.boundary(p) {
            acc_add(f, &mut out, (w, dm), signed(f, odd ^ odd_w, c));
        }
    }
    out
}

/// `α^k` acting diagonally on a term.
#[inline]
pub(crate) fn act_alpha(p: usize, w: WGen, m: MaskWord, k: u32) -> (bool, WGen, MaskWord) {
    let mut odd = false;
    let mut word = m;
    for _ in 0..k {
        let (o, next) = word.rotate(p);
        odd ^= o;
        word = next;
    }
    (odd, w.shift(k, p as u32), word)
}

/// Memoized universal values for one prime and one lifting method.
#[derive(Debug)]
pub struct PhiTable {
    field: PrimeField,
    p: usize,
    lift: Lift,
    entries: RwLock<FxHashMap<(u32, u32), Arc<PhiEntry>>>,
}

impl PhiTable {
    pub fn new(field: PrimeField, lift: Lift) -> Result<Self> {
        let p = field.p() as usize;
        if p > MaskWord::MAX_FACTORS {
            return Err(Error::InvalidCoefficients(format!(
                "p = {p} exceeds the supported tensor width"
            )));
        }
        Ok(Self {
            field,
            p,
            lift,
            entries: RwLock::new(FxHashMap::default()),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn lift(&self) -> Lift {
        self.lift
    }

    pub fn cached(&self) -> Vec<(u32, u32)> {
        let mut keys: Vec<_> = self.entries.read().unwrap().keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    fn lookup(&self, i: u32, j: u32) -> Option<Arc<PhiEntry>> {
        self.entries.read().unwrap().get(&(i, j)).cloned()
    }

    /// `Φ(e_i ⊗ ι_j)`, computing and caching all prerequisites.
    pub fn entry(&self, i: u32, j: u32) -> Result<Arc<PhiEntry>> {
        if j > 15 {
            return Err(Error::DimensionMismatch(format!(
                "universal simplex Δ[{j}] exceeds the supported dimension"
            )));
        }
        if let Some(e) = self.lookup(i, j) {
            return Ok(e);
        }
        // antidiagonals in increasing order; each depends only on the
        // previous one
        for total in 0..=i + j {
            let lo = total.saturating_sub(j);
            let hi = total.min(i);
            let missing: Vec<(u32, u32)> = (lo..=hi)
                .map(|a| (a, total - a))
                .filter(|&(a, b)| self.lookup(a, b).is_none())
                .collect();
            let computed: Vec<Result<((u32, u32), PhiEntry)>> = {
                use rayon::prelude::*;
                missing
                    .par_iter()
                    .map(|&(a, b)| Ok(((a, b), self.compute(a, b)?)))
                    .collect()
            };
            let mut guard = self.entries.write().unwrap();
            for r in computed {
                let (key, e) = r?;
                guard.entry(key).or_insert_with(|| Arc::new(e));
            }
        }
        Ok(self.lookup(i, j).expect("entry computed"))
    }

    fn compute(&self, i: u32, j: u32) -> Result<PhiEntry> {
        let f = self.field;
        let p = self.p;
        if i == 0 {
            let mut acc = Acc::default();
            for w in aw_universal(j as usize, p) {
                acc_add(f, &mut acc, (WGen::e(0), w), 1);
            }
            return Ok(PhiEntry::from_acc(f, 0, j, acc));
        }
        if j == 0 {
            let mut acc = Acc::default();
            acc_add(f, &mut acc, (WGen::e(i), MaskWord::from_masks(&vec![1; p])), 1);
            return Ok(PhiEntry::from_acc(f, i, 0, acc));
        }
        let rhs = self.rhs(i, j)?;
        let lifted = match self.lift {
            Lift::Contraction(apex) => self.lift_contraction(&rhs, j, apex),
            Lift::LinearSolve { max_total } if i + j <= max_total => self.lift_solve(&rhs, i, j)?,
            Lift::LinearSolve { .. } => self.lift_contraction(&rhs, j, Apex::First),
        };
        // chain-map equation d(entry) = rhs
        let d = total_diff(f, p, lifted.iter().map(|(&k, &c)| (k, c)));
        if d != rhs {
            return Err(Error::Internal(format!(
                "Φ({i},{j}) fails the chain-map equation"
            )));
        }
        Ok(PhiEntry::from_acc(f, i, j, lifted))
    }

    /// `Φ(d e_i ⊗ ι_j) + (−1)^i Σ_a (−1)^a (δ_a)_* Φ(e_i ⊗ ι_{j−1})`, the
    /// boundary the entry `(i, j)` must have.
    fn rhs(&self, i: u32, j: u32) -> Result<Acc> {
        let acc = self.rhs_unchecked(i, j)?;
        if !total_diff(self.field, self.p, acc.iter().map(|(&k, &c)| (k, c))).is_empty() {
            return Err(Error::Internal(format!(
                "boundary data for Φ({i},{j}) is not a cycle"
            )));
        }
        Ok(acc)
    }

    fn rhs_unchecked(&self, i: u32, j: u32) -> Result<Acc> {
        let f = self.field;
        let p = self.p;
        let missing = || Error::Internal("missing Φ prerequisite".into());
        let mut acc = Acc::default();
        if i > 0 {
            let below = self.lookup(i - 1, j).ok_or_else(missing)?;
            // d e_i = Σ_k c_k α^k e_{i-1}
            for (g, c) in w_diff_gen(f, WGen::e(i)).terms() {
                for &(w, m, x) in below.terms() {
                    let (odd, w2, m2) = act_alpha(p, w, m, g.power);
                    acc_add(f, &mut acc, (w2, m2), signed(f, odd, f.mul(c, x)));
                }
            }
        }
        if j > 0 {
            let left = self.lookup(i, j - 1).ok_or_else(missing)?;
            for a in 0..=j as usize {
                let sign = f.sign(i as usize + a);
                for &(w, m, x) in left.terms() {
                    acc_add(f, &mut acc, (w, m.coface(p, a)), f.mul(sign, x));
                }
            }
        }
        Ok(acc)
    }

    /// Re-checks a cached entry against the defining conditions: the chain-map
    /// equation, equivariance (`α^p` acts trivially and `α` commutes with the
    /// differential), the identity on vertices, Alexander-Whitney at `e₀`, and
    /// the simplex-degree bound `≤ p·j`. Returns the failures.
    pub fn verify_entry(&self, i: u32, j: u32) -> Result<Vec<String>> {
        let f = self.field;
        let p = self.p;
        let entry = self.entry(i, j)?;
        if i > 0 {
            self.entry(i - 1, j)?;
        }
        if j > 0 {
            self.entry(i, j - 1)?;
        }
        let mut failures = Vec::new();
        let terms = || entry.terms().iter().map(|&(w, m, c)| ((w, m), c));
        let own: Acc = terms().collect();
        let d_own = total_diff(f, p, terms());
        // d(entry) = rhs already makes rhs a cycle
        if d_own != self.rhs_unchecked(i, j)? {
            failures.push(format!("Φ({i},{j}): chain-map equation"));
        }
        let rotate = |acc: &Acc, k: u32| -> Acc {
            let mut out = Acc::default();
            for (&(w, m), &c) in acc {
                let (odd, w2, m2) = act_alpha(p, w, m, k);
                acc_add(f, &mut out, (w2, m2), signed(f, odd, c));
            }
            out
        };
        if rotate(&own, p as u32) != own {
            failures.push(format!("Φ({i},{j}): α^p does not act trivially"));
        }
        let d_then_rotate = rotate(&d_own, 1);
        let rotated = rotate(&own, 1);
        if total_diff(f, p, rotated.iter().map(|(&k, &c)| (k, c))) != d_then_rotate {
            failures.push(format!("Φ({i},{j}): α does not commute with d"));
        }
        if j == 0 {
            let vertex = MaskWord::from_masks(&vec![1; p]);
            if entry.terms() != [(WGen::e(i), vertex, 1)] {
                failures.push(format!("Φ({i},0) is not the identity on vertices"));
            }
        }
        if i == 0 {
            let mut aw: Vec<_> = aw_universal(j as usize, p)
                .into_iter()
                .map(|m| (WGen::e(0), m, 1))
                .collect();
            aw.sort_unstable();
            if entry.terms() != aw.as_slice() {
                failures.push(format!("Φ(0,{j}) is not the Alexander-Whitney diagonal"));
            }
        }
        if let Some(&(_, m, _)) = entry.terms().iter().find(|(_, m, _)| m.degree(p) > p * j as usize) {
            failures.push(format!(
                "Φ({i},{j}): term of simplex degree {} exceeds {}",
                m.degree(p),
                p * j as usize
            ));
        }
        Ok(failures)
    }

    fn lift_contraction(&self, rhs: &Acc, j: u32, apex: Apex) -> Acc {
        let f = self.field;
        let p = self.p;
        let h = ConeContraction::new(j as usize, apex);
        let mut out = Acc::default();
        let mut keys: Vec<_> = rhs.iter().map(|(&k, &c)| (k, c)).collect();
        keys.sort_unstable();
        for ((w, m), c) in keys {
            for (s, a) in w_contraction_gen(f, w).terms() {
                acc_add(f, &mut out, (s, m), f.mul(a, c));
            }
            if w.index == 0 {
                for (odd, hm) in m.contract(p, &h) {
                    acc_add(f, &mut out, (WGen::e(0), hm), signed(f, odd, c));
                }
            }
        }
        out
    }

    /// Solves `d X = rhs` degree by degree in `W`, from the top: the
    /// `W_m`-component of the equation reads `d_W X_{m+1} + (−1)^m ∂X_m =
    /// rhs_m`, each a finite linear system.
    fn lift_solve(&self, rhs: &Acc, i: u32, j: u32) -> Result<Acc> {
        let f = self.field;
        let p = self.p;
        let total = (i + j) as usize;
        let by_w = |acc: &Acc, m: usize| -> BTreeMap<(u32, MaskWord), u32> {
            acc.iter()
                .filter(|((w, _), _)| w.index as usize == m)
                .map(|(&(w, mw), &c)| ((w.power, mw), c))
                .collect()
        };
        let words = |deg: usize| words_of_degree(j as usize, p, deg);
        let mut out = Acc::default();
        // X_total lives in W_total ⊗ C_0: choose y ⊗ v₀^{⊗p} with d_W y equal
        // to the augmentation of rhs_{total-1}
        let top_target: Vec<u32> = {
            let mut t = vec![0; p];
            for ((a, mw), c) in by_w(rhs, total - 1) {
                if mw.degree(p) == 0 {
                    t[a as usize] = f.add(t[a as usize], c);
                }
            }
            t
        };
        let mut dw = Matrix::zeros(p, p);
        for a in 0..p as u32 {
            for (g, c) in w_diff_gen(f, WGen::new(a, total as u32)).terms() {
                let cur = dw.get(g.power as usize, a as usize);
                dw.set(g.power as usize, a as usize, f.add(cur, c));
            }
        }
        let y = solve(f, &dw, &top_target)?;
        let vertex = MaskWord::from_masks(&vec![1; p]);
        for (a, &c) in y.iter().enumerate() {
            acc_add(f, &mut out, (WGen::new(a as u32, total as u32), vertex), c);
        }
        for m in (0..total).rev() {
            // target = (−1)^m (rhs_m − d_W X_{m+1}), a chain of degree total−1−m
            let mut target = by_w(rhs, m);
            let x_above: Vec<((WGen, MaskWord), u32)> = out
                .iter()
                .filter(|((w, _), _)| w.index as usize == m + 1)
                .map(|(&k, &c)| (k, c))
                .collect();
            for ((w, mw), c) in x_above {
                for (g, a) in w_diff_gen(f, w).terms() {
                    let e = target.entry((g.power, mw)).or_insert(0);
                    *e = f.sub(*e, f.mul(a, c));
                }
            }
            let sign = f.sign(m);
            let deg = total - m;
            let cols = words(deg);
            let rows = words(deg - 1);
            let row_index: FxHashMap<MaskWord, usize> =
                rows.iter().enumerate().map(|(r, &w)| (w, r)).collect();
            let columns: Vec<SparseVec> = cols
                .iter()
                .map(|w| {
                    let mut col = SparseVec::new();
                    for (odd, face) in w.boundary(p) {
                        col = sparse_axpy(f, &col, signed(f, odd, 1), &vec![(row_index[&face], 1)]);
                    }
                    col
                })
                .collect();
            let solver = SparseSolver::new(f, &columns);
            for a in 0..p as u32 {
                let mut b = SparseVec::new();
                for (&(pw, mw), &c) in &target {
                    if pw == a && c != 0 {
                        let r = *row_index.get(&mw).ok_or_else(|| {
                            Error::Internal("Φ lift target outside the expected degree".into())
                        })?;
                        b.push((r, f.mul(sign, c)));
                    }
                }
                if b.is_empty() {
                    continue;
                }
                b.sort_unstable();
                let x = solver.solve(&b).ok_or(Error::NoSolution)?;
                for (cidx, c) in x {
                    acc_add(f, &mut out, (WGen::new(a, m as u32), cols[cidx]), c);
                }
            }
        }
        Ok(out)
    }
}

/// All p-fold words of simplices of `Δ[n]` with total dimension `deg`, in
/// increasing packed order.
pub fn words_of_degree(n: usize, p: usize, deg: usize) -> Vec<MaskWord> {
    let masks: Vec<u32> = (1u32..(1 << (n + 1))).collect();
    let mut out = Vec::new();
    fn rec(masks: &[u32], p: usize, k: usize, left: usize, cur: MaskWord, out: &mut Vec<MaskWord>) {
        if k == p {
            if left == 0 {
                out.push(cur);
            }
            return;
        }
        for &m in masks {
            let d = mask_dim(m);
            if d <= left {
                rec(masks, p, k + 1, left - d, cur.with(k, m), out);
            }
        }
    }
    rec(&masks, p, 0, deg, MaskWord(0), &mut out);
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::interval_mask;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn base_cases() {
        let t = PhiTable::new(f3(), Lift::Contraction(Apex::First)).unwrap();
        let e = t.entry(0, 1).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.terms().iter().all(|&(w, _, c)| w == WGen::e(0) && c == 1));
        let e = t.entry(4, 0).unwrap();
        assert_eq!(e.terms(), &[(WGen::e(4), MaskWord::from_masks(&[1, 1, 1]), 1)]);
        let e = t.entry(0, 2).unwrap();
        assert!(e
            .terms()
            .iter()
            .any(|&(_, m, _)| m == MaskWord::from_masks(&[1, interval_mask(0, 2), 0b100])));
    }

    #[test]
    fn cached_entries_pass_verification() {
        for lift in [Lift::Contraction(Apex::First), Lift::LinearSolve { max_total: 5 }] {
            let t = PhiTable::new(f3(), lift).unwrap();
            for i in 0..=4 {
                for j in 0..=4 - i {
                    assert!(t.verify_entry(i, j).unwrap().is_empty(), "{} ({i},{j})", lift.label());
                }
            }
        }
        let t = PhiTable::new(PrimeField::new(2).unwrap(), Lift::Contraction(Apex::Last)).unwrap();
        assert!(t.verify_entry(3, 3).unwrap().is_empty());
    }

    #[test]
    fn verification_catches_a_corrupted_entry() {
        let t = PhiTable::new(f3(), Lift::Contraction(Apex::First)).unwrap();
        let good = t.entry(2, 2).unwrap();
        let mut bad = (*good).clone();
        bad.terms[0].2 = f3().add(bad.terms[0].2, 1);
        t.entries.write().unwrap().insert((2, 2), Arc::new(bad));
        let failures = t.verify_entry(2, 2).unwrap();
        assert!(failures.iter().any(|m| m.contains("chain-map")), "{failures:?}");
    }

    #[test]
    fn entries_satisfy_degree_bound_and_chain_equation() {
        for lift in [
            Lift::Contraction(Apex::First),
            Lift::Contraction(Apex::Last),
            Lift::LinearSolve { max_total: 4 },
        ] {
            let t = PhiTable::new(f3(), lift).unwrap();
            for i in 0..=3 {
                for j in 0..=3 {
                    let e = t.entry(i, j).unwrap();
                    for &(w, m, _) in e.terms() {
                        assert_eq!(w.index as usize + m.degree(3), (i + j) as usize);
                        assert!(m.degree(3) <= 3 * j as usize);
                    }
                }
            }
        }
    }

    #[test]
    fn lifts_differ_but_agree_at_the_base() {
        let a = PhiTable::new(f3(), Lift::Contraction(Apex::First)).unwrap();
        let b = PhiTable::new(f3(), Lift::Contraction(Apex::Last)).unwrap();
        assert_eq!(a.entry(0, 3).unwrap(), b.entry(0, 3).unwrap());
        assert_ne!(a.entry(2, 2).unwrap().terms(), b.entry(2, 2).unwrap().terms());
    }

    #[test]
    fn words_of_degree_counts() {
        // Δ[1]: 2 vertices, 1 edge; degree-1 words over 2 factors: 2·1 + 1·2
        assert_eq!(words_of_degree(1, 2, 1).len(), 4);
        assert_eq!(words_of_degree(1, 2, 0).len(), 4);
    }
}
