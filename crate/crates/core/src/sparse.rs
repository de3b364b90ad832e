//! Sparse vectors over `Z/p` and cohomology of sparse cochain complexes by
//! column reduction with clearing.
//!
//! Coboundaries are given as sparse columns, one per basis cochain. Columns
//! are reduced left to right so that nonzero reduced columns have distinct
//! lowest (largest-index) entries. A basis cochain whose reduced column
//! vanishes and which is not the low of any column of the previous degree
//! is essential; its accumulated combination is a cocycle representing a
//! basis class. Every cocycle is then uniquely a combination of the
//! reduced coboundaries and the essential cocycles, read off by lows.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::linalg::PrimeField;

/// Sorted `(index, nonzero value)` pairs.
pub type SparseVec = Vec<(usize, u32)>;

pub fn sparse_from_dense(v: &[u32]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|&(_, &x)| x != 0)
        .map(|(i, &x)| (i, x))
        .collect()
}

pub fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for &(i, x) in v {
        out[i] = x;
    }
    out
}

/// `a + c·b`.
pub fn sparse_axpy(f: PrimeField, a: &SparseVec, c: u32, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let x = f.mul(c, b[j].1);
            if x != 0 {
                out.push((b[j].0, x));
            }
            j += 1;
        } else {
            let x = f.add(a[i].1, f.mul(c, b[j].1));
            if x != 0 {
                out.push((a[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn low(v: &SparseVec) -> Option<(usize, u32)> {
    v.last().copied()
}

#[derive(Clone, Debug, Default)]
struct Degree {
    /// reduced coboundaries of this degree's basis, by low (in the next degree)
    reduced: FxHashMap<usize, SparseVec>,
    /// `(cell, cocycle)` in increasing cell order
    essential: Vec<(usize, SparseVec)>,
    essential_index: FxHashMap<usize, usize>,
}

/// Cohomology of `C⁰ → C¹ → ⋯ → C^{N+1}` in degrees `0..=N`.
#[derive(Clone, Debug)]
pub struct SparseCohomology {
    field: PrimeField,
    dims: Vec<usize>,
    degrees: Vec<Degree>,
}

impl SparseCohomology {
    /// `deltas[n][k]` is the coboundary of basis cochain `k` of degree `n`;
    /// `dims[n]` the dimension of `Cⁿ` (one more entry than `deltas`).
    pub fn new(f: PrimeField, dims: Vec<usize>, deltas: &[Vec<SparseVec>]) -> Result<Self> {
        if dims.len() != deltas.len() + 1 || deltas.iter().zip(&dims).any(|(d, &n)| d.len() != n) {
            return Err(Error::DimensionMismatch("coboundary columns do not match dimensions".into()));
        }
        let mut degrees: Vec<Degree> = Vec::with_capacity(deltas.len());
        for (n, cols) in deltas.iter().enumerate() {
            let cleared: &FxHashMap<usize, SparseVec> = match n {
                0 => &FxHashMap::default(),
                _ => &degrees[n - 1].reduced,
            };
            let mut reduced: FxHashMap<usize, SparseVec> = FxHashMap::default();
            let mut combos: FxHashMap<usize, SparseVec> = FxHashMap::default();
            let mut essential = Vec::new();
            for (cell, col) in cols.iter().enumerate() {
                if cleared.contains_key(&cell) {
                    continue;
                }
                let mut r = col.clone();
                let mut v: SparseVec = vec![(cell, 1)];
                while let Some((l, x)) = low(&r) {
                    let Some(other) = reduced.get(&l) else { break };
                    let c = f.neg(f.mul(x, f.inv(low(other).unwrap().1)));
                    r = sparse_axpy(f, &r, c, other);
                    v = sparse_axpy(f, &v, c, &combos[&l]);
                }
                match low(&r) {
                    Some((l, _)) => {
                        reduced.insert(l, r);
                        combos.insert(l, v);
                    }
                    None => essential.push((cell, v)),
                }
            }
            let essential_index = essential.iter().enumerate().map(|(k, (cell, _))| (*cell, k)).collect();
            degrees.push(Degree {
                reduced,
                essential,
                essential_index,
            });
        }
        Ok(Self {
            field: f,
            dims,
            degrees,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn dimension(&self, n: usize) -> usize {
        self.degrees[n].essential.len()
    }

    pub fn cochain_dim(&self, n: usize) -> usize {
        self.dims[n]
    }

    pub fn representative(&self, n: usize, coords: &[u32]) -> SparseVec {
        let f = self.field;
        let mut out = SparseVec::new();
        for (c, (_, v)) in coords.iter().zip(&self.degrees[n].essential) {
            if *c != 0 {
                out = sparse_axpy(f, &out, *c, v);
            }
        }
        out
    }

    /// Class coordinates of a cocycle; an error if `z` is not a cocycle.
    pub fn class_of(&self, n: usize, z: &SparseVec) -> Result<Vec<u32>> {
        let f = self.field;
        let d = &self.degrees[n];
        let empty = FxHashMap::default();
        let boundaries = if n == 0 { &empty } else { &self.degrees[n - 1].reduced };
        let mut coords = vec![0; d.essential.len()];
        let mut r = z.clone();
        while let Some((l, x)) = low(&r) {
            if let Some(b) = boundaries.get(&l) {
                let c = f.neg(f.mul(x, f.inv(low(b).unwrap().1)));
                r = sparse_axpy(f, &r, c, b);
            } else if let Some(&k) = d.essential_index.get(&l) {
                // essential cocycles have coefficient 1 at their own cell
                coords[k] = f.add(coords[k], x);
                r = sparse_axpy(f, &r, f.neg(x), &d.essential[k].1);
            } else {
                return Err(Error::Internal(format!("degree {n} cochain is not a cocycle")));
            }
        }
        Ok(coords)
    }

    pub fn is_coboundary(&self, n: usize, z: &SparseVec) -> Result<bool> {
        Ok(self.class_of(n, z)?.iter().all(|&c| c == 0))
    }
}

/// Solver for `A x = b` with `A` given by sparse columns, by the same column
/// reduction: reduced columns are kept by low together with the column
/// combination producing them.
#[derive(Clone, Debug)]
pub struct SparseSolver {
    field: PrimeField,
    reduced: FxHashMap<usize, (SparseVec, SparseVec)>,
}

impl SparseSolver {
    pub fn new(f: PrimeField, columns: &[SparseVec]) -> Self {
        let mut reduced: FxHashMap<usize, (SparseVec, SparseVec)> = FxHashMap::default();
        for (k, col) in columns.iter().enumerate() {
            let mut r = col.clone();
            let mut v: SparseVec = vec![(k, 1)];
            while let Some((l, x)) = low(&r) {
                let Some((other, combo)) = reduced.get(&l) else { break };
                let c = f.neg(f.mul(x, f.inv(low(other).unwrap().1)));
                r = sparse_axpy(f, &r, c, other);
                v = sparse_axpy(f, &v, c, combo);
            }
            if let Some((l, _)) = low(&r) {
                reduced.insert(l, (r, v));
            }
        }
        Self { field: f, reduced }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Some solution, or `None` if `b` is outside the column span.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let f = self.field;
        let mut r = b.clone();
        let mut x = SparseVec::new();
        while let Some((l, v)) = low(&r) {
            let (col, combo) = self.reduced.get(&l)?;
            let c = f.mul(v, f.inv(low(col).unwrap().1));
            r = sparse_axpy(f, &r, f.neg(c), col);
            x = sparse_axpy(f, &x, c, combo);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, Matrix};
    use proptest::prelude::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn axpy_cancels() {
        let f = f3();
        let a = vec![(0, 1), (3, 2)];
        let b = vec![(3, 1), (5, 1)];
        assert_eq!(sparse_axpy(f, &a, 1, &b), vec![(0, 1), (5, 1)]);
        assert_eq!(sparse_axpy(f, &a, 2, &a), vec![]);
    }

    /// Cochains of the circle with one vertex and one edge, then of a
    /// triangle boundary.
    #[test]
    fn small_complexes() {
        let f = f3();
        let h = SparseCohomology::new(f, vec![1, 1], &[vec![vec![]]]).unwrap();
        assert_eq!(h.dimension(0), 1);
        // triangle boundary: vertices 0,1,2; edges 01,02,12
        let d0 = vec![
            vec![(0, 2), (1, 2)],
            vec![(0, 1), (2, 2)],
            vec![(1, 1), (2, 1)],
        ];
        let d1 = vec![vec![], vec![], vec![]];
        let h = SparseCohomology::new(f, vec![3, 3, 0], &[d0, d1]).unwrap();
        assert_eq!(h.dimension(0), 1);
        assert_eq!(h.dimension(1), 1);
        let rep = h.representative(1, &[1]);
        assert_eq!(h.class_of(1, &rep).unwrap(), vec![1]);
        assert_eq!(h.class_of(1, &vec![(0, 2), (1, 2)]).unwrap(), vec![0]);
    }

    fn random_complex(seed: u64, dims: &[usize]) -> Vec<Matrix> {
        // d_n = A_n built as products to guarantee d² = 0: d_n = P_{n+1} Q_n
        // with Q_n P_n = 0 is awkward, so use a direct sum of copies of
        // x → (x, x) mapping into a kernel.
        use rand::{Rng, SeedableRng};
        let f = f3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut prev: Option<Matrix> = None;
        for w in dims.windows(2) {
            let (src, dst) = (w[0], w[1]);
            // pick d with d ∘ prev = 0: columns of d vanish on the image of prev
            let mut d = Matrix::zeros(dst, src);
            for r in 0..dst {
                for c in 0..src {
                    d.set(r, c, rng.gen_range(0..3));
                }
            }
            if let Some(p) = &prev {
                // project rows of d onto the annihilator of im p
                let ann = crate::linalg::kernel(f, &p.transpose());
                let mut fixed = Matrix::zeros(dst, src);
                for r in 0..dst {
                    let mut row = vec![0; src];
                    for v in &ann {
                        let c = rng.gen_range(0..3);
                        f.axpy(&mut row, c, v);
                    }
                    for c in 0..src {
                        fixed.set(r, c, row[c]);
                    }
                }
                d = fixed;
            }
            out.push(d.clone());
            prev = Some(d);
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn solver_agrees_with_dense(seed in 0u64..10_000, rows in 1usize..7, cols in 1usize..7) {
            use rand::{Rng, SeedableRng};
            let f = f3();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = Matrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen_bool(0.4) {
                        m.set(r, c, rng.gen_range(1..3));
                    }
                }
            }
            let columns: Vec<SparseVec> = (0..cols).map(|c| sparse_from_dense(&m.column(c))).collect();
            let solver = SparseSolver::new(f, &columns);
            prop_assert_eq!(solver.rank(), rank(f, &m));
            // a consistent right side
            let x0: Vec<u32> = (0..cols).map(|_| rng.gen_range(0..3)).collect();
            let b = m.mul_vec(f, &x0);
            let x = solver.solve(&sparse_from_dense(&b)).expect("consistent system");
            prop_assert_eq!(m.mul_vec(f, &sparse_to_dense(&x, cols)), b);
            // an arbitrary one is solvable iff the dense solver says so
            let b2: Vec<u32> = (0..rows).map(|_| rng.gen_range(0..3)).collect();
            let dense = crate::linalg::solve(f, &m, &b2).is_ok();
            prop_assert_eq!(solver.solve(&sparse_from_dense(&b2)).is_some(), dense);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn dimensions_match_dense_ranks(seed in 0u64..10_000, a in 1usize..5, b in 1usize..6, c in 1usize..6, d in 0usize..5) {
            let f = f3();
            let dims = vec![a, b, c, d];
            let mats = random_complex(seed, &dims);
            let deltas: Vec<Vec<SparseVec>> = mats
                .iter()
                .map(|m| (0..m.cols()).map(|k| sparse_from_dense(&m.column(k))).collect())
                .collect();
            let h = SparseCohomology::new(f, dims.clone(), &deltas).unwrap();
            for n in 0..3 {
                let r_out = rank(f, &mats[n]);
                let r_in = if n == 0 { 0 } else { rank(f, &mats[n - 1]) };
                prop_assert_eq!(h.dimension(n), dims[n] - r_out - r_in);
                for k in 0..h.dimension(n) {
                    let mut e = vec![0; h.dimension(n)];
                    e[k] = 1;
                    let z = h.representative(n, &e);
                    let dz = mats[n].mul_vec(f, &sparse_to_dense(&z, dims[n]));
                    prop_assert!(dz.iter().all(|&x| x == 0));
                    prop_assert_eq!(h.class_of(n, &z).unwrap(), e);
                }
            }
        }
    }
}
