//! Dense exact linear algebra over `Z/p`.
//!
//! Elimination always pivots on the first nonzero entry, so echelon forms
//! and chosen cohomology representatives are reproducible bit for bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `Z/p`. Elements are residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=65_521).contains(&p) || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in Z/{}", self.p);
        self.pow(a, (self.p - 2) as u64)
    }

    pub fn from_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// `(-1)^e`.
    pub fn sign(self, e: usize) -> u32 {
        if e.is_multiple_of(2) {
            1 % self.p
        } else {
            self.p - 1
        }
    }

    /// `dst += c·src`.
    pub fn axpy(self, dst: &mut [u32], c: u32, src: &[u32]) {
        if c == 0 {
            return;
        }
        debug_assert_eq!(dst.len(), src.len());
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = self.add(*d, self.mul(c, s));
            }
        }
    }

    pub fn scale(self, v: &mut [u32], c: u32) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

/// Dense row-major matrix over `Z/p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds from rows, reducing entries mod `p`.
    pub fn from_rows(f: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| x % f.p()).collect(),
        })
    }

    /// Builds a `rows × cols` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul_vec(&self, f: PrimeField, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let acc = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .filter(|(&a, &b)| a != 0 && b != 0)
                    .fold(0u64, |acc, (&a, &b)| acc + a as u64 * b as u64);
                (acc % f.p() as u64) as u32
            })
            .collect()
    }

    pub fn mul(&self, f: PrimeField, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        let cols = other.cols;
        out.data
            .par_chunks_mut(cols.max(1))
            .enumerate()
            .for_each(|(r, out_row)| {
                if cols == 0 {
                    return;
                }
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    if a != 0 {
                        f.axpy(out_row, a, other.row(k));
                    }
                }
            });
        out
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self, f: PrimeField) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                solve(f, self, &e)
            })
            .collect::<Result<_>>()?;
        let inv = Matrix::from_columns(n, &cols);
        if inv.mul(f, self) != Matrix::identity(n) {
            return Err(Error::NoSolution);
        }
        Ok(inv)
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduced row echelon form, first-nonzero pivoting, column by column.
pub fn rref(f: PrimeField, m: &Matrix) -> Echelon {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    let cols = a.cols;
    for c in 0..cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                a.data.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = f.inv(a.get(r, c));
        f.scale(a.row_mut(r), inv);
        let pivot_row = a.row(r).to_vec();
        let eliminate = |(i, row): (usize, &mut [u32])| {
            if i != r {
                let x = row[c];
                if x != 0 {
                    f.axpy(row, f.neg(x), &pivot_row);
                }
            }
        };
        if a.rows * cols > 1 << 16 {
            a.data.par_chunks_mut(cols).enumerate().for_each(eliminate);
        } else {
            a.data.chunks_mut(cols).enumerate().for_each(eliminate);
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { matrix: a, pivots }
}

pub fn rank(f: PrimeField, m: &Matrix) -> usize {
    if m.rows() > m.cols() {
        rref(f, &m.transpose()).rank()
    } else {
        rref(f, m).rank()
    }
}

/// Solves `A x = b`, free variables set to zero.
pub fn solve(f: PrimeField, a: &Matrix, b: &[u32]) -> Result<Vec<u32>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let mut aug = Matrix::zeros(a.rows(), a.cols() + 1);
    for r in 0..a.rows() {
        aug.row_mut(r)[..a.cols()].copy_from_slice(a.row(r));
        aug.set(r, a.cols(), b[r] % f.p());
    }
    let e = rref(f, &aug);
    if e.pivots.last() == Some(&a.cols()) {
        return Err(Error::NoSolution);
    }
    let mut x = vec![0; a.cols()];
    for (r, &c) in e.pivots.iter().enumerate() {
        x[c] = e.matrix.get(r, a.cols());
    }
    Ok(x)
}

/// Basis of the nullspace `{x : A x = 0}`: one vector per free column, in
/// increasing column order, with a 1 at that column.
pub fn kernel(f: PrimeField, a: &Matrix) -> Vec<Vec<u32>> {
    let e = rref(f, a);
    kernel_from_echelon(f, &e, a.cols())
}

pub fn kernel_from_echelon(f: PrimeField, e: &Echelon, cols: usize) -> Vec<Vec<u32>> {
    let mut is_pivot = vec![false; cols];
    for &c in &e.pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (r, &pc) in e.pivots.iter().enumerate() {
                v[pc] = f.neg(e.matrix.get(r, free));
            }
            v
        })
        .collect()
}

/// Incrementally built echelon basis in insertion order: each stored row
/// vanishes at the pivots of all earlier rows. Rows optionally carry a
/// coordinate vector that is tracked through reductions.
#[derive(Clone, Debug, Default)]
struct IncrementalBasis {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    coords: Vec<Vec<u32>>,
}

impl IncrementalBasis {
    /// Reduces `v` in place; returns accumulated coordinates (`v_orig =
    /// Σ c_k row_k + v_reduced`, mapped through row coordinates).
    fn reduce(&self, f: PrimeField, v: &mut [u32], coord_len: usize) -> Vec<u32> {
        let mut acc = vec![0; coord_len];
        for ((row, &pc), coords) in self.rows.iter().zip(&self.pivots).zip(&self.coords) {
            let c = v[pc];
            if c != 0 {
                f.axpy(v, f.neg(c), row);
                if coord_len > 0 {
                    f.axpy(&mut acc, c, coords);
                }
            }
        }
        acc
    }

    /// Inserts a reduced nonzero vector, normalizing its pivot to 1.
    fn push(&mut self, f: PrimeField, mut v: Vec<u32>, mut coords: Vec<u32>) {
        let pc = v.iter().position(|&x| x != 0).expect("nonzero vector");
        let inv = f.inv(v[pc]);
        f.scale(&mut v, inv);
        f.scale(&mut coords, inv);
        self.rows.push(v);
        self.pivots.push(pc);
        self.coords.push(coords);
    }
}

/// `H^n = ker δⁿ / im δⁿ⁻¹` with chosen representatives.
#[derive(Clone, Debug)]
pub struct CohomologyPresentation {
    field: PrimeField,
    degree: usize,
    cochain_dim: usize,
    cocycle_basis: Vec<Vec<u32>>,
    coboundary_basis: Vec<Vec<u32>>,
    representatives: Vec<Vec<u32>>,
    d_cur: Matrix,
    reducer: IncrementalBasis,
}

impl CohomologyPresentation {
    /// `d_prev: C^{n-1} → C^n` and `d_cur: C^n → C^{n+1}`, as matrices acting
    /// on column vectors.
    pub fn new(f: PrimeField, degree: usize, d_prev: &Matrix, d_cur: &Matrix) -> Result<Self> {
        let n = d_cur.cols();
        if d_prev.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "d_prev has {} rows, d_cur has {} columns",
                d_prev.rows(),
                n
            )));
        }
        if !d_cur.mul(f, d_prev).is_zero() {
            return Err(Error::NotAComplex);
        }
        let cocycle_basis = kernel(f, d_cur);
        let mut reducer = IncrementalBasis::default();
        let mut coboundary_basis = Vec::new();
        for c in 0..d_prev.cols() {
            let col = d_prev.column(c);
            let mut v = col.clone();
            reducer.reduce(f, &mut v, 0);
            if v.iter().any(|&x| x != 0) {
                coboundary_basis.push(col);
                reducer.push(f, v, Vec::new());
            }
        }
        let quotient_dim = cocycle_basis.len() - coboundary_basis.len();
        for coords in reducer.coords.iter_mut() {
            *coords = vec![0; quotient_dim];
        }
        let mut representatives = Vec::with_capacity(quotient_dim);
        for z in &cocycle_basis {
            if representatives.len() == quotient_dim {
                break;
            }
            let mut v = z.clone();
            let acc = reducer.reduce(f, &mut v, quotient_dim);
            if v.iter().any(|&x| x != 0) {
                // v = z - Σ c_k row_k, so v ≡ e_new - acc in class coordinates
                let mut coords = vec![0; quotient_dim];
                coords[representatives.len()] = 1;
                f.axpy(&mut coords, f.neg(1), &acc);
                representatives.push(z.clone());
                reducer.push(f, v, coords);
            }
        }
        if representatives.len() != quotient_dim {
            return Err(Error::Internal("cocycles do not span the quotient".into()));
        }
        Ok(Self {
            field: f,
            degree,
            cochain_dim: n,
            cocycle_basis,
            coboundary_basis,
            representatives,
            d_cur: d_cur.clone(),
            reducer,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn cochain_dim(&self) -> usize {
        self.cochain_dim
    }

    pub fn cocycle_basis(&self) -> &[Vec<u32>] {
        &self.cocycle_basis
    }

    pub fn coboundary_basis(&self) -> &[Vec<u32>] {
        &self.coboundary_basis
    }

    pub fn representatives(&self) -> &[Vec<u32>] {
        &self.representatives
    }

    pub fn is_cocycle(&self, z: &[u32]) -> bool {
        z.len() == self.cochain_dim && self.d_cur.mul_vec(self.field, z).iter().all(|&x| x == 0)
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn class_of(&self, z: &[u32]) -> Result<Vec<u32>> {
        if z.len() != self.cochain_dim {
            return Err(Error::DimensionMismatch(format!(
                "cochain of length {} in a space of dimension {}",
                z.len(),
                self.cochain_dim
            )));
        }
        let mut v: Vec<u32> = z.iter().map(|&x| x % self.field.p()).collect();
        let coords = self.reducer.reduce(self.field, &mut v, self.dimension());
        if v.iter().any(|&x| x != 0) {
            return Err(Error::Internal(format!(
                "degree {} cochain is not a cocycle",
                self.degree
            )));
        }
        Ok(coords)
    }

    /// `Σ c_k · representative_k`.
    pub fn representative_of(&self, coords: &[u32]) -> Vec<u32> {
        assert_eq!(coords.len(), self.dimension());
        let mut out = vec![0; self.cochain_dim];
        for (c, r) in coords.iter().zip(&self.representatives) {
            self.field.axpy(&mut out, *c, r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, f: PrimeField, r: usize, c: usize) -> Matrix {
        let rows: Vec<Vec<u32>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(0..f.p())).collect())
            .collect();
        if r == 0 {
            return Matrix::zeros(0, c);
        }
        Matrix::from_rows(f, &rows).unwrap()
    }

    #[test]
    fn field_basics() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.sign(3), 6);
    }

    #[test]
    fn solve_examples() {
        let f = f3();
        let id = Matrix::identity(3);
        assert_eq!(solve(f, &id, &[2, 0, 1]).unwrap(), vec![2, 0, 1]);
        let z = Matrix::zeros(2, 2);
        assert!(matches!(solve(f, &z, &[1, 0]), Err(Error::NoSolution)));
        let a = Matrix::from_rows(f, &[vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(solve(f, &a, &[0, 1]).unwrap(), vec![2, 1]);
    }

    #[test]
    fn cohomology_trivial_cases() {
        let f = f3();
        let zero_in = Matrix::zeros(3, 2);
        let zero_out = Matrix::zeros(1, 3);
        let h = CohomologyPresentation::new(f, 0, &zero_in, &zero_out).unwrap();
        assert_eq!(h.dimension(), 3);
        assert_eq!(h.representatives()[0], vec![1, 0, 0]);
        let inj = Matrix::identity(3);
        let h = CohomologyPresentation::new(f, 0, &Matrix::zeros(3, 0), &inj).unwrap();
        assert_eq!(h.dimension(), 0);
        let bad = CohomologyPresentation::new(f, 0, &Matrix::identity(2), &Matrix::identity(2));
        assert!(matches!(bad, Err(Error::NotAComplex)));
    }

    #[test]
    fn cohomology_of_a_small_cycle_complex() {
        // C^0 → C^1 → C^2 from the cellular cochains of a circle with a
        // 2-cell attached by degree 3: over Z/3, H^1 = H^2 = Z/3.
        let f = f3();
        let d0 = Matrix::zeros(1, 1);
        let d1 = Matrix::from_rows(f, &[vec![3]]).unwrap();
        let h1 = CohomologyPresentation::new(f, 1, &d0, &d1).unwrap();
        assert_eq!(h1.dimension(), 1);
    }

    #[test]
    fn class_of_is_invariant_under_coboundaries() {
        let f = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            // build a complex C^0 --A--> C^1 --B--> C^2 with BA = 0 by taking
            // B's rows from the left kernel of A
            let a = random_matrix(&mut rng, f, 8, 3);
            let left = kernel(f, &a.transpose());
            let rows: Vec<Vec<u32>> = left.iter().take(2).cloned().collect();
            let b = Matrix::from_rows(f, &rows).unwrap();
            let h = CohomologyPresentation::new(f, 1, &a, &b).unwrap();
            assert_eq!(h.dimension(), 8 - rank(f, &b) - rank(f, &a));
            for k in 0..h.dimension() {
                let mut e = vec![0; h.dimension()];
                e[k] = 1;
                assert_eq!(h.class_of(&h.representative_of(&e)).unwrap(), e);
            }
            for _ in 0..100 {
                let coords: Vec<u32> = (0..h.dimension()).map(|_| rng.gen_range(0..3)).collect();
                let w: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                let mut z = h.representative_of(&coords);
                f.axpy(&mut z, 1, &a.mul_vec(f, &w));
                assert_eq!(h.class_of(&z).unwrap(), coords);
            }
        }
    }

    proptest! {
        #[test]
        fn solve_is_exact(seed in any::<u64>(), r in 1usize..7, c in 1usize..7) {
            let f = PrimeField::new(5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, f, r, c);
            let x0: Vec<u32> = (0..c).map(|_| rng.gen_range(0..5)).collect();
            let b = a.mul_vec(f, &x0);
            let x = solve(f, &a, &b).unwrap();
            prop_assert_eq!(a.mul_vec(f, &x), b);
        }

        #[test]
        fn kernel_vectors_are_annihilated(seed in any::<u64>(), r in 1usize..7, c in 1usize..9) {
            let f = f3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, f, r, c);
            let k = kernel(f, &a);
            prop_assert_eq!(k.len() + rank(f, &a), c);
            for v in k {
                prop_assert!(a.mul_vec(f, &v).iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn inverse_roundtrip(seed in any::<u64>(), n in 1usize..6) {
            let f = PrimeField::new(7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, f, n, n);
            match a.inverse(f) {
                Ok(inv) => prop_assert_eq!(a.mul(f, &inv), Matrix::identity(n)),
                Err(_) => prop_assert!(rank(f, &a) < n),
            }
        }
    }
}
