//! Normalized chains, front and back faces, Alexander–Whitney maps and
//! explicit contractions of standard simplices.
//!
//! Simplices of `Δ[n]` are handled as vertex bitmasks (bit `v` set when
//! vertex `v` is present); p-fold tensor words of such simplices are packed
//! into a [`MaskWord`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, PrimeField};
use crate::simplex::{PresentedSimplicialSet, SimplexInstance};

/// Boundary matrices of the normalized chain complex over `Z/p`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    /// `boundaries[n]: C_n → C_{n-1}` for `1 ≤ n ≤ top`; index 0 is the
    /// zero map to the zero module.
    boundaries: Vec<Matrix>,
}

impl ChainComplex {
    pub fn boundary(&self, n: usize) -> &Matrix {
        &self.boundaries[n]
    }

    pub fn top_dim(&self) -> usize {
        self.boundaries.len() - 1
    }
}

/// `∂x = Σ (−1)^i d_i x` with degenerate faces dropped; `∂∂ = 0` is checked.
pub fn normalized_chains(f: PrimeField, s: &PresentedSimplicialSet) -> Result<ChainComplex> {
    s.validate().into_result(Error::InvalidSimplicialSet)?;
    let mut boundaries = vec![Matrix::zeros(0, s.count(0))];
    for n in 1..=s.top_dim() {
        let mut m = Matrix::zeros(s.count(n - 1), s.count(n));
        for id in 0..s.count(n) {
            for i in 0..=n {
                let face = s.stored_face(n, id, i);
                if !face.is_degenerate() {
                    let cur = m.get(face.base, id);
                    m.set(face.base, id, f.add(cur, f.sign(i)));
                }
            }
        }
        boundaries.push(m);
    }
    for n in 2..=s.top_dim() {
        if !boundaries[n - 1].mul(f, &boundaries[n]).is_zero() {
            return Err(Error::NotAComplex);
        }
    }
    Ok(ChainComplex { boundaries })
}

/// The front `a`-face: vertices `0..=a`.
pub fn front_face(s: &PresentedSimplicialSet, x: &SimplexInstance, a: usize) -> Result<SimplexInstance> {
    let n = x.dim();
    if a > n {
        return Err(Error::FaceIndex { index: a, dim: n });
    }
    let mut cur = x.clone();
    for i in (a + 1..=n).rev() {
        cur = s.apply_face(&cur, i)?;
    }
    Ok(cur)
}

/// The back `b`-face: the last `b + 1` vertices.
pub fn back_face(s: &PresentedSimplicialSet, x: &SimplexInstance, b: usize) -> Result<SimplexInstance> {
    let n = x.dim();
    if b > n {
        return Err(Error::FaceIndex { index: b, dim: n });
    }
    let mut cur = x.clone();
    for _ in 0..n - b {
        cur = s.apply_face(&cur, 0)?;
    }
    Ok(cur)
}

/// Formal combination of tensor words of simplices; words with a degenerate
/// factor are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorChain {
    terms: BTreeMap<Vec<SimplexInstance>, u32>,
}

impl TensorChain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_word(&mut self, f: PrimeField, word: Vec<SimplexInstance>, c: u32) {
        if c.is_multiple_of(f.p()) || word.iter().any(SimplexInstance::is_degenerate) {
            return;
        }
        let e = self.terms.entry(word.clone()).or_insert(0);
        *e = f.add(*e, c % f.p());
        if *e == 0 {
            self.terms.remove(&word);
        }
    }

    pub fn add_chain(&mut self, f: PrimeField, other: &TensorChain, c: u32) {
        for (w, &x) in &other.terms {
            self.add_word(f, w.clone(), f.mul(x, c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[SimplexInstance], u32)> {
        self.terms.iter().map(|(w, &c)| (w.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Koszul differential; factor `k` lives in `sets[k]`.
    pub fn boundary(&self, f: PrimeField, sets: &[&PresentedSimplicialSet]) -> TensorChain {
        let mut out = TensorChain::zero();
        for (word, c) in self.terms() {
            let mut before = 0;
            for (k, x) in word.iter().enumerate() {
                let n = x.dim();
                if n > 0 {
                    for i in 0..=n {
                        let mut w = word.to_vec();
                        w[k] = sets[k].apply_face(x, i).expect("face in range");
                        out.add_word(f, w, f.mul(c, f.sign(before + i)));
                    }
                }
                before += n;
            }
        }
        out
    }
}

/// `Σ_a front_face(x, a) ⊗ back_face(y, n − a)`.
pub fn alexander_whitney(
    f: PrimeField,
    l: &PresentedSimplicialSet,
    x: &SimplexInstance,
    l2: &PresentedSimplicialSet,
    y: &SimplexInstance,
) -> Result<TensorChain> {
    let n = x.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "Alexander–Whitney of a {n}-simplex and a {}-simplex",
            y.dim()
        )));
    }
    let mut out = TensorChain::zero();
    for a in 0..=n {
        out.add_word(f, vec![front_face(l, x, a)?, back_face(l2, y, n - a)?], 1);
    }
    Ok(out)
}

/// All compositions of `n` into `parts` nonnegative parts, in
/// lexicographic order.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=n {
            prefix.push(a);
            rec(n - a, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// p-fold Alexander–Whitney: factor `k` of each term is the face of `xs[k]`
/// spanning vertices `a₁+⋯+a_{k−1} ..= a₁+⋯+a_k`.
pub fn aw_iterated(
    f: PrimeField,
    sets: &[&PresentedSimplicialSet],
    xs: &[SimplexInstance],
) -> Result<TensorChain> {
    let n = xs.first().map_or(0, SimplexInstance::dim);
    if xs.iter().any(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch("iterated Alexander–Whitney needs equal dimensions".into()));
    }
    let mut out = TensorChain::zero();
    for comp in compositions(n, xs.len()) {
        let mut start = 0;
        let word = comp
            .iter()
            .zip(xs)
            .zip(sets)
            .map(|((&a, x), s)| {
                let verts: Vec<usize> = (start..=start + a).collect();
                start += a;
                s.restrict(x, &verts)
            })
            .collect();
        out.add_word(f, word, 1);
    }
    Ok(out)
}

/// Dimension of a vertex mask.
#[inline]
pub fn mask_dim(m: u32) -> usize {
    m.count_ones() as usize - 1
}

/// Mask of the vertex interval `lo..=hi`.
#[inline]
pub fn interval_mask(lo: usize, hi: usize) -> u32 {
    ((1u32 << (hi + 1)) - 1) & !((1u32 << lo) - 1)
}

/// Faces of a mask simplex with their signs `(−1)^t`, as `(odd, face)`.
pub fn mask_faces(m: u32) -> impl Iterator<Item = (bool, u32)> {
    let dim = mask_dim(m);
    let mut rest = m;
    (0..=dim).filter_map(move |t| {
        let low = rest & rest.wrapping_neg();
        rest &= rest - 1;
        (dim > 0).then_some((t % 2 == 1, m & !low))
    })
}

/// Where the contracting homotopy of `Δ[n]` puts its cone point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Apex {
    /// Vertex 0: `h[v₀…v_k] = [0, v₀…v_k]` when `v₀ ≠ 0`.
    First,
    /// Vertex `n`: `h[v₀…v_k] = (−1)^{k+1}[v₀…v_k, n]` when `v_k ≠ n`.
    Last,
}

/// Contraction `h` of the augmented normalized chains of `Δ[n]` with
/// `dh + hd = 1 − ηε`, `η(1)` the apex vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeContraction {
    pub n: usize,
    pub apex: Apex,
}

impl ConeContraction {
    pub fn new(n: usize, apex: Apex) -> Self {
        Self { n, apex }
    }

    pub fn apex_mask(&self) -> u32 {
        match self.apex {
            Apex::First => 1,
            Apex::Last => 1 << self.n,
        }
    }

    /// `h(m)` as `(odd sign, mask)`, or `None` when zero.
    #[inline]
    pub fn apply(&self, m: u32) -> Option<(bool, u32)> {
        let apex = self.apex_mask();
        if m & apex != 0 {
            return None;
        }
        match self.apex {
            Apex::First => Some((false, m | apex)),
            Apex::Last => Some((mask_dim(m).is_multiple_of(2), m | apex)),
        }
    }
}

/// A p-fold tensor word of `Δ[n]` simplices, 16 bits per factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaskWord(pub u128);

impl MaskWord {
    pub const MAX_FACTORS: usize = 8;

    pub fn from_masks(masks: &[u32]) -> Self {
        assert!(masks.len() <= Self::MAX_FACTORS);
        let mut w = 0u128;
        for (k, &m) in masks.iter().enumerate() {
            debug_assert!(m != 0 && m < 1 << 16);
            w |= (m as u128) << (16 * k);
        }
        Self(w)
    }

    #[inline]
    pub fn get(self, k: usize) -> u32 {
        ((self.0 >> (16 * k)) & 0xffff) as u32
    }

    #[inline]
    pub fn with(self, k: usize, m: u32) -> Self {
        let cleared = self.0 & !(0xffffu128 << (16 * k));
        Self(cleared | ((m as u128) << (16 * k)))
    }

    pub fn masks(self, p: usize) -> Vec<u32> {
        (0..p).map(|k| self.get(k)).collect()
    }

    pub fn degree(self, p: usize) -> usize {
        (0..p).map(|k| mask_dim(self.get(k))).sum()
    }

    /// Moves the last factor to the front with the Koszul sign; returns
    /// `(odd, word)`.
    pub fn rotate(self, p: usize) -> (bool, Self) {
        let last = self.get(p - 1);
        let last_deg = mask_dim(last);
        let rest_deg: usize = (0..p - 1).map(|k| mask_dim(self.get(k))).sum();
        let low_bits = 16 * (p - 1);
        let rest = self.0 & ((1u128 << low_bits) - 1);
        let word = Self((rest << 16) | last as u128);
        ((last_deg * rest_deg) % 2 == 1, word)
    }

    /// Pushes forward along the coface `δ_a: Δ[n−1] → Δ[n]` skipping `a`.
    pub fn coface(self, p: usize, a: usize) -> Self {
        let mut w = self;
        for k in 0..p {
            let m = self.get(k);
            let low = m & ((1 << a) - 1);
            let high = m >> a;
            w = w.with(k, low | (high << (a + 1)));
        }
        w
    }

    /// Koszul boundary as `(odd, word)` terms.
    pub fn boundary(self, p: usize) -> Vec<(bool, Self)> {
        let mut out = Vec::new();
        let mut before = 0;
        for k in 0..p {
            let m = self.get(k);
            for (odd, face) in mask_faces(m) {
                out.push((odd ^ (before % 2 == 1), self.with(k, face)));
            }
            before += mask_dim(m);
        }
        out
    }

    /// The tensor contraction `h ⊗ 1 + ηε ⊗ h_rest`, nested from the left.
    pub fn contract(self, p: usize, h: &ConeContraction) -> Vec<(bool, Self)> {
        let mut out = Vec::new();
        let apex = h.apex_mask();
        let mut w = self;
        for k in 0..p {
            let m = self.get(k);
            if let Some((odd, hm)) = h.apply(m) {
                out.push((odd, w.with(k, hm)));
            }
            if m.count_ones() != 1 {
                break;
            }
            w = w.with(k, apex);
        }
        out
    }
}

/// `AW_p(ι_n)` as mask words.
pub fn aw_universal(n: usize, p: usize) -> Vec<MaskWord> {
    compositions(n, p)
        .into_iter()
        .map(|comp| {
            let mut start = 0;
            let masks: Vec<u32> = comp
                .iter()
                .map(|&a| {
                    let m = interval_mask(start, start + a);
                    start += a;
                    m
                })
                .collect();
            MaskWord::from_masks(&masks)
        })
        .collect()
}
