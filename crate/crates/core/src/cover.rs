//! The equivariant universal cover realized as a twisted Cartesian product
//! over each fixed-point complex, and the cochain model of cover cochains
//! equivariant for the deck action.
//!
//! A simplex of the cover of `X^H` is a pair `(w, x)` of a deck word and a
//! simplex of `X^H`; faces are untwisted except `d₀(w, x) = (w·[edge01 x], d₀x)`.
//! Deck-equivariant cochains are determined by their values on the lifts
//! `(ε, x)`, so they are stored as value tables on the base, and deck words
//! act on values through the coefficient system.

use crate::bredon::{edge01, CochainLayout, CochainModel, CoefficientSystem, EquivariantSpace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::simplex::{PresentedSimplicialSet, SimplexInstance};

/// A deck transformation as a word in edges of `X^H` and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DeckWord {
    pub letters: Vec<(usize, i8)>,
}

impl DeckWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn letter(edge: usize) -> Self {
        Self {
            letters: vec![(edge, 1)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &DeckWord) -> DeckWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        DeckWord { letters }
    }

    pub fn inverse(&self) -> DeckWord {
        DeckWord {
            letters: self.letters.iter().rev().map(|&(e, s)| (e, -s)).collect(),
        }
    }

    /// The matrix by which the word acts on `M₀(H)`: a letter `y` acts by
    /// `Ψ_H(y)^{-1}`, and `w₁w₂` acts as `w₁ ∘ w₂`.
    pub fn matrix(&self, coeffs: &CoefficientSystem, h: usize) -> Matrix {
        let f = coeffs.field();
        let r = coeffs.algebra(h).dim();
        self.letters.iter().fold(Matrix::identity(r), |acc, &(e, s)| {
            let m = if s > 0 {
                coeffs_act(coeffs, h, e)
            } else {
                coeffs.psi_table()[h][e].clone()
            };
            acc.mul(f, &m)
        })
    }

    pub fn apply(&self, coeffs: &CoefficientSystem, h: usize, v: &[u32]) -> Vec<u32> {
        let f = coeffs.field();
        let mut out = v.to_vec();
        for &(e, s) in self.letters.iter().rev() {
            out = if s > 0 {
                coeffs_act(coeffs, h, e).mul_vec(f, &out)
            } else {
                coeffs.psi_table()[h][e].mul_vec(f, &out)
            };
        }
        out
    }
}

fn coeffs_act(coeffs: &CoefficientSystem, h: usize, e: usize) -> Matrix {
    coeffs
        .act(h, &SimplexInstance::nondegenerate(1, e))
        .expect("nondegenerate edge")
        .clone()
}

/// A simplex `(w, x)` of the cover of `X^H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSimplex {
    pub word: DeckWord,
    pub base: SimplexInstance,
}

impl CoverSimplex {
    /// The canonical lift `(ε, x)`.
    pub fn lift(base: SimplexInstance) -> Self {
        Self {
            word: DeckWord::empty(),
            base,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.base.is_degenerate()
    }
}

/// `[edge01 x]`, empty when that edge is degenerate.
pub fn twist(s: &PresentedSimplicialSet, x: &SimplexInstance) -> DeckWord {
    let e = edge01(s, x);
    if e.is_degenerate() {
        DeckWord::empty()
    } else {
        DeckWord::letter(e.base)
    }
}

pub fn cover_face(s: &PresentedSimplicialSet, c: &CoverSimplex, i: usize) -> Result<CoverSimplex> {
    if c.base.dim() == 0 {
        return Err(Error::FaceIndex { index: i, dim: 0 });
    }
    let base = s.apply_face(&c.base, i)?;
    let word = if i == 0 {
        c.word.concat(&twist(s, &c.base))
    } else {
        c.word.clone()
    };
    Ok(CoverSimplex { word, base })
}

/// The face of `c` on the given vertex set (increasing), obtained by
/// removing the other vertices one at a time, highest first.
pub fn cover_restrict(s: &PresentedSimplicialSet, c: &CoverSimplex, vertices: &[usize]) -> CoverSimplex {
    let n = c.base.dim();
    let mut cur = c.clone();
    for v in (0..=n).rev() {
        if !vertices.contains(&v) {
            cur = cover_face(s, &cur, v).expect("face index in range");
        }
    }
    cur
}

/// Value of a cover cochain on a cover simplex.
pub fn evaluate(
    coeffs: &CoefficientSystem,
    layout: &CochainLayout,
    f: &[u32],
    h: usize,
    c: &CoverSimplex,
) -> Vec<u32> {
    if c.is_degenerate() {
        return vec![0; layout.alg_dim(h)];
    }
    let v = &f[layout.range(c.base.base_dim, h, c.base.base)];
    c.word.apply(coeffs, h, v)
}

/// The deck word of vertex `k` of the canonical lift of an `n`-simplex:
/// the twists collected by `k` successive `d₀`'s.
pub fn vertex_word(s: &PresentedSimplicialSet, x: &SimplexInstance, k: usize) -> DeckWord {
    let mut c = CoverSimplex::lift(x.clone());
    for _ in 0..k {
        c = cover_face(s, &c, 0).expect("positive dimension");
    }
    c.word
}

/// Cochains on the equivariant universal cover.
#[derive(Clone, Debug)]
pub struct RhoModel {
    space: EquivariantSpace,
    coeffs: CoefficientSystem,
    layout: CochainLayout,
}

impl RhoModel {
    pub fn new(space: EquivariantSpace, coeffs: CoefficientSystem) -> Result<Self> {
        crate::bredon::validate_coefficients(&space, &coeffs).into_result(Error::InvalidCoefficients)?;
        let layout = CochainLayout::new(&space, &coeffs);
        Ok(Self {
            space,
            coeffs,
            layout,
        })
    }
}

impl CochainModel for RhoModel {
    fn space(&self) -> &EquivariantSpace {
        &self.space
    }

    fn coefficients(&self) -> &CoefficientSystem {
        &self.coeffs
    }

    fn layout(&self) -> &CochainLayout {
        &self.layout
    }

    /// `δf = f ∘ ∂` on the canonical lift.
    fn coboundary_at(&self, fv: &[u32], n: usize, h: usize, id: usize) -> Vec<u32> {
        let f = self.coeffs.field();
        let s = self.space.space(h);
        let lift = CoverSimplex::lift(SimplexInstance::nondegenerate(n + 1, id));
        let mut val = vec![0; self.layout.alg_dim(h)];
        for j in 0..=n + 1 {
            let face = cover_face(s, &lift, j).expect("face index in range");
            let v = evaluate(&self.coeffs, &self.layout, fv, h, &face);
            f.axpy(&mut val, f.sign(j), &v);
        }
        val
    }

    /// Alexander–Whitney cup on the canonical lift: the back face is reached
    /// by `n` applications of the twisted `d₀`, so it carries the deck word
    /// accumulated along the path from vertex 0 to vertex `n`.
    fn cup_at(&self, a: &[u32], n: usize, b: &[u32], m: usize, h: usize, id: usize) -> Vec<u32> {
        let f = self.coeffs.field();
        let s = self.space.space(h);
        let lift = CoverSimplex::lift(SimplexInstance::nondegenerate(n + m, id));
        let mut front = lift.clone();
        for k in (n + 1..=n + m).rev() {
            front = cover_face(s, &front, k).expect("face index in range");
        }
        let mut back = lift;
        for _ in 0..n {
            back = cover_face(s, &back, 0).expect("face index in range");
        }
        let fv = evaluate(&self.coeffs, &self.layout, a, h, &front);
        let gv = evaluate(&self.coeffs, &self.layout, b, h, &back);
        self.coeffs.algebra(h).mul(f, &fv, &gv)
    }
}

/// `μ(f)_H(y) = M(b)·f_H(y)` with `b` the deck element of the initial
/// vertex of the canonical lift.
pub fn mu(space: &EquivariantSpace, coeffs: &CoefficientSystem, layout: &CochainLayout, fv: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0; layout.len(n)];
    for h in 0..space.subgroup_count() {
        let s = space.space(h);
        for id in 0..s.count(n) {
            let x = SimplexInstance::nondegenerate(n, id);
            let b = vertex_word(s, &x, 0);
            let r = layout.range(n, h, id);
            out[r.clone()].copy_from_slice(&b.apply(coeffs, h, &fv[r]));
        }
    }
    out
}

/// `μ⁻¹(g)_H(y) = M(b)^{-1}·g_H(y)`.
pub fn mu_inv(space: &EquivariantSpace, coeffs: &CoefficientSystem, layout: &CochainLayout, gv: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0; layout.len(n)];
    for h in 0..space.subgroup_count() {
        let s = space.space(h);
        for id in 0..s.count(n) {
            let x = SimplexInstance::nondegenerate(n, id);
            let b = vertex_word(s, &x, 0).inverse();
            let r = layout.range(n, h, id);
            out[r.clone()].copy_from_slice(&b.apply(coeffs, h, &gv[r]));
        }
    }
    out
}

/// Checks the simplicial identities `d_i d_j = d_{j−1} d_i` on the cover up
/// to the given dimension, comparing deck words by their action.
pub fn check_cover_identities(space: &EquivariantSpace, coeffs: &CoefficientSystem, max_dim: usize) -> Vec<String> {
    let mut failures = Vec::new();
    for h in 0..space.subgroup_count() {
        let s = space.space(h);
        for n in 2..=max_dim.min(s.top_dim()) {
            for id in 0..s.count(n) {
                let c = CoverSimplex::lift(SimplexInstance::nondegenerate(n, id));
                for j in 1..=n {
                    for i in 0..j {
                        let l = cover_face(s, &cover_face(s, &c, j).unwrap(), i).unwrap();
                        let r = cover_face(s, &cover_face(s, &c, i).unwrap(), j - 1).unwrap();
                        if l.base != r.base || l.word.matrix(coeffs, h) != r.word.matrix(coeffs, h) {
                            failures.push(format!(
                                "d{i}d{j} ≠ d{}d{i} on simplex ({n},{id}) of X^{}",
                                j - 1,
                                space.category().subgroup(h)
                            ));
                        }
                    }
                }
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bredon::{BredonModel, ModelCohomology};
    use crate::fixtures;
    use crate::simplex::NerveCoding;
    use crate::orbit::FiniteGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn twist_and_faces_on_the_nerve() {
        let fx = fixtures::frobenius_bz3(4).unwrap();
        let s = fx.space.space(0);
        let coding = NerveCoding::new(&FiniteGroup::cyclic(3));
        let gh = coding.instance(&[1, 2]);
        assert_eq!(twist(s, &gh), DeckWord::letter(coding.id(&[1])));
        let y = coding.instance(&[2]);
        assert_eq!(twist(s, &y), DeckWord::letter(y.base));
        let sv = SimplexInstance::nondegenerate(0, 0).degenerate(0);
        assert!(twist(s, &sv).is_empty());
        let lift = CoverSimplex::lift(gh.clone());
        let d1 = cover_face(s, &lift, 1).unwrap();
        assert_eq!(d1, CoverSimplex::lift(s.apply_face(&gh, 1).unwrap()));
        let d0 = cover_face(s, &lift, 0).unwrap();
        assert_eq!(d0.word, DeckWord::letter(coding.id(&[1])));
        assert_eq!(d0.base, coding.instance(&[2]));
    }

    #[test]
    fn cover_identities_hold_on_fixtures() {
        for fx in fixtures::all_p3(4).unwrap() {
            let failures = check_cover_identities(&fx.space, &fx.coefficients, 4);
            assert!(failures.is_empty(), "{}: {:?}", fx.name, failures);
        }
    }

    #[test]
    fn evaluate_words() {
        let fx = fixtures::frobenius_bz3(3).unwrap();
        let f = fx.coefficients.field();
        let layout = CochainLayout::new(&fx.space, &fx.coefficients);
        let cochain: Vec<u32> = (0..layout.len(1) as u32).map(|k| k % 3).collect();
        let base = SimplexInstance::nondegenerate(1, 1);
        let plain = evaluate(&fx.coefficients, &layout, &cochain, 0, &CoverSimplex::lift(base.clone()));
        assert_eq!(plain, cochain[layout.range(1, 0, 1)].to_vec());
        let w = DeckWord::letter(0);
        let there_and_back = CoverSimplex {
            word: w.concat(&w.inverse()),
            base: base.clone(),
        };
        assert_eq!(evaluate(&fx.coefficients, &layout, &cochain, 0, &there_and_back), plain);
        // the edge (g) acts by Ψ((g))⁻¹ = Frobenius
        let once = CoverSimplex { word: w, base };
        let frob = fixtures::f27().frobenius(f);
        assert_eq!(
            evaluate(&fx.coefficients, &layout, &cochain, 0, &once),
            frob.mul_vec(f, &plain)
        );
    }

    #[test]
    fn mu_is_a_multiplicative_chain_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fx in fixtures::all_p3(5).unwrap() {
            let bi = BredonModel::new(fx.space.clone(), fx.coefficients.clone()).unwrap();
            let rho = RhoModel::new(fx.space.clone(), fx.coefficients.clone()).unwrap();
            let layout = bi.layout();
            let h = ModelCohomology::compute(&bi, 4).unwrap();
            for n in 0..4 {
                for _ in 0..10 {
                    let a = h.random_cochain(n, &mut rng);
                    let ma = mu(&fx.space, &fx.coefficients, layout, &a, n);
                    assert_eq!(mu_inv(&fx.space, &fx.coefficients, layout, &ma, n), a);
                    assert_eq!(
                        mu(&fx.space, &fx.coefficients, layout, &bi.coboundary(&a, n), n + 1),
                        rho.coboundary(&ma, n)
                    );
                    for m in 0..4 - n {
                        let b = h.random_cochain(m, &mut rng);
                        let mb = mu(&fx.space, &fx.coefficients, layout, &b, m);
                        assert_eq!(
                            mu(&fx.space, &fx.coefficients, layout, &bi.cup(&a, n, &b, m), n + m),
                            rho.cup(&ma, n, &mb, m),
                            "{}: cup ({n},{m})",
                            fx.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rho_cohomology_matches() {
        for fx in fixtures::all_p3(5).unwrap() {
            let bi = BredonModel::new(fx.space.clone(), fx.coefficients.clone()).unwrap();
            let rho = RhoModel::new(fx.space, fx.coefficients).unwrap();
            assert_eq!(
                ModelCohomology::compute(&bi, 4).unwrap().dimensions(),
                ModelCohomology::compute(&rho, 4).unwrap().dimensions()
            );
        }
    }
}
