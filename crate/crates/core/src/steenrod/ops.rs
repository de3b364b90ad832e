//! The structure map `θ: W ⊗ K^{⊗p} → K` on cover cochains, the operations
//! `D_i(x) = θ_*(e_i ⊗ x^p)`, and the reduced powers `P^s`, `βP^s`.
//!
//! `Δ(e ⊗ x)` is the augmentation of `Φ(e ⊗ (x, …, x))`. By naturality it is
//! the universal augmented entry `(ε ⊗ 1)Φ(e_i ⊗ ι_n)` pushed forward along
//! the canonical lift of `x`, so each tensor factor is a face of that lift.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::phi::PhiTable;
use crate::bredon::{BredonModel, CochainModel, ModelCohomology};
use crate::chains::{mask_dim, MaskWord};
use crate::cover::{cover_restrict, evaluate, mu, mu_inv, CoverSimplex, RhoModel};
use crate::error::{Error, Result};
use crate::linalg::PrimeField;
use crate::simplex::SimplexInstance;

/// `Δ(α^a e_i ⊗ ι_n)`: p-fold words in faces of `Δ[n]`.
pub fn big_delta(table: &PhiTable, a: u32, i: u32, n: u32) -> Result<Vec<(MaskWord, u32)>> {
    let f = table.field();
    let p = f.p() as usize;
    let entry = table.entry(i, n)?;
    let mut out: Vec<(MaskWord, u32)> = entry
        .augmented()
        .iter()
        .map(|&(m, c)| {
            let mut odd = false;
            let mut word = m;
            for _ in 0..a % p as u32 {
                let (o, next) = word.rotate(p);
                odd ^= o;
                word = next;
            }
            (word, if odd { f.neg(c) } else { c })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `θ(α^a e_i ⊗ f_1 ⊗ ⋯ ⊗ f_p)` in the cover model. Each `fs[k]` is a
/// full-coordinate cochain of degree `degrees[k]`.
pub fn theta(
    model: &RhoModel,
    table: &PhiTable,
    a: u32,
    i: u32,
    fs: &[&[u32]],
    degrees: &[usize],
) -> Result<Vec<u32>> {
    let f = model.coefficients().field();
    let p = f.p() as usize;
    if fs.len() != p || degrees.len() != p {
        return Err(Error::DimensionMismatch(format!("θ takes {p} cochains")));
    }
    let total: usize = degrees.iter().sum();
    if (i as usize) > total {
        return Err(Error::DimensionMismatch("θ output would have negative degree".into()));
    }
    let n = total - i as usize;
    let space = model.space();
    if n > space.top_dim() {
        return Err(Error::InsufficientTruncation {
            degree: n,
            required: n,
            available: space.top_dim(),
        });
    }
    let terms: Vec<(MaskWord, u32)> = big_delta(table, a, i, n as u32)?
        .into_iter()
        .filter(|(m, _)| (0..p).all(|k| mask_dim(m.get(k)) == degrees[k]))
        .collect();
    // Koszul sign of the pairing, constant once the factor degrees are fixed,
    // times (−1)^{i·n}
    let mut parity = (i as usize * n) % 2;
    for k in 0..p {
        for l in k + 1..p {
            parity ^= (degrees[k] * degrees[l]) % 2;
        }
    }
    let sign = f.sign(parity);
    let mut slots: FxHashMap<(usize, u32), usize> = FxHashMap::default();
    let mut distinct: Vec<(usize, u32)> = Vec::new();
    let indexed: Vec<(Vec<usize>, u32)> = terms
        .iter()
        .map(|&(m, c)| {
            let idx = (0..p)
                .map(|k| {
                    *slots.entry((k, m.get(k))).or_insert_with(|| {
                        distinct.push((k, m.get(k)));
                        distinct.len() - 1
                    })
                })
                .collect();
            (idx, f.mul(sign, c))
        })
        .collect();
    let layout = model.layout();
    let coeffs = model.coefficients();
    let mut out = vec![0; layout.len(n)];
    for h in 0..space.subgroup_count() {
        let s = space.space(h);
        let alg = coeffs.algebra(h);
        for id in 0..s.count(n) {
            let lift = CoverSimplex::lift(SimplexInstance::nondegenerate(n, id));
            let values: Vec<Vec<u32>> = distinct
                .iter()
                .map(|&(k, mask)| {
                    let vertices: Vec<usize> = (0..=n).filter(|v| mask >> v & 1 == 1).collect();
                    let face = cover_restrict(s, &lift, &vertices);
                    evaluate(coeffs, layout, fs[k], h, &face)
                })
                .collect();
            let mut acc = vec![0; alg.dim()];
            for (idx, c) in &indexed {
                if idx.iter().any(|&k| values[k].iter().all(|&x| x == 0)) {
                    continue;
                }
                let mut prod = values[idx[0]].clone();
                for &k in &idx[1..] {
                    prod = alg.mul(f, &prod, &values[k]);
                }
                f.axpy(&mut acc, *c, &prod);
            }
            out[layout.range(n, h, id)].copy_from_slice(&acc);
        }
    }
    Ok(out)
}

/// Which cochain model a class lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Bredon,
    Cover,
}

/// A class of some degree; `coords` is empty for negative degrees, where the
/// class is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassValue {
    pub degree: i64,
    pub coords: Vec<u32>,
}

impl ClassValue {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerResult {
    pub s: i64,
    pub beta: bool,
    pub input_degree: usize,
    /// the `D_i` index used
    pub index: i64,
    pub scalar: u32,
    pub value: ClassValue,
}

/// `(−1)^r (m!)^q` with `m = (p−1)/2`, `r = s + m(q+q²)/2`; 1 for `p = 2`.
pub fn power_scalar(f: PrimeField, s: i64, q: usize) -> u32 {
    let p = f.p() as i64;
    if p == 2 {
        return 1;
    }
    let m = (p - 1) / 2;
    let r = s + m * (q as i64 + (q * q) as i64) / 2;
    let mfact = (1..=m as u32).fold(1, |acc, k| f.mul(acc, k % f.p()));
    let mq = f.pow(mfact, q as u64);
    if r.rem_euclid(2) == 1 {
        f.neg(mq)
    } else {
        mq
    }
}

/// `D`-index of `P^s` (or `βP^s`) on degree `q`; `Sq^s` uses `q − s`.
pub fn power_index(p: u32, s: i64, q: usize, beta: bool) -> i64 {
    if p == 2 {
        return q as i64 - s;
    }
    (q as i64 - 2 * s) * (p as i64 - 1) - beta as i64
}

/// Operations on the cohomology of one equivariant space with one
/// coefficient system, computed in the cover model.
pub struct SteenrodEngine {
    bredon: BredonModel,
    cover: RhoModel,
    bredon_h: ModelCohomology,
    cover_h: ModelCohomology,
    table: Arc<PhiTable>,
}

impl SteenrodEngine {
    pub fn new(bredon: BredonModel, cover: RhoModel, max_degree: usize, table: Arc<PhiTable>) -> Result<Self> {
        if table.field() != bredon.coefficients().field() {
            return Err(Error::InvalidCoefficients("Φ table and coefficients use different primes".into()));
        }
        let bredon_h = ModelCohomology::compute(&bredon, max_degree)?;
        let cover_h = ModelCohomology::compute(&cover, max_degree)?;
        Ok(Self {
            bredon,
            cover,
            bredon_h,
            cover_h,
            table,
        })
    }

    /// The same cohomology with a different Φ table.
    pub fn with_table(mut self, table: Arc<PhiTable>) -> Result<Self> {
        if table.field() != self.table.field() {
            return Err(Error::InvalidCoefficients("Φ table and coefficients use different primes".into()));
        }
        self.table = table;
        Ok(self)
    }

    pub fn field(&self) -> PrimeField {
        self.table.field()
    }

    pub fn table(&self) -> &Arc<PhiTable> {
        &self.table
    }

    pub fn max_degree(&self) -> usize {
        self.bredon_h.max_degree()
    }

    pub fn bredon(&self) -> &BredonModel {
        &self.bredon
    }

    pub fn cover(&self) -> &RhoModel {
        &self.cover
    }

    pub fn cohomology(&self, kind: ModelKind) -> &ModelCohomology {
        match kind {
            ModelKind::Bredon => &self.bredon_h,
            ModelKind::Cover => &self.cover_h,
        }
    }

    pub fn representative(&self, kind: ModelKind, q: usize, coords: &[u32]) -> Vec<u32> {
        self.cohomology(kind).representative(q, coords)
    }

    pub fn class_of(&self, kind: ModelKind, q: usize, cocycle: &[u32]) -> Result<Vec<u32>> {
        self.cohomology(kind).class_of(q, cocycle)
    }

    pub fn cup(&self, kind: ModelKind, n: usize, x: &[u32], m: usize, y: &[u32]) -> Result<ClassValue> {
        self.check_degree(n + m)?;
        let coords = match kind {
            ModelKind::Bredon => self.bredon_h.cup_classes(&self.bredon, n, x, m, y)?,
            ModelKind::Cover => self.cover_h.cup_classes(&self.cover, n, x, m, y)?,
        };
        Ok(ClassValue {
            degree: (n + m) as i64,
            coords,
        })
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.max_degree() {
            return Err(Error::InsufficientTruncation {
                degree,
                required: degree + 1,
                available: self.bredon.space().top_dim(),
            });
        }
        Ok(())
    }

    fn zero(&self, degree: i64) -> ClassValue {
        let len = if degree >= 0 && degree as usize <= self.max_degree() {
            self.bredon_h.dimension(degree as usize)
        } else {
            0
        };
        ClassValue {
            degree,
            coords: vec![0; len],
        }
    }

    /// `θ(e_i ⊗ u^p)` on a cover cocycle `u` of degree `q`.
    pub fn d_cochain(&self, i: u32, q: usize, u: &[u32]) -> Result<Vec<u32>> {
        let p = self.field().p() as usize;
        let fs = vec![u; p];
        theta(&self.cover, &self.table, 0, i, &fs, &vec![q; p])
    }

    /// `D_i` of a class of degree `q`, in either model.
    pub fn d_op(&self, kind: ModelKind, i: i64, q: usize, coords: &[u32]) -> Result<ClassValue> {
        let p = self.field().p() as i64;
        let out_degree = p * q as i64 - i;
        if i < 0 || out_degree < 0 {
            return Ok(self.zero(out_degree));
        }
        self.check_degree(out_degree as usize)?;
        let n = out_degree as usize;
        let space = self.bredon.space();
        let layout = self.bredon.layout();
        let coeffs = self.bredon.coefficients();
        let u = match kind {
            ModelKind::Cover => self.cover_h.representative(q, coords),
            ModelKind::Bredon => mu(space, coeffs, layout, &self.bredon_h.representative(q, coords), q),
        };
        let d = self.d_cochain(i as u32, q, &u)?;
        let coords = match kind {
            ModelKind::Cover => self.cover_h.class_of(n, &d)?,
            ModelKind::Bredon => self.bredon_h.class_of(n, &mu_inv(space, coeffs, layout, &d, n))?,
        };
        Ok(ClassValue {
            degree: out_degree,
            coords,
        })
    }

    /// `P^s` (or `βP^s`) of a class of degree `q`; for `p = 2`, `Sq^s`.
    pub fn power(&self, kind: ModelKind, s: i64, beta: bool, q: usize, coords: &[u32]) -> Result<PowerResult> {
        let f = self.field();
        let p = f.p();
        if p == 2 && beta {
            return Err(Error::InvalidCoefficients("βP^s is defined for odd primes".into()));
        }
        let index = power_index(p, s, q, beta);
        let scalar = power_scalar(f, s, q);
        let mut value = self.d_op(kind, index, q, coords)?;
        for c in value.coords.iter_mut() {
            *c = f.mul(*c, scalar);
        }
        Ok(PowerResult {
            s,
            beta,
            input_degree: q,
            index,
            scalar,
            value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Apex;
    use crate::fixtures;
    use crate::steenrod::phi::Lift;

    fn engine(fx: fixtures::Fixture, max: usize) -> SteenrodEngine {
        let f = fx.coefficients.field();
        let table = Arc::new(PhiTable::new(f, Lift::Contraction(Apex::First)).unwrap());
        let bi = BredonModel::new(fx.space.clone(), fx.coefficients.clone()).unwrap();
        let rho = RhoModel::new(fx.space, fx.coefficients).unwrap();
        SteenrodEngine::new(bi, rho, max, table).unwrap()
    }

    #[test]
    fn scalars() {
        let f = PrimeField::new(3).unwrap();
        // m = 1, r = s + (q + q²)/2
        assert_eq!(power_scalar(f, 1, 2), 1); // r = 4
        assert_eq!(power_scalar(f, 0, 1), 2); // r = 1
        assert_eq!(power_index(3, 1, 2, false), 0);
        assert_eq!(power_index(3, 0, 1, true), 1);
    }

    #[test]
    fn reduced_power_of_degree_two_class_is_its_cube() {
        let e = engine(fixtures::bz3_constant(7).unwrap(), 6);
        for kind in [ModelKind::Bredon, ModelKind::Cover] {
            let y = [1];
            let p1 = e.power(kind, 1, false, 2, &y).unwrap();
            let y2 = e.cup(kind, 2, &y, 2, &y).unwrap();
            let y3 = e.cup(kind, 4, &y2.coords, 2, &y).unwrap();
            assert_eq!(p1.value, y3);
            assert!(!y3.is_zero());
        }
    }

    #[test]
    fn p0_is_the_identity() {
        let e = engine(fixtures::bz3_constant(6).unwrap(), 5);
        for q in 1..=5 {
            let x = vec![1];
            let r = e.power(ModelKind::Cover, 0, false, q, &x).unwrap();
            assert_eq!(r.value.coords, x, "P⁰ on degree {q}");
        }
    }

    fn random_inputs(model: &RhoModel, degrees: &[usize], seed: u64) -> Vec<Vec<u32>> {
        use rand::SeedableRng;
        let max = degrees.iter().max().unwrap() + 1;
        let h = ModelCohomology::compute(model, max).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        degrees.iter().map(|&q| h.random_cochain(q, &mut rng)).collect()
    }

    #[test]
    fn theta_is_a_chain_map() {
        use crate::steenrod::w::{w_diff_gen, WGen};
        for fx in [fixtures::bz3_constant(7).unwrap(), fixtures::z2_on_bz3_f27(7).unwrap()] {
            let f = fx.coefficients.field();
            let rho = RhoModel::new(fx.space, fx.coefficients).unwrap();
            let table = PhiTable::new(f, Lift::Contraction(Apex::First)).unwrap();
            for (i, degrees, seed) in [(1u32, [1usize, 1, 2], 1u64), (2, [2, 1, 1], 2), (3, [1, 2, 1], 3), (2, [1, 1, 1], 4), (4, [2, 2, 1], 5), (0, [1, 1, 1], 6)] {
                let fs = random_inputs(&rho, &degrees, seed);
                let refs: Vec<&[u32]> = fs.iter().map(Vec::as_slice).collect();
                let n = degrees.iter().sum::<usize>() - i as usize;
                let lhs = rho.coboundary(&theta(&rho, &table, 0, i, &refs, &degrees).unwrap(), n);
                // θ(d e_i ⊗ F)
                let mut rhs = vec![0; lhs.len()];
                for (g, c) in w_diff_gen(f, WGen::e(i)).terms() {
                    let t = theta(&rho, &table, g.power, i - 1, &refs, &degrees).unwrap();
                    f.axpy(&mut rhs, c, &t);
                }
                // δθ(e_i ⊗ F) = (−1)^n θ(d e_i ⊗ F) + Σ_k (−1)^{q_{k+1}+⋯+q_p} θ(e_i ⊗ ⋯ δf_k ⋯)
                if n % 2 == 1 {
                    for x in rhs.iter_mut() {
                        *x = f.neg(*x);
                    }
                }
                for k in 0..3 {
                    let df = rho.coboundary(&fs[k], degrees[k]);
                    let mut refs2 = refs.clone();
                    refs2[k] = &df;
                    let mut degs2 = degrees;
                    degs2[k] += 1;
                    let t = theta(&rho, &table, 0, i, &refs2, &degs2).unwrap();
                    let after: usize = degrees[k + 1..].iter().sum();
                    f.axpy(&mut rhs, f.sign(after), &t);
                }
                assert_eq!(lhs, rhs, "i = {i}, degrees {degrees:?}");
            }
        }
    }

    #[test]
    fn theta_is_cyclically_invariant() {
        let fx = fixtures::z2_on_bz3_f27(6).unwrap();
        let f = fx.coefficients.field();
        let rho = RhoModel::new(fx.space, fx.coefficients).unwrap();
        let table = PhiTable::new(f, Lift::Contraction(Apex::First)).unwrap();
        for (i, degrees) in [(0u32, [1usize, 2, 1]), (1, [2, 1, 2]), (2, [1, 1, 2])] {
            let fs = random_inputs(&rho, &degrees, 9);
            let refs: Vec<&[u32]> = fs.iter().map(Vec::as_slice).collect();
            let plain = theta(&rho, &table, 0, i, &refs, &degrees).unwrap();
            // α·(e_i ⊗ f₁⊗f₂⊗f₃) = ±α e_i ⊗ f₃⊗f₁⊗f₂
            let rotated = [refs[2], refs[0], refs[1]];
            let rdeg = [degrees[2], degrees[0], degrees[1]];
            let sign = f.sign(degrees[2] * (degrees[0] + degrees[1]));
            let mut moved = theta(&rho, &table, 1, i, &rotated, &rdeg).unwrap();
            for x in moved.iter_mut() {
                *x = f.mul(*x, sign);
            }
            assert_eq!(plain, moved, "i = {i}");
        }
    }

    #[test]
    fn bockstein_power_on_degree_one() {
        // βP⁰ on H¹(BZ/3) is the Bockstein, which is an isomorphism H¹ → H²
        let e = engine(fixtures::bz3_constant(4).unwrap(), 3);
        let r = e.power(ModelKind::Bredon, 0, true, 1, &[1]).unwrap();
        assert_eq!(r.value.degree, 2);
        assert!(!r.value.is_zero());
    }
}
