//! The standard free resolution `W` of `Z/p` over the cyclic group
//! `π = ⟨α⟩` of order `p`.
//!
//! `W_i` is free on one generator `e_i`; with `T = α − 1` and
//! `N = 1 + α + ⋯ + α^{p−1}`, `d(e_{2i+1}) = T e_{2i}`, `d(e_{2i}) = N e_{2i−1}`
//! and `ε(α^a e_0) = 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::PrimeField;

/// The basis element `α^power e_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WGen {
    pub index: u32,
    pub power: u32,
}

impl WGen {
    pub fn e(index: u32) -> Self {
        Self { index, power: 0 }
    }

    pub fn new(power: u32, index: u32) -> Self {
        Self { index, power }
    }

    /// `α^k` applied, with exponents taken mod `p`.
    pub fn shift(self, k: u32, p: u32) -> Self {
        Self {
            index: self.index,
            power: (self.power + k) % p,
        }
    }
}

impl fmt::Display for WGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => write!(f, "e{}", self.index),
            1 => write!(f, "αe{}", self.index),
            a => write!(f, "α^{a}e{}", self.index),
        }
    }
}

/// A finite `Z/p`-combination of basis elements of `W`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WChain {
    terms: BTreeMap<WGen, u32>,
}

impl WChain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gen(g: WGen) -> Self {
        let mut c = Self::zero();
        c.terms.insert(g, 1);
        c
    }

    pub fn terms(&self) -> impl Iterator<Item = (WGen, u32)> + '_ {
        self.terms.iter().map(|(&g, &c)| (g, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: PrimeField, g: WGen, c: u32) {
        let c = c % f.p();
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(g).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn add_chain(&mut self, f: PrimeField, other: &WChain, c: u32) {
        for (g, x) in other.terms() {
            self.add_term(f, g, f.mul(x, c));
        }
    }

    pub fn map_linear(&self, f: PrimeField, op: impl Fn(WGen) -> WChain) -> WChain {
        let mut out = WChain::zero();
        for (g, c) in self.terms() {
            out.add_chain(f, &op(g), c);
        }
        out
    }
}

/// `d(α^a e_i)`.
pub fn w_diff_gen(f: PrimeField, g: WGen) -> WChain {
    let p = f.p();
    let mut out = WChain::zero();
    if g.index == 0 {
        return out;
    }
    let below = WGen::new(g.power, g.index - 1);
    if g.index % 2 == 1 {
        out.add_term(f, below.shift(1, p), 1);
        out.add_term(f, below, p - 1);
    } else {
        for k in 0..p {
            out.add_term(f, below.shift(k, p), 1);
        }
    }
    out
}

pub fn w_diff(f: PrimeField, w: &WChain) -> WChain {
    w.map_linear(f, |g| w_diff_gen(f, g))
}

/// `ε`, nonzero only on `W_0`.
pub fn w_aug(f: PrimeField, w: &WChain) -> u32 {
    w.terms()
        .filter(|(g, _)| g.index == 0)
        .fold(0, |acc, (_, c)| f.add(acc, c))
}

/// Contraction `s` with `ds + sd = 1 − ηε`, `η(1) = e_0`.
pub fn w_contraction_gen(f: PrimeField, g: WGen) -> WChain {
    let p = f.p();
    let mut out = WChain::zero();
    if g.index.is_multiple_of(2) {
        for k in 0..g.power {
            out.add_term(f, WGen::new(k, g.index + 1), 1);
        }
    } else if g.power == p - 1 {
        out.add_term(f, WGen::e(g.index + 1), 1);
    }
    out
}

pub fn w_contraction(f: PrimeField, w: &WChain) -> WChain {
    w.map_linear(f, |g| w_contraction_gen(f, g))
}

/// The coproduct `ψ: W → W ⊗ W`, extended diagonally over `π`. In even
/// degrees the second sum runs over `α^r e_{2j+1} ⊗ α^s e_{2k+1}`,
/// `j + k = i − 1`, which is the degree-consistent form.
pub fn w_coproduct_gen(f: PrimeField, g: WGen) -> BTreeMap<(WGen, WGen), u32> {
    let p = f.p();
    let mut out: BTreeMap<(WGen, WGen), u32> = BTreeMap::new();
    let mut add = |x: WGen, y: WGen| {
        let key = (x.shift(g.power, p), y.shift(g.power, p));
        let e = out.entry(key).or_insert(0);
        *e = f.add(*e, 1);
    };
    let i = g.index / 2;
    if g.index % 2 == 1 {
        for j in 0..=i {
            let k = i - j;
            add(WGen::e(2 * j), WGen::e(2 * k + 1));
            add(WGen::e(2 * j + 1), WGen::new(1 % p, 2 * k));
        }
    } else {
        for j in 0..=i {
            add(WGen::e(2 * j), WGen::e(2 * (i - j)));
        }
        if i >= 1 {
            for j in 0..i {
                let k = i - 1 - j;
                for r in 0..p {
                    for s in r + 1..p {
                        add(WGen::new(r, 2 * j + 1), WGen::new(s, 2 * k + 1));
                    }
                }
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_gens(p: u32, max_index: u32) -> Vec<WGen> {
        (0..=max_index)
            .flat_map(|i| (0..p).map(move |a| WGen::new(a, i)))
            .collect()
    }

    #[test]
    fn differential_examples() {
        let f = PrimeField::new(3).unwrap();
        let d1 = w_diff_gen(f, WGen::e(1));
        let mut expected = WChain::gen(WGen::new(1, 0));
        expected.add_term(f, WGen::e(0), 2);
        assert_eq!(d1, expected);
        assert_eq!(w_aug(f, &WChain::gen(WGen::new(2, 0))), 1);
        assert_eq!(w_aug(f, &WChain::gen(WGen::e(1))), 0);
    }

    #[test]
    fn d_squared_and_augmentation() {
        for p in [2, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            for g in all_gens(p, 7) {
                let dd = w_diff(f, &w_diff_gen(f, g));
                assert!(dd.is_zero(), "d² ≠ 0 on {g}");
                if g.index == 1 {
                    assert_eq!(w_aug(f, &w_diff_gen(f, g)), 0);
                }
            }
        }
    }

    #[test]
    fn contraction_identity() {
        for p in [2, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            for g in all_gens(p, 6) {
                let s = w_contraction_gen(f, g);
                let mut lhs = w_diff(f, &s);
                lhs.add_chain(f, &w_contraction(f, &w_diff_gen(f, g)), 1);
                let mut rhs = WChain::gen(g);
                if g.index == 0 {
                    rhs.add_term(f, WGen::e(0), p - 1);
                }
                assert_eq!(lhs, rhs, "ds + sd on {g}, p = {p}");
                assert!(w_contraction(f, &s).is_zero());
            }
        }
        let f = PrimeField::new(3).unwrap();
        assert!(w_contraction_gen(f, WGen::e(0)).is_zero());
        assert_eq!(w_contraction_gen(f, WGen::new(1, 0)), WChain::gen(WGen::e(1)));
    }

    #[test]
    fn coproduct_low_degree() {
        let f = PrimeField::new(3).unwrap();
        let psi = w_coproduct_gen(f, WGen::e(1));
        let expected: BTreeMap<(WGen, WGen), u32> = [
            ((WGen::e(0), WGen::e(1)), 1),
            ((WGen::e(1), WGen::new(1, 0)), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(psi, expected);
    }

    #[test]
    fn coproduct_is_a_chain_map() {
        for p in [3, 5] {
            let f = PrimeField::new(p).unwrap();
            let diff_tensor = |m: &BTreeMap<(WGen, WGen), u32>| {
                let mut out: BTreeMap<(WGen, WGen), u32> = BTreeMap::new();
                let mut add = |k: (WGen, WGen), c: u32| {
                    let e = out.entry(k).or_insert(0);
                    *e = f.add(*e, c);
                };
                for (&(x, y), &c) in m {
                    for (dx, a) in w_diff_gen(f, x).terms() {
                        add((dx, y), f.mul(a, c));
                    }
                    let sign = f.sign(x.index as usize);
                    for (dy, b) in w_diff_gen(f, y).terms() {
                        add((x, dy), f.mul(f.mul(b, c), sign));
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            };
            for g in all_gens(p, 7) {
                let lhs = diff_tensor(&w_coproduct_gen(f, g));
                let mut rhs: BTreeMap<(WGen, WGen), u32> = BTreeMap::new();
                for (h, c) in w_diff_gen(f, g).terms() {
                    for (k, v) in w_coproduct_gen(f, h) {
                        let e = rhs.entry(k).or_insert(0);
                        *e = f.add(*e, f.mul(c, v));
                    }
                }
                rhs.retain(|_, c| *c != 0);
                assert_eq!(lhs, rhs, "dψ ≠ ψd on {g}, p = {p}");
            }
        }
    }

    #[test]
    fn coproduct_is_counital() {
        let f = PrimeField::new(3).unwrap();
        for g in all_gens(3, 6) {
            let mut left = WChain::zero();
            for ((x, y), c) in w_coproduct_gen(f, g) {
                if x.index == 0 {
                    left.add_term(f, y, c);
                }
            }
            assert_eq!(left, WChain::gen(g), "(ε ⊗ 1)ψ on {g}");
        }
    }
}
