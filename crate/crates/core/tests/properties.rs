use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eqsteenrod::bredon::{BredonModel, CochainModel, CoefficientSystem, EquivariantSpace, ModelCohomology};
use eqsteenrod::cover::{mu, RhoModel};
use eqsteenrod::fixtures::{self, Fixture};
use eqsteenrod::linalg::PrimeField;
use eqsteenrod::orbit::FiniteGroup;
use eqsteenrod::simplex::nerve;

struct Models {
    bi: BredonModel,
    rho: RhoModel,
    bi_h: ModelCohomology,
    rho_h: ModelCohomology,
}

fn models(fx: Fixture, max_degree: usize) -> Models {
    let bi = BredonModel::new(fx.space.clone(), fx.coefficients.clone()).unwrap();
    let rho = RhoModel::new(fx.space, fx.coefficients).unwrap();
    let bi_h = ModelCohomology::compute(&bi, max_degree).unwrap();
    let rho_h = ModelCohomology::compute(&rho, max_degree).unwrap();
    Models { bi, rho, bi_h, rho_h }
}

fn f27_models() -> &'static Models {
    static M: OnceLock<Models> = OnceLock::new();
    M.get_or_init(|| models(fixtures::z2_on_bz3_f27(5).unwrap(), 4))
}

fn add_signed<M: CochainModel>(model: &M, a: &[u32], sign: u32, b: &[u32]) -> Vec<u32> {
    let f = model.coefficients().field();
    let mut out = a.to_vec();
    f.axpy(&mut out, sign, b);
    out
}

fn leibniz<M: CochainModel>(model: &M, a: &[u32], n: usize, b: &[u32], m: usize) -> bool {
    let f = model.coefficients().field();
    let lhs = model.coboundary(&model.cup(a, n, b, m), n + m);
    let left = model.cup(&model.coboundary(a, n), n + 1, b, m);
    let right = model.cup(a, n, &model.coboundary(b, m), m + 1);
    lhs == add_signed(model, &left, f.sign(n), &right)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cochain_identities_on_random_compatible_cochains(seed in any::<u64>(), n in 0usize..3, m in 0usize..2) {
        let ms = f27_models();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ms.bi_h.random_cochain(n, &mut rng);
        let b = ms.bi_h.random_cochain(m, &mut rng);
        prop_assert!(ms.bi.coboundary(&ms.bi.coboundary(&a, n), n + 1).iter().all(|&c| c == 0));
        prop_assert!(leibniz(&ms.bi, &a, n, &b, m));
        let space = ms.bi.space();
        let coeffs = ms.bi.coefficients();
        let layout = ms.bi.layout();
        let (ma, mb) = (mu(space, coeffs, layout, &a, n), mu(space, coeffs, layout, &b, m));
        prop_assert_eq!(
            mu(space, coeffs, layout, &ms.bi.cup(&a, n, &b, m), n + m),
            ms.rho.cup(&ma, n, &mb, m)
        );
        let c = ms.rho_h.random_cochain(n, &mut rng);
        let d = ms.rho_h.random_cochain(m, &mut rng);
        prop_assert!(ms.rho.coboundary(&ms.rho.coboundary(&c, n), n + 1).iter().all(|&x| x == 0));
        prop_assert!(leibniz(&ms.rho, &c, n, &d, m));
    }
}

#[test]
fn both_models_have_the_same_cohomology_on_every_fixture() {
    let mut all = fixtures::all_p3(5).unwrap();
    all.push(fixtures::bz2_constant(5).unwrap());
    for fx in all {
        let name = fx.name.clone();
        let ms = models(fx, 4);
        assert_eq!(ms.bi_h.dimensions(), ms.rho_h.dimensions(), "{name}");
    }
}

#[test]
fn cup_product_is_graded_commutative_on_classes() {
    for fx in [fixtures::bz3_constant(7).unwrap(), fixtures::z2_on_bz3_constant(7).unwrap()] {
        let ms = models(fx, 6);
        let f = PrimeField::new(3).unwrap();
        for n in 1..=3 {
            for m in 1..=3 {
                for i in 0..ms.bi_h.dimension(n) {
                    for j in 0..ms.bi_h.dimension(m) {
                        let mut x = vec![0; ms.bi_h.dimension(n)];
                        x[i] = 1;
                        let mut y = vec![0; ms.bi_h.dimension(m)];
                        y[j] = 1;
                        let xy = ms.bi_h.cup_classes(&ms.bi, n, &x, m, &y).unwrap();
                        let mut yx = ms.bi_h.cup_classes(&ms.bi, m, &y, n, &x).unwrap();
                        f.scale(&mut yx, f.sign(n * m));
                        assert_eq!(xy, yx, "degrees {n}, {m}");
                    }
                }
            }
        }
    }
}

/// `S_3` acting on the nerve of `S_3` by conjugation, so the fixed points
/// of `H` are the nerve of its centralizer.
#[test]
fn conjugation_action_of_s3_on_its_own_nerve() {
    let g = FiniteGroup::symmetric3();
    let images: Vec<Vec<usize>> = g
        .elements()
        .map(|a| g.elements().map(|x| g.mul(g.mul(a, x), g.inv(a))).collect())
        .collect();
    let x = nerve(&g, 3, Some((g.clone(), images))).unwrap();
    let space = EquivariantSpace::new(x);
    assert_eq!(space.subgroup_count(), 6);
    for h in 0..space.subgroup_count() {
        let sub = space.category().subgroup(h);
        let centralizer = g
            .elements()
            .filter(|&c| sub.members().iter().all(|&k| g.mul(c, k) == g.mul(k, c)))
            .count();
        assert_eq!(space.space(h).count(1), centralizer - 1, "H = {sub}");
    }
    let f = PrimeField::new(3).unwrap();
    let coeffs = CoefficientSystem::constant(f, &space);
    let bi = BredonModel::new(space.clone(), coeffs.clone()).unwrap();
    let rho = RhoModel::new(space, coeffs).unwrap();
    let a = ModelCohomology::compute(&bi, 2).unwrap().dimensions();
    let b = ModelCohomology::compute(&rho, 2).unwrap().dimensions();
    assert_eq!(a, b);
    assert_eq!(a[0], 1);
}
