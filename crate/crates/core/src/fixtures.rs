//! Small worked examples: classifying spaces of cyclic groups with constant
//! or Galois-twisted coefficients, and an involution on `BZ/3`.

use std::collections::BTreeMap;

use crate::bredon::{CoefficientAlgebra, CoefficientSystem, EquivariantSpace};
use crate::error::Result;
use crate::linalg::{Matrix, PrimeField};
use crate::orbit::FiniteGroup;
use crate::simplex::nerve;

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub space: EquivariantSpace,
    pub coefficients: CoefficientSystem,
}

/// `F_27 = F_3[t]/(t³ + 2t + 2)`.
pub fn f27() -> CoefficientAlgebra {
    CoefficientAlgebra::quotient_ring(PrimeField::new(3).expect("3 is prime"), &[2, 2, 0])
}

fn power(f: PrimeField, m: &Matrix, k: usize) -> Matrix {
    (0..k).fold(Matrix::identity(m.rows()), |acc, _| acc.mul(f, m))
}

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            out.set(r, c, a.get(r, c));
        }
    }
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            out.set(a.rows() + r, a.cols() + c, b.get(r, c));
        }
    }
    out
}

/// `BZ/3` with constant `Z/3` coefficients, trivial group acting.
pub fn bz3_constant(top_dim: usize) -> Result<Fixture> {
    let f = PrimeField::new(3)?;
    let space = EquivariantSpace::new(nerve(&FiniteGroup::cyclic(3), top_dim, None)?);
    let coefficients = CoefficientSystem::constant(f, &space);
    Ok(Fixture {
        name: "bz3-constant".into(),
        space,
        coefficients,
    })
}

/// `BZ/2` with constant `Z/2` coefficients.
pub fn bz2_constant(top_dim: usize) -> Result<Fixture> {
    let f = PrimeField::new(2)?;
    let space = EquivariantSpace::new(nerve(&FiniteGroup::cyclic(2), top_dim, None)?);
    let coefficients = CoefficientSystem::constant(f, &space);
    Ok(Fixture {
        name: "bz2-constant".into(),
        space,
        coefficients,
    })
}

/// `BZ/3` with `F_27` coefficients, the generator acting through the
/// Frobenius: `Ψ((g^k)) = Frob^{−k}`.
pub fn frobenius_bz3(top_dim: usize) -> Result<Fixture> {
    let f = PrimeField::new(3)?;
    let gamma = FiniteGroup::cyclic(3);
    let space = EquivariantSpace::new(nerve(&gamma, top_dim, None)?);
    let alg = f27();
    let frob = alg.frobenius(f);
    // edges are the tuples (g), (g²) in that order
    let psi = vec![vec![power(f, &frob, 2), power(f, &frob, 1)]];
    let transfers: BTreeMap<_, _> = space
        .morphisms()
        .iter()
        .map(|&m| (m, Matrix::identity(3)))
        .collect();
    let coefficients = CoefficientSystem::new(f, &space, vec![alg], psi, transfers)?;
    Ok(Fixture {
        name: "bz3-frobenius".into(),
        space,
        coefficients,
    })
}

/// `Z/2` acting on `BZ/3` by inversion, with constant `Z/3` coefficients.
pub fn z2_on_bz3_constant(top_dim: usize) -> Result<Fixture> {
    let f = PrimeField::new(3)?;
    let space = z2_on_bz3_space(top_dim)?;
    let coefficients = CoefficientSystem::constant(f, &space);
    Ok(Fixture {
        name: "z2-on-bz3-constant".into(),
        space,
        coefficients,
    })
}

/// `Z/2` acting on `BZ/3` by inversion. `M₀({e}) = F_27 × F_27` with
/// `Ψ((g^k)) = Frob^{−k} × Frob^{k}`, the involution transferring by the
/// swap, and `M₀(Z/2) = F_27` included diagonally.
pub fn z2_on_bz3_f27(top_dim: usize) -> Result<Fixture> {
    let f = PrimeField::new(3)?;
    let space = z2_on_bz3_space(top_dim)?;
    let field27 = f27();
    let alg = CoefficientAlgebra::product(&field27, &field27);
    let frob = field27.frobenius(f);
    let frob2 = power(f, &frob, 2);
    let psi_e = vec![block_diag(&frob2, &frob), block_diag(&frob, &frob2)];
    let psi_z2 = vec![Vec::new(); 1];
    let mut swap = Matrix::zeros(6, 6);
    let mut diagonal = Matrix::zeros(6, 3);
    for k in 0..3 {
        swap.set(k, k + 3, 1);
        swap.set(k + 3, k, 1);
        diagonal.set(k, k, 1);
        diagonal.set(k + 3, k, 1);
    }
    let cat = space.category();
    let transfers: BTreeMap<_, _> = space
        .morphisms()
        .iter()
        .map(|&m| {
            let matrix = match (m.source, m.target) {
                (0, 0) if m == cat.identity_morphism(0) => Matrix::identity(6),
                (0, 0) => swap.clone(),
                (0, _) => diagonal.clone(),
                _ => Matrix::identity(3),
            };
            (m, matrix)
        })
        .collect();
    let mut psi = vec![psi_e];
    psi.extend(psi_z2);
    let coefficients = CoefficientSystem::new(f, &space, vec![alg, field27], psi, transfers)?;
    Ok(Fixture {
        name: "z2-on-bz3-f27".into(),
        space,
        coefficients,
    })
}

fn z2_on_bz3_space(top_dim: usize) -> Result<EquivariantSpace> {
    let gamma = FiniteGroup::cyclic(3);
    let inversion = vec![vec![0, 1, 2], vec![0, 2, 1]];
    let x = nerve(&gamma, top_dim, Some((FiniteGroup::cyclic(2), inversion)))?;
    Ok(EquivariantSpace::new(x))
}

/// All fixtures over `Z/3` at the given truncation.
pub fn all_p3(top_dim: usize) -> Result<Vec<Fixture>> {
    Ok(vec![
        bz3_constant(top_dim)?,
        frobenius_bz3(top_dim)?,
        z2_on_bz3_constant(top_dim)?,
        z2_on_bz3_f27(top_dim)?,
    ])
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = [
    "bz3-constant",
    "bz3-frobenius",
    "z2-on-bz3-constant",
    "z2-on-bz3-f27",
    "bz2-constant",
];

/// A built-in fixture by name, or `None` for an unknown name.
pub fn by_name(name: &str, top_dim: usize) -> Option<Result<Fixture>> {
    let build = match name {
        "bz3-constant" => bz3_constant,
        "bz3-frobenius" => frobenius_bz3,
        "z2-on-bz3-constant" => z2_on_bz3_constant,
        "z2-on-bz3-f27" => z2_on_bz3_f27,
        "bz2-constant" => bz2_constant,
        _ => return None,
    };
    Some(build(top_dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bredon::validate_coefficients;

    #[test]
    fn fixtures_validate() {
        let mut all = all_p3(3).unwrap();
        all.push(bz2_constant(3).unwrap());
        for fx in all {
            let r = validate_coefficients(&fx.space, &fx.coefficients);
            assert!(r.is_valid(), "{}: {:?}", fx.name, r.failures);
        }
    }

    #[test]
    fn every_name_builds_its_fixture() {
        for name in NAMES {
            let fx = by_name(name, 2).unwrap().unwrap();
            assert_eq!(fx.name, name);
        }
        assert!(by_name("bz5", 2).is_none());
    }

    #[test]
    fn involution_fixes_only_the_vertex() {
        let fx = z2_on_bz3_constant(3).unwrap();
        assert_eq!(fx.space.space(1).counts(), &[1, 0, 0, 0]);
        assert_eq!(fx.space.morphisms().len(), 4);
    }
}
