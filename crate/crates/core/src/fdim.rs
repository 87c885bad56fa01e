//! Free-dimension arithmetic for tracial finite algebras: direct sums of
//! matrix blocks, diffuse hyperfinite pieces and interpolated free group
//! factors.

use serde::{Deserialize, Serialize};

use crate::algebra::{ensure_valid, AlgebraSpec, Summand, SummandKind};
use crate::amalg::expr::StructureExpr;
use crate::error::{Error, Result};
use crate::exact::{Extended, Rational};

/// `L(F_r)^t = L(F_{1 + (r-1)/t²})`.
pub fn compress_param(r: &Extended, t: &Rational) -> Extended {
    assert!(t.is_positive(), "amplification must be positive");
    match r {
        Extended::Finite(r) => {
            Extended::Finite(Rational::one() + (r - Rational::one()) / t.square())
        }
        Extended::Infinite => Extended::Infinite,
    }
}

fn summand_fdim(s: &Summand) -> Result<Extended> {
    match &s.kind {
        SummandKind::MatrixBlock { size, .. } if s.is_tracial() => {
            let n = Rational::from_integer(*size as i64);
            Ok(Extended::Finite(Rational::one() - n.square().recip()))
        }
        SummandKind::HyperfiniteDiffuse { finite: true } => Ok(Extended::Finite(Rational::one())),
        SummandKind::FreeGroupFactor {
            param,
            amplification,
        } => Ok(compress_param(param, amplification)),
        _ => Err(Error::UnsupportedStructure(format!(
            "free dimension is defined for tracial matrix, finite hyperfinite and free group summands, not {}",
            s.short_name()
        ))),
    }
}

/// `fdim(⊕ X_i with weights w_i) = 1 + Σ w_i² (fdim X_i − 1)`.
pub fn fdim(spec: &AlgebraSpec) -> Result<Extended> {
    if spec.tail.is_some() {
        return Err(Error::UnsupportedStructure(
            "free dimension of an infinite direct sum".into(),
        ));
    }
    let one = Rational::one();
    let mut acc = one.clone();
    for s in &spec.summands {
        match summand_fdim(s)? {
            Extended::Finite(f) => acc += &(s.weight.square() * (f - &one)),
            Extended::Infinite => return Ok(Extended::Infinite),
        }
    }
    Ok(Extended::Finite(acc))
}

/// Atoms of the free product coming from scalar central summands: each pair
/// `(α, β)` with `α + β > 1` leaves an atom of mass `α + β − 1`. Sorted by
/// decreasing mass.
pub fn scalar_atom_rule(weights1: &[Rational], weights2: &[Rational]) -> Vec<Rational> {
    let one = Rational::one();
    let mut out: Vec<Rational> = weights1
        .iter()
        .flat_map(|a| weights2.iter().map(move |b| a + b))
        .filter(|s| s > &one)
        .map(|s| s - &one)
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

pub(crate) fn scalar_weights(spec: &AlgebraSpec) -> Vec<Rational> {
    spec.summands
        .iter()
        .filter(|s| s.is_scalar())
        .map(|s| s.weight.clone())
        .collect()
}

/// Largest mass `μ` such that a scalar atom of mass `α` on the other side
/// meets this block's central support in an atom iff `α + μ > 1`.
fn block_threshold(eigenvalues: &[Rational]) -> Rational {
    eigenvalues
        .iter()
        .map(Rational::recip)
        .sum::<Rational>()
        .recip()
}

/// Matrix blocks of size at least two whose pairing with a scalar atom on the
/// other side would create a non-scalar finite-dimensional summand.
pub(crate) fn check_no_matrix_atoms(scalars: &[Rational], blocks: &[Summand]) -> Result<()> {
    let one = Rational::one();
    for s in blocks {
        if let SummandKind::MatrixBlock { size, eigenvalues } = &s.kind {
            if *size < 2 {
                continue;
            }
            let mu = block_threshold(eigenvalues);
            if let Some(a) = scalars.iter().find(|a| *a + &mu > one) {
                return Err(Error::UnsupportedStructure(format!(
                    "scalar summand of mass {a} against {} would leave a matrix summand of size ≥ 2",
                    s.short_name()
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFreeProduct {
    pub atoms: Vec<Rational>,
    pub diffuse_weight: Rational,
    pub param: Extended,
    pub fdim_inputs: (Extended, Extended),
    pub expr: StructureExpr,
}

impl FiniteFreeProduct {
    /// Free dimension of `⊕ atoms ⊕ L(F_r)` computed from the output side.
    pub fn output_fdim(&self) -> Extended {
        let one = Rational::one();
        let atoms: Rational = self.atoms.iter().map(Rational::square).sum();
        match &self.param {
            Extended::Finite(r) => {
                Extended::Finite(&one - atoms + self.diffuse_weight.square() * (r - &one))
            }
            Extended::Infinite => Extended::Infinite,
        }
    }
}

/// Free product of two tracial finite algebras: scalar atoms plus
/// `L(F_r)` on the complement, with `r` fixed by free-dimension balance.
pub fn finite_free_product(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<FiniteFreeProduct> {
    ensure_valid(spec1)?;
    ensure_valid(spec2)?;
    if spec1.dimension() == Some(2) && spec2.dimension() == Some(2) {
        return Err(Error::Dim22Rejected);
    }
    let f1 = fdim(spec1)?;
    let f2 = fdim(spec2)?;
    for spec in [spec1, spec2] {
        if let Some(s) = spec.summands.iter().find(|s| !s.is_tracial()) {
            return Err(Error::UnsupportedStructure(format!(
                "{} is not tracial",
                s.short_name()
            )));
        }
    }
    let s1 = scalar_weights(spec1);
    let s2 = scalar_weights(spec2);
    check_no_matrix_atoms(&s1, &spec2.summands)?;
    check_no_matrix_atoms(&s2, &spec1.summands)?;

    let one = Rational::one();
    let atoms = scalar_atom_rule(&s1, &s2);
    let w = &one - atoms.iter().sum::<Rational>();
    if !w.is_positive() {
        return Err(Error::UnsupportedStructure(
            "no diffuse part remains".into(),
        ));
    }
    let param = match (&f1, &f2) {
        (Extended::Finite(a), Extended::Finite(b)) => {
            let sq: Rational = atoms.iter().map(Rational::square).sum();
            let r = &one + (a + b - &one + sq) / w.square();
            if r <= one {
                return Err(Error::UnsupportedStructure(format!(
                    "free-dimension balance gives parameter {r} ≤ 1"
                )));
            }
            Extended::Finite(r)
        }
        _ => Extended::Infinite,
    };
    let diffuse = StructureExpr::FreeGroup {
        param: param.clone(),
    };
    let expr = if atoms.is_empty() {
        diffuse
    } else {
        let mut parts: Vec<(Extended, StructureExpr)> = atoms
            .iter()
            .map(|a| (Extended::Finite(a.clone()), StructureExpr::Scalar))
            .collect();
        parts.push((Extended::Finite(w.clone()), diffuse));
        StructureExpr::DirectSum { parts }
    };
    Ok(FiniteFreeProduct {
        atoms,
        diffuse_weight: w,
        param,
        fdim_inputs: (f1, f2),
        expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn fdim_examples() {
        let c2 = AlgebraSpec::scalars("A", &[q(1, 2), q(1, 2)]);
        assert_eq!(fdim(&c2).unwrap(), Extended::Finite(q(1, 2)));
        assert_eq!(
            fdim(&AlgebraSpec::tracial_matrix("B", 2)).unwrap(),
            Extended::Finite(q(3, 4))
        );
        let f2 = AlgebraSpec::single("F", Summand::free_group(Extended::Finite(q(2, 1)), q(1, 1)));
        assert_eq!(fdim(&f2).unwrap(), Extended::Finite(q(2, 1)));
        let n = AlgebraSpec::single("N", Summand::abstract_ii1("N", q(1, 1)));
        assert!(matches!(fdim(&n), Err(Error::UnsupportedStructure(_))));
    }

    #[test]
    fn compress_examples() {
        let two = Extended::Finite(q(2, 1));
        assert_eq!(compress_param(&two, &q(1, 1)), two);
        assert_eq!(compress_param(&two, &q(1, 2)), Extended::Finite(q(5, 1)));
        assert_eq!(compress_param(&Extended::Finite(q(5, 1)), &q(2, 1)), two);
        assert_eq!(
            compress_param(&Extended::Infinite, &q(3, 7)),
            Extended::Infinite
        );
    }

    #[test]
    fn atom_rule() {
        assert!(scalar_atom_rule(&[q(1, 2)], &[q(1, 2)]).is_empty());
        assert!(scalar_atom_rule(&[], &[q(9, 10)]).is_empty());
        // 4/5 + 7/10 and 4/5 + 3/10 both exceed one
        assert_eq!(
            scalar_atom_rule(&[q(4, 5), q(1, 10), q(1, 10)], &[q(7, 10), q(3, 10)]),
            vec![q(1, 2), q(1, 10)]
        );
    }

    #[test]
    fn matrix_pair() {
        let m2 = AlgebraSpec::tracial_matrix("M2", 2);
        let out = finite_free_product(&m2, &m2).unwrap();
        assert_eq!(out.param, Extended::Finite(q(3, 2)));
        assert!(out.atoms.is_empty());
        assert_eq!(out.output_fdim(), Extended::Finite(q(3, 2)));
    }

    #[test]
    fn abelian_pair_with_atoms() {
        let a = AlgebraSpec::scalars("A", &[q(4, 5), q(1, 10), q(1, 10)]);
        let b = AlgebraSpec::scalars("B", &[q(7, 10), q(3, 10)]);
        let out = finite_free_product(&a, &b).unwrap();
        assert_eq!(out.atoms, vec![q(1, 2), q(1, 10)]);
        assert_eq!(out.diffuse_weight, q(2, 5));
        assert_eq!(out.param, Extended::Finite(q(9, 8)));
        assert_eq!(out.output_fdim(), Extended::Finite(q(19, 25)));
    }

    #[test]
    fn rejections() {
        let n = AlgebraSpec::single("N", Summand::abstract_ii1("N", q(1, 1)));
        assert!(matches!(
            finite_free_product(&n, &n),
            Err(Error::UnsupportedStructure(_))
        ));
        let c2 = AlgebraSpec::scalars("A", &[q(1, 2), q(1, 2)]);
        assert_eq!(finite_free_product(&c2, &c2), Err(Error::Dim22Rejected));
        // a heavy atom against a light M_2 block would leave a copy of M_2
        let heavy = AlgebraSpec::scalars("H", &[q(19, 20), q(1, 20)]);
        let light = AlgebraSpec::new(
            "L",
            vec![
                Summand::tracial_matrix(2, q(1, 2)),
                Summand::hyperfinite(q(1, 2)),
            ],
        );
        assert!(matches!(
            finite_free_product(&heavy, &light),
            Err(Error::UnsupportedStructure(_))
        ));
    }
}
