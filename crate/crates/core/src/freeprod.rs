//! Splitting a free product into its finite-dimensional part and its
//! diffuse factor summand, and the reduction exposing the latter as a free
//! product again.

use serde::{Deserialize, Serialize};

use crate::algebra::{ensure_valid, AlgebraSpec, ProjectionRef, Summand, SummandKind, TailRule};
use crate::amalg::expr::StructureExpr;
use crate::error::{Error, Result};
use crate::exact::{MultGroup, Rational};
use crate::fdim::{check_no_matrix_atoms, scalar_atom_rule, scalar_weights};
use crate::modular::{classify_diffuse_type, sd_invariant, t_set_of, FactorType, TSet};

/// Where the projection `p` carrying the unit of the finite part lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSite {
    /// `0` for the first input, `1` for the second.
    pub input: usize,
    pub projection: ProjectionRef,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeProductResult {
    pub m_d: Vec<(StructureExpr, Rational)>,
    pub m_c_type: FactorType,
    pub m_c_unit_weight: Rational,
    pub sd: MultGroup,
    pub t_set: TSet,
    pub reduction: Option<ReductionSite>,
    pub reduction_trace: Vec<String>,
    /// `M_c' ∩ M_c^ω = ℂ`; holds for every accepted pair.
    pub central_sequences_trivial: bool,
}

fn has_full_weight_diffuse(spec: &AlgebraSpec) -> bool {
    spec.tail.is_none()
        && spec
            .summands
            .iter()
            .any(|s| s.is_diffuse() && s.weight.is_one())
}

/// Prefix blocks plus enough tail blocks that every omitted block is lighter
/// than `1 - max_alpha`, so no omitted block can meet a scalar atom.
fn blocks_for_atom_check(spec: &AlgebraSpec, max_alpha: &Rational) -> Result<Vec<Summand>> {
    let Some(tail) = &spec.tail else {
        return Ok(spec.summands.clone());
    };
    let TailRule::GeometricQubits {
        ratio,
        scale,
        start,
        ..
    } = tail;
    let slack = Rational::one() - max_alpha;
    let mut depth = 0usize;
    while scale * ratio.pow(*start as i64 + depth as i64) > slack {
        depth += 1;
    }
    spec.materialize(depth)
}

/// Structure of `(M₁, φ₁) ⋆ (M₂, φ₂) = M_d ⊕ M_c`.
pub fn free_product(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<FreeProductResult> {
    ensure_valid(spec1)?;
    ensure_valid(spec2)?;
    let m_c_type = classify_diffuse_type(spec1, spec2)?;
    let sd = sd_invariant(spec1, spec2)?;
    let t_set = t_set_of(&sd);
    let mut trace = Vec::new();

    let (s1, s2) = (scalar_weights(spec1), scalar_weights(spec2));
    let diffuse_full = has_full_weight_diffuse(spec1) || has_full_weight_diffuse(spec2);
    let atoms = if diffuse_full {
        trace.push("a full-weight diffuse summand forces M = M_c".to_string());
        Vec::new()
    } else {
        let max1 = s1.iter().max().cloned().unwrap_or_else(Rational::zero);
        let max2 = s2.iter().max().cloned().unwrap_or_else(Rational::zero);
        check_no_matrix_atoms(&s1, &blocks_for_atom_check(spec2, &max1)?)?;
        check_no_matrix_atoms(&s2, &blocks_for_atom_check(spec1, &max2)?)?;
        scalar_atom_rule(&s1, &s2)
    };

    let reduction = if atoms.is_empty() {
        None
    } else {
        let site = reduction_site(spec1, spec2)?;
        trace.push(format!(
            "1_{{M_d}} ≤ p: scalar summand #{} of input {} with φ(p) = {}",
            site.projection.summand,
            site.input + 1,
            site.weight
        ));
        let reduced = strip_reduction(spec1, spec2, site.input, &site.projection)?;
        trace.push(format!(
            "δ = φ(p^⊥)^{{-1}} = {}; M_c is stably isomorphic to {}",
            reduced.delta, reduced.expr
        ));
        Some(site)
    };

    let m_d: Vec<(StructureExpr, Rational)> = atoms
        .into_iter()
        .map(|a| (StructureExpr::Scalar, a))
        .collect();
    let m_c_unit_weight = Rational::one() - m_d.iter().map(|(_, w)| w).sum::<Rational>();
    Ok(FreeProductResult {
        m_d,
        m_c_type,
        m_c_unit_weight,
        sd,
        t_set,
        reduction,
        reduction_trace: trace,
        central_sequences_trivial: true,
    })
}

/// The scalar central summand shared by every atom-producing pair. A single
/// pair shares both of its summands; the heavier one wins, then input 1.
fn reduction_site(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<ReductionSite> {
    let one = Rational::one();
    let scalars = |spec: &AlgebraSpec| -> Vec<(usize, Rational)> {
        spec.summands
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_scalar())
            .map(|(i, s)| (i, s.weight.clone()))
            .collect()
    };
    let (a, b) = (scalars(spec1), scalars(spec2));
    let pairs: Vec<(usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(x, (_, wa))| {
            b.iter()
                .enumerate()
                .filter(|(_, (_, wb))| wa + wb > one)
                .map(move |(y, _)| (x, y))
                .collect::<Vec<_>>()
        })
        .collect();
    let (x0, y0) = pairs[0];
    let shares_a = pairs.iter().all(|&(x, _)| x == x0);
    let shares_b = pairs.iter().all(|&(_, y)| y == y0);
    let pick_a = match (shares_a, shares_b) {
        (true, true) => a[x0].1 >= b[y0].1,
        (true, false) => true,
        (false, true) => false,
        (false, false) => {
            return Err(Error::UnsupportedStructure(
                "atom-producing pairs share no scalar summand".into(),
            ))
        }
    };
    Ok(if pick_a {
        ReductionSite {
            input: 0,
            projection: ProjectionRef::whole(a[x0].0),
            weight: a[x0].1.clone(),
        }
    } else {
        ReductionSite {
            input: 1,
            projection: ProjectionRef::whole(b[y0].0),
            weight: b[y0].1.clone(),
        }
    })
}

/// The pair `(M_{i₀}p^⊥, δφ) ⋆ (p^⊥Np^⊥, δφ)` with
/// `N = (ℂp ⊕ ℂp^⊥) ⋆ M_{other}`, stably isomorphic to `M_c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedPair {
    pub input: usize,
    pub delta: Rational,
    /// `M_{i₀}p^⊥` with weights multiplied by `δ`.
    pub left: AlgebraSpec,
    /// The two factors of `N`: `ℂp ⊕ ℂp^⊥` and the other input.
    pub inner_pair: (AlgebraSpec, AlgebraSpec),
    pub expr: StructureExpr,
}

pub fn strip_reduction(
    spec1: &AlgebraSpec,
    spec2: &AlgebraSpec,
    input: usize,
    p: &ProjectionRef,
) -> Result<ReducedPair> {
    let (own, other) = if input == 0 {
        (spec1, spec2)
    } else {
        (spec2, spec1)
    };
    let s = own
        .summands
        .get(p.summand)
        .ok_or_else(|| Error::NotScalarSummand(format!("no summand #{}", p.summand)))?;
    let whole_block = match p.diagonal {
        None => true,
        Some((a, b)) => a == 0 && b == 1,
    };
    if !s.is_scalar() || !whole_block {
        return Err(Error::NotScalarSummand(format!(
            "summand #{} of {} is {}",
            p.summand,
            own.name,
            s.short_name()
        )));
    }
    if s.weight.is_one() {
        return Err(Error::NotScalarSummand("p is the unit".into()));
    }
    let one = Rational::one();
    let p_weight = s.weight.clone();
    let delta = (&one - &p_weight).recip();
    let summands = own
        .summands
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != p.summand)
        .map(|(_, t)| scale_summand(t, &delta))
        .collect();
    let tail = own.tail.as_ref().map(|t| match t {
        TailRule::GeometricQubits {
            ratio,
            scale,
            start,
            gamma_generators,
        } => TailRule::GeometricQubits {
            ratio: ratio.clone(),
            scale: scale * &delta,
            start: *start,
            gamma_generators: gamma_generators.clone(),
        },
    });
    let left = AlgebraSpec {
        name: format!("{}p^⊥", own.name),
        summands,
        tail,
    };
    let two_point = AlgebraSpec::scalars("ℂp⊕ℂp^⊥", &[p_weight.clone(), &one - &p_weight]);
    let n_label = if input == 0 {
        format!("(ℂp⊕ℂp^⊥) ⋆ {}", other.name)
    } else {
        format!("{} ⋆ (ℂp⊕ℂp^⊥)", other.name)
    };
    let left_expr = StructureExpr::Label {
        text: left.name.clone(),
    };
    let inner_expr = StructureExpr::Label {
        text: format!("p^⊥({n_label})p^⊥"),
    };
    let factors = if input == 0 {
        vec![left_expr, inner_expr]
    } else {
        vec![inner_expr, left_expr]
    };
    Ok(ReducedPair {
        input,
        delta,
        left,
        inner_pair: (two_point, other.clone()),
        expr: StructureExpr::FreeProduct { factors },
    })
}

fn scale_summand(s: &Summand, delta: &Rational) -> Summand {
    let kind = match &s.kind {
        SummandKind::MatrixBlock { size, eigenvalues } => SummandKind::MatrixBlock {
            size: *size,
            eigenvalues: eigenvalues.iter().map(|e| e * delta).collect(),
        },
        other => other.clone(),
    };
    Summand {
        kind,
        weight: &s.weight * delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate;
    use crate::exact::q;

    #[test]
    fn abelian_pair_has_atoms_and_is_ii1() {
        let a = AlgebraSpec::scalars("A", &[q(4, 5), q(1, 10), q(1, 10)]);
        let b = AlgebraSpec::scalars("B", &[q(7, 10), q(3, 10)]);
        let r = free_product(&a, &b).unwrap();
        let weights: Vec<Rational> = r.m_d.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(weights, vec![q(1, 2), q(1, 10)]);
        assert_eq!(r.m_c_type, FactorType::II1);
        assert_eq!(r.m_c_unit_weight, q(2, 5));
        let site = r.reduction.unwrap();
        assert_eq!(site.input, 0);
        assert_eq!(site.projection, ProjectionRef::whole(0));
    }

    #[test]
    fn diffuse_input_has_no_finite_part() {
        let a = AlgebraSpec::single("A", Summand::matrix(vec![q(2, 3), q(1, 3)]));
        let n = AlgebraSpec::single("N", Summand::abstract_ii1("N", q(1, 1)));
        let r = free_product(&a, &n).unwrap();
        assert!(r.m_d.is_empty());
        assert_eq!(r.m_c_type, FactorType::IIILambda { lambda: q(1, 2) });
        assert_eq!(r.m_c_unit_weight, q(1, 1));
        assert!(r.reduction.is_none());
    }

    #[test]
    fn tracial_matrices() {
        let m = AlgebraSpec::tracial_matrix("M2", 2);
        let r = free_product(&m, &m).unwrap();
        assert!(r.m_d.is_empty());
        assert_eq!(r.m_c_type, FactorType::II1);
    }

    #[test]
    fn dim_two_pair_rejected() {
        let c = AlgebraSpec::scalars("C", &[q(2, 3), q(1, 3)]);
        assert_eq!(free_product(&c, &c), Err(Error::Dim22Rejected));
    }

    #[test]
    fn strip_reduction_renormalizes() {
        let a = AlgebraSpec::new(
            "A",
            vec![
                Summand::scalar(q(9, 10)),
                Summand::matrix(vec![q(3, 40), q(1, 40)]),
            ],
        );
        let b = AlgebraSpec::tracial_matrix("B", 3);
        let r = strip_reduction(&a, &b, 0, &ProjectionRef::whole(0)).unwrap();
        assert_eq!(r.delta, q(10, 1));
        assert!(validate(&r.left).is_empty());
        assert_eq!(
            r.left.summands,
            vec![Summand::matrix(vec![q(3, 4), q(1, 4)])]
        );
        assert_eq!(sd_invariant(&r.left, &b), sd_invariant(&a, &b));
    }

    #[test]
    fn strip_reduction_errors() {
        let a = AlgebraSpec::new(
            "A",
            vec![
                Summand::scalar(q(9, 10)),
                Summand::tracial_matrix(2, q(1, 10)),
            ],
        );
        let b = AlgebraSpec::tracial_matrix("B", 3);
        assert!(matches!(
            strip_reduction(&a, &b, 0, &ProjectionRef::whole(1)),
            Err(Error::NotScalarSummand(_))
        ));
        assert!(matches!(
            strip_reduction(&b, &a, 0, &ProjectionRef::whole(0)),
            Err(Error::NotScalarSummand(_))
        ));
        let unit = AlgebraSpec::new("U", vec![Summand::scalar(q(1, 1))]);
        assert!(matches!(
            strip_reduction(&unit, &b, 0, &ProjectionRef::whole(0)),
            Err(Error::NotScalarSummand(_))
        ));
    }
}
