//! Modular spectral data: point spectrum ratios, the Sd-invariant, the T-set
//! and the type of the diffuse part of a free product.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Summand, SummandKind};
use crate::error::{Error, Result};
use crate::exact::{MultGroup, Rational};

/// `{t ∈ ℝ : σ_t = id}`, reported symbolically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TSet {
    FullLine,
    /// `(2π/|ln λ|)·ℤ`
    Cyclic {
        lambda: Rational,
    },
    Trivial,
}

impl fmt::Display for TSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TSet::FullLine => write!(f, "ℝ"),
            TSet::Cyclic { lambda } => write!(f, "(2π/|ln {lambda}|)·ℤ"),
            TSet::Trivial => write!(f, "{{0}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FactorType {
    #[serde(rename = "II_1")]
    II1,
    #[serde(rename = "III_lambda")]
    IIILambda { lambda: Rational },
    #[serde(rename = "III_1")]
    III1,
}

impl fmt::Display for FactorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorType::II1 => write!(f, "II₁"),
            FactorType::IIILambda { lambda } => write!(f, "III_λ (λ = {lambda})"),
            FactorType::III1 => write!(f, "III₁"),
        }
    }
}

fn summand_ratios(s: &Summand, out: &mut BTreeSet<Rational>) {
    match &s.kind {
        SummandKind::MatrixBlock { eigenvalues, .. } => {
            for a in eigenvalues {
                for b in eigenvalues {
                    out.insert(a / b);
                }
            }
        }
        SummandKind::FullIIIWithCore { sd_subgroup } => {
            for g in sd_subgroup.generator_values() {
                out.insert(g.recip());
                out.insert(g);
            }
        }
        _ => {}
    }
}

/// Eigenvalue ratios within each block (plus `1`), using the prefix and the
/// first `depth` tail blocks.
pub fn point_spectrum_ratios(spec: &AlgebraSpec, depth: usize) -> Result<BTreeSet<Rational>> {
    let mut out = BTreeSet::from([Rational::one()]);
    for s in spec.materialize(depth)? {
        summand_ratios(&s, &mut out);
    }
    Ok(out)
}

/// Ratios that generate the same group as the full (possibly infinite) point
/// spectrum. A tail contributes its generators exactly.
fn generating_ratios(spec: &AlgebraSpec) -> Result<BTreeSet<Rational>> {
    let mut out = point_spectrum_ratios(spec, 0)?;
    if let Some(tail) = &spec.tail {
        out.extend(tail.gamma_group()?.generator_values());
    }
    Ok(out)
}

pub fn spectrum_group(spec: &AlgebraSpec) -> Result<MultGroup> {
    MultGroup::from_ratios(&generating_ratios(spec)?)
}

/// The group generated by both point spectra.
pub fn sd_invariant(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<MultGroup> {
    let mut all = generating_ratios(spec1)?;
    all.extend(generating_ratios(spec2)?);
    MultGroup::from_ratios(&all)
}

pub fn t_set_of(gamma: &MultGroup) -> TSet {
    if gamma.is_trivial() {
        TSet::FullLine
    } else if let Some(lambda) = gamma.cyclic_generator() {
        TSet::Cyclic { lambda }
    } else {
        TSet::Trivial
    }
}

pub fn t_set(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<TSet> {
    Ok(t_set_of(&sd_invariant(spec1, spec2)?))
}

pub fn factor_type_of(gamma: &MultGroup) -> FactorType {
    if gamma.is_trivial() {
        FactorType::II1
    } else if let Some(lambda) = gamma.cyclic_generator() {
        FactorType::IIILambda { lambda }
    } else {
        FactorType::III1
    }
}

/// Type of the diffuse summand of the free product. Both states tracial
/// is exactly the trivial-Γ case.
pub fn classify_diffuse_type(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<FactorType> {
    if spec1.dimension() == Some(2) && spec2.dimension() == Some(2) {
        return Err(Error::Dim22Rejected);
    }
    Ok(factor_type_of(&sd_invariant(spec1, spec2)?))
}
