//! Centralizer of the free product state on the diffuse factor summand,
//! recognised from the summand kinds of the two inputs, with the structural
//! flags that come with it.

use serde::{Deserialize, Serialize};

use crate::algebra::{is_tracial, AlgebraSpec, Summand, SummandKind};
use crate::discrete_core::{summand_expr, BlockData};
use crate::error::{Error, Result};
use crate::exact::{Extended, GroupElement, MultGroup, Rational};
use crate::fdim::finite_free_product;
use crate::freeprod::free_product;
use crate::modular::FactorType;

use super::canonical::{dichotomy_promote, to_canonical};
use super::expr::StructureExpr;
use super::partition::WordMetric;
use super::sequence::{choose_increasing_sequence, PowerOrder};

/// Number of terms of the increasing exponent sequence reported.
pub const SEQUENCE_TERMS: usize = 8;
/// Powers of `γ*` whose layer is computed for the sequence scan.
pub const SEQUENCE_POWERS: usize = 40;
/// Word-length search depth for labels of the truncated index set.
const LAYER_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Every summand hyperfinite, an amplified free group factor or a full
    /// type III factor with free-group core; some state non-tracial.
    TameSummands,
    /// Full type III factor with extremal state ⋆ tracial diffuse
    /// hyperfinite or II₁ factor.
    FullIiiVsTracial,
    /// Atomic type I with non-tracial state ⋆ tracial II₁ factor.
    AtomicVsIi1Factor,
    /// Both states tracial, free-dimension balance.
    TracialFinite,
}

impl Branch {
    pub fn anchor(&self) -> &'static str {
        match self {
            Branch::TameSummands => "tame-summands-centralizer",
            Branch::FullIiiVsTracial => "full-iii-extremal-vs-tracial",
            Branch::AtomicVsIi1Factor => "atomic-nontracial-vs-ii1-factor",
            Branch::TracialFinite => "tracial-free-dimension-balance",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub holds: bool,
    pub anchor: String,
}

fn flag(name: &str, holds: bool, anchor: &str) -> Flag {
    Flag {
        name: name.into(),
        holds,
        anchor: anchor.into(),
    }
}

/// `(γ, X^γ)` for one enumerated label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub label: GroupElement,
    pub amplification: Rational,
    pub expr: StructureExpr,
}

/// Chosen `γ(i)` for the index `i = γ*^{m_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaPick {
    pub m: usize,
    pub index: GroupElement,
    pub gamma: Rational,
}

/// Layering of `Γ` by overlap of the transported projections `p_γ`, the
/// increasing exponent sequence and the resulting choices of `γ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicLayering {
    pub gamma_star: GroupElement,
    /// 1-based block carrying `γ*`.
    pub block: usize,
    pub c: Rational,
    pub layers: Vec<(GroupElement, usize)>,
    /// Truncated labels whose layer was not found within the search depth.
    pub unplaced: Vec<GroupElement>,
    pub power_layers: Vec<usize>,
    pub sequence: Vec<usize>,
    pub picks: Vec<GammaPick>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerReport {
    pub branch: Branch,
    pub gamma: MultGroup,
    pub m_c_type: FactorType,
    pub raw: StructureExpr,
    pub canonical: StructureExpr,
    /// Discrete core of the diffuse summand, up to stable isomorphism.
    pub core: StructureExpr,
    pub flags: Vec<Flag>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expansion: Vec<ExpansionTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layering: Option<AtomicLayering>,
}

impl CentralizerReport {
    pub fn anchor(&self) -> &'static str {
        self.branch.anchor()
    }

    /// Plain-words class of the core.
    pub fn core_class(&self) -> String {
        match &self.core {
            StructureExpr::Amplify { inner, .. } if inner.is_free_group_inf() => {
                "amplification of L(F_∞)".into()
            }
            StructureExpr::FreeGroup { param } => format!("L(F_{param})"),
            other => format!("amplification of {other}"),
        }
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|f| f.name == name).map(|f| f.holds)
    }
}

fn in_tame_class(s: &Summand) -> bool {
    matches!(
        s.kind,
        SummandKind::MatrixBlock { .. }
            | SummandKind::HyperfiniteDiffuse { .. }
            | SummandKind::FreeGroupFactor { .. }
            | SummandKind::FullIIIWithCore { .. }
    )
}

fn all_tame(spec: &AlgebraSpec) -> bool {
    spec.summands.iter().all(in_tame_class)
}

fn sole_full_iii(spec: &AlgebraSpec) -> Option<&MultGroup> {
    match spec.sole_summand().map(|s| &s.kind) {
        Some(SummandKind::FullIIIWithCore { sd_subgroup }) => Some(sd_subgroup),
        _ => None,
    }
}

/// Tracial diffuse hyperfinite or II₁ factor of full weight.
fn sole_tracial_diffuse(spec: &AlgebraSpec) -> Option<&Summand> {
    spec.sole_summand().filter(|s| {
        matches!(s.kind, SummandKind::HyperfiniteDiffuse { finite: true }) || s.is_ii1_factor()
    })
}

fn sole_ii1_factor(spec: &AlgebraSpec) -> Option<&Summand> {
    spec.sole_summand().filter(|s| s.is_ii1_factor())
}

fn atomic_nontracial(spec: &AlgebraSpec) -> bool {
    spec.is_atomic() && !is_tracial(spec)
}

fn expansion(gamma: &MultGroup, inner: &StructureExpr, height: u64) -> Result<Vec<ExpansionTerm>> {
    gamma
        .enumerate(height)
        .into_iter()
        .map(|g| {
            let amplification = g.value();
            let expr = to_canonical(&StructureExpr::amplify(
                Extended::Finite(amplification.clone()),
                inner.clone(),
            ))?;
            Ok(ExpansionTerm {
                label: g,
                amplification,
                expr,
            })
        })
        .collect()
}

/// `p_γ` and `p_γ'` overlap iff `γ'γ⁻¹` is a ratio `γ_kj'/γ_kj` inside one
/// block. With a tail every element of `Γ ∩ (0,1)` is such a ratio, so all
/// labels but the identity sit in layer 1.
fn atomic_layering(spec: &AlgebraSpec, gamma: &MultGroup, height: u64) -> Result<AtomicLayering> {
    let blocks: Vec<BlockData> = spec
        .materialize(height.max(1) as usize)?
        .iter()
        .filter_map(|s| match &s.kind {
            SummandKind::MatrixBlock { eigenvalues, .. } => {
                Some(BlockData::from_eigenvalues(eigenvalues))
            }
            _ => None,
        })
        .collect();
    let one = Rational::one();
    let (block, j0) = blocks
        .iter()
        .enumerate()
        .find_map(|(k, b)| b.gammas.iter().position(|g| g < &one).map(|j| (k, j)))
        .ok_or_else(|| {
            Error::HypothesesNotRecognized("no block with a nontrivial eigenvalue ratio".into())
        })?;
    let c = blocks[block].c.clone();
    let gamma_star = gamma.require(&blocks[block].gammas[j0])?;

    let mut steps = Vec::new();
    for b in &blocks {
        for x in &b.gammas {
            for y in &b.gammas {
                if x != y {
                    steps.push(gamma.require(&(x / y))?);
                }
            }
        }
    }
    let mut metric = WordMetric::new(steps);
    let with_tail = spec.tail.is_some();
    let mut layer_of = |g: &GroupElement, depth: usize| -> Option<usize> {
        if with_tail {
            Some(usize::from(!g.is_identity()))
        } else {
            metric.layer(g, depth)
        }
    };

    let mut layers = Vec::new();
    let mut unplaced = Vec::new();
    for g in gamma.enumerate(height) {
        match layer_of(&g, LAYER_DEPTH) {
            Some(l) => layers.push((g, l)),
            None => unplaced.push(g),
        }
    }
    let mut power_layers = Vec::new();
    for m in 0..=SEQUENCE_POWERS {
        match layer_of(&gamma_star.pow(m as i64), m) {
            Some(l) => power_layers.push(l),
            None => break,
        }
    }
    let sequence =
        choose_increasing_sequence(&PowerOrder::from_layers(&power_layers), SEQUENCE_TERMS);
    let picks = sequence
        .iter()
        .map(|&m| GammaPick {
            m,
            index: gamma_star.pow(m as i64),
            gamma: &c / gamma_star.pow(m as i64 - 1).value(),
        })
        .collect();
    Ok(AtomicLayering {
        gamma_star,
        block: block + 1,
        c,
        layers,
        unplaced,
        power_layers,
        sequence,
        picks,
    })
}

fn flags(gamma: &MultGroup, m_c_type: &FactorType, central_sequences_trivial: bool) -> Vec<Flag> {
    let nontracial = !gamma.is_trivial();
    vec![
        flag("cartan_free", nontracial, "no-cartan-subalgebra"),
        flag("prime", nontracial, "primeness"),
        flag(
            "continuous_core_prime",
            *m_c_type == FactorType::III1,
            "continuous-core-primeness",
        ),
        flag(
            "central_sequences_trivial",
            central_sequences_trivial,
            "trivial-central-sequences",
        ),
    ]
}

/// Centralizer `(M_c)_{φ_c}` of the diffuse factor summand, raw and in
/// canonical form. `height` truncates `Γ`-indexed expansions.
pub fn centralizer_structure(
    spec1: &AlgebraSpec,
    spec2: &AlgebraSpec,
    height: u64,
) -> Result<CentralizerReport> {
    let fp = free_product(spec1, spec2)?;
    let gamma = fp.sd.clone();
    let mut expansion_terms = Vec::new();
    let mut layering = None;

    let (branch, raw) = if gamma.is_trivial() {
        let ffp = finite_free_product(spec1, spec2).map_err(|e| match e {
            Error::UnsupportedStructure(msg) => Error::HypothesesNotRecognized(format!(
                "both states are tracial but the free-dimension calculus does not apply: {msg}"
            )),
            other => other,
        })?;
        (
            Branch::TracialFinite,
            StructureExpr::FreeGroup { param: ffp.param },
        )
    } else if let Some((iii, other, first)) = [(spec1, spec2, true), (spec2, spec1, false)]
        .into_iter()
        .find_map(|(a, b, first)| {
            let sd = sole_full_iii(a)?;
            sole_tracial_diffuse(b).map(|s| ((a, sd), s, first))
        })
    {
        let ((spec_iii, sd), other) = (iii, other);
        let centralizer = StructureExpr::FullIIICentralizer {
            label: spec_iii.name.clone(),
            sd: sd.clone(),
        };
        let partner = if other.is_ii1_factor() {
            let inner = summand_expr(other);
            expansion_terms = expansion(&gamma, &inner, height)?;
            StructureExpr::GammaFreeProduct {
                group: gamma.clone(),
                inner: Box::new(inner),
            }
        } else {
            StructureExpr::free_group_inf()
        };
        let factors = if first {
            vec![centralizer, partner]
        } else {
            vec![partner, centralizer]
        };
        (
            Branch::FullIiiVsTracial,
            StructureExpr::FreeProduct { factors },
        )
    } else if let Some((atomic, n)) =
        [(spec1, spec2), (spec2, spec1)]
            .into_iter()
            .find_map(|(a, b)| {
                atomic_nontracial(a)
                    .then_some(())
                    .and(sole_ii1_factor(b).map(|n| (a, n)))
            })
    {
        let inner = summand_expr(n);
        expansion_terms = expansion(&gamma, &inner, height)?;
        layering = Some(atomic_layering(atomic, &gamma, height)?);
        (
            Branch::AtomicVsIi1Factor,
            StructureExpr::GammaFreeProduct {
                group: gamma.clone(),
                inner: Box::new(inner),
            },
        )
    } else if all_tame(spec1) && all_tame(spec2) {
        (
            Branch::TameSummands,
            dichotomy_promote(&StructureExpr::free_group_inf(), &gamma),
        )
    } else {
        return Err(Error::HypothesesNotRecognized(format!(
            "{} ⋆ {}: an opaque II₁ summand outside the atomic or full type III settings",
            spec1.name, spec2.name
        )));
    };

    let canonical = to_canonical(&raw)?;
    let core = if gamma.is_trivial() {
        canonical.clone()
    } else {
        to_canonical(&StructureExpr::amplify(
            Extended::Infinite,
            canonical.clone(),
        ))?
    };
    Ok(CentralizerReport {
        branch,
        flags: flags(&gamma, &fp.m_c_type, fp.central_sequences_trivial),
        gamma,
        m_c_type: fp.m_c_type,
        raw,
        canonical,
        core,
        expansion: expansion_terms,
        layering,
    })
}

/// Discrete core of `M_c` up to stable isomorphism: the centralizer is the
/// corner under `e_1`, so the core is its infinite amplification. Symbolic
/// when no structure result applies.
pub fn core_of_diffuse_part(spec1: &AlgebraSpec, spec2: &AlgebraSpec) -> Result<StructureExpr> {
    match centralizer_structure(spec1, spec2, 0) {
        Ok(rep) => Ok(rep.core),
        Err(Error::HypothesesNotRecognized(_)) => Ok(StructureExpr::Label {
            text: "(M_c)_φ ⊗ B(ℓ²)".into(),
        }),
        Err(e) => Err(e),
    }
}
