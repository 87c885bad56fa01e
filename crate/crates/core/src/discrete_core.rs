//! The discrete core `M ⋊ G` of a free product as an amalgamated free
//! product over `ℓ^∞(Γ)`: label traces, dual action, per-summand crossed
//! products and the projection transport for atomic inputs.

use serde::{Deserialize, Serialize};

use crate::algebra::{ensure_valid, AlgebraSpec, Summand, SummandKind};
use crate::amalg::centralizer::core_of_diffuse_part;
use crate::amalg::expr::StructureExpr;
use crate::error::{Error, Result};
use crate::exact::{Extended, GroupElement, MultGroup, Rational};
use crate::freeprod::free_product;
use crate::modular::sd_invariant;
use crate::par::{self, Execution};

/// `ℓ^∞(Γ)` truncated to the labels of height at most `height`, with
/// `Tr(e_γ) = γ⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreLabelAlgebra {
    pub group: MultGroup,
    pub height: u64,
    pub labels: Vec<LabelTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelTrace {
    pub label: GroupElement,
    pub value: Rational,
    pub trace: Rational,
}

impl CoreLabelAlgebra {
    pub fn new(group: MultGroup, height: u64) -> Self {
        Self::with_execution(group, height, Execution::default())
    }

    pub fn with_execution(group: MultGroup, height: u64, exec: Execution) -> Self {
        let elems = group.enumerate(height);
        let labels = par::map(exec, &elems, |g| {
            let value = g.value();
            LabelTrace {
                label: g.clone(),
                trace: value.recip(),
                value,
            }
        });
        CoreLabelAlgebra {
            group,
            height,
            labels,
        }
    }

    pub fn trace_of_e(&self, g: &GroupElement) -> Rational {
        g.value().recip()
    }

    /// `Σ_γ Tr(e_γ)` is infinite as soon as `Γ` is nontrivial.
    pub fn trace_sum_diverges(&self) -> bool {
        !self.group.is_trivial()
    }
}

/// Eigenvalue data of one block in the form `c·(γ_1 = 1 ≥ γ_2 ≥ …)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockData {
    pub c: Rational,
    pub gammas: Vec<Rational>,
}

impl BlockData {
    pub fn from_eigenvalues(eigenvalues: &[Rational]) -> Self {
        let mut sorted = eigenvalues.to_vec();
        sorted.sort_by(|a, b| b.cmp(a));
        let c = sorted[0].clone();
        let gammas = sorted.iter().map(|e| e / &c).collect();
        BlockData { c, gammas }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportTerm {
    /// 1-based block index.
    pub k: usize,
    /// 1-based position inside the block.
    pub j: usize,
    /// `γ_kj⁻¹ γ`
    pub label: GroupElement,
    /// `Tr₀(f_kj ⊗ δ_label) = c_k γ_kj / γ`
    pub tr0: Rational,
}

/// Constituents `f_kj ⊗ δ_{γ_kj⁻¹γ}` of the image `p_γ` of `e_γ`.
pub fn transport_atomic(
    blocks: &[BlockData],
    gamma: &GroupElement,
    group: &MultGroup,
) -> Result<Vec<TransportTerm>> {
    let gv = gamma.value();
    let mut out = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        for (j, g) in b.gammas.iter().enumerate() {
            let gkj = group.require(g)?;
            out.push(TransportTerm {
                k: k + 1,
                j: j + 1,
                label: gkj.inverse().mul(gamma),
                tr0: &b.c * g / &gv,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAmplification {
    pub label: GroupElement,
    pub amplification: Rational,
    pub coset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum CrossedShape {
    /// Hyperfinite and semifinite.
    HyperfiniteSemifinite,
    /// `X ⊗ ℓ^∞(Γ)` for a tracial `X`.
    TensorWithLabels { inner: StructureExpr },
    /// Direct sum over `Γ/Λ` of copies of `L(F_∞) ⊗ B(ℓ²)`; the labels list
    /// the amplification `γ⁻¹` of the corner under `e_γ` and its coset.
    AmplifiedFreeGroupSum {
        entries: Vec<LabelAmplification>,
        pieces: StructureExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedComponent {
    pub source: Summand,
    pub shape: CrossedShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<BlockData>,
}

impl CrossedComponent {
    pub fn expr(&self) -> StructureExpr {
        match &self.shape {
            CrossedShape::HyperfiniteSemifinite => StructureExpr::Hyperfinite { semifinite: true },
            CrossedShape::TensorWithLabels { inner } => StructureExpr::Label {
                text: format!("{} ⊗ ℓ^∞(Γ)", bracket(inner)),
            },
            CrossedShape::AmplifiedFreeGroupSum { pieces, .. } => pieces.clone(),
        }
    }
}

fn bracket(e: &StructureExpr) -> String {
    let s = e.to_string();
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

/// Term for a summand viewed as an algebra in its own right.
pub fn summand_expr(s: &Summand) -> StructureExpr {
    match &s.kind {
        SummandKind::MatrixBlock { size: 1, .. } => StructureExpr::Scalar,
        SummandKind::MatrixBlock { size, .. } => StructureExpr::Matrix { size: *size },
        SummandKind::HyperfiniteDiffuse { finite } => StructureExpr::Hyperfinite {
            semifinite: !finite,
        },
        SummandKind::FreeGroupFactor {
            param,
            amplification,
        } => {
            let base = StructureExpr::FreeGroup {
                param: param.clone(),
            };
            if amplification.is_one() {
                base
            } else {
                StructureExpr::amplify(Extended::Finite(amplification.clone()), base)
            }
        }
        SummandKind::AbstractII1 {
            label,
            amplification,
        } => StructureExpr::Abstract {
            label: label.clone(),
            amplification: Extended::Finite(amplification.clone()),
        },
        SummandKind::FullIIIWithCore { .. } => StructureExpr::Label {
            text: s.short_name(),
        },
    }
}

/// Coset indices in `Γ/Λ` for the given labels, numbered by first
/// occurrence.
fn coset_indices(labels: &[GroupElement], sub: &MultGroup) -> Vec<usize> {
    let mut reps: Vec<GroupElement> = Vec::new();
    labels
        .iter()
        .map(|g| {
            if let Some(i) = reps
                .iter()
                .position(|r| sub.contains_element(&g.mul(&r.inverse())))
            {
                i
            } else {
                reps.push(g.clone());
                reps.len() - 1
            }
        })
        .collect()
}

/// Crossed product of a full type III summand with core `L(F_∞) ⊗ B(ℓ²)`:
/// one copy of the core per coset of `Λ = Sd` in `Γ`.
pub fn fixed_point_corner(
    summand: &Summand,
    gamma: &MultGroup,
    height: u64,
) -> Result<CrossedShape> {
    let SummandKind::FullIIIWithCore { sd_subgroup } = &summand.kind else {
        return Err(Error::UnsupportedStructure(format!(
            "{} is not a full type III summand",
            summand.short_name()
        )));
    };
    if sd_subgroup.is_trivial() {
        return Err(Error::UnsupportedStructure(
            "full type III summand with trivial Sd".into(),
        ));
    }
    if !gamma.contains_group(sd_subgroup) {
        return Err(Error::SubgroupNotContained {
            sub: sd_subgroup.to_string(),
            gamma: gamma.to_string(),
        });
    }
    let labels = gamma.enumerate(height);
    let cosets = coset_indices(&labels, sd_subgroup);
    let n_cosets = cosets.iter().max().map_or(0, |m| m + 1);
    let entries = labels
        .iter()
        .zip(&cosets)
        .map(|(g, &c)| LabelAmplification {
            label: g.clone(),
            amplification: g.value().recip(),
            coset: c,
        })
        .collect();
    let piece = StructureExpr::amplify(Extended::Infinite, StructureExpr::free_group_inf());
    let pieces = if n_cosets == 1 {
        piece
    } else {
        StructureExpr::DirectSum {
            parts: (0..n_cosets)
                .map(|_| (Extended::Infinite, piece.clone()))
                .collect(),
        }
    };
    Ok(CrossedShape::AmplifiedFreeGroupSum { entries, pieces })
}

fn component(s: &Summand, gamma: &MultGroup, height: u64) -> Result<CrossedComponent> {
    let (shape, transport) = match &s.kind {
        SummandKind::MatrixBlock { eigenvalues, .. } => (
            CrossedShape::HyperfiniteSemifinite,
            Some(BlockData::from_eigenvalues(eigenvalues)),
        ),
        SummandKind::HyperfiniteDiffuse { .. } => (CrossedShape::HyperfiniteSemifinite, None),
        SummandKind::FreeGroupFactor { .. } | SummandKind::AbstractII1 { .. } => (
            CrossedShape::TensorWithLabels {
                inner: summand_expr(s),
            },
            None,
        ),
        SummandKind::FullIIIWithCore { .. } => (fixed_point_corner(s, gamma, height)?, None),
    };
    Ok(CrossedComponent {
        source: s.clone(),
        shape,
        transport,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralParts {
    /// Each summand of `M_d` appears as `M_d ⊗ ℓ^∞(Γ)`.
    pub md_copies: Vec<(StructureExpr, Rational)>,
    pub core_of_mc: StructureExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreDecomposition {
    pub labels: CoreLabelAlgebra,
    pub components: (Vec<CrossedComponent>, Vec<CrossedComponent>),
    pub expression: StructureExpr,
    pub central_parts: CentralParts,
    pub trace_sum_diverges: bool,
    /// Infinite direct sums are cut after this many tail blocks.
    pub tail_depth: usize,
}

pub fn build_core(
    spec1: &AlgebraSpec,
    spec2: &AlgebraSpec,
    height: u64,
) -> Result<CoreDecomposition> {
    build_core_with(spec1, spec2, height, Execution::default())
}

pub fn build_core_with(
    spec1: &AlgebraSpec,
    spec2: &AlgebraSpec,
    height: u64,
    exec: Execution,
) -> Result<CoreDecomposition> {
    ensure_valid(spec1)?;
    ensure_valid(spec2)?;
    let gamma = sd_invariant(spec1, spec2)?;
    if gamma.is_trivial() {
        return Err(Error::TrivialGamma);
    }
    let fp = free_product(spec1, spec2)?;
    let tail_depth = height as usize;
    let comps = |spec: &AlgebraSpec| -> Result<Vec<CrossedComponent>> {
        spec.materialize(tail_depth)?
            .iter()
            .map(|s| component(s, &gamma, height))
            .collect()
    };
    let c1 = comps(spec1)?;
    let c2 = comps(spec2)?;
    let factor = |cs: &[CrossedComponent], spec: &AlgebraSpec| -> StructureExpr {
        if cs.len() == 1 && spec.tail.is_none() {
            cs[0].expr()
        } else {
            let mut parts: Vec<(Extended, StructureExpr)> =
                cs.iter().map(|c| (Extended::Infinite, c.expr())).collect();
            if spec.tail.is_some() {
                parts.push((
                    Extended::Infinite,
                    StructureExpr::Label { text: "…".into() },
                ));
            }
            StructureExpr::DirectSum { parts }
        }
    };
    let expression = StructureExpr::AmalgamatedFreeProduct {
        base: gamma.clone(),
        factors: vec![factor(&c1, spec1), factor(&c2, spec2)],
    };
    let md_copies = fp
        .m_d
        .iter()
        .map(|(x, w)| {
            (
                StructureExpr::Label {
                    text: format!("{x} ⊗ ℓ^∞(Γ)"),
                },
                w.clone(),
            )
        })
        .collect();
    let labels = CoreLabelAlgebra::with_execution(gamma, height, exec);
    Ok(CoreDecomposition {
        trace_sum_diverges: labels.trace_sum_diverges(),
        labels,
        components: (c1, c2),
        expression,
        central_parts: CentralParts {
            md_copies,
            core_of_mc: core_of_diffuse_part(spec1, spec2)?,
        },
        tail_depth,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualAction {
    pub by: GroupElement,
    pub map: Vec<(GroupElement, GroupElement)>,
    pub trace_scaling: Rational,
}

/// `θ_γ(e_γ') = e_{γγ'}` on the enumerated labels; `Tr ∘ θ_γ = γ⁻¹ Tr`.
pub fn dual_action(labels: &CoreLabelAlgebra, gamma: &GroupElement) -> Result<DualAction> {
    if !labels.group.contains_element(gamma) {
        return Err(Error::RatioOutsideGroup(format!(
            "{gamma} ∉ {}",
            labels.group
        )));
    }
    Ok(DualAction {
        by: gamma.clone(),
        map: labels
            .labels
            .iter()
            .map(|l| (l.label.clone(), gamma.mul(&l.label)))
            .collect(),
        trace_scaling: gamma.value().recip(),
    })
}
