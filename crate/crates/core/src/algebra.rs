//! Descriptions of algebras equipped with a faithful normal almost periodic
//! state: countable direct sums of matrix blocks, diffuse hyperfinite pieces,
//! interpolated free group factors, opaque II₁ factors and full type III
//! factors with a prescribed Sd-invariant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Extended, GroupElement, MultGroup, Rational};

/// One central summand together with the state mass of its unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    #[serde(flatten)]
    pub kind: SummandKind,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SummandKind {
    /// `M_n(ℂ)` whose density operator has the given eigenvalues. The
    /// eigenvalues are absolute state masses and sum to the summand weight.
    #[serde(rename = "matrix")]
    MatrixBlock {
        size: usize,
        eigenvalues: Vec<Rational>,
    },
    /// A diffuse hyperfinite algebra carrying a trace.
    #[serde(rename = "hyperfinite")]
    HyperfiniteDiffuse {
        #[serde(default = "default_true")]
        finite: bool,
    },
    /// The amplification `L(F_r)^t`.
    #[serde(rename = "free_group")]
    FreeGroupFactor {
        param: Extended,
        #[serde(default = "Rational::one")]
        amplification: Rational,
    },
    /// An opaque II₁ factor `label^t`, kept symbolic.
    #[serde(rename = "abstract_ii1")]
    AbstractII1 {
        label: String,
        #[serde(default = "Rational::one")]
        amplification: Rational,
    },
    /// A full type III factor admitting a discrete decomposition with core
    /// `L(F_∞) ⊗ B(ℓ²)`; only its Sd-invariant is recorded.
    #[serde(rename = "full_iii")]
    FullIIIWithCore {
        #[serde(rename = "sd_generators", with = "group_as_generators")]
        sd_subgroup: MultGroup,
    },
}

fn default_true() -> bool {
    true
}

mod group_as_generators {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exact::{MultGroup, Rational};

    pub fn serialize<S: Serializer>(g: &MultGroup, s: S) -> Result<S::Ok, S::Error> {
        g.generator_values().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<MultGroup, D::Error> {
        let gens = Vec::<Rational>::deserialize(d)?;
        MultGroup::from_ratios(&gens).map_err(serde::de::Error::custom)
    }
}

impl Summand {
    pub fn scalar(weight: Rational) -> Self {
        Summand {
            kind: SummandKind::MatrixBlock {
                size: 1,
                eigenvalues: vec![weight.clone()],
            },
            weight,
        }
    }

    pub fn matrix(eigenvalues: Vec<Rational>) -> Self {
        let weight = eigenvalues.iter().sum();
        Summand {
            kind: SummandKind::MatrixBlock {
                size: eigenvalues.len(),
                eigenvalues,
            },
            weight,
        }
    }

    /// `M_n` with the trace state scaled to `weight`.
    pub fn tracial_matrix(size: usize, weight: Rational) -> Self {
        let each = &weight / Rational::from_integer(size as i64);
        Summand {
            kind: SummandKind::MatrixBlock {
                size,
                eigenvalues: vec![each; size],
            },
            weight,
        }
    }

    pub fn hyperfinite(weight: Rational) -> Self {
        Summand {
            kind: SummandKind::HyperfiniteDiffuse { finite: true },
            weight,
        }
    }

    pub fn free_group(param: Extended, weight: Rational) -> Self {
        Summand {
            kind: SummandKind::FreeGroupFactor {
                param,
                amplification: Rational::one(),
            },
            weight,
        }
    }

    pub fn abstract_ii1(label: &str, weight: Rational) -> Self {
        Summand {
            kind: SummandKind::AbstractII1 {
                label: label.to_string(),
                amplification: Rational::one(),
            },
            weight,
        }
    }

    pub fn full_iii(sd_subgroup: MultGroup, weight: Rational) -> Self {
        Summand {
            kind: SummandKind::FullIIIWithCore { sd_subgroup },
            weight,
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.kind, SummandKind::MatrixBlock { size: 1, .. })
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.kind, SummandKind::MatrixBlock { .. })
    }

    /// Everything except matrix blocks is diffuse.
    pub fn is_diffuse(&self) -> bool {
        !self.is_matrix()
    }

    pub fn is_tracial(&self) -> bool {
        match &self.kind {
            SummandKind::MatrixBlock { eigenvalues, .. } => {
                eigenvalues.windows(2).all(|w| w[0] == w[1])
            }
            SummandKind::FullIIIWithCore { .. } => false,
            _ => true,
        }
    }

    /// Whether the summand is a factor of type II₁ (with its trace).
    pub fn is_ii1_factor(&self) -> bool {
        match &self.kind {
            SummandKind::AbstractII1 { .. } => true,
            SummandKind::FreeGroupFactor { param, .. } => !param.is_infinite(),
            _ => false,
        }
    }

    pub fn short_name(&self) -> String {
        match &self.kind {
            SummandKind::MatrixBlock { size: 1, .. } => "ℂ".into(),
            SummandKind::MatrixBlock { size, .. } => format!("M_{size}"),
            SummandKind::HyperfiniteDiffuse { finite: true } => "R".into(),
            SummandKind::HyperfiniteDiffuse { finite: false } => "R_∞".into(),
            SummandKind::FreeGroupFactor {
                param,
                amplification,
            } if amplification.is_one() => {
                format!("L(F_{param})")
            }
            SummandKind::FreeGroupFactor {
                param,
                amplification,
            } => {
                format!("L(F_{param})^{amplification}")
            }
            SummandKind::AbstractII1 {
                label,
                amplification,
            } if amplification.is_one() => label.clone(),
            SummandKind::AbstractII1 {
                label,
                amplification,
            } => format!("{label}^{amplification}"),
            SummandKind::FullIIIWithCore { sd_subgroup } => format!("III[Sd={sd_subgroup}]"),
        }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{}}}", self.short_name(), self.weight)
    }
}

/// A parametric infinite family of summands appended after the finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TailRule {
    /// Block `k` (for `k = start, start+1, …`) is `M₂` with weight
    /// `scale·ratio^k` and eigenvalues `weight·(1, γ_k)/(1+γ_k)`, where
    /// `γ_1, γ_2, …` enumerates `Γ ∩ (0,1)` for `Γ` generated by
    /// `gamma_generators`.
    #[serde(rename = "geometric_qubits")]
    GeometricQubits {
        ratio: Rational,
        #[serde(default = "Rational::one")]
        scale: Rational,
        #[serde(default = "default_start")]
        start: u32,
        gamma_generators: Vec<Rational>,
    },
}

fn default_start() -> u32 {
    1
}

impl TailRule {
    /// Exact total state mass of the whole (infinite) tail.
    pub fn total_weight(&self) -> Rational {
        match self {
            TailRule::GeometricQubits {
                ratio,
                scale,
                start,
                ..
            } => scale * ratio.pow(*start as i64) / (Rational::one() - ratio),
        }
    }

    pub fn gamma_group(&self) -> Result<MultGroup> {
        match self {
            TailRule::GeometricQubits {
                gamma_generators, ..
            } => MultGroup::from_ratios(gamma_generators),
        }
    }

    /// The first `count` blocks of the tail.
    pub fn blocks(&self, count: usize) -> Result<Vec<Summand>> {
        match self {
            TailRule::GeometricQubits {
                ratio,
                scale,
                start,
                ..
            } => {
                let gammas = gamma_sequence(&self.gamma_group()?, count)?;
                Ok(gammas
                    .into_iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let k = *start as i64 + i as i64;
                        let w = scale * ratio.pow(k);
                        let base = &w / (Rational::one() + &g);
                        Summand {
                            kind: SummandKind::MatrixBlock {
                                size: 2,
                                eigenvalues: vec![base.clone(), base * g],
                            },
                            weight: w,
                        }
                    })
                    .collect())
            }
        }
    }
}

/// The first `count` elements of `Γ ∩ (0,1)` in enumeration order.
pub fn gamma_sequence(group: &MultGroup, count: usize) -> Result<Vec<Rational>> {
    if group.is_trivial() {
        return Err(Error::UnsupportedStructure(
            "Γ ∩ (0,1) is empty for the trivial group".into(),
        ));
    }
    let one = Rational::one();
    let mut h = 1;
    loop {
        let below: Vec<Rational> = group
            .enumerate(h)
            .iter()
            .map(GroupElement::value)
            .filter(|v| v < &one)
            .collect();
        if below.len() >= count {
            return Ok(below.into_iter().take(count).collect());
        }
        h += 1;
    }
}

/// A countable direct sum of [`Summand`]s: a finite prefix plus an optional
/// infinite tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub name: String,
    #[serde(default)]
    pub summands: Vec<Summand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailRule>,
}

/// Reference to a projection in the centre (or a diagonal piece of a block).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionRef {
    pub summand: usize,
    /// Half-open range of diagonal positions inside a matrix block; `None`
    /// means the whole summand unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<(usize, usize)>,
}

impl ProjectionRef {
    pub fn whole(summand: usize) -> Self {
        ProjectionRef {
            summand,
            diagonal: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Empty,
    TrivialAlgebra,
    WeightRange,
    TotalWeight,
    BlockSize,
    EigenvalueCount,
    EigenvaluePositive,
    EigenvalueSum,
    FreeGroupParam,
    Amplification,
    TrivialSd,
    Tail,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::Empty => "empty",
            Rule::TrivialAlgebra => "non-trivial",
            Rule::WeightRange => "weight-range",
            Rule::TotalWeight => "weight-total",
            Rule::BlockSize => "block-size",
            Rule::EigenvalueCount => "eigenvalue-count",
            Rule::EigenvaluePositive => "eigenvalue-positive",
            Rule::EigenvalueSum => "weight-sum",
            Rule::FreeGroupParam => "free-group-param",
            Rule::Amplification => "amplification",
            Rule::TrivialSd => "sd-nontrivial",
            Rule::Tail => "tail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub summand: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.summand {
            Some(i) => write!(f, "summand #{i}: {}: {}", self.rule.as_str(), self.detail),
            None => write!(f, "{}: {}", self.rule.as_str(), self.detail),
        }
    }
}

impl AlgebraSpec {
    pub fn new(name: &str, summands: Vec<Summand>) -> Self {
        AlgebraSpec {
            name: name.to_string(),
            summands,
            tail: None,
        }
    }

    pub fn with_tail(mut self, tail: TailRule) -> Self {
        self.tail = Some(tail);
        self
    }

    /// `ℂ^k` with the given atom weights.
    pub fn scalars(name: &str, weights: &[Rational]) -> Self {
        Self::new(name, weights.iter().cloned().map(Summand::scalar).collect())
    }

    /// `M_n` with the trace.
    pub fn tracial_matrix(name: &str, size: usize) -> Self {
        Self::new(name, vec![Summand::tracial_matrix(size, Rational::one())])
    }

    pub fn single(name: &str, summand: Summand) -> Self {
        Self::new(name, vec![summand])
    }

    /// Finite prefix plus the first `depth` tail blocks.
    pub fn materialize(&self, depth: usize) -> Result<Vec<Summand>> {
        let mut out = self.summands.clone();
        if let Some(tail) = &self.tail {
            out.extend(tail.blocks(depth)?);
        }
        Ok(out)
    }

    /// Linear dimension, `None` when infinite.
    pub fn dimension(&self) -> Option<u64> {
        if self.tail.is_some() {
            return None;
        }
        self.summands.iter().try_fold(0u64, |acc, s| match &s.kind {
            SummandKind::MatrixBlock { size, .. } => Some(acc + (*size as u64).pow(2)),
            _ => None,
        })
    }

    pub fn total_weight(&self) -> Rational {
        let prefix: Rational = self.summands.iter().map(|s| &s.weight).sum();
        match &self.tail {
            Some(t) => prefix + t.total_weight(),
            None => prefix,
        }
    }

    /// Atomic type I: a direct sum of matrix algebras.
    pub fn is_atomic(&self) -> bool {
        self.summands.iter().all(Summand::is_matrix)
    }

    pub fn has_full_weight_diffuse(&self) -> bool {
        self.tail.is_none()
            && self.summands.len() == 1
            && self.summands[0].is_diffuse()
            && self.summands[0].weight.is_one()
    }

    /// The single summand when the algebra is one summand of full weight.
    pub fn sole_summand(&self) -> Option<&Summand> {
        (self.tail.is_none() && self.summands.len() == 1).then(|| &self.summands[0])
    }

    pub fn mass(&self, p: &ProjectionRef) -> Result<Rational> {
        let s = self.summands.get(p.summand).ok_or_else(|| {
            Error::UnsupportedStructure(format!("no summand #{} in {}", p.summand, self.name))
        })?;
        match (&p.diagonal, &s.kind) {
            (None, _) => Ok(s.weight.clone()),
            (Some((a, b)), SummandKind::MatrixBlock { eigenvalues, .. })
                if a < b && *b <= eigenvalues.len() =>
            {
                Ok(eigenvalues[*a..*b].iter().sum())
            }
            _ => Err(Error::UnsupportedStructure(format!(
                "projection {p:?} does not fit summand #{}",
                p.summand
            ))),
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.summands.iter().map(|s| s.to_string()).collect();
        if let Some(TailRule::GeometricQubits { ratio, .. }) = &self.tail {
            parts.push(format!("⊕_k M_2 (weights ∝ {ratio}^k)"));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Every broken invariant of `spec`; empty iff the description is valid.
pub fn validate(spec: &AlgebraSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |summand: Option<usize>, rule: Rule, detail: String| {
        out.push(Violation {
            summand,
            rule,
            detail,
        })
    };
    if spec.summands.is_empty() && spec.tail.is_none() {
        push(None, Rule::Empty, "no summands".into());
        return out;
    }
    let one = Rational::one();
    for (i, s) in spec.summands.iter().enumerate() {
        let at = Some(i);
        if !s.weight.is_positive() || s.weight > one {
            push(
                at,
                Rule::WeightRange,
                format!("weight {} not in (0,1]", s.weight),
            );
        }
        match &s.kind {
            SummandKind::MatrixBlock { size, eigenvalues } => {
                if *size == 0 {
                    push(at, Rule::BlockSize, "matrix block of size 0".into());
                }
                if eigenvalues.len() != *size {
                    push(
                        at,
                        Rule::EigenvalueCount,
                        format!("{} eigenvalues for size {size}", eigenvalues.len()),
                    );
                }
                if let Some(e) = eigenvalues.iter().find(|e| !e.is_positive()) {
                    push(at, Rule::EigenvaluePositive, format!("eigenvalue {e} ≤ 0"));
                }
                let sum: Rational = eigenvalues.iter().sum();
                if sum != s.weight {
                    push(
                        at,
                        Rule::EigenvalueSum,
                        format!("eigenvalues sum to {sum}, weight is {}", s.weight),
                    );
                }
            }
            SummandKind::HyperfiniteDiffuse { .. } => {}
            SummandKind::FreeGroupFactor {
                param,
                amplification,
            } => {
                if let Extended::Finite(r) = param {
                    if r <= &one {
                        push(at, Rule::FreeGroupParam, format!("parameter {r} ≤ 1"));
                    }
                }
                if !amplification.is_positive() {
                    push(
                        at,
                        Rule::Amplification,
                        format!("amplification {amplification} ≤ 0"),
                    );
                }
            }
            SummandKind::AbstractII1 { amplification, .. } => {
                if !amplification.is_positive() {
                    push(
                        at,
                        Rule::Amplification,
                        format!("amplification {amplification} ≤ 0"),
                    );
                }
            }
            SummandKind::FullIIIWithCore { sd_subgroup } => {
                if sd_subgroup.is_trivial() {
                    push(
                        at,
                        Rule::TrivialSd,
                        "full type III factor needs Sd ≠ {1}".into(),
                    );
                }
            }
        }
    }
    let mut ratio_ok = true;
    if let Some(TailRule::GeometricQubits {
        ratio,
        scale,
        gamma_generators,
        ..
    }) = &spec.tail
    {
        if !ratio.is_positive() || ratio >= &one {
            ratio_ok = false;
            push(None, Rule::Tail, format!("tail ratio {ratio} not in (0,1)"));
        } else if !scale.is_positive() {
            push(None, Rule::Tail, format!("tail scale {scale} ≤ 0"));
        }
        match MultGroup::from_ratios(gamma_generators) {
            Ok(g) if g.is_trivial() => push(None, Rule::Tail, "tail Γ must be nontrivial".into()),
            Ok(_) => {}
            Err(e) => push(None, Rule::Tail, e.to_string()),
        }
    }
    if ratio_ok {
        let total = spec.total_weight();
        if total != one {
            push(
                None,
                Rule::TotalWeight,
                format!("weights sum to {total}, not 1"),
            );
        }
    }
    if spec.dimension() == Some(1) {
        push(
            None,
            Rule::TrivialAlgebra,
            "the algebra is ℂ (1-dimensional)".into(),
        );
    }
    out
}

/// Validate and turn violations into an error.
pub fn ensure_valid(spec: &AlgebraSpec) -> Result<()> {
    let v = validate(spec);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(v))
    }
}

/// All matrix eigenvalues equal within each block and no type III summand.
pub fn is_tracial(spec: &AlgebraSpec) -> bool {
    spec.tail.is_none() && spec.summands.iter().all(Summand::is_tracial)
}

/// One-dimensional central summands with their weights, heaviest first.
pub fn scalar_central_summands(spec: &AlgebraSpec) -> Vec<(ProjectionRef, Rational)> {
    let mut out: Vec<(ProjectionRef, Rational)> = spec
        .summands
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_scalar())
        .map(|(i, s)| (ProjectionRef::whole(i), s.weight.clone()))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1));
    out
}
