//! Symbolic structure terms for (possibly semifinite) algebras.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{Extended, MultGroup, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum StructureExpr {
    Scalar,
    Matrix {
        size: usize,
    },
    /// Diffuse hyperfinite; `semifinite` marks the infinite-trace version.
    Hyperfinite {
        semifinite: bool,
    },
    /// `L(F_r)`. Parameters `≤ 1` only occur as formal free-product factors.
    FreeGroup {
        param: Extended,
    },
    /// Opaque II₁ factor `label^amplification`.
    Abstract {
        label: String,
        amplification: Extended,
    },
    /// Centralizer of an extremal almost periodic state on a full type III
    /// factor whose discrete core is `L(F_∞) ⊗ B(ℓ²)`.
    FullIIICentralizer {
        label: String,
        sd: MultGroup,
    },
    /// Verbatim symbolic label.
    Label {
        text: String,
    },
    /// Summands with their trace weights.
    DirectSum {
        parts: Vec<(Extended, StructureExpr)>,
    },
    FreeProduct {
        factors: Vec<StructureExpr>,
    },
    /// Free product with amalgamation over `ℓ^∞(Γ)`.
    AmalgamatedFreeProduct {
        base: MultGroup,
        factors: Vec<StructureExpr>,
    },
    Amplify {
        by: Extended,
        inner: Box<StructureExpr>,
    },
    /// `[t, X_s]`: `X^s` under a projection of trace `t`, with a scalar
    /// complement of trace `1 - t`.
    CompressedPiece {
        trace: Rational,
        amplification: Rational,
        inner: Box<StructureExpr>,
    },
    /// `⋆_{γ∈Γ} X^γ`, never expanded in full.
    GammaFreeProduct {
        group: MultGroup,
        inner: Box<StructureExpr>,
    },
}

use StructureExpr as E;

impl StructureExpr {
    pub fn free_group(r: Rational) -> Self {
        E::FreeGroup {
            param: Extended::Finite(r),
        }
    }

    pub fn free_group_inf() -> Self {
        E::FreeGroup {
            param: Extended::Infinite,
        }
    }

    pub fn hyperfinite() -> Self {
        E::Hyperfinite { semifinite: false }
    }

    pub fn abstract_factor(label: &str) -> Self {
        E::Abstract {
            label: label.into(),
            amplification: Extended::Finite(Rational::one()),
        }
    }

    pub fn amplify(by: Extended, inner: StructureExpr) -> Self {
        E::Amplify {
            by,
            inner: Box::new(inner),
        }
    }

    pub fn free_product(factors: Vec<StructureExpr>) -> Self {
        E::FreeProduct { factors }
    }

    pub fn is_free_group_inf(&self) -> bool {
        matches!(
            self,
            E::FreeGroup {
                param: Extended::Infinite
            }
        )
    }

    pub fn children(&self) -> Vec<&StructureExpr> {
        match self {
            E::DirectSum { parts } => parts.iter().map(|(_, x)| x).collect(),
            E::FreeProduct { factors } | E::AmalgamatedFreeProduct { factors, .. } => {
                factors.iter().collect()
            }
            E::Amplify { inner, .. }
            | E::CompressedPiece { inner, .. }
            | E::GammaFreeProduct { inner, .. } => vec![inner],
            _ => vec![],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    fn is_atomic_display(&self) -> bool {
        matches!(
            self,
            E::Scalar
                | E::Matrix { .. }
                | E::Hyperfinite { .. }
                | E::FreeGroup { .. }
                | E::Label { .. }
                | E::FullIIICentralizer { .. }
                | E::CompressedPiece { .. }
                | E::GammaFreeProduct { .. }
        ) || matches!(self, E::Abstract { amplification, .. } if amplification.is_one())
    }

    fn paren(&self) -> String {
        if self.is_atomic_display() {
            self.to_string()
        } else {
            format!("({self})")
        }
    }
}

impl fmt::Display for StructureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Scalar => write!(f, "ℂ"),
            E::Matrix { size } => write!(f, "M_{size}"),
            E::Hyperfinite { semifinite: false } => write!(f, "R"),
            E::Hyperfinite { semifinite: true } => write!(f, "R ⊗ B(ℓ²)"),
            E::FreeGroup { param } => write!(f, "L(F_{param})"),
            E::Abstract {
                label,
                amplification,
            } if amplification.is_one() => write!(f, "{label}"),
            E::Abstract {
                label,
                amplification: Extended::Infinite,
            } => write!(f, "{label} ⊗ B(ℓ²)"),
            E::Abstract {
                label,
                amplification,
            } => write!(f, "{label}^{{{amplification}}}"),
            E::FullIIICentralizer { label, .. } => write!(f, "({label})_φ"),
            E::Label { text } => write!(f, "{text}"),
            E::DirectSum { parts } => {
                let s: Vec<String> = parts
                    .iter()
                    .map(|(w, x)| format!("{}_{{{w}}}", x.paren()))
                    .collect();
                write!(f, "{}", s.join(" ⊕ "))
            }
            E::FreeProduct { factors } if factors.is_empty() => write!(f, "ℂ"),
            E::FreeProduct { factors } => {
                let s: Vec<String> = factors.iter().map(|x| x.paren()).collect();
                write!(f, "{}", s.join(" ⋆ "))
            }
            E::AmalgamatedFreeProduct { base, factors } => {
                let s: Vec<String> = factors.iter().map(|x| x.paren()).collect();
                write!(f, "{}", s.join(&format!(" ⋆_{{ℓ^∞({base})}} ")))
            }
            E::Amplify {
                by: Extended::Infinite,
                inner,
            } => write!(f, "{} ⊗ B(ℓ²)", inner.paren()),
            E::Amplify { by, inner } => write!(f, "{}^{{{by}}}", inner.paren()),
            E::CompressedPiece {
                trace,
                amplification,
                inner,
            } if amplification.is_one() => write!(f, "[{trace}, {inner}]"),
            E::CompressedPiece {
                trace,
                amplification,
                inner,
            } => write!(f, "[{trace}, {}_{{{amplification}}}]", inner.paren()),
            E::GammaFreeProduct { inner, .. } => write!(f, "⋆_{{γ∈Γ}}({inner})^γ"),
        }
    }
}
