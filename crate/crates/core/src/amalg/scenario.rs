//! Free-group parameter of the compression `p_o P p_o` of a semifinite
//! amalgamated free product, given projection traces, atom traces and the
//! chosen minimal subprojections.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Extended, Rational};

use super::expr::StructureExpr;

/// One projection `p_i` of the partition of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioIndex {
    pub name: String,
    /// `β(i) = Tr_A(p_i)`
    pub beta: Rational,
    /// `Q(i)`
    pub q: StructureExpr,
    /// `α(j)` for the central summands first met at this index (`J_i`).
    #[serde(default)]
    pub atoms: Vec<Rational>,
    /// Traces of minimal subprojections of `p_i` equivalent to
    /// subprojections of earlier indices. One of them becomes `γ(i)`.
    #[serde(default)]
    pub shared_atoms: Vec<Rational>,
    /// Pinned `γ(i)`; overrides the scenario-wide choice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rational>,
}

impl ScenarioIndex {
    pub fn new(name: &str, beta: Rational, q: StructureExpr) -> Self {
        ScenarioIndex {
            name: name.into(),
            beta,
            q,
            atoms: vec![],
            shared_atoms: vec![],
            gamma: None,
        }
    }

    pub fn with_atoms(mut self, atoms: Vec<Rational>) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn with_shared(mut self, shared: Vec<Rational>) -> Self {
        self.shared_atoms = shared;
        self
    }

    pub fn with_gamma(mut self, gamma: Rational) -> Self {
        self.gamma = Some(gamma);
        self
    }
}

/// Indices listed in the order `≺`; the first one is `o`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionScenario {
    pub indices: Vec<ScenarioIndex>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaChoice {
    #[default]
    Smallest,
    Explicit(Rational),
}

impl FromStr for GammaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "smallest" {
            return Ok(GammaChoice::Smallest);
        }
        match s.strip_prefix("explicit:") {
            Some(v) => v
                .parse::<Rational>()
                .map(GammaChoice::Explicit)
                .map_err(|e| Error::Parse(format!("gamma choice {s:?}: {e}"))),
            None => Err(Error::Parse(format!(
                "gamma choice {s:?}: expected smallest or explicit:<value>"
            ))),
        }
    }
}

impl fmt::Display for GammaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaChoice::Smallest => write!(f, "smallest"),
            GammaChoice::Explicit(v) => write!(f, "explicit:{v}"),
        }
    }
}

/// Index data after `γ(i)` has been fixed; `rest` is `K_i`, the shared
/// atoms other than the chosen one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedIndex {
    pub name: String,
    pub beta: Rational,
    pub atoms: Vec<Rational>,
    pub gamma: Option<Rational>,
    pub rest: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionResult {
    pub r: Rational,
    pub expr: StructureExpr,
    pub gammas: Vec<(String, Rational)>,
    /// Contribution of each index to `r`.
    pub terms: Vec<(String, Rational)>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidScenario(msg)
}

impl CompressionScenario {
    pub fn new(indices: Vec<ScenarioIndex>) -> Self {
        CompressionScenario { indices }
    }

    pub fn beta_o(&self) -> Option<&Rational> {
        self.indices.first().map(|i| &i.beta)
    }

    /// Checks the invariants and fixes `γ(i)` for every `i ≠ o`.
    pub fn resolve(&self, choice: &GammaChoice) -> Result<Vec<ResolvedIndex>> {
        if self.indices.is_empty() {
            return Err(invalid("no indices".into()));
        }
        let mut out = Vec::with_capacity(self.indices.len());
        for (pos, ix) in self.indices.iter().enumerate() {
            let name = &ix.name;
            if !ix.beta.is_positive() {
                return Err(invalid(format!("β({name}) = {} must be positive", ix.beta)));
            }
            if let Some(a) = ix
                .atoms
                .iter()
                .chain(&ix.shared_atoms)
                .find(|a| !a.is_positive())
            {
                return Err(invalid(format!(
                    "atom trace {a} at {name} must be positive"
                )));
            }
            if pos == 0 {
                if !ix.shared_atoms.is_empty() || ix.gamma.is_some() {
                    return Err(invalid(format!(
                        "distinguished index {name} has no earlier index to share atoms with"
                    )));
                }
                let total: Rational = ix.atoms.iter().sum();
                if total > ix.beta {
                    return Err(invalid(format!(
                        "atoms at {name} sum to {total} > β = {}",
                        ix.beta
                    )));
                }
                out.push(ResolvedIndex {
                    name: name.clone(),
                    beta: ix.beta.clone(),
                    atoms: ix.atoms.clone(),
                    gamma: None,
                    rest: vec![],
                });
                continue;
            }
            let earlier = &self.indices[..pos];
            let fits_earlier = |t: &Rational| earlier.iter().any(|e| t <= &e.beta);
            let mut shared = ix.shared_atoms.clone();
            let gamma = match (&ix.gamma, choice) {
                (Some(g), _) => g.clone(),
                (None, GammaChoice::Smallest) => shared.iter().min().cloned().ok_or_else(|| {
                    invalid(format!(
                        "index {name} has no minimal subprojection shared with an earlier index"
                    ))
                })?,
                (None, GammaChoice::Explicit(v)) => {
                    if !shared.contains(v) {
                        return Err(invalid(format!(
                            "γ = {v} is not a shared minimal projection trace at {name}"
                        )));
                    }
                    v.clone()
                }
            };
            if let Some(k) = shared.iter().position(|s| s == &gamma) {
                shared.remove(k);
            }
            if !gamma.is_positive() {
                return Err(invalid(format!("γ({name}) = {gamma} must be positive")));
            }
            if gamma > ix.beta {
                return Err(invalid(format!(
                    "γ({name}) = {gamma} exceeds β = {}",
                    ix.beta
                )));
            }
            if let Some(t) = std::iter::once(&gamma)
                .chain(&shared)
                .find(|t| !fits_earlier(t))
            {
                return Err(invalid(format!(
                    "shared trace {t} at {name} fits under no earlier index"
                )));
            }
            let total: Rational = ix.atoms.iter().chain(&shared).sum::<Rational>() + &gamma;
            if total > ix.beta {
                return Err(invalid(format!(
                    "γ and atoms at {name} sum to {total} > β = {}",
                    ix.beta
                )));
            }
            out.push(ResolvedIndex {
                name: name.clone(),
                beta: ix.beta.clone(),
                atoms: ix.atoms.clone(),
                gamma: Some(gamma),
                rest: shared,
            });
        }
        Ok(out)
    }

    pub fn validate(&self, choice: &GammaChoice) -> Result<()> {
        self.resolve(choice).map(|_| ())
    }
}

/// `r = (1/β(o)²)((β(o)² − Σ_{J_o} α²) + Σ_{i≠o}(β(i)² − γ(i)² − Σ_{J_i} α²))`
/// and `Q(o) ⋆ L(F_r) ⋆ ⋆_{i≠o}[γ(i)/β(o), Q(i)_{γ(i)/β(i)}]`.
pub fn compression_formula(
    sc: &CompressionScenario,
    choice: &GammaChoice,
) -> Result<CompressionResult> {
    let resolved = sc.resolve(choice)?;
    let bo2 = resolved[0].beta.square();
    let mut terms = Vec::with_capacity(resolved.len());
    let mut gammas = Vec::new();
    for ix in &resolved {
        let sq_atoms: Rational = ix.atoms.iter().map(Rational::square).sum();
        let g2 = ix
            .gamma
            .as_ref()
            .map(Rational::square)
            .unwrap_or_else(Rational::zero);
        terms.push((ix.name.clone(), (ix.beta.square() - g2 - sq_atoms) / &bo2));
        if let Some(g) = &ix.gamma {
            gammas.push((ix.name.clone(), g.clone()));
        }
    }
    let r: Rational = terms.iter().map(|(_, t)| t).sum();

    let mut factors = vec![sc.indices[0].q.clone()];
    if !r.is_zero() {
        factors.push(StructureExpr::FreeGroup {
            param: Extended::Finite(r.clone()),
        });
    }
    for (ix, res) in sc.indices.iter().zip(&resolved).skip(1) {
        let g = res.gamma.as_ref().expect("resolved γ");
        factors.push(StructureExpr::CompressedPiece {
            trace: g / &resolved[0].beta,
            amplification: g / &ix.beta,
            inner: Box::new(ix.q.clone()),
        });
    }
    let expr = if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        StructureExpr::FreeProduct { factors }
    };
    Ok(CompressionResult {
        r,
        expr,
        gammas,
        terms,
    })
}
