//! The compression parameter rebuilt one inductive step at a time from free
//! dimensions of the corners `p_i A p_i`, without the closed formula.
//!
//! Steps: start from `fdim(p_o A p_o)`; each later index contributes
//! `L(F_{(β(i)/β(o))² s(i)})` with `s(i) = fdim(p_i A p_i)` in its
//! normalised trace; each shared atom other than `γ(i)` contributes
//! `L(F_{(α/β(o))²})`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Summand};
use crate::amalg::scenario::{CompressionScenario, GammaChoice};
use crate::error::{Error, Result};
use crate::exact::{Extended, Rational};
use crate::fdim::fdim;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionStep {
    pub description: String,
    pub increment: Rational,
    pub param: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionOracle {
    pub r: Rational,
    pub steps: Vec<CompositionStep>,
}

/// `p_i A p_i` normalised: one scalar per atom plus a diffuse hyperfinite
/// remainder.
fn corner(name: &str, beta: &Rational, atoms: &[Rational]) -> AlgebraSpec {
    let mut summands: Vec<Summand> = atoms.iter().map(|a| Summand::scalar(a / beta)).collect();
    let rest = Rational::one() - summands.iter().map(|s| &s.weight).sum::<Rational>();
    if rest.is_positive() {
        summands.push(Summand::hyperfinite(rest));
    }
    AlgebraSpec::new(name, summands)
}

fn corner_fdim(name: &str, beta: &Rational, atoms: &[Rational]) -> Result<Rational> {
    match fdim(&corner(name, beta, atoms))? {
        Extended::Finite(f) => Ok(f),
        Extended::Infinite => Err(Error::InvalidScenario(format!(
            "corner at {name} has infinite free dimension"
        ))),
    }
}

pub fn sequential_composition(
    sc: &CompressionScenario,
    choice: &GammaChoice,
) -> Result<CompositionOracle> {
    let resolved = sc.resolve(choice)?;
    let o = &resolved[0];
    let mut steps = Vec::new();
    let mut param = corner_fdim(&o.name, &o.beta, &o.atoms)?;
    steps.push(CompositionStep {
        description: format!("fdim of the corner at {}", o.name),
        increment: param.clone(),
        param: param.clone(),
    });
    for ix in &resolved[1..] {
        let mut atoms = ix.atoms.clone();
        atoms.extend(ix.gamma.iter().cloned());
        atoms.extend(ix.rest.iter().cloned());
        let s = corner_fdim(&ix.name, &ix.beta, &atoms)?;
        let inc = (&ix.beta / &o.beta).square() * s;
        param += &inc;
        steps.push(CompositionStep {
            description: format!("free product with the piece at {}", ix.name),
            increment: inc,
            param: param.clone(),
        });
        for a in &ix.rest {
            let inc = (a / &o.beta).square();
            param += &inc;
            steps.push(CompositionStep {
                description: format!("shared atom {a} at {}", ix.name),
                increment: inc,
                param: param.clone(),
            });
        }
    }
    Ok(CompositionOracle { r: param, steps })
}
