use thiserror::Error;

use crate::algebra::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ratio must be a positive rational, got {0}")]
    NonPositiveRatio(String),

    #[error("{value} has a prime factor above the factorization bound {bound}")]
    PrimeTooLarge { value: String, bound: u64 },

    #[error("invalid algebra description: {}", format_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error("(dim(M₁),dim(M₂)) ≠ (2,2) is required: both inputs are 2-dimensional")]
    Dim22Rejected,

    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    #[error("projection is not a one-dimensional central summand: {0}")]
    NotScalarSummand(String),

    #[error("both states are tracial, so the Sd-invariant is trivial and there is no discrete decomposition")]
    TrivialGamma,

    #[error("ratio {0} does not lie in the group")]
    RatioOutsideGroup(String),

    #[error("Sd subgroup {sub} is not contained in Γ = {gamma}")]
    SubgroupNotContained { sub: String, gamma: String },

    #[error("indices unreachable from the distinguished index (relative commutant condition fails): {}", .0.join(", "))]
    DisconnectedIndex(Vec<String>),

    #[error("invalid compression scenario: {0}")]
    InvalidScenario(String),

    #[error("no structure theorem applies: {0}")]
    HypothesesNotRecognized(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Exit status the command-line front end reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnsupportedStructure(_)
            | Error::HypothesesNotRecognized(_)
            | Error::TrivialGamma => 3,
            _ => 2,
        }
    }
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
