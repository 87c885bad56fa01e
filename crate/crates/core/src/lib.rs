//! Exact structure calculator for free products of von Neumann algebras
//! with almost periodic states.

pub mod algebra;
pub mod amalg;
pub mod discrete_core;
pub mod document;
pub mod error;
pub mod exact;
pub mod fdim;
pub mod freeprod;
pub mod modular;
pub mod oracles;
pub mod par;

pub use error::{Error, Result};
