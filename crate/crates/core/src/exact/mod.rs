//! Exact scalars: rationals, prime factorization, and finitely generated
//! multiplicative subgroups of the positive rationals.

mod factor;
mod group;
mod rational;

pub use factor::{factor_rational, prime_bound, set_prime_bound, DEFAULT_PRIME_BOUND};
pub use group::{GroupElement, MultGroup};
pub use rational::{q, Extended, Rational};

use crate::error::Result;

/// The smallest multiplicative subgroup of `ℚ₊ˣ` containing all `ratios`.
pub fn group_from_ratios(ratios: &[Rational]) -> Result<MultGroup> {
    MultGroup::from_ratios(ratios)
}

pub fn contains(g: &MultGroup, x: &Rational) -> Result<bool> {
    g.contains(x)
}

pub fn enumerate(g: &MultGroup, height: u64) -> Vec<GroupElement> {
    g.enumerate(height)
}

pub fn cyclic_generator(g: &MultGroup) -> Option<Rational> {
    g.cyclic_generator()
}
