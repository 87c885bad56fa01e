//! Finitely generated subgroups of the positive rationals under
//! multiplication, stored as integer lattices of prime exponents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::factor::factor_rational;
use super::Rational;
use crate::error::{Error, Result};

/// An element of `ℚ₊ˣ` written as a sparse map `prime ↦ exponent`.
///
/// Zero exponents are never stored, so two elements are equal iff they denote
/// the same rational. Serializes as `{"2": e₂, "3": e₃}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(BTreeMap<u64, i64>);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(BTreeMap::new())
    }

    pub fn from_rational(x: &Rational) -> Result<Self> {
        Ok(GroupElement(factor_rational(x)?))
    }

    fn from_dense(primes: &[u64], exps: &[i64]) -> Self {
        GroupElement(
            primes
                .iter()
                .zip(exps)
                .filter(|(_, &e)| e != 0)
                .map(|(&p, &e)| (p, e))
                .collect(),
        )
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.0
    }

    pub fn exponent(&self, prime: u64) -> i64 {
        self.0.get(&prime).copied().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> Rational {
        self.0.iter().fold(Rational::one(), |acc, (&p, &e)| {
            acc * Rational::from_integer(p as i64).pow(e)
        })
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let mut out = self.0.clone();
        for (&p, &e) in &other.0 {
            *out.entry(p).or_insert(0) += e;
        }
        out.retain(|_, e| *e != 0);
        GroupElement(out)
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.iter().map(|(&p, &e)| (p, -e)).collect())
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        GroupElement(
            self.0
                .iter()
                .filter(|_| n != 0)
                .map(|(&p, &e)| (p, e * n))
                .collect(),
        )
    }

    /// Max-norm of the prime exponent vector.
    pub fn height(&self) -> u64 {
        self.0.values().map(|e| e.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "γ({})", self.value())
    }
}

/// A finitely generated subgroup of `ℚ₊ˣ`.
///
/// `primes` lists, in increasing order, exactly the primes that occur in some
/// group element; `basis` is the row-style Hermite normal form of the exponent
/// lattice over those primes. Both are canonical, so structural equality is
/// group equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct MultGroup {
    primes: Vec<u64>,
    basis: Vec<Vec<i64>>,
}

impl MultGroup {
    pub fn trivial() -> Self {
        MultGroup {
            primes: Vec::new(),
            basis: Vec::new(),
        }
    }

    /// The smallest subgroup of `ℚ₊ˣ` containing every ratio.
    pub fn from_ratios<'a, I>(ratios: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Rational>,
    {
        let elems = ratios
            .into_iter()
            .map(GroupElement::from_rational)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_elements(&elems))
    }

    pub fn from_elements(elems: &[GroupElement]) -> Self {
        let primes: Vec<u64> = elems
            .iter()
            .flat_map(|g| g.0.keys().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows: Vec<Vec<i128>> = elems
            .iter()
            .map(|g| primes.iter().map(|&p| g.exponent(p) as i128).collect())
            .collect();
        let basis = hermite_normal_form(rows, primes.len());
        MultGroup { primes, basis }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// The basis vectors as group elements (generators of the group).
    pub fn generators(&self) -> Vec<GroupElement> {
        self.basis
            .iter()
            .map(|row| GroupElement::from_dense(&self.primes, row))
            .collect()
    }

    pub fn generator_values(&self) -> Vec<Rational> {
        self.generators().iter().map(GroupElement::value).collect()
    }

    /// Integer coordinates of `g` with respect to the basis, or `None` when
    /// `g` is not in the lattice.
    pub fn coordinates(&self, g: &GroupElement) -> Option<Vec<i64>> {
        if g.0.keys().any(|p| self.primes.binary_search(p).is_err()) {
            return None;
        }
        let mut v: Vec<i128> = self.primes.iter().map(|&p| g.exponent(p) as i128).collect();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let pivot_col = row.iter().position(|&x| x != 0).expect("nonzero basis row");
            let pivot = row[pivot_col] as i128;
            if v[pivot_col] % pivot != 0 {
                return None;
            }
            let c = v[pivot_col] / pivot;
            for (vi, &ri) in v.iter_mut().zip(row) {
                *vi -= c * ri as i128;
            }
            coords.push(c as i64);
        }
        v.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn contains_element(&self, g: &GroupElement) -> bool {
        self.coordinates(g).is_some()
    }

    pub fn contains(&self, x: &Rational) -> Result<bool> {
        let g = GroupElement::from_rational(x)?;
        Ok(self.contains_element(&g))
    }

    /// `true` iff every element of `other` lies in `self`.
    pub fn contains_group(&self, other: &MultGroup) -> bool {
        other.generators().iter().all(|g| self.contains_element(g))
    }

    /// All elements whose prime-exponent max-norm is at most `height`, sorted
    /// by `(norm, exponent vector)` lexicographically.
    pub fn enumerate(&self, height: u64) -> Vec<GroupElement> {
        let h = height as i64;
        let d = self.primes.len();
        let mut out: Vec<(u64, Vec<i64>)> = Vec::new();
        let mut cur = vec![-h; d];
        loop {
            let g = GroupElement::from_dense(&self.primes, &cur);
            if self.contains_element(&g) {
                out.push((g.height(), cur.clone()));
            }
            // odometer increment over the box [-h, h]^d
            let mut i = d;
            loop {
                if i == 0 {
                    out.sort();
                    return out
                        .into_iter()
                        .map(|(_, e)| GroupElement::from_dense(&self.primes, &e))
                        .collect();
                }
                i -= 1;
                if cur[i] < h {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -h;
            }
        }
    }

    /// For a rank-one group `λ^ℤ`, the generator `λ` with `0 < λ < 1`.
    pub fn cyclic_generator(&self) -> Option<Rational> {
        if self.rank() != 1 {
            return None;
        }
        let v = self.generators()[0].value();
        Some(if v < Rational::one() { v } else { v.recip() })
    }

    pub fn cyclic_generator_element(&self) -> Option<GroupElement> {
        if self.rank() != 1 {
            return None;
        }
        let g = self.generators().remove(0);
        Some(if g.value() < Rational::one() {
            g
        } else {
            g.inverse()
        })
    }

    /// Check membership of a ratio, failing with `RatioOutsideGroup`.
    pub fn require(&self, x: &Rational) -> Result<GroupElement> {
        let g = GroupElement::from_rational(x)?;
        if self.contains_element(&g) {
            Ok(g)
        } else {
            Err(Error::RatioOutsideGroup(format!("{x} ∉ {self}")))
        }
    }
}

impl fmt::Display for MultGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "{{1}}");
        }
        let gens: Vec<String> = self
            .generator_values()
            .iter()
            .map(|v| format!("{v}^ℤ"))
            .collect();
        write!(f, "{}", gens.join("·"))
    }
}

/// Row-style Hermite normal form: echelon rows with positive pivots and the
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
fn hermite_normal_form(mut rows: Vec<Vec<i128>>, ncols: usize) -> Vec<Vec<i64>> {
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&r| rows[r][col] != 0)
                .min_by_key(|&r| rows[r][col].abs());
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let pivot = rows[pivot_row][col];
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                let f = rows[r][col] / pivot;
                if f != 0 {
                    let (head, tail) = rows.split_at_mut(r);
                    for (x, &p) in tail[0].iter_mut().zip(&head[pivot_row]) {
                        *x -= f * p;
                    }
                }
                if rows[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col] == 0 {
            continue;
        }
        if rows[pivot_row][col] < 0 {
            rows[pivot_row].iter_mut().for_each(|x| *x = -*x);
        }
        let pivot = rows[pivot_row][col];
        for r in 0..pivot_row {
            let f = rows[r][col].div_euclid(pivot);
            if f != 0 {
                let (head, tail) = rows.split_at_mut(pivot_row);
                for (x, &p) in head[r].iter_mut().zip(&tail[0]) {
                    *x -= f * p;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("exponent overflow in lattice reduction"))
                .collect()
        })
        .collect()
}
