//! Trial-division factorization of positive rationals into prime exponents.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

static PRIME_BOUND: AtomicU64 = AtomicU64::new(DEFAULT_PRIME_BOUND);

/// Largest prime the factorizer accepts. Inputs with bigger prime factors are
/// rejected with [`Error::PrimeTooLarge`].
pub fn prime_bound() -> u64 {
    PRIME_BOUND.load(Ordering::Relaxed)
}

pub fn set_prime_bound(bound: u64) {
    PRIME_BOUND.store(bound.max(2), Ordering::Relaxed);
}

/// Sparse prime-exponent map of a positive rational: `x = ∏ p^e`.
pub fn factor_rational(x: &Rational) -> Result<BTreeMap<u64, i64>> {
    if !x.is_positive() {
        return Err(Error::NonPositiveRatio(x.to_string()));
    }
    let bound = prime_bound();
    let mut out = BTreeMap::new();
    for (sign, part) in [(1i64, x.numer()), (-1i64, x.denom())] {
        let n = to_biguint(part);
        for (p, e) in factor_natural(&n, bound).map_err(|_| Error::PrimeTooLarge {
            value: x.to_string(),
            bound,
        })? {
            *out.entry(p).or_insert(0) += sign * e as i64;
        }
    }
    out.retain(|_, e| *e != 0);
    Ok(out)
}

fn to_biguint(n: &BigInt) -> BigUint {
    match n.sign() {
        Sign::Minus => unreachable!("positive rationals only"),
        _ => n.magnitude().clone(),
    }
}

struct TooLarge;

fn factor_natural(n: &BigUint, bound: u64) -> std::result::Result<Vec<(u64, u32)>, TooLarge> {
    if let Some(small) = n.to_u128() {
        return factor_u128(small, bound);
    }
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while !n.is_one() {
        if d > bound {
            return Err(TooLarge);
        }
        let big_d = BigUint::from(d);
        if &big_d * &big_d > n {
            // remaining cofactor is prime
            let p = n.to_u64().ok_or(TooLarge)?;
            if p > bound {
                return Err(TooLarge);
            }
            out.push((p, 1));
            break;
        }
        let mut e = 0;
        loop {
            let (quot, rem) = n.div_rem(&big_d);
            if !rem.is_zero() {
                break;
            }
            n = quot;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        if let Some(small) = n.to_u128() {
            let next = if d == 2 { 3 } else { d + 2 };
            let rest = factor_u128_from(small, next, bound)?;
            out.extend(rest);
            return Ok(out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(out)
}

fn factor_u128(n: u128, bound: u64) -> std::result::Result<Vec<(u64, u32)>, TooLarge> {
    factor_u128_from(n, 2, bound)
}

fn factor_u128_from(
    mut n: u128,
    start: u64,
    bound: u64,
) -> std::result::Result<Vec<(u64, u32)>, TooLarge> {
    let mut out = Vec::new();
    let mut d = start.max(2);
    while n > 1 {
        if (d as u128) * (d as u128) > n {
            if n > bound as u128 {
                return Err(TooLarge);
            }
            out.push((n as u64, 1));
            break;
        }
        if d > bound {
            return Err(TooLarge);
        }
        let mut e = 0;
        while n.is_multiple_of(d as u128) {
            n /= d as u128;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn factors_small_rationals() {
        let f = factor_rational(&q(12, 45)).unwrap();
        // 12/45 = 4/15 = 2^2 3^-1 5^-1
        assert_eq!(f, BTreeMap::from([(2, 2), (3, -1), (5, -1)]));
        assert!(factor_rational(&Rational::one()).unwrap().is_empty());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(
            factor_rational(&q(0, 1)),
            Err(Error::NonPositiveRatio(_))
        ));
        assert!(matches!(
            factor_rational(&q(-1, 2)),
            Err(Error::NonPositiveRatio(_))
        ));
    }

    #[test]
    fn rejects_primes_above_bound() {
        // 1_000_003 is prime and exceeds the default bound
        assert!(matches!(
            factor_rational(&Rational::from_integer(1_000_003)),
            Err(Error::PrimeTooLarge { .. })
        ));
        let f = factor_rational(&Rational::from_integer(999_983 * 2)).unwrap();
        assert_eq!(f, BTreeMap::from([(2, 1), (999_983, 1)]));
    }

    #[test]
    fn factors_beyond_u128() {
        let big = Rational::from(num_rational::BigRational::from_integer(
            BigInt::from(2u8).pow(140) * BigInt::from(3u8),
        ));
        let f = factor_rational(&big).unwrap();
        assert_eq!(f, BTreeMap::from([(2, 140), (3, 1)]));
    }
}
