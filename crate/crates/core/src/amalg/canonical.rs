//! Rewriting of structure terms into canonical form: direct sums of
//! hyperfinite pieces, amplified interpolated free group factors and symbolic
//! free products of opaque factors.
//!
//! Rules, applied bottom-up:
//! * `M_1 → ℂ`, `L(F_1) → R`, a full III centralizer is `L(F_∞)`;
//! * amplifications compose; `L(F_r)^t = L(F_{1+(r-1)/t²})`; `R^t = R` for
//!   finite `t`; `R^∞` is semifinite hyperfinite; `N^s^t = N^{st}`;
//!   `M_n^∞ = ℂ^∞` since both are `B(ℓ²)`; `L(F_r)^∞ = L(F_2)^∞` for
//!   finite `r > 1`, as every such `L(F_r)` is an amplification of `L(F_2)`;
//! * free products flatten, drop `ℂ`, and any group of at least two factors
//!   with known free dimension, one of them diffuse, merges into `L(F_s)`
//!   with `s` the sum of free dimensions;
//! * `⋆_{γ∈Γ} X^γ` is `X` for trivial `Γ` and `L(F_∞)` for diffuse `X` of
//!   known free dimension;
//! * children of free products and direct sums are sorted.

use crate::error::{Error, Result};
use crate::exact::{Extended, MultGroup, Rational};
use crate::fdim::compress_param;

use super::expr::StructureExpr as E;
use super::expr::StructureExpr;

/// Free dimension and diffuseness of a term, when the calculus knows them.
pub fn known_fdim(e: &StructureExpr) -> Option<(Extended, bool)> {
    let one = Rational::one();
    match e {
        E::Scalar => Some((Extended::Finite(Rational::zero()), false)),
        E::Matrix { size } if *size >= 1 => {
            let n = Rational::from_integer(*size as i64);
            Some((Extended::Finite(&one - n.square().recip()), false))
        }
        E::Hyperfinite { semifinite: false } => Some((Extended::Finite(one), true)),
        E::FreeGroup { param } => {
            let diffuse = match param {
                Extended::Finite(r) => r >= &one,
                Extended::Infinite => true,
            };
            Some((param.clone(), diffuse))
        }
        E::DirectSum { parts } => {
            let mut total_weight = Rational::zero();
            let mut acc = Extended::Finite(one.clone());
            let mut diffuse = true;
            for (w, x) in parts {
                let w = w.as_finite()?;
                let (f, d) = known_fdim(x)?;
                diffuse &= d;
                total_weight += w;
                acc = match (acc, f) {
                    (Extended::Finite(a), Extended::Finite(f)) => {
                        Extended::Finite(a + w.square() * (f - &one))
                    }
                    _ => Extended::Infinite,
                };
            }
            (total_weight == one).then_some((acc, diffuse))
        }
        E::CompressedPiece {
            trace,
            amplification,
            inner,
        } if amplification.is_one() && trace <= &one => {
            let (f, d) = known_fdim(inner)?;
            if trace.is_one() {
                return Some((f, d));
            }
            let f = match f {
                Extended::Finite(f) => {
                    Extended::Finite(&one + trace.square() * (f - &one) - (&one - trace).square())
                }
                Extended::Infinite => Extended::Infinite,
            };
            Some((f, false))
        }
        _ => None,
    }
}

fn is_trivial_factor(e: &StructureExpr) -> bool {
    match e {
        E::Scalar => true,
        E::FreeGroup {
            param: Extended::Finite(r),
        } => r.is_zero(),
        _ => false,
    }
}

/// Canonical form of `amplify(by, c)` for an already canonical `c`.
fn amplify_canonical(by: Extended, c: StructureExpr) -> StructureExpr {
    if by.is_one() {
        return c;
    }
    match (by, c) {
        (by, E::Amplify { by: by2, inner }) => amplify_canonical(by.mul(&by2), *inner),
        (Extended::Finite(t), E::FreeGroup { param }) => match param {
            Extended::Finite(r) if r > Rational::one() => E::free_group(
                compress_param(&Extended::Finite(r), &t)
                    .as_finite()
                    .cloned()
                    .expect("finite"),
            ),
            Extended::Infinite => E::free_group_inf(),
            param => E::amplify(Extended::Finite(t), E::FreeGroup { param }),
        },
        (
            Extended::Infinite,
            E::FreeGroup {
                param: Extended::Finite(r),
            },
        ) if r > Rational::one() => {
            E::amplify(Extended::Infinite, E::free_group(Rational::from_integer(2)))
        }
        (Extended::Finite(_), E::Hyperfinite { semifinite }) => E::Hyperfinite { semifinite },
        (Extended::Infinite, E::Hyperfinite { .. }) => E::Hyperfinite { semifinite: true },
        (
            by,
            E::Abstract {
                label,
                amplification,
            },
        ) => E::Abstract {
            label,
            amplification: amplification.mul(&by),
        },
        (Extended::Finite(t), E::Scalar) => matrix_amplification(1, t),
        (Extended::Finite(t), E::Matrix { size }) => matrix_amplification(size, t),
        (Extended::Infinite, E::Matrix { .. }) => E::amplify(Extended::Infinite, E::Scalar),
        (by, c) => E::amplify(by, c),
    }
}

fn matrix_amplification(size: usize, t: Rational) -> StructureExpr {
    let n = Rational::from_integer(size as i64) * &t;
    if n.is_integer() && n.is_positive() {
        let n: usize = n.to_string().parse().expect("positive integer");
        if n == 1 {
            E::Scalar
        } else {
            E::Matrix { size: n }
        }
    } else {
        // M_n^t and ℂ^{nt} name the same object
        E::amplify(Extended::Finite(n), E::Scalar)
    }
}

fn merge_free_factors(factors: Vec<StructureExpr>) -> Vec<StructureExpr> {
    let (known, mut rest): (Vec<_>, Vec<_>) =
        factors.into_iter().partition(|f| known_fdim(f).is_some());
    let any_diffuse = known.iter().any(|f| known_fdim(f).is_some_and(|(_, d)| d));
    if known.len() >= 2 && any_diffuse {
        let sum = known
            .iter()
            .map(|f| known_fdim(f).expect("known").0)
            .fold(Extended::Finite(Rational::zero()), |a, b| a.add(&b));
        rest.push(E::FreeGroup { param: sum });
    } else {
        rest.extend(known);
    }
    rest
}

pub fn to_canonical(e: &StructureExpr) -> Result<StructureExpr> {
    Ok(match e {
        E::Matrix { size: 0 } => {
            return Err(Error::UnsupportedStructure("matrix block of size 0".into()))
        }
        E::Matrix { size: 1 } => E::Scalar,
        E::FreeGroup {
            param: Extended::Finite(r),
        } if r.is_one() => E::hyperfinite(),
        E::FullIIICentralizer { .. } => E::free_group_inf(),
        E::Scalar
        | E::Matrix { .. }
        | E::Hyperfinite { .. }
        | E::FreeGroup { .. }
        | E::Abstract { .. }
        | E::Label { .. } => e.clone(),
        E::Amplify { by, inner } => amplify_canonical(by.clone(), to_canonical(inner)?),
        E::DirectSum { parts } => {
            let mut out = Vec::new();
            for (w, x) in parts {
                if matches!(w, Extended::Finite(w) if w.is_zero()) {
                    continue;
                }
                out.push((w.clone(), to_canonical(x)?));
            }
            out.sort();
            match out.len() {
                0 => return Err(Error::UnsupportedStructure("empty direct sum".into())),
                1 if out[0].0.is_one() => out.pop().expect("one part").1,
                _ => E::DirectSum { parts: out },
            }
        }
        E::FreeProduct { factors } => {
            let mut flat = Vec::new();
            for f in factors {
                match to_canonical(f)? {
                    E::FreeProduct { factors } => flat.extend(factors),
                    c if is_trivial_factor(&c) => {}
                    c => flat.push(c),
                }
            }
            let mut merged = merge_free_factors(flat);
            merged.sort();
            match merged.len() {
                0 => E::Scalar,
                1 => merged.pop().expect("one factor"),
                _ => E::FreeProduct { factors: merged },
            }
        }
        E::AmalgamatedFreeProduct { .. } => {
            return Err(Error::UnsupportedStructure(
                "amalgamated free products have no canonical rewrite".into(),
            ))
        }
        E::CompressedPiece {
            trace,
            amplification,
            inner,
        } => {
            if !trace.is_positive() {
                return Err(Error::UnsupportedStructure(format!(
                    "compressed piece trace {trace} ≤ 0"
                )));
            }
            let inner = amplify_canonical(
                Extended::Finite(amplification.clone()),
                to_canonical(inner)?,
            );
            if trace.is_one() {
                inner
            } else {
                E::CompressedPiece {
                    trace: trace.clone(),
                    amplification: Rational::one(),
                    inner: Box::new(inner),
                }
            }
        }
        E::GammaFreeProduct { group, inner } => {
            let inner = to_canonical(inner)?;
            if group.is_trivial() {
                inner
            } else if known_fdim(&inner).is_some_and(|(_, d)| d) {
                E::free_group_inf()
            } else {
                E::GammaFreeProduct {
                    group: group.clone(),
                    inner: Box::new(inner),
                }
            }
        }
    })
}

/// Every term reachable from `e` by exactly one rewrite at one position.
pub fn single_steps(e: &StructureExpr) -> Vec<StructureExpr> {
    let mut out = root_steps(e);
    match e {
        E::DirectSum { parts } => {
            for (i, (w, x)) in parts.iter().enumerate() {
                for s in single_steps(x) {
                    let mut p = parts.clone();
                    p[i] = (w.clone(), s);
                    out.push(E::DirectSum { parts: p });
                }
            }
        }
        E::FreeProduct { factors } => {
            for (i, x) in factors.iter().enumerate() {
                for s in single_steps(x) {
                    let mut f = factors.clone();
                    f[i] = s;
                    out.push(E::FreeProduct { factors: f });
                }
            }
        }
        E::Amplify { by, inner } => {
            for s in single_steps(inner) {
                out.push(E::amplify(by.clone(), s));
            }
        }
        E::CompressedPiece {
            trace,
            amplification,
            inner,
        } => {
            for s in single_steps(inner) {
                out.push(E::CompressedPiece {
                    trace: trace.clone(),
                    amplification: amplification.clone(),
                    inner: Box::new(s),
                });
            }
        }
        E::GammaFreeProduct { group, inner } => {
            for s in single_steps(inner) {
                out.push(E::GammaFreeProduct {
                    group: group.clone(),
                    inner: Box::new(s),
                });
            }
        }
        _ => {}
    }
    out
}

fn root_steps(e: &StructureExpr) -> Vec<StructureExpr> {
    let mut out = Vec::new();
    match e {
        E::Matrix { size: 1 } => out.push(E::Scalar),
        E::FreeGroup {
            param: Extended::Finite(r),
        } if r.is_one() => out.push(E::hyperfinite()),
        E::FullIIICentralizer { .. } => out.push(E::free_group_inf()),
        E::Amplify { by, inner } => {
            if by.is_one() {
                out.push((**inner).clone());
            }
            match (by, &**inner) {
                (by, E::Amplify { by: by2, inner: x }) => {
                    out.push(E::amplify(by.mul(by2), (**x).clone()))
                }
                (
                    Extended::Finite(t),
                    E::FreeGroup {
                        param: Extended::Finite(r),
                    },
                ) if r > &Rational::one() => {
                    let p = compress_param(&Extended::Finite(r.clone()), t);
                    out.push(E::FreeGroup { param: p });
                }
                (
                    by,
                    E::Abstract {
                        label,
                        amplification,
                    },
                ) => out.push(E::Abstract {
                    label: label.clone(),
                    amplification: amplification.mul(by),
                }),
                (Extended::Infinite, E::Hyperfinite { .. }) => {
                    out.push(E::Hyperfinite { semifinite: true })
                }
                (Extended::Infinite, E::Matrix { .. }) => {
                    out.push(E::amplify(Extended::Infinite, E::Scalar))
                }
                (
                    Extended::Infinite,
                    E::FreeGroup {
                        param: Extended::Finite(r),
                    },
                ) if r > &Rational::one() => out.push(E::amplify(
                    Extended::Infinite,
                    E::free_group(Rational::from_integer(2)),
                )),
                _ => {}
            }
        }
        E::FreeProduct { factors } => {
            if factors.len() == 1 {
                out.push(factors[0].clone());
            }
            for (i, f) in factors.iter().enumerate() {
                if is_trivial_factor(f) {
                    let mut g = factors.clone();
                    g.remove(i);
                    out.push(E::FreeProduct { factors: g });
                }
                if let E::FreeProduct { factors: inner } = f {
                    let mut g = factors[..i].to_vec();
                    g.extend(inner.iter().cloned());
                    g.extend(factors[i + 1..].iter().cloned());
                    out.push(E::FreeProduct { factors: g });
                }
            }
            for i in 0..factors.len() {
                for j in i + 1..factors.len() {
                    let (Some((a, da)), Some((b, db))) =
                        (known_fdim(&factors[i]), known_fdim(&factors[j]))
                    else {
                        continue;
                    };
                    // a free dimension 0 factor is ℂ in disguise and merges into nothing
                    let zero = Extended::Finite(Rational::zero());
                    if (da || db) && a != zero && b != zero {
                        let mut g = factors.clone();
                        g[i] = E::FreeGroup { param: a.add(&b) };
                        g.remove(j);
                        out.push(E::FreeProduct { factors: g });
                    }
                }
            }
        }
        E::GammaFreeProduct { group, inner } if group.is_trivial() => out.push((**inner).clone()),
        E::CompressedPiece {
            trace,
            amplification,
            inner,
        } if trace.is_one() => out.push(E::amplify(
            Extended::Finite(amplification.clone()),
            (**inner).clone(),
        )),
        _ => {}
    }
    out
}

/// A factor of the form `L(F_r)` (possibly amplified) whose fundamental group
/// contains a nontrivial `Γ` has `r = ∞`.
pub fn dichotomy_promote(e: &StructureExpr, gamma: &MultGroup) -> StructureExpr {
    if gamma.is_trivial() {
        return e.clone();
    }
    match e {
        E::FreeGroup { .. } => E::free_group_inf(),
        E::Amplify { by, inner } if matches!(**inner, E::FreeGroup { .. }) => {
            E::amplify(by.clone(), E::free_group_inf())
        }
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn c(e: &StructureExpr) -> StructureExpr {
        to_canonical(e).unwrap()
    }

    #[test]
    fn free_group_parameters_add() {
        let e = E::free_product(vec![E::free_group(q(2, 1)), E::free_group(q(3, 1))]);
        assert_eq!(c(&e), E::free_group(q(5, 1)));
    }

    #[test]
    fn trivial_amplification_drops() {
        let x = E::abstract_factor("N");
        assert_eq!(
            c(&E::amplify(Extended::Finite(Rational::one()), x.clone())),
            x
        );
    }

    #[test]
    fn two_hyperfinite_give_free_group_two() {
        let e = E::free_product(vec![E::hyperfinite(), E::hyperfinite()]);
        assert_eq!(c(&e), E::free_group(q(2, 1)));
    }

    #[test]
    fn amplification_compresses_parameter() {
        let e = E::amplify(Extended::Finite(q(1, 2)), E::free_group(q(2, 1)));
        assert_eq!(c(&e), E::free_group(q(5, 1)));
        let back = E::amplify(Extended::Finite(q(2, 1)), e);
        assert_eq!(c(&back), E::free_group(q(2, 1)));
    }

    #[test]
    fn symbolic_factors_stay() {
        let n = E::abstract_factor("N");
        let e = E::free_product(vec![n.clone(), E::Scalar, E::free_group(q(3, 2))]);
        assert_eq!(c(&e), E::free_product(vec![E::free_group(q(3, 2)), n]));
    }

    #[test]
    fn compressed_piece_fdim() {
        // [1/2, R] has free dimension 1 + 0 - 1/4
        let e = E::CompressedPiece {
            trace: q(1, 2),
            amplification: q(1, 2),
            inner: Box::new(E::hyperfinite()),
        };
        let ce = c(&e);
        assert_eq!(known_fdim(&ce), Some((Extended::Finite(q(3, 4)), false)));
        let p = E::free_product(vec![E::Scalar, E::free_group(q(3, 4)), e]);
        assert_eq!(
            c(&p),
            E::FreeProduct {
                factors: vec![E::free_group(q(3, 4)), ce]
            }
        );
    }

    #[test]
    fn gamma_free_product_rules() {
        let g = MultGroup::from_ratios(&[q(1, 2)]).unwrap();
        let e = E::GammaFreeProduct {
            group: g.clone(),
            inner: Box::new(E::hyperfinite()),
        };
        assert_eq!(c(&e), E::free_group_inf());
        let n = E::GammaFreeProduct {
            group: g,
            inner: Box::new(E::abstract_factor("N")),
        };
        assert_eq!(c(&n), n);
        let t = E::GammaFreeProduct {
            group: MultGroup::trivial(),
            inner: Box::new(E::abstract_factor("N")),
        };
        assert_eq!(c(&t), E::abstract_factor("N"));
    }

    #[test]
    fn amalgamated_is_unsupported() {
        let e = E::AmalgamatedFreeProduct {
            base: MultGroup::trivial(),
            factors: vec![],
        };
        assert!(matches!(
            to_canonical(&e),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn dichotomy() {
        let g = MultGroup::from_ratios(&[q(2, 1)]).unwrap();
        assert_eq!(
            dichotomy_promote(&E::free_group(q(3, 4)), &g),
            E::free_group_inf()
        );
        assert_eq!(
            dichotomy_promote(&E::free_group(q(2, 1)), &MultGroup::trivial()),
            E::free_group(q(2, 1))
        );
        assert_eq!(
            dichotomy_promote(&E::free_group_inf(), &g),
            E::free_group_inf()
        );
    }

    #[test]
    fn infinite_amplifications_collapse() {
        let inf = Extended::Infinite;
        let m = E::amplify(inf.clone(), E::Matrix { size: 5 });
        assert_eq!(c(&m), E::amplify(inf.clone(), E::Scalar));
        let f = E::amplify(inf.clone(), E::free_group(q(7, 3)));
        assert_eq!(c(&f), E::amplify(inf.clone(), E::free_group(q(2, 1))));
        let f_inf = E::amplify(inf.clone(), E::free_group_inf());
        assert_eq!(c(&f_inf), f_inf);
    }

    #[test]
    fn fractional_matrix_amplification() {
        let e = E::amplify(Extended::Finite(q(7, 2)), E::Matrix { size: 3 });
        assert_eq!(c(&e), E::amplify(Extended::Finite(q(21, 2)), E::Scalar));
    }

    #[test]
    fn scalar_factor_does_not_merge() {
        let sum = E::DirectSum {
            parts: vec![
                (Extended::Finite(q(1, 2)), E::free_group(q(2, 1))),
                (Extended::Finite(q(1, 2)), E::hyperfinite()),
            ],
        };
        let e = E::free_product(vec![sum.clone(), E::Scalar]);
        for s in single_steps(&e) {
            assert_eq!(c(&s), c(&sum));
        }
    }
}
