//! Atom masses of `(⊕ ℂ p_i) ⋆ (⊕ ℂ q_j)` measured on matrices: `p_i` is a
//! coordinate projection of rank `α_i N`, `q_j` projects onto a uniformly
//! random subspace of dimension `β_j N`, and the atom under `p_i ∧ q_j` has
//! mass `dim(ran p_i ∩ ran q_j) / N`.
//!
//! The random subspace is the column span of an `N × k` Gaussian matrix
//! `G`; a vector `Gc` lies in `ran p_i` iff the rows of `G` outside the
//! block of `p_i` annihilate `c`, so the intersection has dimension
//! `k − rank(G_out)`. The roles of the two projections are swapped when
//! that makes the singular value decomposition smaller.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomMatrixConfig {
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    /// Masses below this are reported as no atom.
    pub threshold: f64,
}

impl Default for RandomMatrixConfig {
    fn default() -> Self {
        RandomMatrixConfig {
            size: 2000,
            trials: 5,
            seed: 0x5eed,
            threshold: 0.005,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMass {
    pub alpha: Rational,
    pub beta: Rational,
    /// Mean over trials.
    pub mass: f64,
    pub per_trial: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomMeasurement {
    pub size: usize,
    pub trials: usize,
    pub pairs: Vec<PairMass>,
}

impl AtomMeasurement {
    /// Measured atoms above the threshold, heaviest first.
    pub fn atoms(&self, threshold: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .pairs
            .iter()
            .map(|p| p.mass)
            .filter(|m| *m > threshold)
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn mass_of(&self, alpha: &Rational, beta: &Rational) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| &p.alpha == alpha && &p.beta == beta)
            .map(|p| p.mass)
    }
}

fn ranks(weights: &[Rational], n: usize) -> Result<Vec<usize>> {
    let nn = Rational::from_integer(n as i64);
    weights
        .iter()
        .map(|w| {
            let k = w * &nn;
            if !k.is_integer() || k.is_negative() {
                return Err(Error::UnsupportedStructure(format!(
                    "weight {w} times matrix size {n} is not a whole rank"
                )));
            }
            Ok(k.to_string().parse().expect("integer rank"))
        })
        .collect()
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let tol = top * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON * 16.0;
    sv.iter().filter(|s| **s > tol).count()
}

/// `dim(ran p ∩ ran q)` with `rank p = a` fixed and `rank q = k` random.
fn intersection_dim(n: usize, a: usize, k: usize, rng: &mut ChaCha8Rng) -> usize {
    // rows outside a block of size a of an N × k Gaussian, or the mirror
    let (rows, cols) = if (n - a).min(k) <= (n - k).min(a) {
        (n - a, k)
    } else {
        (n - k, a)
    };
    let g = DMatrix::<f64>::from_fn(rows, cols, |_, _| StandardNormal.sample(rng));
    cols - numerical_rank(&g)
}

/// Every pair `(α_i, β_j)` is measured in each trial; trials run on the
/// rayon pool when `exec` allows.
pub fn measure_atoms(
    weights1: &[Rational],
    weights2: &[Rational],
    cfg: &RandomMatrixConfig,
    exec: Execution,
) -> Result<AtomMeasurement> {
    let n = cfg.size;
    let r1 = ranks(weights1, n)?;
    let r2 = ranks(weights2, n)?;
    let trials: Vec<Vec<f64>> = par::map_range(exec, cfg.trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(t as u64));
        r1.iter()
            .flat_map(|&a| r2.iter().map(move |&k| (a, k)))
            .map(|(a, k)| intersection_dim(n, a, k, &mut rng) as f64 / n as f64)
            .collect()
    });
    let mut pairs = Vec::new();
    for (i, a) in weights1.iter().enumerate() {
        for (j, b) in weights2.iter().enumerate() {
            let idx = i * weights2.len() + j;
            let per_trial: Vec<f64> = trials.iter().map(|t| t[idx]).collect();
            let mass = per_trial.iter().sum::<f64>() / per_trial.len().max(1) as f64;
            pairs.push(PairMass {
                alpha: a.clone(),
                beta: b.clone(),
                mass,
                per_trial,
            });
        }
    }
    Ok(AtomMeasurement {
        size: n,
        trials: cfg.trials,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn small_instance() {
        let cfg = RandomMatrixConfig {
            size: 60,
            trials: 2,
            ..Default::default()
        };
        let m = measure_atoms(
            &[q(2, 3), q(1, 3)],
            &[q(1, 2), q(1, 2)],
            &cfg,
            Execution::Sequential,
        )
        .unwrap();
        // 2/3 + 1/2 − 1 = 1/6
        assert!((m.mass_of(&q(2, 3), &q(1, 2)).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(m.mass_of(&q(1, 3), &q(1, 2)), Some(0.0));
        assert_eq!(m.atoms(cfg.threshold).len(), 2);
    }

    #[test]
    fn ranks_must_be_whole() {
        let cfg = RandomMatrixConfig {
            size: 7,
            trials: 1,
            ..Default::default()
        };
        assert!(measure_atoms(&[q(1, 2)], &[q(1, 1)], &cfg, Execution::Sequential).is_err());
    }
}
