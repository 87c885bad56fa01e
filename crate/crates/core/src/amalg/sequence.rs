//! Forward scan for exponents `m_1 < m_2 < …` with `γ*^{m_k−1} ≺ γ*^{m_k}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of `γ*^m`, `m = 0, 1, …`, in a layered total order, as
/// `(layer, position within layer)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOrder {
    keys: Vec<(usize, usize)>,
}

impl PowerOrder {
    /// Keys must be distinct and layer-compatible: two powers in one layer
    /// are ordered by exponent.
    pub fn new(keys: Vec<(usize, usize)>) -> Result<Self> {
        for (a, ka) in keys.iter().enumerate() {
            for (b, kb) in keys.iter().enumerate().skip(a + 1) {
                if ka == kb {
                    return Err(Error::InvalidScenario(format!(
                        "powers {a} and {b} share the key {ka:?}"
                    )));
                }
                if ka.0 == kb.0 && ka.1 > kb.1 {
                    return Err(Error::InvalidScenario(format!(
                        "powers {a} < {b} in layer {} are ordered against their exponents",
                        ka.0
                    )));
                }
            }
        }
        Ok(PowerOrder { keys })
    }

    /// Positions within each layer follow the exponent.
    pub fn from_layers(layers: &[usize]) -> Self {
        let mut seen = std::collections::BTreeMap::<usize, usize>::new();
        let keys = layers
            .iter()
            .map(|&l| {
                let pos = seen.entry(l).or_default();
                *pos += 1;
                (l, *pos - 1)
            })
            .collect();
        PowerOrder { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn layer(&self, m: usize) -> usize {
        self.keys[m].0
    }

    /// `γ*^a ≺ γ*^b`
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.keys[a] < self.keys[b]
    }
}

/// `m_1 = 1`; from `m_k` scan `m_k + 1, m_k + 2, …` for the first `m` with
/// `γ*^{m−1} ≺ γ*^m`. Stops after `count` terms or when the known powers
/// run out.
pub fn choose_increasing_sequence(order: &PowerOrder, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    if count == 0 || order.len() < 2 {
        return out;
    }
    out.push(1);
    let mut m = 1;
    while out.len() < count {
        let next = (m + 1..order.len()).find(|&n| order.precedes(n - 1, n));
        match next {
            Some(n) => {
                out.push(n);
                m = n;
            }
            None => break,
        }
    }
    out
}
