//! Breadth-first layering of an index set by central-support overlap, and
//! the word metric that plays the same role when the index set is `Γ`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::GroupElement;

/// Symmetric relation on `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        Adjacency {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Every pair adjacent, as for a factor.
    pub fn complete(n: usize) -> Self {
        let mut a = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                a.connect(i, j);
            }
        }
        a
    }

    /// Index `i` adjacent to `i + 1` only.
    pub fn path(n: usize) -> Self {
        let mut a = Self::new(n);
        for i in 1..n {
            a.connect(i - 1, i);
        }
        a
    }

    /// Indices are adjacent when their central supports (sets of summand
    /// positions) intersect.
    pub fn from_supports(supports: &[BTreeSet<usize>]) -> Self {
        let mut a = Self::new(supports.len());
        for i in 0..supports.len() {
            for j in i + 1..supports.len() {
                if !supports[i].is_disjoint(&supports[j]) {
                    a.connect(i, j);
                }
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn connect(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n, "index out of range");
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adjacent(i, j))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub layers: Vec<Vec<usize>>,
}

impl Partition {
    pub fn layer_of(&self, i: usize) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(&i))
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

/// `I_0 = {o}`, `I_{n+1}` = unplaced indices adjacent to some earlier layer.
/// Within a layer indices keep ascending order.
pub fn connectivity_layers(adj: &Adjacency, o: usize) -> Result<Partition> {
    if o >= adj.len() {
        return Err(Error::InvalidScenario(format!(
            "distinguished index {o} outside 0..{}",
            adj.len()
        )));
    }
    let mut placed = vec![false; adj.len()];
    placed[o] = true;
    let mut layers = vec![vec![o]];
    loop {
        let next: Vec<usize> = (0..adj.len())
            .filter(|&j| !placed[j])
            .filter(|&j| layers.iter().flatten().any(|&i| adj.adjacent(i, j)))
            .collect();
        if next.is_empty() {
            break;
        }
        for &j in &next {
            placed[j] = true;
        }
        layers.push(next);
    }
    let missing: Vec<String> = (0..adj.len())
        .filter(|&j| !placed[j])
        .map(|j| j.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::DisconnectedIndex(missing));
    }
    Ok(Partition { layers })
}

/// Lexicographic (layer, position) order; positions as listed.
pub fn ordered_index(partition: &Partition) -> Vec<usize> {
    partition.layers.iter().flatten().copied().collect()
}

/// Layering of `Γ` from the identity where `γ ~ γ'` iff `γ'γ⁻¹` lies in a
/// fixed finite symmetric step set: the layer of `γ` is its word length.
/// Grown lazily, breadth first, up to a node budget.
#[derive(Clone, Debug)]
pub struct WordMetric {
    steps: Vec<GroupElement>,
    dist: BTreeMap<GroupElement, usize>,
    frontier: Vec<GroupElement>,
    depth: usize,
    budget: usize,
}

impl WordMetric {
    pub const DEFAULT_BUDGET: usize = 200_000;

    pub fn new(steps: impl IntoIterator<Item = GroupElement>) -> Self {
        Self::with_budget(steps, Self::DEFAULT_BUDGET)
    }

    pub fn with_budget(steps: impl IntoIterator<Item = GroupElement>, budget: usize) -> Self {
        let mut set = BTreeSet::new();
        for s in steps {
            if !s.is_identity() {
                set.insert(s.inverse());
                set.insert(s);
            }
        }
        let id = GroupElement::identity();
        WordMetric {
            steps: set.into_iter().collect(),
            dist: BTreeMap::from([(id.clone(), 0)]),
            frontier: vec![id],
            depth: 0,
            budget,
        }
    }

    fn expand(&mut self) -> bool {
        if self.frontier.is_empty() || self.dist.len() >= self.budget {
            return false;
        }
        self.depth += 1;
        let mut next = Vec::new();
        let mut queue: VecDeque<GroupElement> = std::mem::take(&mut self.frontier).into();
        while let Some(g) = queue.pop_front() {
            for s in &self.steps {
                let h = g.mul(s);
                if !self.dist.contains_key(&h) {
                    self.dist.insert(h.clone(), self.depth);
                    next.push(h);
                }
            }
        }
        self.frontier = next;
        true
    }

    /// Word length of `g`, or `None` when it is not reached within
    /// `max_depth` steps or the node budget.
    pub fn layer(&mut self, g: &GroupElement, max_depth: usize) -> Option<usize> {
        loop {
            if let Some(&d) = self.dist.get(g) {
                return Some(d);
            }
            if self.depth >= max_depth || !self.expand() {
                return None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn factor_layers() {
        let p = connectivity_layers(&Adjacency::complete(3), 0).unwrap();
        assert_eq!(p.layers, vec![vec![0], vec![1, 2]]);
        assert_eq!(ordered_index(&p), vec![0, 1, 2]);
    }

    #[test]
    fn chain_layers() {
        let p = connectivity_layers(&Adjacency::path(3), 0).unwrap();
        assert_eq!(p.layers, vec![vec![0], vec![1], vec![2]]);
        let mid = connectivity_layers(&Adjacency::path(3), 1).unwrap();
        assert_eq!(mid.layers, vec![vec![1], vec![0, 2]]);
    }

    #[test]
    fn isolated_index() {
        let mut a = Adjacency::new(3);
        a.connect(0, 1);
        assert_eq!(
            connectivity_layers(&a, 0),
            Err(Error::DisconnectedIndex(vec!["2".into()]))
        );
    }

    #[test]
    fn positional_order() {
        let p = Partition {
            layers: vec![vec![1], vec![3, 2]],
        };
        assert_eq!(ordered_index(&p), vec![1, 3, 2]);
        let single = Partition {
            layers: vec![vec![0]],
        };
        assert_eq!(ordered_index(&single), vec![0]);
    }

    #[test]
    fn supports_overlap() {
        let s = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        let a = Adjacency::from_supports(&[s(&[0]), s(&[0, 1]), s(&[1]), s(&[2])]);
        assert!(a.adjacent(0, 1) && a.adjacent(1, 2) && !a.adjacent(0, 2));
        assert!(matches!(
            connectivity_layers(&a, 0),
            Err(Error::DisconnectedIndex(_))
        ));
    }

    #[test]
    fn word_lengths() {
        let x = GroupElement::from_rational(&q(1, 2)).unwrap();
        let mut m = WordMetric::new([x.clone(), x.pow(3)]);
        let layers: Vec<usize> = (0..6).map(|k| m.layer(&x.pow(k), 10).unwrap()).collect();
        assert_eq!(layers, vec![0, 1, 2, 1, 2, 3]);
        let three = GroupElement::from_rational(&q(3, 1)).unwrap();
        assert_eq!(m.layer(&three, 5), None);
    }
}
