//! Hausdorff metric on finite vertex sets and the `exp E` membership test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{PathMetric, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperspaceError {
    #[error("subset must be nonempty")]
    EmptySet,
    #[error("pair needs two distinct vertices, got {0} twice")]
    DegeneratePair(Vertex),
}

/// An element `{a, b}` of `[V]^2`, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexPair {
    a: Vertex,
    b: Vertex,
}

impl VertexPair {
    pub fn new(x: Vertex, y: Vertex) -> Result<Self, HyperspaceError> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(VertexPair { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(VertexPair { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(HyperspaceError::DegeneratePair(x)),
        }
    }

    /// Panics when `x == y`.
    pub fn of(x: Vertex, y: Vertex) -> Self {
        Self::new(x, y).expect("distinct vertices")
    }

    pub fn low(self) -> Vertex {
        self.a
    }

    pub fn high(self) -> Vertex {
        self.b
    }

    pub fn elements(self) -> [Vertex; 2] {
        [self.a, self.b]
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    /// The element that is not `v`. Panics if `v` is not a member.
    pub fn other(self, v: Vertex) -> Vertex {
        if v == self.a {
            self.b
        } else {
            assert_eq!(v, self.b, "vertex not in pair");
            self.a
        }
    }

    /// Position of this pair in the colexicographic enumeration of `[V]^2`:
    /// `{0,1}, {0,2}, {1,2}, {0,3}, ...`.
    pub fn index(self) -> usize {
        self.b * (self.b - 1) / 2 + self.a
    }

    pub fn from_index(index: usize) -> Self {
        // Largest b with b(b-1)/2 <= index.
        let mut b = (((8 * index + 1) as f64).sqrt() as usize + 1) / 2;
        while b * (b - 1) / 2 > index {
            b -= 1;
        }
        while (b + 1) * b / 2 <= index {
            b += 1;
        }
        VertexPair { a: index - b * (b - 1) / 2, b }
    }

    /// All of `[V]^2` for `n` vertices, in index order.
    pub fn all(n: usize) -> impl Iterator<Item = VertexPair> {
        (1..n).flat_map(|b| (0..b).map(move |a| VertexPair { a, b }))
    }

    pub fn count(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }
}

/// A nonempty finite vertex set, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FiniteSubset(Vec<Vertex>);

impl FiniteSubset {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self, HyperspaceError> {
        if vertices.is_empty() {
            return Err(HyperspaceError::EmptySet);
        }
        vertices.sort_unstable();
        vertices.dedup();
        Ok(FiniteSubset(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl From<VertexPair> for FiniteSubset {
    fn from(p: VertexPair) -> Self {
        FiniteSubset(vec![p.a, p.b])
    }
}

/// `d_H` on nonempty slices. Both inputs must be nonempty.
pub(crate) fn hausdorff_slices(m: &PathMetric, a: &[Vertex], b: &[Vertex]) -> u32 {
    let one_sided = |x: &[Vertex], y: &[Vertex]| {
        x.iter().map(|&p| m.distance_to_set(p, y)).max().unwrap_or(0)
    };
    one_sided(a, b).max(one_sided(b, a))
}

pub fn hausdorff_distance(m: &PathMetric, a: &FiniteSubset, b: &FiniteSubset) -> u32 {
    hausdorff_slices(m, a.vertices(), b.vertices())
}

/// Slice form of [`hausdorff_distance`] that rejects empty inputs.
pub fn try_hausdorff(m: &PathMetric, a: &[Vertex], b: &[Vertex]) -> Result<u32, HyperspaceError> {
    if a.is_empty() || b.is_empty() {
        return Err(HyperspaceError::EmptySet);
    }
    Ok(hausdorff_slices(m, a, b))
}

pub fn pair_hausdorff(m: &PathMetric, p: VertexPair, q: VertexPair) -> u32 {
    hausdorff_slices(m, &p.elements(), &q.elements())
}

/// `(A, B) ∈ exp E_radius`: `A ⊆ E[B]` and `B ⊆ E[A]`.
pub fn exp_contains(m: &PathMetric, a: &FiniteSubset, b: &FiniteSubset, radius: u32) -> bool {
    let within = |x: &[Vertex], y: &[Vertex]| x.iter().all(|&p| m.distance_to_set(p, y) <= radius);
    within(a.vertices(), b.vertices()) && within(b.vertices(), a.vertices())
}

/// All pairs `B` with `d_H(P, B) <= 1`, including `P`, ascending.
///
/// Any such `B` has both elements in `N[a] ∪ N[b]`, so candidates are drawn
/// from that union and filtered.
pub fn pair_neighbors(m: &PathMetric, p: VertexPair) -> Vec<VertexPair> {
    let g = m.graph();
    let mut pool: Vec<Vertex> = Vec::with_capacity(g.neighbors(p.a).len() + g.neighbors(p.b).len() + 2);
    pool.push(p.a);
    pool.push(p.b);
    pool.extend_from_slice(g.neighbors(p.a));
    pool.extend_from_slice(g.neighbors(p.b));
    pool.sort_unstable();
    pool.dedup();
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for &y in &pool[i + 1..] {
            let q = VertexPair { a: x, b: y };
            if pair_hausdorff(m, p, q) <= 1 {
                out.push(q);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn set(v: &[Vertex]) -> FiniteSubset {
        FiniteSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pair_index_roundtrip() {
        for (i, p) in VertexPair::all(40).enumerate() {
            assert_eq!(p.index(), i);
            assert_eq!(VertexPair::from_index(i), p);
        }
        assert_eq!(VertexPair::count(40), 780);
        assert!(VertexPair::new(3, 3).is_err());
        assert_eq!(VertexPair::of(5, 2).elements(), [2, 5]);
    }

    #[test]
    fn hausdorff_on_p4() {
        let m = PathMetric::new(generators::path(4));
        assert_eq!(hausdorff_distance(&m, &set(&[0, 1]), &set(&[0, 1])), 0);
        assert_eq!(hausdorff_distance(&m, &set(&[0, 1]), &set(&[2, 3])), 2);
        assert_eq!(hausdorff_distance(&m, &set(&[0, 2]), &set(&[1, 3])), 1);
    }

    #[test]
    fn empty_set_rejected() {
        let m = PathMetric::new(generators::path(4));
        assert_eq!(FiniteSubset::new(vec![]), Err(HyperspaceError::EmptySet));
        assert_eq!(try_hausdorff(&m, &[], &[1]), Err(HyperspaceError::EmptySet));
    }

    #[test]
    fn exp_membership_on_p4() {
        let m = PathMetric::new(generators::path(4));
        let (a, b) = (set(&[0, 1]), set(&[2, 3]));
        assert!(exp_contains(&m, &a, &a, 0));
        assert!(!exp_contains(&m, &a, &b, 1));
        assert!(exp_contains(&m, &a, &b, 2));
    }

    #[test]
    fn neighbors_on_p4_match_exhaustive_scan() {
        let m = PathMetric::new(generators::path(4));
        let p = VertexPair::of(0, 2);
        let brute: Vec<_> = VertexPair::all(4).filter(|&q| pair_hausdorff(&m, p, q) <= 1).collect();
        let expected = vec![
            VertexPair::of(0, 1),
            VertexPair::of(0, 2),
            VertexPair::of(1, 2),
            VertexPair::of(0, 3),
            VertexPair::of(1, 3),
        ];
        assert_eq!(brute, expected);
        let mut got = pair_neighbors(&m, p);
        got.sort_by_key(|q| q.index());
        assert_eq!(got, expected);
    }

    #[test]
    fn neighbors_on_p2_and_grid() {
        let m = PathMetric::new(generators::path(2));
        assert_eq!(pair_neighbors(&m, VertexPair::of(0, 1)), vec![VertexPair::of(0, 1)]);

        let m = PathMetric::new(generators::grid(3, 3));
        let id = |i, j| generators::grid_id(3, i, j);
        let p = VertexPair::of(id(0, 0), id(2, 2));
        let q = VertexPair::of(id(0, 0), id(0, 1));
        assert_eq!(pair_hausdorff(&m, p, q), 3);
        assert!(!pair_neighbors(&m, p).contains(&q));
    }

    #[test]
    fn neighbors_complete_on_grid() {
        let m = PathMetric::new(generators::grid(4, 3));
        for p in VertexPair::all(12) {
            let brute: Vec<_> = VertexPair::all(12).filter(|&q| pair_hausdorff(&m, p, q) <= 1).collect();
            let mut got = pair_neighbors(&m, p);
            got.sort_by_key(|q| q.index());
            assert_eq!(got, brute, "pair {p:?}");
        }
    }
}
