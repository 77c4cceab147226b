//! 2-selectors on `[V]^2`, their macro-uniformity modulus, and the explicit
//! selector constructions (coordinate minimum, order minimum, bornologous lift).

use std::collections::HashMap;
use std::sync::Arc;

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{PathMetric, Vertex};
use crate::hyperspace::{pair_hausdorff, pair_neighbors, FiniteSubset, VertexPair};
use crate::order::LinearOrder;

/// Largest `[V]^2` size a selector may be materialized as a bit table.
pub const DEFAULT_PAIR_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectorError {
    #[error("coordinate is not injective: vertices {0} and {1} share a value")]
    NonInjectiveCoordinate(Vertex, Vertex),
    #[error("choice {choice} is not an element of pair {pair:?}")]
    NotAMember { pair: VertexPair, choice: Vertex },
    #[error("no choice given for pair {0:?}")]
    MissingPair(VertexPair),
    #[error("{pairs} pairs exceed the table cap of {cap}")]
    TooManyPairs { pairs: usize, cap: usize },
}

/// A choice function on `[V]^2` with `f(A) ∈ A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoSelector {
    /// One bit per pair (indexed by [`VertexPair::index`]); set means the
    /// lower id is chosen.
    Table { vertex_count: usize, low_wins: BitVec },
    /// The element with the smaller key is chosen. Keys are injective.
    Ranked { keys: Arc<[i64]> },
}

impl TwoSelector {
    pub fn vertex_count(&self) -> usize {
        match self {
            TwoSelector::Table { vertex_count, .. } => *vertex_count,
            TwoSelector::Ranked { keys } => keys.len(),
        }
    }

    /// `f(pair)`.
    pub fn choose(&self, pair: VertexPair) -> Vertex {
        match self {
            TwoSelector::Table { low_wins, .. } => {
                if low_wins[pair.index()] {
                    pair.low()
                } else {
                    pair.high()
                }
            }
            TwoSelector::Ranked { keys } => {
                if keys[pair.low()] < keys[pair.high()] {
                    pair.low()
                } else {
                    pair.high()
                }
            }
        }
    }

    /// `a ≺ b`: `a != b` and `f({a, b}) = a`.
    pub fn precedes(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.choose(VertexPair::of(a, b)) == a
    }

    /// Builds a table selector from an arbitrary choice function.
    pub fn from_fn(
        vertex_count: usize,
        mut choice: impl FnMut(VertexPair) -> Vertex,
    ) -> Result<Self, SelectorError> {
        let pairs = VertexPair::count(vertex_count);
        if pairs > DEFAULT_PAIR_CAP {
            return Err(SelectorError::TooManyPairs { pairs, cap: DEFAULT_PAIR_CAP });
        }
        let mut low_wins = bitvec![0; pairs];
        for p in VertexPair::all(vertex_count) {
            let c = choice(p);
            if !p.contains(c) {
                return Err(SelectorError::NotAMember { pair: p, choice: c });
            }
            low_wins.set(p.index(), c == p.low());
        }
        Ok(TwoSelector::Table { vertex_count, low_wins })
    }

    /// Builds a table selector from explicit choices; every pair must appear.
    pub fn from_choices(
        vertex_count: usize,
        choices: &HashMap<VertexPair, Vertex>,
    ) -> Result<Self, SelectorError> {
        for p in VertexPair::all(vertex_count) {
            if !choices.contains_key(&p) {
                return Err(SelectorError::MissingPair(p));
            }
        }
        Self::from_fn(vertex_count, |p| choices[&p])
    }

    /// Extensional copy of this selector.
    pub fn to_table(&self) -> Result<Self, SelectorError> {
        match self {
            TwoSelector::Table { .. } => Ok(self.clone()),
            TwoSelector::Ranked { .. } => Self::from_fn(self.vertex_count(), |p| self.choose(p)),
        }
    }

    /// Swaps the choice on one pair (converting to table form).
    pub fn flip(&mut self, pair: VertexPair) {
        if let TwoSelector::Ranked { .. } = self {
            *self = self.to_table().expect("pair count within cap");
        }
        if let TwoSelector::Table { low_wins, .. } = self {
            let i = pair.index();
            let cur = low_wins[i];
            low_wins.set(i, !cur);
        }
    }
}

/// A pair of pairs with `d_H(A, B) <= 1` whose images are more than `r` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: VertexPair,
    pub b: VertexPair,
    pub hausdorff: u32,
    pub image_distance: u32,
}

impl Witness {
    /// Returns a witness only if `(a, b)` really violates modulus `r`.
    pub fn checked(
        m: &PathMetric,
        f: &TwoSelector,
        r: u32,
        a: VertexPair,
        b: VertexPair,
    ) -> Option<Witness> {
        let hausdorff = pair_hausdorff(m, a, b);
        let image_distance = m.distance(f.choose(a), f.choose(b));
        (hausdorff <= 1 && image_distance > r).then_some(Witness { a, b, hausdorff, image_distance })
    }

    /// Recomputes everything from scratch.
    pub fn reverify(&self, m: &PathMetric, f: &TwoSelector, r: u32) -> bool {
        Witness::checked(m, f, r, self.a, self.b).is_some()
    }
}

/// Least `r` with `d_H(A, B) <= 1 ⇒ d(f(A), f(B)) <= r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus {
    pub r: u32,
    /// A pair of pairs attaining `r`; absent only when `[V]^2` has fewer
    /// than two elements.
    pub attaining: Option<(VertexPair, VertexPair)>,
}

pub fn modulus(m: &PathMetric, f: &TwoSelector) -> Modulus {
    let n = m.vertex_count();
    let best = (0..VertexPair::count(n))
        .into_par_iter()
        .filter_map(|i| {
            let p = VertexPair::from_index(i);
            let fp = f.choose(p);
            pair_neighbors(m, p)
                .into_iter()
                .filter(|&q| q != p)
                .map(|q| (m.distance(fp, f.choose(q)), p, q))
                .max_by(|x, y| x.0.cmp(&y.0).then(y.2.index().cmp(&x.2.index())))
        })
        .max_by(|x, y| {
            x.0.cmp(&y.0)
                .then(y.1.index().cmp(&x.1.index()))
                .then(y.2.index().cmp(&x.2.index()))
        });
    match best {
        Some((r, p, q)) => Modulus { r, attaining: Some((p, q)) },
        None => Modulus { r: 0, attaining: None },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Holds,
    Witness(Witness),
}

impl Verification {
    pub fn holds(&self) -> bool {
        matches!(self, Verification::Holds)
    }
}

/// Checks the modulus-`r` bound on every `d_H <= 1` neighbour pair. The
/// reported witness is the first violation in pair-index order.
pub fn verify_selector(m: &PathMetric, f: &TwoSelector, r: u32) -> Verification {
    let n = m.vertex_count();
    let found = (0..VertexPair::count(n)).into_par_iter().find_map_first(|i| {
        let p = VertexPair::from_index(i);
        let mut ns = pair_neighbors(m, p);
        ns.sort_unstable_by_key(|q| q.index());
        ns.into_iter().find_map(|q| Witness::checked(m, f, r, p, q))
    });
    match found {
        Some(w) => Verification::Witness(w),
        None => Verification::Holds,
    }
}

fn check_injective(coord: &[i64]) -> Result<(), SelectorError> {
    let mut seen: HashMap<i64, Vertex> = HashMap::with_capacity(coord.len());
    for (v, &c) in coord.iter().enumerate() {
        if let Some(&u) = seen.get(&c) {
            return Err(SelectorError::NonInjectiveCoordinate(u, v));
        }
        seen.insert(c, v);
    }
    Ok(())
}

/// `f({a, b})` = the element with the smaller coordinate.
pub fn min_selector(coord: &[i64]) -> Result<TwoSelector, SelectorError> {
    check_injective(coord)?;
    Ok(TwoSelector::Ranked { keys: coord.into() })
}

/// Minimum by vertex id; on grids built by [`crate::generators::grid`] this
/// is the lexicographic minimum.
pub fn id_min_selector(vertex_count: usize) -> TwoSelector {
    let keys: Vec<i64> = (0..vertex_count as i64).collect();
    TwoSelector::Ranked { keys: keys.into() }
}

/// `f({a, b})` = the order-minimum of `a, b`.
pub fn order_to_selector(order: &LinearOrder) -> TwoSelector {
    let keys: Vec<i64> = order.ranks().iter().map(|&r| r as i64).collect();
    TwoSelector::Ranked { keys: keys.into() }
}

/// A choice function on all finite nonempty subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BornologousSelector {
    keys: Arc<[i64]>,
}

impl BornologousSelector {
    pub fn choose(&self, set: &FiniteSubset) -> Vertex {
        *set.vertices()
            .iter()
            .min_by_key(|&&v| self.keys[v])
            .expect("subsets are nonempty")
    }

    /// The restriction to `[V]^2`.
    pub fn restrict_to_pairs(&self) -> TwoSelector {
        TwoSelector::Ranked { keys: self.keys.clone() }
    }
}

/// Coordinate-minimum on every finite subset.
pub fn lift_bornologous(coord: &[i64]) -> Result<BornologousSelector, SelectorError> {
    check_injective(coord)?;
    Ok(BornologousSelector { keys: coord.into() })
}
