//! Linear orders compatible with the metric coarse structure, and interval
//! entourages, decided exactly per radius.
//!
//! For radius `e`, the compatibility condition at `g` asks that whenever
//! `x < y` and `d(x, y) > g`, every `x'` with `d(x, x') <= e` still has
//! `x' < y` (and the mirrored statement for `y < x`). A pair `(x, y)` is
//! *bad* if some such `x'` crosses `y`; the condition holds at `g` exactly
//! when every bad pair has `d(x, y) <= g`, so it is monotone in `g`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{PathMetric, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("order lists {listed} vertices, graph has {expected}")]
    WrongLength { listed: usize, expected: usize },
    #[error("vertex {0} listed twice")]
    Repeated(Vertex),
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
}

/// A linear order on `0..n`, stored as a rank bijection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearOrder {
    rank: Vec<usize>,
    by_rank: Vec<Vertex>,
}

impl LinearOrder {
    pub fn natural(n: usize) -> Self {
        LinearOrder { rank: (0..n).collect(), by_rank: (0..n).collect() }
    }

    /// `sequence[i]` receives rank `i`.
    pub fn from_sequence(sequence: &[Vertex], n: usize) -> Result<Self, OrderError> {
        if sequence.len() != n {
            return Err(OrderError::WrongLength { listed: sequence.len(), expected: n });
        }
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v >= n {
                return Err(OrderError::OutOfRange(v));
            }
            if rank[v] != usize::MAX {
                return Err(OrderError::Repeated(v));
            }
            rank[v] = i;
        }
        Ok(LinearOrder { rank, by_rank: sequence.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, v: Vertex) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn vertex_at(&self, rank: usize) -> Vertex {
        self.by_rank[rank]
    }

    pub fn less(&self, a: Vertex, b: Vertex) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// A triple breaking compatibility: `x` and `y` are far apart, yet `x_prime`
/// (within `e` of `x`) lies on the other side of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub x: Vertex,
    pub x_prime: Vertex,
    pub y: Vertex,
    pub distance: u32,
}

impl Violation {
    pub fn reverify(&self, m: &PathMetric, order: &LinearOrder, e: u32, g: u32) -> bool {
        let crosses = if order.less(self.x, self.y) {
            !order.less(self.x_prime, self.y)
        } else {
            !order.less(self.y, self.x_prime)
        };
        self.x != self.y
            && m.distance(self.x, self.y) > g
            && m.distance(self.x, self.x_prime) <= e
            && crosses
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompatResult {
    MinimalG(u32),
    NotFound(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub e: u32,
    pub result: CompatResult,
    /// Violations at `g = cap` when nothing in `[e, cap]` works; otherwise
    /// empty.
    pub violations: Vec<Violation>,
}

struct BallExtremes {
    max_rank: Vec<(usize, Vertex)>,
    min_rank: Vec<(usize, Vertex)>,
}

fn ball_extremes(m: &PathMetric, order: &LinearOrder, e: u32) -> BallExtremes {
    let n = m.vertex_count();
    let mut max_rank = Vec::with_capacity(n);
    let mut min_rank = Vec::with_capacity(n);
    for x in 0..n {
        let ball = m.ball(x, e);
        let hi = ball.iter().map(|&v| (order.rank(v), v)).max().expect("ball contains x");
        let lo = ball.iter().map(|&v| (order.rank(v), v)).min().expect("ball contains x");
        max_rank.push(hi);
        min_rank.push(lo);
    }
    BallExtremes { max_rank, min_rank }
}

/// `x'` witnessing that `(x, y)` is bad, if any.
fn crossing(ext: &BallExtremes, order: &LinearOrder, x: Vertex, y: Vertex) -> Option<Vertex> {
    let ry = order.rank(y);
    if order.rank(x) < ry {
        let (hi, v) = ext.max_rank[x];
        (hi >= ry).then_some(v)
    } else {
        let (lo, v) = ext.min_rank[x];
        (lo <= ry).then_some(v)
    }
}

/// All violations of the condition at `g`, ordered by `(x, y)`.
pub fn violations_at(m: &PathMetric, order: &LinearOrder, e: u32, g: u32) -> Vec<Violation> {
    let ext = ball_extremes(m, order, e);
    let n = m.vertex_count();
    let mut out = Vec::new();
    for x in 0..n {
        let row = m.row(x);
        for y in 0..n {
            if x == y || row[y] <= g {
                continue;
            }
            if let Some(x_prime) = crossing(&ext, order, x, y) {
                out.push(Violation { x, x_prime, y, distance: row[y] });
            }
        }
    }
    out
}

/// Every `x'` within `e` of `x` that crosses `y`, for inspecting one pair.
pub fn crossing_points(m: &PathMetric, order: &LinearOrder, e: u32, x: Vertex, y: Vertex) -> Vec<Vertex> {
    m.ball(x, e)
        .into_iter()
        .filter(|&xp| {
            if order.less(x, y) {
                !order.less(xp, y)
            } else {
                !order.less(y, xp)
            }
        })
        .collect()
}

/// Smallest `g` in `[e, cap]` for which the compatibility condition holds.
pub fn min_compat_radius(m: &PathMetric, order: &LinearOrder, e: u32, cap: u32) -> CompatibilityReport {
    assert!(cap >= e, "cap must be at least e");
    let ext = ball_extremes(m, order, e);
    let n = m.vertex_count();
    let mut worst = 0;
    for x in 0..n {
        let row = m.row(x);
        for y in 0..n {
            if x != y && row[y] > worst && crossing(&ext, order, x, y).is_some() {
                worst = row[y];
            }
        }
    }
    let g = worst.max(e);
    if g <= cap {
        CompatibilityReport { e, result: CompatResult::MinimalG(g), violations: Vec::new() }
    } else {
        CompatibilityReport {
            e,
            result: CompatResult::NotFound(cap),
            violations: violations_at(m, order, e, cap),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalCheck {
    Interval,
    Counterexample { x: Vertex, gap: Vertex },
}

/// Lowest-rank vertex in the order-interval spanned by `B(x, e)` that is not
/// in the ball.
pub fn interval_gap(m: &PathMetric, order: &LinearOrder, e: u32, x: Vertex) -> Option<Vertex> {
    let row = m.row(x);
    let ball = m.ball(x, e);
    let lo = ball.iter().map(|&v| order.rank(v)).min()?;
    let hi = ball.iter().map(|&v| order.rank(v)).max()?;
    if hi - lo + 1 == ball.len() {
        return None;
    }
    (lo..=hi).map(|k| order.vertex_at(k)).find(|&v| row[v] > e)
}

/// Whether every ball of radius `e` is an order-interval. The counterexample
/// is the first offending `x` by id.
pub fn is_interval_entourage(m: &PathMetric, order: &LinearOrder, e: u32) -> IntervalCheck {
    for x in 0..m.vertex_count() {
        if let Some(gap) = interval_gap(m, order, e, x) {
            return IntervalCheck::Counterexample { x, gap };
        }
    }
    IntervalCheck::Interval
}
