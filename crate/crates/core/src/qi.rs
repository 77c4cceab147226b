//! Quasi-isometric embeddings into `ℤ` and largeness of their domains.
//!
//! A certificate claims, for all `u, v` in the domain `S`,
//!
//! ```text
//! |c(u) - c(v)| / λ - C  <=  d(u, v)  <=  λ |c(u) - c(v)| + C
//! ```
//!
//! and `d(w, S) <= D` for every vertex `w`. All checks are exact integer
//! arithmetic on the reduced fraction `λ`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{PathMetric, Vertex};
use crate::hyperspace::hausdorff_slices;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsometryCert {
    pub coord: BTreeMap<Vertex, i64>,
    pub lambda: Ratio<i64>,
    pub c: u64,
    pub d: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QiVerdict {
    Valid,
    /// `λ < 1` or a non-positive denominator.
    InvalidLambda,
    /// A domain pair breaking one of the distance inequalities.
    PairFailure { u: Vertex, v: Vertex },
    /// A vertex farther than `D` from the domain.
    Uncovered { w: Vertex },
}

impl QiVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, QiVerdict::Valid)
    }
}

/// Whether `(u, v)` satisfies both inequalities.
fn pair_ok(lambda: Ratio<i64>, c: u64, delta: u64, dist: u64) -> bool {
    let (num, den) = (*lambda.numer() as i128, *lambda.denom() as i128);
    let (delta, dist, c) = (delta as i128, dist as i128, c as i128);
    // delta * den / num - c <= dist   and   dist <= num * delta / den + c
    delta * den <= num * (dist + c) && den * (dist - c) <= num * delta
}

/// Checks every inequality; reports the first failing pair (domain order)
/// before any uncovered vertex.
pub fn verify_qi(m: &PathMetric, cert: &QuasiIsometryCert) -> QiVerdict {
    assert!(!cert.coord.is_empty(), "certificate domain must be nonempty");
    if cert.lambda < Ratio::one() || *cert.lambda.denom() <= 0 {
        return QiVerdict::InvalidLambda;
    }
    let domain: Vec<(Vertex, i64)> = cert.coord.iter().map(|(&v, &c)| (v, c)).collect();
    for (i, &(u, cu)) in domain.iter().enumerate() {
        let row = m.row(u);
        for &(v, cv) in &domain[i + 1..] {
            if !pair_ok(cert.lambda, cert.c, cu.abs_diff(cv), row[v] as u64) {
                return QiVerdict::PairFailure { u, v };
            }
        }
    }
    let vertices: Vec<Vertex> = cert.coord.keys().copied().collect();
    let dist = m.graph().bfs_from_set(&vertices);
    match dist.iter().position(|&x| x as u64 > cert.d) {
        Some(w) => QiVerdict::Uncovered { w },
        None => QiVerdict::Valid,
    }
}

/// Smallest certificate for `coord` at a fixed stretch.
///
/// `λ` is the largest Hausdorff distance between the level sets of
/// consecutive coordinate values, per unit of coordinate (at least 1). `C`
/// is then the least integer making both inequalities hold, and `D` the
/// exact covering radius of the domain.
pub fn tighten(m: &PathMetric, coord: &BTreeMap<Vertex, i64>) -> QuasiIsometryCert {
    assert!(!coord.is_empty(), "coordinate domain must be nonempty");
    let mut levels: BTreeMap<i64, Vec<Vertex>> = BTreeMap::new();
    for (&v, &c) in coord {
        levels.entry(c).or_default().push(v);
    }
    let mut lambda = Ratio::one();
    let keys: Vec<i64> = levels.keys().copied().collect();
    for w in keys.windows(2) {
        let h = hausdorff_slices(m, &levels[&w[0]], &levels[&w[1]]);
        let stretch = Ratio::new(h as i64, w[1] - w[0]);
        if stretch > lambda {
            lambda = stretch;
        }
    }

    let lam_inv = lambda.recip();
    let mut c_needed: Ratio<i64> = Ratio::zero();
    let domain: Vec<(Vertex, i64)> = coord.iter().map(|(&v, &c)| (v, c)).collect();
    for (i, &(u, cu)) in domain.iter().enumerate() {
        let row = m.row(u);
        for &(v, cv) in &domain[i + 1..] {
            let delta = Ratio::from_integer(cu.abs_diff(cv) as i64);
            let dist = Ratio::from_integer(row[v] as i64);
            let upper = dist - lambda * delta;
            let lower = delta * lam_inv - dist;
            c_needed = c_needed.max(upper).max(lower);
        }
    }
    let c = c_needed.ceil().to_integer().to_u64().expect("nonnegative");

    let vertices: Vec<Vertex> = coord.keys().copied().collect();
    let d = m.graph().bfs_from_set(&vertices).into_iter().max().unwrap_or(0) as u64;
    QuasiIsometryCert { coord: coord.clone(), lambda, c, d }
}
