//! Instance checks for the three propagation lemmas behind line extraction.
//!
//! All three rest on one mechanism: fix a vertex `w` and slide the other
//! element of `{w, u}` along a walk that stays outside `B(w, r)`. Consecutive
//! pairs are at Hausdorff distance `<= 1`, so if the choice flips between
//! them the two images (`w` and a walk vertex) are more than `r` apart and
//! the pair of pairs is a [`Witness`] against modulus `r`.

use serde::{Deserialize, Serialize};

use crate::graph::{PathMetric, Vertex};
use crate::hyperspace::VertexPair;
use crate::selector::{TwoSelector, Witness};

/// Outcome of sliding one element of a pair along a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Propagation {
    /// The fixed vertex wins (or loses) at every step.
    Constant,
    Flip(Witness),
    /// The walk touches `B(fixed, r)`; nothing can be concluded.
    EntersBall(Vertex),
}

/// Slides `u` along `walk` in `{fixed, u}`. Consecutive walk vertices must be
/// equal or adjacent.
pub(crate) fn propagate(
    m: &PathMetric,
    f: &TwoSelector,
    r: u32,
    fixed: Vertex,
    walk: &[Vertex],
) -> Propagation {
    let row = m.row(fixed);
    if let Some(&u) = walk.iter().find(|&&u| row[u] <= r) {
        return Propagation::EntersBall(u);
    }
    for w in walk.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = VertexPair::of(fixed, w[0]);
        let q = VertexPair::of(fixed, w[1]);
        if (f.choose(p) == fixed) != (f.choose(q) == fixed) {
            let witness = Witness::checked(m, f, r, p, q)
                .expect("flip outside B(fixed, r) between adjacent pairs violates modulus r");
            return Propagation::Flip(witness);
        }
    }
    Propagation::Constant
}

/// Why a configuration does not meet a lemma's hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unmet {
    /// `d(z_i, z_{i+1}) > p`.
    StepTooLong { index: usize, distance: u32 },
    /// `d(a, b) > p` in the single-step lemma.
    EndpointsTooFar { distance: u32 },
    /// A vertex that must avoid `B(center, radius)` does not.
    InsideBall { center: Vertex, radius: u32, vertex: Vertex },
    /// The starting relation `a ≺ v` is false.
    StartNotPreceding { a: Vertex, v: Vertex },
    /// Far-end separation fails: `d(end, z_index) <= p + r`.
    EndsTooClose { end: Vertex, index: usize },
    /// Supplied geodesic does not run from `v` to the nearest sequence vertex.
    BadGeodesic,
    EmptySequence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimOutcome {
    Holds,
    Witness(Witness),
    HypothesisUnmet(Unmet),
}

/// A probe vertex `v`, a sequence `z_0..z_m` with steps `<= p`, a modulus
/// `r`, and optionally a geodesic from `v` to the nearest `z_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimConfig {
    pub v: Vertex,
    pub z: Vec<Vertex>,
    pub p: u32,
    pub r: u32,
    pub geodesic: Option<Vec<Vertex>>,
}

/// Lowest index `j` minimizing `d(v, z_j)`.
pub fn nearest_index(m: &PathMetric, v: Vertex, z: &[Vertex]) -> Option<usize> {
    let row = m.row(v);
    z.iter()
        .enumerate()
        .min_by_key(|&(i, &u)| (row[u], i))
        .map(|(i, _)| i)
}

fn check_steps(m: &PathMetric, z: &[Vertex], p: u32) -> Result<(), Unmet> {
    for (i, w) in z.windows(2).enumerate() {
        let d = m.distance(w[0], w[1]);
        if d > p {
            return Err(Unmet::StepTooLong { index: i, distance: d });
        }
    }
    Ok(())
}

fn avoid_ball(m: &PathMetric, center: Vertex, radius: u32, vertices: &[Vertex]) -> Result<(), Unmet> {
    let row = m.row(center);
    match vertices.iter().find(|&&u| row[u] <= radius) {
        Some(&vertex) => Err(Unmet::InsideBall { center, radius, vertex }),
        None => Ok(()),
    }
}

/// If `a ≺ v`, `d(a, b) <= p` and `a, b` lie outside `B(v, p + r)`, then
/// `b ≺ v`; checked by walking a geodesic from `a` to `b`.
pub fn claim1_propagate(
    m: &PathMetric,
    f: &TwoSelector,
    r: u32,
    v: Vertex,
    a: Vertex,
    b: Vertex,
    p: u32,
) -> ClaimOutcome {
    if a == b {
        return ClaimOutcome::Holds;
    }
    let d = m.distance(a, b);
    if d > p {
        return ClaimOutcome::HypothesisUnmet(Unmet::EndpointsTooFar { distance: d });
    }
    if let Err(u) = avoid_ball(m, v, p + r, &[a, b]) {
        return ClaimOutcome::HypothesisUnmet(u);
    }
    if !f.precedes(a, v) {
        return ClaimOutcome::HypothesisUnmet(Unmet::StartNotPreceding { a, v });
    }
    let walk = m.geodesic_between(a, b);
    match propagate(m, f, r, v, walk.vertices()) {
        Propagation::Constant => ClaimOutcome::Holds,
        Propagation::Flip(w) => ClaimOutcome::Witness(w),
        Propagation::EntersBall(vertex) => {
            ClaimOutcome::HypothesisUnmet(Unmet::InsideBall { center: v, radius: r, vertex })
        }
    }
}

/// Checks that the vertex of `z` nearest to `v` is within `p + r` of `v`.
///
/// When it is not, and the far-end separation hypotheses hold, the chain of
/// propagations that would force both `z_0 ≺ z_m` and `z_m ≺ z_0` is
/// replayed; since a tournament cannot do both, one step flips and yields a
/// witness against modulus `r`.
pub fn claim2_check(m: &PathMetric, f: &TwoSelector, config: &ClaimConfig) -> ClaimOutcome {
    match claim2_inner(m, f, config) {
        Ok(outcome) => outcome,
        Err(u) => ClaimOutcome::HypothesisUnmet(u),
    }
}

fn claim2_inner(m: &PathMetric, f: &TwoSelector, config: &ClaimConfig) -> Result<ClaimOutcome, Unmet> {
    let ClaimConfig { v, ref z, p, r, ref geodesic } = *config;
    let k = nearest_index(m, v, z).ok_or(Unmet::EmptySequence)?;
    check_steps(m, z, p)?;
    let t = m.distance(v, z[k]);
    if t <= p + r {
        return Ok(ClaimOutcome::Holds);
    }
    let geodesic = match geodesic {
        Some(path) => {
            let ok = path.first() == Some(&v)
                && path.last() == Some(&z[k])
                && path.len() == t as usize + 1
                && path.windows(2).all(|w| m.graph().is_adjacent(w[0], w[1]));
            if !ok {
                return Err(Unmet::BadGeodesic);
            }
            path.clone()
        }
        None => m.geodesic_between(v, z[k]).into_vertices(),
    };
    let last = z.len() - 1;
    let (z0, zm) = (z[0], z[last]);
    let limit = p + r;
    if let Some(i) = (k..=last).find(|&i| m.distance(z0, z[i]) <= limit) {
        return Err(Unmet::EndsTooClose { end: z0, index: i });
    }
    if let Some(i) = (0..=k).find(|&i| m.distance(zm, z[i]) <= limit) {
        return Err(Unmet::EndsTooClose { end: zm, index: i });
    }
    avoid_ball(m, z0, limit, &geodesic)?;
    avoid_ball(m, zm, limit, &geodesic)?;

    let forward_tail: Vec<Vertex> = z[k..].to_vec();
    let backward_head: Vec<Vertex> = z[..=k].iter().rev().copied().collect();
    let steps: [(Vertex, Vec<Vertex>); 5] = [
        // z_0 ≺ v carries along the whole sequence to z_m ≺ v.
        (v, m.walk_through(z)),
        // Sliding v to z_k along the geodesic: z_0 vs v becomes z_0 vs z_k.
        (z0, geodesic.clone()),
        (zm, geodesic),
        // z_0 vs z_k becomes z_0 vs z_m.
        (z0, m.walk_through(&forward_tail)),
        // z_m vs z_k becomes z_m vs z_0.
        (zm, m.walk_through(&backward_head)),
    ];
    for (fixed, walk) in &steps {
        match propagate(m, f, r, *fixed, walk) {
            Propagation::Constant => {}
            Propagation::Flip(w) => return Ok(ClaimOutcome::Witness(w)),
            Propagation::EntersBall(vertex) => {
                return Err(Unmet::InsideBall { center: *fixed, radius: r, vertex })
            }
        }
    }
    unreachable!("constant propagation would make both z_0 and z_m win the pair {{z_0, z_m}}")
}

/// `2(r + p) + 1`, the end-window width for [`claim3_side`].
pub fn claim3_q(r: u32, p: u32) -> u32 {
    2 * (r + p) + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideOutcome {
    /// Nearest index `j <= q`.
    LeftEnd(usize),
    /// Nearest index `j >= m - q`.
    RightEnd(usize),
    Witness(Witness),
    HypothesisUnmet(Unmet),
}

/// Locates which end window of `z` holds the vertex nearest to a far probe
/// `v`. A nearest index strictly inside would contradict modulus `r`, and the
/// resulting witness is extracted through [`claim2_check`].
#[allow(clippy::too_many_arguments)]
pub fn claim3_side(
    m: &PathMetric,
    f: &TwoSelector,
    r: u32,
    p: u32,
    q: u32,
    z: &[Vertex],
    v: Vertex,
) -> SideOutcome {
    let Some(j) = nearest_index(m, v, z) else {
        return SideOutcome::HypothesisUnmet(Unmet::EmptySequence);
    };
    if let Err(u) = check_steps(m, z, p) {
        return SideOutcome::HypothesisUnmet(u);
    }
    let limit = p + r;
    if m.distance(v, z[j]) <= limit {
        return SideOutcome::HypothesisUnmet(Unmet::InsideBall { center: v, radius: limit, vertex: z[j] });
    }
    let last = z.len() - 1;
    let q = q as usize;
    if let Some(i) = (q + 1..=last).find(|&i| m.distance(z[0], z[i]) <= limit) {
        return SideOutcome::HypothesisUnmet(Unmet::EndsTooClose { end: z[0], index: i });
    }
    if last >= q {
        if let Some(i) = (0..=last - q).find(|&i| m.distance(z[last], z[i]) <= limit) {
            return SideOutcome::HypothesisUnmet(Unmet::EndsTooClose { end: z[last], index: i });
        }
    }
    if j <= q {
        return SideOutcome::LeftEnd(j);
    }
    if j + q >= last {
        return SideOutcome::RightEnd(j);
    }
    let config = ClaimConfig { v, z: z.to_vec(), p, r, geodesic: None };
    match claim2_check(m, f, &config) {
        ClaimOutcome::Witness(w) => SideOutcome::Witness(w),
        ClaimOutcome::HypothesisUnmet(u) => SideOutcome::HypothesisUnmet(u),
        ClaimOutcome::Holds => unreachable!("d(v, z_j) > p + r was checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::selector::{id_min_selector, modulus};

    #[test]
    fn claim1_on_path() {
        let m = PathMetric::new(generators::path(20));
        let f = id_min_selector(20);
        assert_eq!(claim1_propagate(&m, &f, 1, 19, 10, 12, 2), ClaimOutcome::Holds);
        assert_eq!(claim1_propagate(&m, &f, 1, 19, 10, 10, 2), ClaimOutcome::Holds);
        assert!(matches!(
            claim1_propagate(&m, &f, 1, 19, 10, 17, 2),
            ClaimOutcome::HypothesisUnmet(Unmet::EndpointsTooFar { .. })
        ));
        assert!(matches!(
            claim1_propagate(&m, &f, 1, 0, 10, 12, 2),
            ClaimOutcome::HypothesisUnmet(Unmet::StartNotPreceding { .. })
        ));
    }

    #[test]
    fn claim1_on_tripod_with_flipped_arm() {
        // Centre 0, arms 1..=6, 7..=12, 13..=18. Make 10 beat v = 6 while 11
        // still loses to it: a flip in the middle of the second arm.
        let m = PathMetric::new(generators::tripod(6, 6, 6));
        let mut f = id_min_selector(19).to_table().unwrap();
        f.flip(VertexPair::of(6, 10));
        assert!(f.precedes(10, 6) && f.precedes(6, 11));
        match claim1_propagate(&m, &f, 0, 6, 10, 11, 1) {
            ClaimOutcome::Witness(w) => assert!(w.reverify(&m, &f, 0)),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn claim2_trivial_and_path() {
        let m = PathMetric::new(generators::path(30));
        let f = id_min_selector(30);
        let r = modulus(&m, &f).r;
        assert_eq!(r, 1);
        let cfg = ClaimConfig { v: 3, z: vec![5, 8, 11], p: 3, r, geodesic: None };
        assert_eq!(claim2_check(&m, &f, &cfg), ClaimOutcome::Holds);
    }

    #[test]
    fn claim2_on_comb_yields_witness() {
        // Spine 0..=30, tooth 31..=42 hanging from 15; its tip is 12 away
        // from the spine, which no modulus-1 selector tolerates.
        let m = PathMetric::new(generators::comb(30, 12));
        let f = id_min_selector(m.vertex_count());
        let cfg = ClaimConfig { v: 42, z: (0..=30).collect(), p: 1, r: 1, geodesic: None };
        match claim2_check(&m, &f, &cfg) {
            ClaimOutcome::Witness(w) => assert!(w.reverify(&m, &f, 1)),
            other => panic!("expected witness, got {other:?}"),
        }
        let geodesic: Vec<Vertex> = (31..=42).rev().chain([15]).collect();
        let cfg = ClaimConfig { geodesic: Some(geodesic), ..cfg };
        assert!(matches!(claim2_check(&m, &f, &cfg), ClaimOutcome::Witness(_)));
        let cfg = ClaimConfig { geodesic: Some(vec![42, 15]), ..cfg };
        assert_eq!(claim2_check(&m, &f, &cfg), ClaimOutcome::HypothesisUnmet(Unmet::BadGeodesic));
    }

    #[test]
    fn claim3_on_path() {
        let m = PathMetric::new(generators::path(40));
        let f = id_min_selector(40);
        let z: Vec<Vertex> = (0..=30).collect();
        let q = claim3_q(1, 1);
        assert_eq!(q, 5);
        assert_eq!(claim3_side(&m, &f, 1, 1, q, &z, 39), SideOutcome::RightEnd(30));
        let z: Vec<Vertex> = (10..=39).collect();
        assert_eq!(claim3_side(&m, &f, 1, 1, q, &z, 0), SideOutcome::LeftEnd(0));
        assert!(matches!(
            claim3_side(&m, &f, 1, 1, q, &z, 8),
            SideOutcome::HypothesisUnmet(Unmet::InsideBall { .. })
        ));
    }

    #[test]
    fn claim3_on_comb_mid_sequence() {
        let m = PathMetric::new(generators::comb(30, 12));
        let f = id_min_selector(m.vertex_count());
        let z: Vec<Vertex> = (0..=30).collect();
        match claim3_side(&m, &f, 1, 1, claim3_q(1, 1), &z, 42) {
            SideOutcome::Witness(w) => assert!(w.reverify(&m, &f, 1)),
            other => panic!("expected witness, got {other:?}"),
        }
    }
}
