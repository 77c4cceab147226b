//! Sampling geodesic shapes, maximal 2-separated nets, and the graph on a
//! net joining points whose unit balls meet a common unit ball.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, PathMetric};

pub type Rational = Ratio<i64>;

/// Triangle inequality is checked exhaustively up to this many points.
pub const AXIOM_CHECK_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscretizeError {
    #[error("sampling step {0} exceeds 1/2")]
    StepTooCoarse(Rational),
    #[error("sampling step must be positive")]
    NonPositiveStep,
    #[error("step {step} does not divide {extent}")]
    StepDoesNotDivide { step: Rational, extent: Rational },
    #[error("metric space has no points")]
    Empty,
    #[error("distance matrix has {entries} entries for {points} points")]
    WrongSize { points: usize, entries: usize },
    #[error("d({i},{j}) is not a valid distance")]
    BadDistance { i: usize, j: usize },
    #[error("d({i},{j}) != d({j},{i})")]
    Asymmetric { i: usize, j: usize },
    #[error("triangle inequality fails on {i},{j},{k}")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("net graph is disconnected: {components:?}")]
    DisconnectedNetGraph { components: Vec<Vec<usize>> },
    #[error("net point {0} is out of range")]
    InvalidNetPoint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Segment(Rational),
    Circle(Rational),
    /// Width and height; sampled on a grid with the L¹ metric.
    Rectangle(Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    /// Coordinates of each sample (empty for spaces read from a matrix).
    pub positions: Vec<Vec<Rational>>,
    dist: Vec<Rational>,
    len: usize,
    /// Every two points are joined by a chain with steps at most `delta`.
    pub delta: Rational,
}

impl FiniteMetricSpace {
    /// Validates a row-major `n × n` matrix. Triangle inequality is only
    /// checked for `n <= AXIOM_CHECK_LIMIT`.
    pub fn from_matrix(len: usize, dist: Vec<Rational>) -> Result<Self, DiscretizeError> {
        if len == 0 {
            return Err(DiscretizeError::Empty);
        }
        if dist.len() != len * len {
            return Err(DiscretizeError::WrongSize { points: len, entries: dist.len() });
        }
        for i in 0..len {
            for j in 0..len {
                let d = dist[i * len + j];
                if (i == j) != d.is_zero() || d < Rational::zero() {
                    return Err(DiscretizeError::BadDistance { i, j });
                }
                if d != dist[j * len + i] {
                    return Err(DiscretizeError::Asymmetric { i: i.min(j), j: i.max(j) });
                }
            }
        }
        if len <= AXIOM_CHECK_LIMIT {
            for i in 0..len {
                for j in 0..len {
                    for k in 0..len {
                        if dist[i * len + k] > dist[i * len + j] + dist[j * len + k] {
                            return Err(DiscretizeError::Triangle { i, j, k });
                        }
                    }
                }
            }
        }
        let delta = bottleneck(len, &dist);
        Ok(FiniteMetricSpace { positions: Vec::new(), dist, len, delta })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> Rational {
        self.dist[i * self.len + j]
    }

    fn row(&self, i: usize) -> &[Rational] {
        &self.dist[i * self.len..(i + 1) * self.len]
    }
}

/// Largest edge of a minimum spanning tree: the least chaining step.
fn bottleneck(len: usize, dist: &[Rational]) -> Rational {
    let mut in_tree = vec![false; len];
    let mut best: Vec<Option<Rational>> = vec![None; len];
    best[0] = Some(Rational::zero());
    let mut worst = Rational::zero();
    for _ in 0..len {
        let u = (0..len)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| (best[v].is_none(), best[v], v))
            .expect("vertex left");
        in_tree[u] = true;
        worst = worst.max(best[u].unwrap_or_else(Rational::zero));
        for v in 0..len {
            let d = dist[u * len + v];
            if !in_tree[v] && best[v].map_or(true, |b| d < b) {
                best[v] = Some(d);
            }
        }
    }
    worst
}

fn steps(extent: Rational, step: Rational) -> Result<i64, DiscretizeError> {
    let k = extent / step;
    if !k.is_integer() || k < Rational::one() {
        return Err(DiscretizeError::StepDoesNotDivide { step, extent });
    }
    Ok(k.to_integer())
}

/// Samples a shape at spacing `step` with its exact intrinsic metric.
pub fn sample_space(shape: Shape, step: Rational) -> Result<FiniteMetricSpace, DiscretizeError> {
    if step <= Rational::zero() {
        return Err(DiscretizeError::NonPositiveStep);
    }
    if step > Rational::new(1, 2) {
        return Err(DiscretizeError::StepTooCoarse(step));
    }
    let (positions, ticks): (Vec<Vec<Rational>>, Vec<(i64, i64)>) = match shape {
        Shape::Segment(len) => {
            let k = steps(len, step)?;
            (0..=k).map(|i| (vec![step * i], (i, 0))).unzip()
        }
        Shape::Circle(circ) => {
            let k = steps(circ, step)?;
            (0..k).map(|i| (vec![step * i], (i, 0))).unzip()
        }
        Shape::Rectangle(w, h) => {
            let (kw, kh) = (steps(w, step)?, steps(h, step)?);
            (0..=kh)
                .flat_map(|y| (0..=kw).map(move |x| (vec![step * x, step * y], (x, y))))
                .unzip()
        }
    };
    let len = positions.len();
    let ticks_between = |a: (i64, i64), b: (i64, i64)| -> i64 {
        match shape {
            Shape::Circle(circ) => {
                let k = (circ / step).to_integer();
                let t = (a.0 - b.0).abs();
                t.min(k - t)
            }
            _ => (a.0 - b.0).abs() + (a.1 - b.1).abs(),
        }
    };
    let mut dist = Vec::with_capacity(len * len);
    for &a in &ticks {
        for &b in &ticks {
            dist.push(step * ticks_between(a, b));
        }
    }
    Ok(FiniteMetricSpace { positions, dist, len, delta: step })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NetStrategy {
    /// Repeatedly admit the point farthest from the net (first index on
    /// ties), starting from point 0.
    FarthestPoint,
    /// Like `FarthestPoint`, but a new point must share a witness sample
    /// with some earlier net point, so the net graph stays connected on
    /// any sample chainable in steps of at most 2.
    Attached,
    /// Admit points in index order when farther than 2 from the net.
    IndexScan,
    /// `FarthestPoint`, or `Attached` when the farthest-point net graph
    /// comes out disconnected. Sampling can leave a farthest-point net with
    /// no bridging sample (L1 rectangle 7x2 at step 1/2).
    #[default]
    Auto,
}

/// Net point indices, ascending. Net-graph vertex `k` is `points[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub points: Vec<usize>,
}

pub fn greedy_net(m: &FiniteMetricSpace) -> Net {
    greedy_net_with(m, NetStrategy::Auto)
}

pub fn greedy_net_with(m: &FiniteMetricSpace, strategy: NetStrategy) -> Net {
    let two = Rational::from_integer(2);
    let mut points = Vec::new();
    match strategy {
        NetStrategy::IndexScan => {
            for i in 0..m.len() {
                if points.iter().all(|&u| m.distance(i, u) > two) {
                    points.push(i);
                }
            }
        }
        NetStrategy::FarthestPoint | NetStrategy::Attached => {
            let attached = strategy == NetStrategy::Attached;
            let mut gap: Vec<Rational> = m.row(0).to_vec();
            points.push(0);
            loop {
                let uncovered = || gap.iter().enumerate().filter(|(_, &d)| d > two);
                let pick = |i: usize| {
                    !attached || (0..m.len()).any(|x| gap[x] <= two && m.distance(x, i) <= two)
                };
                // Farthest first, lowest index on ties.
                let best = |it: &mut dyn Iterator<Item = (usize, &Rational)>| {
                    it.max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0))).map(|(i, _)| i)
                };
                let next = best(&mut uncovered().filter(|&(i, _)| pick(i))).or_else(|| best(&mut uncovered()));
                let Some(far) = next else { break };
                points.push(far);
                for (g, &e) in gap.iter_mut().zip(m.row(far)) {
                    *g = (*g).min(e);
                }
            }
        }
        NetStrategy::Auto => {
            let net = greedy_net_with(m, NetStrategy::FarthestPoint);
            return match net_graph(m, &net) {
                Err(DiscretizeError::DisconnectedNetGraph { .. }) => greedy_net_with(m, NetStrategy::Attached),
                _ => net,
            };
        }
    }
    points.sort_unstable();
    Net { points }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetDefect {
    TooClose { u: usize, v: usize },
    Uncovered { x: usize },
}

/// Checks 2-separation, then maximality.
pub fn check_net(m: &FiniteMetricSpace, net: &Net) -> Option<NetDefect> {
    let two = Rational::from_integer(2);
    for (i, &u) in net.points.iter().enumerate() {
        for &v in &net.points[i + 1..] {
            if m.distance(u, v) <= two {
                return Some(NetDefect::TooClose { u, v });
            }
        }
    }
    (0..m.len())
        .find(|&x| net.points.iter().all(|&u| m.distance(x, u) > two))
        .map(|x| NetDefect::Uncovered { x })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetGraph {
    pub graph: Graph,
    /// For each edge `(k, l)` of net-graph ids, `k < l`, the first sample
    /// within 2 of both endpoints.
    pub witnesses: BTreeMap<(usize, usize), usize>,
}

impl NetGraph {
    pub fn reverify_edge(&self, m: &FiniteMetricSpace, net: &Net, k: usize, l: usize) -> bool {
        let two = Rational::from_integer(2);
        self.witnesses.get(&(k, l)).is_some_and(|&x| {
            m.distance(x, net.points[k]) <= two && m.distance(x, net.points[l]) <= two
        })
    }
}

/// Joins net points `u, v` when some sample lies within 2 of both.
pub fn net_graph(m: &FiniteMetricSpace, net: &Net) -> Result<NetGraph, DiscretizeError> {
    if let Some(&bad) = net.points.iter().find(|&&u| u >= m.len()) {
        return Err(DiscretizeError::InvalidNetPoint(bad));
    }
    let two = Rational::from_integer(2);
    let k = net.points.len();
    let mut witnesses = BTreeMap::new();
    for a in 0..k {
        for b in a + 1..k {
            let (u, v) = (net.points[a], net.points[b]);
            let (ru, rv) = (m.row(u), m.row(v));
            if let Some(x) = (0..m.len()).find(|&x| ru[x] <= two && rv[x] <= two) {
                witnesses.insert((a, b), x);
            }
        }
    }
    let edges: Vec<(usize, usize)> = witnesses.keys().copied().collect();
    match Graph::new(k, &edges) {
        Ok(graph) => Ok(NetGraph { graph, witnesses }),
        Err(GraphError::Disconnected { components }) => {
            let components =
                components.into_iter().map(|c| c.into_iter().map(|i| net.points[i]).collect()).collect();
            Err(DiscretizeError::DisconnectedNetGraph { components })
        }
        Err(e) => unreachable!("net graph edges are well formed: {e}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetCertificate {
    /// `max_x d(x, net)`.
    pub largeness: Rational,
    /// Least distance between distinct net points (`None` for one point).
    pub separation: Option<Rational>,
    /// `max d(u, v) / m(u, v)` over distinct net pairs, `m` the hop metric.
    pub ambient_per_hop: Rational,
    /// `max m(u, v) / d(u, v)` over distinct net pairs.
    pub hops_per_ambient: Rational,
    /// `d(u, v) <= 4 m(u, v)` for all net pairs.
    pub within_four: bool,
}

pub fn certify_net(m: &FiniteMetricSpace, net: &Net, g: &Graph) -> NetCertificate {
    let largeness = (0..m.len())
        .map(|x| net.points.iter().map(|&u| m.distance(x, u)).min().expect("nonempty net"))
        .max()
        .unwrap_or_else(Rational::zero);
    let hops = PathMetric::new(g.clone());
    let mut separation: Option<Rational> = None;
    let mut ambient_per_hop = Rational::zero();
    let mut hops_per_ambient = Rational::zero();
    for a in 0..net.points.len() {
        for b in a + 1..net.points.len() {
            let d = m.distance(net.points[a], net.points[b]);
            let h = Rational::from_integer(hops.distance(a, b) as i64);
            separation = Some(separation.map_or(d, |s| s.min(d)));
            ambient_per_hop = ambient_per_hop.max(d / h);
            hops_per_ambient = hops_per_ambient.max(h / d);
        }
    }
    NetCertificate {
        largeness,
        separation,
        ambient_per_hop,
        hops_per_ambient,
        within_four: ambient_per_hop <= Rational::from_integer(4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn positions(m: &FiniteMetricSpace, net: &Net) -> Vec<Rational> {
        net.points.iter().map(|&i| m.positions[i][0]).collect()
    }

    #[test]
    fn segment_sampling() {
        let m = sample_space(Shape::Segment(int(10)), half()).unwrap();
        assert_eq!(m.len(), 21);
        for i in 0..21 {
            for j in 0..21 {
                assert_eq!(m.distance(i, j), Rational::new((i as i64 - j as i64).abs(), 2));
            }
        }
        assert_eq!(m.delta, half());
    }

    #[test]
    fn circle_sampling_matches_brute_arc() {
        let m = sample_space(Shape::Circle(int(12)), half()).unwrap();
        assert_eq!(m.len(), 24);
        for i in 0..24i64 {
            for j in 0..24i64 {
                // Shortest of the representatives j + 24k.
                let arc = (-2..=2).map(|k| (i - j - 24 * k).abs()).min().unwrap();
                assert_eq!(m.distance(i as usize, j as usize), Rational::new(arc, 2));
            }
        }
    }

    #[test]
    fn rectangle_matches_fine_grid_bfs() {
        let m = sample_space(Shape::Rectangle(int(4), int(4)), half()).unwrap();
        let g = PathMetric::new(crate::generators::grid(9, 9));
        assert_eq!(m.len(), 81);
        for i in 0..81 {
            for j in 0..81 {
                assert_eq!(m.distance(i, j), half() * g.distance(i, j) as i64);
            }
        }
    }

    #[test]
    fn sampling_errors() {
        assert_eq!(
            sample_space(Shape::Segment(int(10)), Rational::new(2, 3)),
            Err(DiscretizeError::StepTooCoarse(Rational::new(2, 3)))
        );
        assert!(matches!(
            sample_space(Shape::Segment(int(10)), Rational::new(3, 7)),
            Err(DiscretizeError::StepDoesNotDivide { .. })
        ));
        assert_eq!(sample_space(Shape::Circle(int(3)), int(0)), Err(DiscretizeError::NonPositiveStep));
    }

    #[test]
    fn segment_net_is_p5() {
        let m = sample_space(Shape::Segment(int(10)), half()).unwrap();
        let net = greedy_net(&m);
        let expected: Vec<Rational> = [0, 5, 10, 15, 20].iter().map(|&k| Rational::new(k, 2)).collect();
        assert_eq!(positions(&m, &net), expected);
        assert_eq!(check_net(&m, &net), None);
        let ng = net_graph(&m, &net).unwrap();
        assert_eq!(ng.graph.edges(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        for &(k, l) in ng.witnesses.keys() {
            assert!(ng.reverify_edge(&m, &net, k, l));
        }
        let cert = certify_net(&m, &net, &ng.graph);
        assert_eq!(cert.largeness, int(1));
        assert!(cert.within_four);
    }

    #[test]
    fn index_scan_breaks_circle_into_path() {
        let m = sample_space(Shape::Circle(int(12)), half()).unwrap();
        let net = greedy_net_with(&m, NetStrategy::IndexScan);
        assert_eq!(positions(&m, &net), vec![int(0), Rational::new(5, 2), int(5), Rational::new(15, 2)]);
        assert_eq!(check_net(&m, &net), None);
        let ng = net_graph(&m, &net).unwrap();
        assert_eq!(ng.graph.edges(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn circle_net_is_c4() {
        let m = sample_space(Shape::Circle(int(12)), half()).unwrap();
        let net = greedy_net(&m);
        assert_eq!(positions(&m, &net), vec![int(0), int(3), int(6), int(9)]);
        let ng = net_graph(&m, &net).unwrap();
        assert_eq!(ng.graph.edges(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        let hops = PathMetric::new(ng.graph.clone());
        assert_eq!(hops.distance(0, 2), 2);
        assert_eq!(m.distance(net.points[0], net.points[2]), int(6));
        assert!(certify_net(&m, &net, &ng.graph).within_four);
    }

    #[test]
    fn farthest_point_can_strand_a_point() {
        let m = sample_space(Shape::Rectangle(int(7), int(2)), half()).unwrap();
        let far = greedy_net_with(&m, NetStrategy::FarthestPoint);
        assert_eq!(far.points, vec![0, 9, 64, 74]);
        assert_eq!(check_net(&m, &far), None);
        // (9/2, 0) is 9/2 from every other net point: no sample is within 2 of both.
        assert!(matches!(net_graph(&m, &far), Err(DiscretizeError::DisconnectedNetGraph { .. })));
        let net = greedy_net(&m);
        assert_eq!(net, greedy_net_with(&m, NetStrategy::Attached));
        assert_eq!(check_net(&m, &net), None);
        let ng = net_graph(&m, &net).unwrap();
        assert!(certify_net(&m, &net, &ng.graph).within_four);
    }

    #[test]
    fn far_apart_points() {
        let m = FiniteMetricSpace::from_matrix(2, vec![int(0), int(5), int(5), int(0)]).unwrap();
        let net = greedy_net_with(&m, NetStrategy::IndexScan);
        assert_eq!(net.points, vec![0, 1]);
        assert!(matches!(net_graph(&m, &net), Err(DiscretizeError::DisconnectedNetGraph { .. })));
        assert_eq!(m.delta, int(5));
    }

    #[test]
    fn single_point() {
        let m = FiniteMetricSpace::from_matrix(1, vec![int(0)]).unwrap();
        let net = greedy_net(&m);
        let ng = net_graph(&m, &net).unwrap();
        assert_eq!((ng.graph.vertex_count(), ng.graph.edge_count()), (1, 0));
        let cert = certify_net(&m, &net, &ng.graph);
        assert_eq!((cert.largeness, cert.separation), (int(0), None));
    }

    #[test]
    fn matrix_validation() {
        let bad = vec![int(0), int(1), int(5), int(1), int(0), int(1), int(5), int(1), int(0)];
        assert_eq!(
            FiniteMetricSpace::from_matrix(3, bad),
            Err(DiscretizeError::Triangle { i: 0, j: 1, k: 2 })
        );
        let asym = vec![int(0), int(1), int(2), int(0)];
        assert_eq!(FiniteMetricSpace::from_matrix(2, asym), Err(DiscretizeError::Asymmetric { i: 0, j: 1 }));
        assert!(matches!(FiniteMetricSpace::from_matrix(2, vec![int(0)]), Err(DiscretizeError::WrongSize { .. })));
    }
}
