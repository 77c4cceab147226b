//! Finite connected graphs and their path metric.
//!
//! Vertices are dense `0..n` ids. Distances are exact BFS hop counts. Below
//! [`DEFAULT_MATERIALIZE_CAP`] vertices every BFS row is computed eagerly (in
//! parallel); above it rows are computed on first use and memoized.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// Vertex count up to which [`PathMetric::new`] materializes all pairs.
pub const DEFAULT_MATERIALIZE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    InvalidVertex { vertex: Vertex, vertex_count: usize },
    #[error("graph is disconnected ({} components)", components.len())]
    Disconnected { components: Vec<Vec<Vertex>> },
}

/// A finite, simple, undirected, connected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    #[serde(default)]
    duplicate_edges: usize,
}

/// Builds a graph whose vertex count is one more than the largest id mentioned.
pub fn build_graph(edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    Graph::new(n, edges)
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut sets = vec![BTreeSet::new(); vertex_count];
        let mut duplicate_edges = 0;
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::InvalidVertex { vertex: w, vertex_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !sets[u].insert(v) {
                duplicate_edges += 1;
            }
            sets[v].insert(u);
        }
        let graph = Graph {
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            duplicate_edges,
        };
        let components = graph.components();
        if components.len() > 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    /// Number of repeated edges dropped while building.
    pub fn duplicate_edges(&self) -> usize {
        self.duplicate_edges
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, ns) in self.adjacency.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS distances from every vertex of `sources` (multi-source).
    pub fn bfs_from_set(&self, sources: &[Vertex]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &w in &self.adjacency[u] {
                if dist[w] == u32::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// A geodesic `v_0, ..., v_m`: consecutive vertices adjacent and `d(v_0, v_m) = m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicPath(Vec<Vertex>);

impl GeodesicPath {
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 1
    }

    pub fn start(&self) -> Vertex {
        self.0[0]
    }

    pub fn end(&self) -> Vertex {
        self.0[self.0.len() - 1]
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.0
    }

    /// Checks the geodesic invariants against `metric`.
    pub fn is_geodesic_in(&self, metric: &PathMetric) -> bool {
        let g = metric.graph();
        self.0.windows(2).all(|w| g.is_adjacent(w[0], w[1]))
            && metric.distance(self.start(), self.end()) as usize == self.len()
    }
}

/// Shortest-path metric of a [`Graph`].
#[derive(Debug)]
pub struct PathMetric {
    graph: Graph,
    rows: Vec<OnceLock<Vec<u32>>>,
}

impl PathMetric {
    pub fn new(graph: Graph) -> Self {
        Self::with_cap(graph, DEFAULT_MATERIALIZE_CAP)
    }

    /// Builds the metric, materializing all rows when `vertex_count <= cap`.
    pub fn with_cap(graph: Graph, cap: usize) -> Self {
        let n = graph.vertex_count();
        let rows: Vec<OnceLock<Vec<u32>>> = (0..n).map(|_| OnceLock::new()).collect();
        if n <= cap {
            rows.par_iter().enumerate().for_each(|(s, cell)| {
                let _ = cell.set(graph.bfs_from_set(&[s]));
            });
        }
        PathMetric { graph, rows }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// BFS distances from `source` to every vertex.
    pub fn row(&self, source: Vertex) -> &[u32] {
        self.rows[source].get_or_init(|| self.graph.bfs_from_set(&[source]))
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> u32 {
        self.row(u)[v]
    }

    pub fn diameter(&self) -> u32 {
        (0..self.vertex_count())
            .into_par_iter()
            .map(|u| self.row(u).iter().copied().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Vertices at distance `<= radius` from `v`, ascending.
    pub fn ball(&self, v: Vertex, radius: u32) -> Vec<Vertex> {
        self.row(v)
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d <= radius)
            .map(|(u, _)| u)
            .collect()
    }

    /// `min_{s in set} d(v, s)`; `u32::MAX` for an empty set.
    pub fn distance_to_set(&self, v: Vertex, set: &[Vertex]) -> u32 {
        let row = self.row(v);
        set.iter().map(|&s| row[s]).min().unwrap_or(u32::MAX)
    }

    /// Deterministic geodesic from `u` to `v`.
    ///
    /// Walks back from `v` along BFS layers of `u`, always stepping to the
    /// smallest-id neighbour one layer closer.
    pub fn geodesic_between(&self, u: Vertex, v: Vertex) -> GeodesicPath {
        let row = self.row(u);
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            let want = row[cur] - 1;
            cur = *self
                .graph
                .neighbors(cur)
                .iter()
                .find(|&&w| row[w] == want)
                .expect("connected graph has a BFS parent");
            path.push(cur);
        }
        path.reverse();
        GeodesicPath(path)
    }

    /// Concatenates geodesics between consecutive entries of `waypoints`,
    /// yielding a walk whose consecutive vertices are adjacent.
    pub fn walk_through(&self, waypoints: &[Vertex]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = Vec::new();
        if let Some(&first) = waypoints.first() {
            out.push(first);
        }
        for w in waypoints.windows(2) {
            let seg = self.geodesic_between(w[0], w[1]);
            out.extend_from_slice(&seg.vertices()[1..]);
        }
        out
    }
}

/// A metric entourage `{(x, y) : d(x, y) <= radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MetricEntourage {
    pub radius: u32,
}

impl MetricEntourage {
    pub const DIAGONAL: MetricEntourage = MetricEntourage { radius: 0 };

    pub fn new(radius: u32) -> Self {
        MetricEntourage { radius }
    }

    /// `E ∘ E'` is contained in the entourage of radius `r + s`.
    pub fn compose(self, other: MetricEntourage) -> MetricEntourage {
        MetricEntourage::new(entourage_algebra(self.radius, other.radius))
    }

    /// Metric entourages are symmetric.
    pub fn inverse(self) -> MetricEntourage {
        self
    }

    pub fn contains(self, metric: &PathMetric, x: Vertex, y: Vertex) -> bool {
        metric.distance(x, y) <= self.radius
    }

    /// `E[x]`.
    pub fn ball(self, metric: &PathMetric, x: Vertex) -> Vec<Vertex> {
        metric.ball(x, self.radius)
    }
}

/// Radius of a metric entourage containing the composition of radii `r` and `s`.
pub fn entourage_algebra(r: u32, s: u32) -> u32 {
    r + s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.vertex_count();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for u in 0..n {
            d[u][u] = 0;
            for &v in g.neighbors(u) {
                d[u][v] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    #[test]
    fn single_edge() {
        let g = build_graph(&[(0, 1)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn path_four_matches_floyd_warshall() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let fw = floyd_warshall(&g);
        let m = PathMetric::new(g);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(m.distance(u, v), fw[u][v]);
            }
        }
        assert_eq!(m.distance(0, 3), 3);
    }

    #[test]
    fn disconnected_is_rejected_with_components() {
        let err = build_graph(&[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap_err();
        assert_eq!(
            err,
            GraphError::Disconnected { components: vec![vec![0, 1, 2], vec![3, 4]] }
        );
    }

    #[test]
    fn self_loop_rejected_and_duplicates_counted() {
        assert_eq!(build_graph(&[(0, 1), (1, 1)]).unwrap_err(), GraphError::SelfLoop(1));
        let g = build_graph(&[(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.duplicate_edges(), 2);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn grid_distances_and_balls() {
        let g = generators::grid(3, 3);
        let fw = floyd_warshall(&g);
        let m = PathMetric::new(g);
        let id = |i, j| generators::grid_id(3, i, j);
        assert_eq!(m.distance(id(0, 0), id(2, 2)), 4);
        assert_eq!(fw[id(0, 0)][id(2, 2)], 4);
        let mut expected = vec![id(1, 1), id(0, 1), id(2, 1), id(1, 0), id(1, 2)];
        expected.sort_unstable();
        assert_eq!(m.ball(id(1, 1), 1), expected);
    }

    #[test]
    fn balls_on_path() {
        let m = PathMetric::new(generators::path(4));
        assert_eq!(m.ball(1, 1), vec![0, 1, 2]);
        assert_eq!(m.ball(2, 0), vec![2]);
    }

    #[test]
    fn geodesic_tie_break() {
        let m = PathMetric::new(generators::path(4));
        assert_eq!(m.geodesic_between(0, 3).vertices(), &[0, 1, 2, 3]);
        assert_eq!(m.geodesic_between(2, 2).vertices(), &[2]);

        let m = PathMetric::new(generators::grid(3, 3));
        let id = |i, j| generators::grid_id(3, i, j);
        // Enumerate every geodesic (0,0) -> (1,1) and pick the one the
        // tie-break should produce: lexicographically smallest when read from
        // the target backwards.
        let all = all_geodesics(&m, id(0, 0), id(1, 1));
        assert_eq!(all.len(), 2);
        let chosen = all
            .iter()
            .min_by_key(|p| p.iter().rev().copied().collect::<Vec<_>>())
            .unwrap();
        assert_eq!(chosen, &vec![id(0, 0), id(0, 1), id(1, 1)]);
        assert_eq!(m.geodesic_between(id(0, 0), id(1, 1)).vertices(), chosen.as_slice());
    }

    fn all_geodesics(m: &PathMetric, u: Vertex, v: Vertex) -> Vec<Vec<Vertex>> {
        fn go(m: &PathMetric, cur: Vertex, v: Vertex, acc: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
            if cur == v {
                out.push(acc.clone());
                return;
            }
            for &w in m.graph().neighbors(cur) {
                if m.distance(w, v) + 1 == m.distance(cur, v) {
                    acc.push(w);
                    go(m, w, v, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(m, u, v, &mut vec![u], &mut out);
        out
    }

    #[test]
    fn entourage_composition_contained_on_p6() {
        assert_eq!(entourage_algebra(1, 1), 2);
        assert_eq!(entourage_algebra(0, 5), 5);
        let m = PathMetric::new(generators::path(6));
        let (r, s) = (1, 2);
        let composed = MetricEntourage::new(r).compose(MetricEntourage::new(s));
        for x in 0..6 {
            let ball = composed.ball(&m, x);
            for z in m.ball(x, r) {
                for y in m.ball(z, s) {
                    assert!(ball.contains(&y));
                }
            }
        }
        assert_eq!(MetricEntourage::DIAGONAL.ball(&m, 3), vec![3]);
        assert_eq!(MetricEntourage::new(2).inverse(), MetricEntourage::new(2));
    }

    #[test]
    fn lazy_rows_agree_with_eager() {
        let eager = PathMetric::new(generators::grid(5, 4));
        let lazy = PathMetric::with_cap(generators::grid(5, 4), 0);
        for u in 0..20 {
            assert_eq!(eager.row(u), lazy.row(u));
        }
        assert_eq!(eager.diameter(), 7);
    }
}
