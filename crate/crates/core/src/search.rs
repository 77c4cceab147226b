//! Does a graph admit a 2-selector of modulus `<= r`?
//!
//! Each pair `A ∈ [V]^2` is a two-valued variable (low or high element).
//! Every `d_H(A, B) <= 1` neighbour pair is a binary constraint
//! `d(f(A), f(B)) <= r`. Search is chronological backtracking over
//! arc-consistent domains.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PathMetric;
use crate::hyperspace::{pair_neighbors, VertexPair};
use crate::selector::{TwoSelector, DEFAULT_PAIR_CAP};

/// Pair-count bound for [`exhaustive_min_modulus`].
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{pairs} pairs exceed the limit {limit}")]
    TooLarge { pairs: usize, limit: usize },
    #[error("node budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Feasible { selector: TwoSelector, r: u32, stats: SearchStats },
    /// The whole tree was exhausted.
    Infeasible { r: u32, stats: SearchStats },
}

impl SearchOutcome {
    pub fn r(&self) -> u32 {
        match self {
            SearchOutcome::Feasible { r, .. } | SearchOutcome::Infeasible { r, .. } => *r,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, SearchOutcome::Feasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariableOrder {
    /// Most neighbour pairs first, then pair index.
    MostConstrained,
    /// A seeded random permutation.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub pair_cap: usize,
    pub order: VariableOrder,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_budget: 10_000_000, pair_cap: DEFAULT_PAIR_CAP, order: VariableOrder::MostConstrained }
    }
}

const LOW: u8 = 1;
const HIGH: u8 = 2;

/// Constraint graph on pair indices with the four image distances per edge.
struct Problem {
    vertex_count: usize,
    /// `arcs[i]` lists `(j, [d(lo_i,lo_j), d(lo_i,hi_j), d(hi_i,lo_j), d(hi_i,hi_j)])`.
    arcs: Vec<Vec<(usize, [u32; 4])>>,
}

impl Problem {
    fn new(m: &PathMetric) -> Self {
        let n = m.vertex_count();
        let arcs = VertexPair::all(n)
            .map(|p| {
                pair_neighbors(m, p)
                    .into_iter()
                    .filter(|&q| q != p)
                    .map(|q| {
                        let d = |x, y| m.distance(x, y);
                        let (a, b, c, e) = (p.low(), p.high(), q.low(), q.high());
                        (q.index(), [d(a, c), d(a, e), d(b, c), d(b, e)])
                    })
                    .collect()
            })
            .collect();
        Problem { vertex_count: n, arcs }
    }

    fn len(&self) -> usize {
        self.arcs.len()
    }
}

/// Values of `i`'s domain with a support in `dj`.
fn supported(dists: &[u32; 4], r: u32, dj: u8) -> u8 {
    let mut keep = 0;
    for (bit_i, row) in [(LOW, 0), (HIGH, 2)] {
        let ok_lo = dj & LOW != 0 && dists[row] <= r;
        let ok_hi = dj & HIGH != 0 && dists[row + 1] <= r;
        if ok_lo || ok_hi {
            keep |= bit_i;
        }
    }
    keep
}

struct Solver<'a> {
    problem: &'a Problem,
    r: u32,
    domains: Vec<u8>,
    trail: Vec<(usize, u8)>,
    order: Vec<usize>,
    stats: SearchStats,
    budget: u64,
}

impl<'a> Solver<'a> {
    fn set(&mut self, i: usize, d: u8) {
        self.trail.push((i, self.domains[i]));
        self.domains[i] = d;
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (i, d) = self.trail.pop().expect("trail entry");
            self.domains[i] = d;
        }
    }

    /// Arc consistency from the changed variables; `false` on a wipe-out.
    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(j) = queue.pop() {
            let dj = self.domains[j];
            for &(i, dists) in &self.problem.arcs[j] {
                // Arc (i, j): the distance table is stored from j's side.
                let flipped = [dists[0], dists[2], dists[1], dists[3]];
                let keep = self.domains[i] & supported(&flipped, self.r, dj);
                if keep != self.domains[i] {
                    if keep == 0 {
                        return false;
                    }
                    self.set(i, keep);
                    queue.push(i);
                }
            }
        }
        true
    }

    fn solve(&mut self, from: usize) -> Result<bool, SearchError> {
        let Some(pos) = (from..self.order.len()).find(|&k| self.domains[self.order[k]] == LOW | HIGH) else {
            return Ok(true);
        };
        let var = self.order[pos];
        for value in [LOW, HIGH] {
            self.stats.nodes += 1;
            if self.stats.nodes > self.budget {
                return Err(SearchError::BudgetExceeded { nodes: self.stats.nodes - 1 });
            }
            let mark = self.trail.len();
            self.set(var, value);
            if self.propagate(vec![var]) && self.solve(pos + 1)? {
                return Ok(true);
            }
            self.undo(mark);
            self.stats.backtracks += 1;
        }
        Ok(false)
    }
}

fn variable_order(problem: &Problem, order: VariableOrder) -> Vec<usize> {
    let mut vars: Vec<usize> = (0..problem.len()).collect();
    match order {
        VariableOrder::MostConstrained => {
            vars.sort_by(|&a, &b| problem.arcs[b].len().cmp(&problem.arcs[a].len()).then(a.cmp(&b)))
        }
        VariableOrder::Shuffled(seed) => vars.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    vars
}

fn search_problem(problem: &Problem, r: u32, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let mut solver = Solver {
        problem,
        r,
        domains: vec![LOW | HIGH; problem.len()],
        trail: Vec::new(),
        order: variable_order(problem, config.order),
        stats: SearchStats::default(),
        budget: config.node_budget,
    };
    let all: Vec<usize> = (0..problem.len()).collect();
    if !solver.propagate(all) || !solver.solve(0)? {
        return Ok(SearchOutcome::Infeasible { r, stats: solver.stats });
    }
    let domains = solver.domains;
    let selector = TwoSelector::from_fn(problem.vertex_count, |p| {
        if domains[p.index()] & LOW != 0 {
            p.low()
        } else {
            p.high()
        }
    })
    .expect("pair count checked");
    Ok(SearchOutcome::Feasible { selector, r, stats: solver.stats })
}

fn check_size(m: &PathMetric, limit: usize) -> Result<(), SearchError> {
    let pairs = VertexPair::count(m.vertex_count());
    if pairs > limit {
        return Err(SearchError::TooLarge { pairs, limit });
    }
    Ok(())
}

/// Is there a selector of modulus `<= r`?
pub fn search_at(m: &PathMetric, r: u32, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    check_size(m, config.pair_cap)?;
    search_problem(&Problem::new(m), r, config)
}

/// One outcome per `r = 0..=r_cap`. Once some `r` is feasible its selector
/// is reused for every larger `r`.
pub fn min_modulus_search(
    m: &PathMetric,
    r_cap: u32,
    config: &SearchConfig,
) -> Result<Vec<SearchOutcome>, SearchError> {
    check_size(m, config.pair_cap)?;
    let problem = Problem::new(m);
    let mut out: Vec<SearchOutcome> = Vec::new();
    for r in 0..=r_cap {
        let next = match out.last() {
            Some(SearchOutcome::Feasible { selector, stats, .. }) => {
                SearchOutcome::Feasible { selector: selector.clone(), r, stats: *stats }
            }
            _ => search_problem(&problem, r, config)?,
        };
        out.push(next);
    }
    Ok(out)
}

/// The first feasible `r` in a [`min_modulus_search`] result.
pub fn minimal_modulus(outcomes: &[SearchOutcome]) -> Option<u32> {
    outcomes.iter().find(|o| o.is_feasible()).map(SearchOutcome::r)
}

/// Least modulus over all `2^P` tournaments, `P <= 15` pairs.
pub fn exhaustive_min_modulus(m: &PathMetric) -> Result<u32, SearchError> {
    check_size(m, EXHAUSTIVE_PAIR_LIMIT)?;
    let problem = Problem::new(m);
    // Each constraint once, with the table indexed by (bit_i, bit_j).
    let edges: Vec<(usize, usize, [u32; 4])> = problem
        .arcs
        .iter()
        .enumerate()
        .flat_map(|(i, arcs)| arcs.iter().filter(move |a| a.0 > i).map(move |&(j, d)| (i, j, d)))
        .collect();
    let mut best = u32::MAX;
    for mask in 0u32..1 << problem.len() {
        let mut worst = 0;
        for &(i, j, d) in &edges {
            // Bit set means the low element is chosen (table slot 0).
            let hi_i = (mask >> i) & 1 == 0;
            let hi_j = (mask >> j) & 1 == 0;
            worst = worst.max(d[2 * hi_i as usize + hi_j as usize]);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    Ok(if best == u32::MAX { 0 } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::Graph;
    use crate::selector::{modulus, verify_selector};

    fn metric(g: Graph) -> PathMetric {
        PathMetric::new(g)
    }

    /// Brute force over every tournament, recomputing the modulus directly.
    fn brute_min_modulus(m: &PathMetric) -> u32 {
        let n = m.vertex_count();
        let pairs = VertexPair::count(n);
        (0u32..1 << pairs)
            .map(|mask| {
                let f = TwoSelector::from_fn(n, |p| {
                    if (mask >> p.index()) & 1 == 1 {
                        p.low()
                    } else {
                        p.high()
                    }
                })
                .unwrap();
                modulus(m, &f).r
            })
            .min()
            .unwrap()
    }

    #[test]
    fn p4_needs_modulus_one() {
        let m = metric(generators::path(4));
        let out = min_modulus_search(&m, 3, &SearchConfig::default()).unwrap();
        assert!(!out[0].is_feasible());
        assert_eq!(minimal_modulus(&out), Some(1));
        assert_eq!(exhaustive_min_modulus(&m), Ok(1));
        assert_eq!(brute_min_modulus(&m), 1);
    }

    #[test]
    fn p2_is_free() {
        let m = metric(generators::path(2));
        let out = min_modulus_search(&m, 2, &SearchConfig::default()).unwrap();
        assert_eq!(minimal_modulus(&out), Some(0));
        assert_eq!(exhaustive_min_modulus(&m), Ok(0));
    }

    #[test]
    fn star_agrees_with_enumeration() {
        let m = metric(generators::tripod(1, 1, 1));
        let out = min_modulus_search(&m, 4, &SearchConfig::default()).unwrap();
        let brute = brute_min_modulus(&m);
        assert_eq!(minimal_modulus(&out), Some(brute));
        assert_eq!(exhaustive_min_modulus(&m), Ok(brute));
    }

    #[test]
    fn tripod_stable_under_shuffling() {
        let m = metric(generators::tripod(3, 3, 3));
        let base = minimal_modulus(&min_modulus_search(&m, 6, &SearchConfig::default()).unwrap());
        assert!(base.is_some());
        for seed in 0..4 {
            let cfg = SearchConfig { order: VariableOrder::Shuffled(seed), ..SearchConfig::default() };
            assert_eq!(minimal_modulus(&min_modulus_search(&m, 6, &cfg).unwrap()), base);
        }
    }

    #[test]
    fn feasible_selectors_verify() {
        let m = metric(generators::grid(3, 3));
        for o in min_modulus_search(&m, 4, &SearchConfig::default()).unwrap() {
            if let SearchOutcome::Feasible { selector, r, .. } = o {
                assert!(verify_selector(&m, &selector, r).holds());
            }
        }
    }

    #[test]
    fn limits() {
        let m = metric(generators::path(7));
        assert_eq!(exhaustive_min_modulus(&m), Err(SearchError::TooLarge { pairs: 21, limit: 15 }));
        let cfg = SearchConfig { node_budget: 0, ..SearchConfig::default() };
        assert_eq!(search_at(&m, 1, &cfg), Err(SearchError::BudgetExceeded { nodes: 0 }));
        let tiny = SearchConfig { pair_cap: 3, ..SearchConfig::default() };
        assert!(matches!(search_at(&m, 1, &tiny), Err(SearchError::TooLarge { .. })));
    }
}
