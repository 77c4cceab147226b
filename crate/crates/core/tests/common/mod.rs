//! Independent oracles shared by the integration suites. Nothing here calls
//! into the library's metric, Hausdorff or modulus code.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub const UNREACHABLE: u32 = u32::MAX / 4;

/// All-pairs distances by Floyd–Warshall on an edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u32>> {
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for &(u, v) in edges {
        if u != v {
            d[u][v] = 1;
            d[v][u] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// `max(sup_a d(a, B), sup_b d(b, A))` straight from the definition.
pub fn hausdorff(d: &[Vec<u32>], a: &[usize], b: &[usize]) -> u32 {
    let one_side = |x: &[usize], y: &[usize]| {
        x.iter().map(|&u| y.iter().map(|&v| d[u][v]).min().unwrap()).max().unwrap()
    };
    one_side(a, b).max(one_side(b, a))
}

/// Modulus of a choice function on pairs by scanning every pair of pairs.
pub fn brute_modulus(d: &[Vec<u32>], choose: impl Fn(usize, usize) -> usize) -> u32 {
    let n = d.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
    let mut worst = 0;
    for &(a, b) in &pairs {
        let fa = choose(a, b);
        for &(c, e) in &pairs {
            if hausdorff(d, &[a, b], &[c, e]) <= 1 {
                worst = worst.max(d[fa][choose(c, e)]);
            }
        }
    }
    worst
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let d = floyd_warshall(n, edges);
    d[0].iter().all(|&x| x < UNREACHABLE)
}

fn all_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Connected graphs on exactly `n` vertices, one per isomorphism class.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let edges = all_edges(n);
    let index = |u: usize, v: usize| edges.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let perms = permutations(n);
    let images: Vec<Vec<usize>> =
        perms.iter().map(|p| edges.iter().map(|&(u, v)| index(p[u], p[v])).collect()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << edges.len() {
        let chosen: Vec<(usize, usize)> =
            (0..edges.len()).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
        if n > 1 && !is_connected(n, &chosen) {
            continue;
        }
        let canon = images
            .iter()
            .map(|img| (0..edges.len()).filter(|&i| mask >> i & 1 == 1).map(|i| 1u32 << img[i]).sum::<u32>())
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(chosen);
        }
    }
    out
}

/// Nonempty subsets of `0..n` with at most `k` elements.
pub fn small_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for mask in 1u32..1 << n {
        if mask.count_ones() as usize <= k {
            out.insert((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out.into_iter().collect()
}
