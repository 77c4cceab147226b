//! Standard test graphs: paths, cycles, grids, tripods, combs.

use crate::graph::{Graph, Vertex};

fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
    Graph::new(n, edges).expect("generated graphs are connected and simple")
}

/// Path `P_n` on vertices `0..n`.
pub fn path(n: usize) -> Graph {
    assert!(n >= 1, "path needs at least one vertex");
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    from_edges(n, &edges)
}

/// Cycle `C_n`, `n >= 3`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least three vertices");
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    edges.push((n - 1, 0));
    from_edges(n, &edges)
}

/// Id of grid vertex `(i, j)` (row `i`, column `j`) in a grid with `width` columns.
///
/// Ids increase lexicographically in `(i, j)`, so id order is the
/// lexicographic order.
pub fn grid_id(width: usize, i: usize, j: usize) -> Vertex {
    i * width + j
}

/// Inverse of [`grid_id`].
pub fn grid_coords(width: usize, v: Vertex) -> (usize, usize) {
    (v / width, v % width)
}

/// `width x height` grid with axis edges.
pub fn grid(width: usize, height: usize) -> Graph {
    assert!(width >= 1 && height >= 1);
    let mut edges = Vec::new();
    for i in 0..height {
        for j in 0..width {
            if j + 1 < width {
                edges.push((grid_id(width, i, j), grid_id(width, i, j + 1)));
            }
            if i + 1 < height {
                edges.push((grid_id(width, i, j), grid_id(width, i + 1, j)));
            }
        }
    }
    from_edges(width * height, &edges)
}

/// Three arms of the given lengths glued at centre `0`.
///
/// Arm `k` occupies a consecutive id block; its vertex nearest the centre
/// comes first.
pub fn tripod(a: usize, b: usize, c: usize) -> Graph {
    let mut edges = Vec::new();
    let mut next = 1;
    for len in [a, b, c] {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    from_edges(next, &edges)
}

/// Spine path of length `spine` (ids `0..=spine`) with one tooth of length
/// `tooth` hanging from spine vertex `spine / 2` (ids `spine+1..`).
pub fn comb(spine: usize, tooth: usize) -> Graph {
    let mut edges: Vec<_> = (1..=spine).map(|i| (i - 1, i)).collect();
    let mut prev = spine / 2;
    for k in 0..tooth {
        let v = spine + 1 + k;
        edges.push((prev, v));
        prev = v;
    }
    from_edges(spine + 1 + tooth, &edges)
}
