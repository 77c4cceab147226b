use coarsekit::extraction::{extract_line, Diagnostic, ExtractionResult};
use coarsekit::generators::{self, grid_coords};
use coarsekit::selector::{id_min_selector, min_selector, modulus};
use coarsekit::{verify_qi, PathMetric, TwoSelector};

fn line_and_covering(m: &PathMetric, f: &TwoSelector) -> (coarsekit::ExtractionReport, u32) {
    let rep = extract_line(m, f);
    let mut line = rep.a_side.clone();
    line.extend(&rep.b_side);
    line.extend(rep.center);
    let covering = m.graph().bfs_from_set(&line).into_iter().max().unwrap_or(0);
    (rep, covering)
}

#[test]
fn reversed_coordinate_on_long_path() {
    let m = PathMetric::new(generators::path(300));
    let keys: Vec<i64> = (0..300).map(|v| -v).collect();
    let (rep, covering) = line_and_covering(&m, &min_selector(&keys).unwrap());
    assert!(matches!(rep.result, ExtractionResult::Line { .. }));
    assert!(verify_qi(&m, rep.certificate().unwrap()).is_valid());
    assert_eq!(covering, 0);
    assert_eq!(rep.max_slack, 0);
    assert_eq!(rep.iterations, 2);
}

#[test]
fn thick_strip_is_a_line() {
    let (w, h) = (300, 3);
    let m = PathMetric::new(generators::grid(w, h));
    let keys: Vec<i64> = (0..w * h)
        .map(|v| {
            let (i, j) = grid_coords(w, v);
            (j * h + i) as i64
        })
        .collect();
    let f = min_selector(&keys).unwrap();
    let (rep, covering) = line_and_covering(&m, &f);
    assert_eq!(rep.params.r, modulus(&m, &f).r);
    let cert = rep.certificate().expect("line");
    assert!(verify_qi(&m, cert).is_valid());
    assert_eq!(rep.within_declared_bounds(), Some(true));
    assert!(covering <= rep.params.largeness_threshold);
    // Sides keep d(a_i, c) = i.
    let c = rep.center.unwrap();
    for side in [&rep.a_side, &rep.b_side] {
        for (i, &v) in side.iter().enumerate() {
            assert_eq!(m.distance(c, v) as usize, i + 1);
        }
        for w in side.windows(2) {
            assert!(m.distance(w[0], w[1]) <= rep.params.p);
        }
    }
}

#[test]
fn branching_graphs_are_bounded() {
    for g in [generators::tripod(200, 200, 3), generators::cycle(400), generators::comb(400, 30)] {
        let n = g.vertex_count();
        let m = PathMetric::new(g);
        let rep = extract_line(&m, &id_min_selector(n));
        assert_eq!(rep.result, ExtractionResult::Bounded { radius: m.diameter() });
        assert!(rep.diagnostics.iter().any(|d| matches!(d, Diagnostic::ShortDiameter { .. })));
    }
}

#[test]
fn reports_are_deterministic() {
    let m = PathMetric::new(generators::path(200));
    let f = id_min_selector(200);
    assert_eq!(extract_line(&m, &f), extract_line(&m, &f));
}
