//! Coarse ray/line extraction from a graph and a 2-selector.
//!
//! With `r` the selector's modulus, `p = 2r + 1`, `n = 16p + 1` and
//! `q = 3p`, the procedure starts from a geodesic of length `16p + 2`
//!
//! ```text
//! y_{4p} .. y_0  b_{4p} .. b_1  c  a_1 .. a_{4p}  x_0 .. x_{4p}
//! ```
//!
//! stored here as two sides `a_1, a_2, ..` and `b_1, b_2, ..` of the centre
//! `c` (the `x` and `y` blocks are the outer ends of the sides). While some
//! vertex lies farther than `n + 4p` from the line, the farthest such vertex
//! `v` is probed:
//!
//! 1. the end window holding the line vertex nearest to `v` picks the side
//!    to extend ([`claim3_side`]);
//! 2. a geodesic `c = v_0, .., v_t = v` must pass within `r` of `a_{3p}`;
//!    at the first such `v_j` the side becomes `a_1, .., a_j, v_{j+1}, .., v_t`;
//! 3. the new part must stay farther than `3p` from the opposite end.
//!
//! Every failure of steps 1–3 that the selector could only cause by breaking
//! modulus `r` is turned into a [`Witness`]. Sides keep `d(a_i, c) = i`
//! and consecutive steps `<= p`, so `a_i ↦ i`, `b_i ↦ -i` is checked as a
//! quasi-isometric embedding on termination.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::claims::{claim3_side, propagate, Propagation, SideOutcome, Unmet};
use crate::graph::{PathMetric, Vertex};
use crate::qi::{tighten, verify_qi, QuasiIsometryCert};
use crate::selector::{modulus, verify_selector, TwoSelector, Verification, Witness};

/// Constants derived from the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionParams {
    pub r: u32,
    pub p: u32,
    pub n: u32,
    pub q: u32,
    /// Length of the initial geodesic, `16p + 2`.
    pub initial_length: u32,
    /// Stopping radius `n + 4p`.
    pub largeness_threshold: u32,
}

impl ExtractionParams {
    pub fn for_modulus(r: u32) -> Self {
        let p = 2 * r + 1;
        let n = 16 * p + 1;
        ExtractionParams { r, p, n, q: 3 * p, initial_length: 16 * p + 2, largeness_threshold: n + 4 * p }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractionResult {
    Bounded { radius: u32 },
    Ray { cert: QuasiIsometryCert },
    Line { cert: QuasiIsometryCert },
    Falsified { witness: Witness },
}

/// How `c` relates to `a_{r+1}` on the initial geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `c ≺ a_{r+1}`.
    CenterFirst,
    /// `a_{r+1} ≺ c`.
    SideFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stall {
    /// The end-window lemma could not be applied to the probe.
    SideUndecided { probe: Vertex, reason: Unmet },
    /// The probe geodesic is no longer than the side it would replace.
    NoGrowth { probe: Vertex, side: Side },
    /// The probe geodesic misses `B(a_{3p}, r)` and the contradiction chain
    /// left the required balls.
    AnchorChainInconclusive { probe: Vertex, side: Side },
    /// No splice index gives a step of at most `p`.
    SpliceMismatch { probe: Vertex, side: Side },
    /// The new part comes within `3p` of the opposite end without a
    /// derivable contradiction.
    FoldBack { probe: Vertex, side: Side, near: Vertex },
    /// Iteration budget (vertex count) exhausted.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnostic {
    /// Diameter is shorter than the initial geodesic.
    ShortDiameter { diameter: u32, needed: u32 },
    /// A splice used the `B(a_{3p}, r)` intersection of the probe geodesic.
    /// The source argument states this ball is both avoided and met; the
    /// meeting reading is the one that allows splicing.
    AnchorBallMet { iteration: usize, side: Side, j: usize },
    Stalled(Stall),
    /// A sampled geodesic between the sides misses `B(c, 3p)`.
    CrossingMissesCenter { a: Vertex, b: Vertex },
    /// The attached certificate exceeds `λ <= p`, `C <= 4p` or `D <= n + 4p`.
    ConstantsAboveDeclared,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub result: ExtractionResult,
    pub params: ExtractionParams,
    pub center: Option<Vertex>,
    pub a_side: Vec<Vertex>,
    pub b_side: Vec<Vertex>,
    pub iterations: usize,
    /// `max_i (i - d(side_i, c))` over both sides.
    pub max_slack: u32,
    pub orientation: Option<Orientation>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ExtractionReport {
    fn bare(result: ExtractionResult, params: ExtractionParams) -> Self {
        ExtractionReport {
            result,
            params,
            center: None,
            a_side: Vec::new(),
            b_side: Vec::new(),
            iterations: 0,
            max_slack: 0,
            orientation: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn certificate(&self) -> Option<&QuasiIsometryCert> {
        match &self.result {
            ExtractionResult::Ray { cert } | ExtractionResult::Line { cert } => Some(cert),
            _ => None,
        }
    }

    /// `λ <= p`, `C <= 4p` and `D <= n + 4p` for the attached certificate.
    pub fn within_declared_bounds(&self) -> Option<bool> {
        let cert = self.certificate()?;
        let p = self.params.p;
        Some(
            cert.lambda <= Ratio::from_integer(p as i64)
                && cert.c <= 4 * p as u64
                && cert.d <= self.params.largeness_threshold as u64,
        )
    }
}

/// Runs extraction at the selector's exact modulus.
pub fn extract_line(m: &PathMetric, f: &TwoSelector) -> ExtractionReport {
    let r = modulus(m, f).r;
    Extractor::new(m, f, ExtractionParams::for_modulus(r)).run()
}

/// Runs extraction at a claimed modulus `r`. A selector that does not meet
/// the claim is falsified before anything else.
pub fn extract_line_with_modulus(m: &PathMetric, f: &TwoSelector, r: u32) -> ExtractionReport {
    let params = ExtractionParams::for_modulus(r);
    if let Verification::Witness(witness) = verify_selector(m, f, r) {
        return ExtractionReport::bare(ExtractionResult::Falsified { witness }, params);
    }
    Extractor::new(m, f, params).run()
}

enum Step {
    Extended,
    Falsified(Witness),
    Stalled(Stall),
}

struct Extractor<'a> {
    m: &'a PathMetric,
    f: &'a TwoSelector,
    params: ExtractionParams,
    c: Vertex,
    a: Vec<Vertex>,
    b: Vec<Vertex>,
    initial_side_len: usize,
    iterations: usize,
    diagnostics: Vec<Diagnostic>,
}

impl<'a> Extractor<'a> {
    fn new(m: &'a PathMetric, f: &'a TwoSelector, params: ExtractionParams) -> Self {
        Extractor {
            m,
            f,
            params,
            c: 0,
            a: Vec::new(),
            b: Vec::new(),
            initial_side_len: 0,
            iterations: 0,
            diagnostics: Vec::new(),
        }
    }

    fn side(&self, side: Side) -> &[Vertex] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// `b_B, .., b_1, c, a_1, .., a_A`.
    fn sequence(&self) -> Vec<Vertex> {
        let mut z: Vec<Vertex> = self.b.iter().rev().copied().collect();
        z.push(self.c);
        z.extend_from_slice(&self.a);
        z
    }

    fn report(self, result: ExtractionResult) -> ExtractionReport {
        let m = self.m;
        let slack = |side: &[Vertex]| {
            side.iter()
                .enumerate()
                .map(|(i, &v)| (i as u32 + 1).saturating_sub(m.distance(self.c, v)))
                .max()
                .unwrap_or(0)
        };
        let orientation = self.orientation();
        let max_slack = slack(&self.a).max(slack(&self.b));
        ExtractionReport {
            result,
            params: self.params,
            center: Some(self.c),
            max_slack,
            orientation,
            a_side: self.a,
            b_side: self.b,
            iterations: self.iterations,
            diagnostics: self.diagnostics,
        }
    }

    fn orientation(&self) -> Option<Orientation> {
        let a = *self.a.get(self.params.r as usize)?;
        Some(if self.f.precedes(self.c, a) { Orientation::CenterFirst } else { Orientation::SideFirst })
    }

    /// Whether `c` relates to `a_{r+1}` and `b_{r+1}` in opposite ways.
    fn sides_opposed(&self) -> bool {
        let k = self.params.r as usize;
        self.f.precedes(self.c, self.a[k]) != self.f.precedes(self.c, self.b[k])
    }

    fn run(mut self) -> ExtractionReport {
        let m = self.m;
        let ExtractionParams { initial_length, largeness_threshold, .. } = self.params;
        let diameter = m.diameter();
        if diameter < initial_length {
            self.diagnostics.push(Diagnostic::ShortDiameter { diameter, needed: initial_length });
            return ExtractionReport {
                diagnostics: self.diagnostics,
                ..ExtractionReport::bare(ExtractionResult::Bounded { radius: diameter }, self.params)
            };
        }
        self.seed(diameter);

        let budget = m.vertex_count();
        loop {
            let members = self.sequence();
            let dist = m.graph().bfs_from_set(&members);
            let (probe, far) = dist
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
                .map(|(v, &d)| (v, d))
                .expect("nonempty graph");
            if far <= largeness_threshold {
                break;
            }
            if self.iterations >= budget {
                return self.stall(diameter, Stall::Budget);
            }
            self.iterations += 1;
            match self.probe(probe, &members) {
                Step::Extended => {}
                Step::Falsified(witness) => return self.report(ExtractionResult::Falsified { witness }),
                Step::Stalled(s) => return self.stall(diameter, s),
            }
        }
        self.finish()
    }

    fn stall(mut self, diameter: u32, stall: Stall) -> ExtractionReport {
        self.diagnostics.push(Diagnostic::Stalled(stall));
        self.report(ExtractionResult::Bounded { radius: diameter })
    }

    /// Centres the initial geodesic on the first diametral geodesic.
    fn seed(&mut self, diameter: u32) {
        let m = self.m;
        let (s, t) = (0..m.vertex_count())
            .find_map(|s| m.row(s).iter().position(|&d| d == diameter).map(|t| (s, t)))
            .expect("diameter is attained");
        let g = m.geodesic_between(s, t).into_vertices();
        let mid = diameter as usize / 2;
        let half = (self.params.initial_length / 2) as usize;
        self.c = g[mid];
        self.a = (1..=half).map(|i| g[mid + i]).collect();
        self.b = (1..=half).map(|i| g[mid - i]).collect();
        self.initial_side_len = half;
    }

    fn probe(&mut self, v: Vertex, z: &[Vertex]) -> Step {
        let ExtractionParams { r, p, q, .. } = self.params;
        let (side, j) = match claim3_side(self.m, self.f, r, p, q, z, v) {
            SideOutcome::LeftEnd(j) => (Side::B, self.b.len() - j),
            SideOutcome::RightEnd(j) => (Side::A, j - self.b.len()),
            SideOutcome::Witness(w) => return Step::Falsified(w),
            SideOutcome::HypothesisUnmet(reason) => {
                return Step::Stalled(Stall::SideUndecided { probe: v, reason })
            }
        };
        // `j` is now the 1-based index of the nearest vertex on its side.
        self.extend(side, v, j)
    }

    fn extend(&mut self, side: Side, v: Vertex, nearest: usize) -> Step {
        let m = self.m;
        let ExtractionParams { r, p, .. } = self.params;
        let line = self.side(side).to_vec();
        let anchor = line[3 * p as usize - 1];
        let geo = m.geodesic_between(self.c, v).into_vertices();
        let t = geo.len() - 1;
        if t <= line.len() {
            return Step::Stalled(Stall::NoGrowth { probe: v, side });
        }

        let anchor_row = m.row(anchor);
        let hits: Vec<usize> = (1..t).filter(|&i| anchor_row[geo[i]] <= r).collect();
        if hits.is_empty() {
            return match self.anchor_chain(&line, nearest, &geo) {
                Some(w) => Step::Falsified(w),
                None => Step::Stalled(Stall::AnchorChainInconclusive { probe: v, side }),
            };
        }
        let Some(j) = hits
            .into_iter()
            .find(|&i| i <= line.len() && m.distance(line[i - 1], geo[i + 1]) <= p)
        else {
            return Step::Stalled(Stall::SpliceMismatch { probe: v, side });
        };

        let mut extended: Vec<Vertex> = line[..j].to_vec();
        extended.extend_from_slice(&geo[j + 1..]);

        let other = match side {
            Side::A => &self.b,
            Side::B => &self.a,
        };
        let far_end = *other.last().expect("sides are nonempty");
        let end_row = m.row(far_end);
        if let Some(pos) = (j..extended.len()).find(|&i| end_row[extended[i]] <= 3 * p) {
            let near = extended[pos];
            return match self.fold_chain(&extended, pos, other) {
                Some(w) => Step::Falsified(w),
                None => Step::Stalled(Stall::FoldBack { probe: v, side, near }),
            };
        }

        self.diagnostics.push(Diagnostic::AnchorBallMet { iteration: self.iterations, side, j });
        match side {
            Side::A => self.a = extended,
            Side::B => self.b = extended,
        }
        Step::Extended
    }

    /// Runs `(fixed, walk)` propagations in order, returning the first flip.
    /// `None` if every step is constant or one leaves its ball.
    fn chain(&self, steps: &[(Vertex, Vec<Vertex>)]) -> Option<Witness> {
        for (fixed, walk) in steps {
            match propagate(self.m, self.f, self.params.r, *fixed, walk) {
                Propagation::Constant => {}
                Propagation::Flip(w) => return Some(w),
                Propagation::EntersBall(_) => return None,
            }
        }
        None
    }

    /// The probe geodesic avoids `B(a_{3p}, r)`. Then `c` vs `a_{3p}`, `c`
    /// vs `u`, `u` vs `a_{3p}` and `a_{3p}` vs `c` are forced into an
    /// inconsistent cycle, so some propagation flips.
    fn anchor_chain(&self, line: &[Vertex], nearest: usize, geo: &[Vertex]) -> Option<Witness> {
        let m = self.m;
        let k = self.params.r as usize;
        let anchor_idx = 3 * self.params.p as usize - 1;
        let anchor = line[anchor_idx];
        let u = line[nearest - 1];
        let mut to_probe = m.geodesic_between(u, *geo.last().expect("nonempty")).into_vertices();
        to_probe.extend(geo.iter().rev().skip(1));
        let mut center_to_anchor = vec![self.c];
        center_to_anchor.extend_from_slice(&line[..=anchor_idx]);
        let steps = [
            (self.c, m.walk_through(&line[k..=anchor_idx])),
            (self.c, m.walk_through(&line[anchor_idx..nearest])),
            (u, m.walk_through(&center_to_anchor)),
            (anchor, to_probe),
        ];
        self.chain(&steps)
    }

    /// The extended side reaches within `3p` of the opposite end. Sliding
    /// from `a_{r+1}` out to the meeting point, across, and back down the
    /// other side to `b_{r+1}` equates `c`'s relation to both, which
    /// contradicts opposed sides.
    fn fold_chain(&self, extended: &[Vertex], pos: usize, other: &[Vertex]) -> Option<Witness> {
        if !self.sides_opposed() {
            return None;
        }
        let m = self.m;
        let k = self.params.r as usize;
        let far_end = *other.last().expect("nonempty");
        let back: Vec<Vertex> = other[k..].iter().rev().copied().collect();
        let steps = [
            (self.c, m.walk_through(&extended[k..=pos])),
            (self.c, m.geodesic_between(extended[pos], far_end).into_vertices()),
            (self.c, m.walk_through(&back)),
        ];
        self.chain(&steps)
    }

    fn finish(mut self) -> ExtractionReport {
        let m = self.m;
        let a_grown = self.a.len() > self.initial_side_len;
        let b_grown = self.b.len() > self.initial_side_len;
        let mut coord = BTreeMap::from([(self.c, 0i64)]);
        let is_ray = a_grown != b_grown;
        if is_ray {
            let grown = if a_grown { &self.a } else { &self.b };
            coord.extend(grown.iter().enumerate().map(|(i, &v)| (v, i as i64 + 1)));
        } else {
            coord.extend(self.a.iter().enumerate().map(|(i, &v)| (v, i as i64 + 1)));
            coord.extend(self.b.iter().enumerate().map(|(i, &v)| (v, -(i as i64) - 1)));
            if let Some(w) = self.check_crossings() {
                return self.report(ExtractionResult::Falsified { witness: w });
            }
        }
        let cert = tighten(m, &coord);
        debug_assert!(verify_qi(m, &cert).is_valid());
        let result = if is_ray { ExtractionResult::Ray { cert } } else { ExtractionResult::Line { cert } };
        let mut report = self.report(result);
        if report.within_declared_bounds() == Some(false) {
            report.diagnostics.push(Diagnostic::ConstantsAboveDeclared);
        }
        report
    }

    /// Sampled geodesics between far parts of the two sides must meet
    /// `B(c, 3p)`. A miss would equate `c`'s relation to `a_{r+1}` and
    /// `b_{r+1}`; with opposed sides that yields a witness.
    fn check_crossings(&mut self) -> Option<Witness> {
        let m = self.m;
        let p = self.params.p as usize;
        let k = self.params.r as usize;
        let center_row = m.row(self.c);
        let sample = |len: usize| -> Vec<usize> {
            let start = 3 * p + 1;
            if len < start {
                return Vec::new();
            }
            let stride = ((len - start) / 8).max(1);
            let mut idx: Vec<usize> = (start..=len).step_by(stride).collect();
            if idx.last() != Some(&len) {
                idx.push(len);
            }
            idx
        };
        for &i in &sample(self.a.len()) {
            for &l in &sample(self.b.len()) {
                let (ai, bl) = (self.a[i - 1], self.b[l - 1]);
                let geo = m.geodesic_between(ai, bl);
                if geo.vertices().iter().any(|&w| center_row[w] <= 3 * p as u32) {
                    continue;
                }
                self.diagnostics.push(Diagnostic::CrossingMissesCenter { a: ai, b: bl });
                if self.sides_opposed() {
                    let back: Vec<Vertex> = self.b[k..l].iter().rev().copied().collect();
                    let steps = [
                        (self.c, m.walk_through(&self.a[k..i])),
                        (self.c, geo.into_vertices()),
                        (self.c, m.walk_through(&back)),
                    ];
                    if let Some(w) = self.chain(&steps) {
                        return Some(w);
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::selector::id_min_selector;

    #[test]
    fn params_for_unit_modulus() {
        let p = ExtractionParams::for_modulus(1);
        assert_eq!((p.p, p.n, p.q, p.initial_length, p.largeness_threshold), (3, 49, 9, 50, 61));
    }

    #[test]
    fn short_path_is_bounded() {
        let m = PathMetric::new(generators::path(40));
        let rep = extract_line(&m, &id_min_selector(40));
        assert_eq!(rep.result, ExtractionResult::Bounded { radius: 39 });
    }

    #[test]
    fn long_path_gives_line() {
        let m = PathMetric::new(generators::path(200));
        let rep = extract_line(&m, &id_min_selector(200));
        assert_eq!(rep.params.r, 1);
        let cert = rep.certificate().expect("ray or line");
        assert!(verify_qi(&m, cert).is_valid());
        assert_eq!(rep.within_declared_bounds(), Some(true));
        assert_eq!(rep.max_slack, 0);
        // Every vertex within the stopping radius of the line.
        let mut line = rep.a_side.clone();
        line.extend(&rep.b_side);
        line.push(rep.center.unwrap());
        let dist = m.graph().bfs_from_set(&line);
        assert!(dist.iter().all(|&d| d <= rep.params.largeness_threshold));
    }

    #[test]
    fn asserted_modulus_falsified() {
        let m = PathMetric::new(generators::grid(12, 12));
        let f = id_min_selector(144);
        let rep = extract_line_with_modulus(&m, &f, 1);
        match rep.result {
            ExtractionResult::Falsified { witness } => assert!(witness.reverify(&m, &f, 1)),
            other => panic!("expected falsification, got {other:?}"),
        }
        let rep = extract_line(&m, &f);
        assert!(rep.params.r >= 12);
        assert_eq!(rep.result, ExtractionResult::Bounded { radius: 22 });
    }
}
