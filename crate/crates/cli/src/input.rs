//! Text input formats. Every parse error names the source, line and column.

use std::collections::HashMap;
use std::fmt;

use coarsekit::discretize::{FiniteMetricSpace, Rational, Shape};
use coarsekit::generators;
use coarsekit::order::LinearOrder;
use coarsekit::{build_graph, Graph, TwoSelector, Vertex, VertexPair};

#[derive(Debug)]
pub struct ParseError {
    pub source: String,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.source, self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

type Result<T> = std::result::Result<T, ParseError>;

/// A whitespace-separated token with its 1-based column.
struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

/// Non-empty lines with `#` comments removed.
fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token { text: &body[s..pos], col: body[..s].chars().count() + 1 });
                        start = None;
                    }
                    _ => {}
                }
            }
            (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
        })
        .collect()
}

struct Cursor<'s> {
    source: &'s str,
}

impl Cursor<'_> {
    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { source: self.source.to_string(), line, col, msg: msg.into() }
    }

    fn vertex(&self, line: usize, tok: &Token) -> Result<Vertex> {
        tok.text
            .parse()
            .map_err(|_| self.err(line, tok.col, format!("expected a vertex id, found `{}`", tok.text)))
    }

    fn arity(&self, line: &Line, want: usize, shape: &str) -> Result<()> {
        if line.tokens.len() != want {
            let col = line.tokens.get(want).map_or(1, |t| t.col);
            return Err(self.err(line.number, col, format!("expected `{shape}`")));
        }
        Ok(())
    }
}

pub fn parse_edges(source: &str, text: &str) -> Result<Vec<(Vertex, Vertex)>> {
    let cur = Cursor { source };
    let mut edges = Vec::new();
    for line in lines(text) {
        cur.arity(&line, 2, "u v")?;
        let (u, v) = (cur.vertex(line.number, &line.tokens[0])?, cur.vertex(line.number, &line.tokens[1])?);
        if u == v {
            return Err(cur.err(line.number, line.tokens[1].col, format!("self-loop at {u}")));
        }
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(cur.err(1, 1, "graph file has no edges"));
    }
    Ok(edges)
}

fn parse_usize_list(source: &str, text: &str, col0: usize, sep: char) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut col = col0;
    for part in text.split(sep) {
        let v = part.trim().parse().map_err(|_| ParseError {
            source: source.to_string(),
            line: 1,
            col,
            msg: format!("expected a nonnegative integer, found `{part}`"),
        })?;
        out.push(v);
        col += part.chars().count() + 1;
    }
    Ok(out)
}

/// `path:N`, `cycle:N`, `grid:WxH`, `tripod:A,B,C` or `comb:S,T`; `None` if
/// the spec names no generator.
pub fn parse_generator(spec: &str) -> Option<Result<Graph>> {
    let (kind, args) = spec.split_once(':')?;
    let src = "--graph";
    let col0 = kind.len() + 2;
    let sized = |sep: char, n: usize| -> Result<Vec<usize>> {
        let vals = parse_usize_list(src, args, col0, sep)?;
        if vals.len() != n {
            return Err(ParseError { source: src.into(), line: 1, col: col0, msg: format!("`{kind}` takes {n} sizes") });
        }
        Ok(vals)
    };
    let positive = |vals: Vec<usize>| -> Result<Vec<usize>> {
        if vals.iter().any(|&v| v == 0) {
            return Err(ParseError { source: src.into(), line: 1, col: col0, msg: "sizes must be positive".into() });
        }
        Ok(vals)
    };
    let graph = match kind {
        "path" => sized(',', 1).and_then(positive).map(|v| generators::path(v[0])),
        "cycle" => sized(',', 1).and_then(|v| {
            if v[0] < 3 {
                Err(ParseError { source: src.into(), line: 1, col: col0, msg: "a cycle needs at least 3 vertices".into() })
            } else {
                Ok(generators::cycle(v[0]))
            }
        }),
        "grid" => sized('x', 2).and_then(positive).map(|v| generators::grid(v[0], v[1])),
        "tripod" => sized(',', 3).and_then(positive).map(|v| generators::tripod(v[0], v[1], v[2])),
        "comb" => sized(',', 2).and_then(positive).map(|v| generators::comb(v[0], v[1])),
        _ => return None,
    };
    Some(graph)
}

pub fn graph_from_file(source: &str, text: &str) -> anyhow::Result<Graph> {
    let edges = parse_edges(source, text)?;
    Ok(build_graph(&edges)?)
}

/// Lines `a b -> c`; every pair must appear exactly once.
pub fn parse_selector(source: &str, text: &str, vertex_count: usize) -> Result<TwoSelector> {
    let cur = Cursor { source };
    let mut choices: HashMap<VertexPair, Vertex> = HashMap::new();
    for line in lines(text) {
        cur.arity(&line, 4, "a b -> c")?;
        let t = &line.tokens;
        if t[2].text != "->" {
            return Err(cur.err(line.number, t[2].col, "expected `->`"));
        }
        let (a, b, c) = (cur.vertex(line.number, &t[0])?, cur.vertex(line.number, &t[1])?, cur.vertex(line.number, &t[3])?);
        for (v, tok) in [(a, &t[0]), (b, &t[1])] {
            if v >= vertex_count {
                return Err(cur.err(line.number, tok.col, format!("vertex {v} not in graph")));
            }
        }
        let pair = VertexPair::new(a, b).map_err(|_| cur.err(line.number, t[1].col, "pair needs two distinct vertices"))?;
        if !pair.contains(c) {
            return Err(cur.err(line.number, t[3].col, format!("choice {c} is not in {{{a}, {b}}}")));
        }
        if choices.insert(pair, c).is_some() {
            return Err(cur.err(line.number, t[0].col, format!("pair {{{a}, {b}}} listed twice")));
        }
    }
    if let Some(p) = VertexPair::all(vertex_count).find(|p| !choices.contains_key(p)) {
        return Err(cur.err(1, 1, format!("no choice for pair {{{}, {}}}", p.low(), p.high())));
    }
    Ok(TwoSelector::from_choices(vertex_count, &choices).expect("choices validated"))
}

/// One vertex per line, rank = line order.
pub fn parse_order(source: &str, text: &str, vertex_count: usize) -> Result<LinearOrder> {
    let cur = Cursor { source };
    let mut seq = Vec::new();
    let mut last = 1;
    for line in lines(text) {
        cur.arity(&line, 1, "vertex")?;
        seq.push(cur.vertex(line.number, &line.tokens[0])?);
        last = line.number;
        let v = *seq.last().unwrap();
        if v >= vertex_count {
            return Err(cur.err(line.number, 1, format!("vertex {v} not in graph")));
        }
        if seq[..seq.len() - 1].contains(&v) {
            return Err(cur.err(line.number, 1, format!("vertex {v} listed twice")));
        }
    }
    LinearOrder::from_sequence(&seq, vertex_count).map_err(|e| cur.err(last, 1, e.to_string()))
}

pub fn parse_rational(source: &str, line: usize, col: usize, text: &str) -> Result<Rational> {
    let bad = || ParseError { source: source.into(), line, col, msg: format!("expected a rational `n` or `n/d`, found `{text}`") };
    let r = match text.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?);
            if d <= 0 {
                return Err(bad());
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(text.parse().map_err(|_| bad())?),
    };
    Ok(r)
}

/// `segment:L`, `circle:C` or `rectangle:WxH`.
pub fn parse_shape(spec: &str) -> Result<Shape> {
    let src = "--shape";
    let bad = |msg: &str| ParseError { source: src.into(), line: 1, col: 1, msg: msg.into() };
    let (kind, args) = spec.split_once(':').ok_or_else(|| bad("expected `kind:size`"))?;
    let col = kind.len() + 2;
    match kind {
        "segment" => Ok(Shape::Segment(parse_rational(src, 1, col, args)?)),
        "circle" => Ok(Shape::Circle(parse_rational(src, 1, col, args)?)),
        "rectangle" => {
            let (w, h) = args.split_once('x').ok_or_else(|| bad("expected `rectangle:WxH`"))?;
            Ok(Shape::Rectangle(parse_rational(src, 1, col, w)?, parse_rational(src, 1, col + w.len() + 1, h)?))
        }
        _ => Err(bad("shape must be segment, circle or rectangle")),
    }
}

/// Header `points N`, then `i j num/den` for every `i < j`.
pub fn parse_sample(source: &str, text: &str) -> anyhow::Result<FiniteMetricSpace> {
    let cur = Cursor { source };
    let all = lines(text);
    let Some((head, rest)) = all.split_first() else {
        return Err(cur.err(1, 1, "empty sample file").into());
    };
    cur.arity(head, 2, "points N")?;
    if head.tokens[0].text != "points" {
        return Err(cur.err(head.number, head.tokens[0].col, "expected `points N` header").into());
    }
    let n = cur.vertex(head.number, &head.tokens[1])?;
    if n == 0 {
        return Err(cur.err(head.number, head.tokens[1].col, "need at least one point").into());
    }
    let mut dist: Vec<Option<Rational>> = vec![None; n * n];
    for line in rest {
        cur.arity(line, 3, "i j num/den")?;
        let t = &line.tokens;
        let (i, j) = (cur.vertex(line.number, &t[0])?, cur.vertex(line.number, &t[1])?);
        if i >= j || j >= n {
            return Err(cur.err(line.number, t[0].col, format!("need i < j < {n}")).into());
        }
        let d = parse_rational(source, line.number, t[2].col, t[2].text)?;
        if dist[i * n + j].replace(d).is_some() {
            return Err(cur.err(line.number, t[0].col, format!("d({i},{j}) given twice")).into());
        }
        dist[j * n + i] = Some(d);
    }
    let mut full = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { Some(Rational::from_integer(0)) } else { dist[i * n + j] };
            full.push(d.ok_or_else(|| cur.err(head.number, 1, format!("missing d({},{})", i.min(j), i.max(j))))?);
        }
    }
    Ok(FiniteMetricSpace::from_matrix(n, full)?)
}

pub fn format_sample(space: &FiniteMetricSpace) -> String {
    let n = space.len();
    let mut out = format!("points {n}\n");
    for i in 0..n {
        for j in i + 1..n {
            let d = space.distance(i, j);
            out.push_str(&format!("{i} {j} {}/{}\n", d.numer(), d.denom()));
        }
    }
    out
}

pub fn format_selector(f: &TwoSelector) -> String {
    VertexPair::all(f.vertex_count())
        .map(|p| format!("{} {} -> {}\n", p.low(), p.high(), f.choose(p)))
        .collect()
}
