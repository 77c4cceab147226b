mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coarsekit::claims::{claim1_propagate, claim2_check, claim3_q, claim3_side, ClaimConfig, ClaimOutcome, SideOutcome};
use coarsekit::discretize::{certify_net, greedy_net_with, net_graph, sample_space, FiniteMetricSpace, Net, NetStrategy, Rational};
use coarsekit::extraction::{extract_line, extract_line_with_modulus, ExtractionResult};
use coarsekit::hyperspace::{hausdorff_distance, pair_hausdorff, FiniteSubset};
use coarsekit::order::{is_interval_entourage, min_compat_radius, CompatResult, IntervalCheck, LinearOrder};
use coarsekit::qi::{verify_qi, QuasiIsometryCert};
use coarsekit::search::{min_modulus_search, minimal_modulus, SearchConfig, SearchOutcome, VariableOrder};
use coarsekit::selector::{id_min_selector, modulus, order_to_selector, verify_selector, Verification, Witness};
use coarsekit::{PathMetric, TwoSelector, VertexPair};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "coarsekit", version, about = "Coarse geometry of finite graphs: selectors, line extraction, nets")]
struct Cli {
    /// Add wall-clock timing to the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GraphArg {
    /// Edge-list file, or a generator: path:N, cycle:N, grid:WxH, tripod:A,B,C, comb:S,T.
    #[arg(long)]
    graph: String,
}

#[derive(Args, Clone)]
struct SelectorArg {
    /// min, lexmin (both: minimum vertex id), from-order (needs --order), or a selector file.
    #[arg(long)]
    selector: String,
    /// Order file used by `--selector from-order`.
    #[arg(long)]
    order: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Distances and geodesics.
    Metric {
        #[command(flatten)]
        graph: GraphArg,
        /// Vertex pairs `u,v`; repeatable.
        #[arg(long = "pairs")]
        pairs: Vec<String>,
    },
    /// Hausdorff distance of two vertex sets.
    Hausdorff {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    #[command(subcommand)]
    Selector(SelectorCmd),
    #[command(subcommand)]
    Claims(ClaimsCmd),
    /// Coarse ray/line extraction.
    Extract {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        selector: SelectorArg,
        /// Claimed modulus; computed exactly when absent.
        #[arg(long)]
        r: Option<u32>,
    },
    #[command(subcommand)]
    Qi(QiCmd),
    #[command(subcommand)]
    Net(NetCmd),
    #[command(subcommand)]
    Order(OrderCmd),
    /// Write a metric sample file for a shape.
    Sample {
        #[command(flatten)]
        sample: ShapeArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SelectorCmd {
    /// Exact modulus with an attaining pair.
    Modulus {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        selector: SelectorArg,
    },
    /// Check modulus `r`, or confirm a reported witness.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        selector: SelectorArg,
        #[arg(long)]
        r: u32,
        /// JSON file holding a witness (a bare witness or any report containing one).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// The minimum-id selector.
    Min {
        #[command(flatten)]
        graph: GraphArg,
        /// Write the selector table here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The order-minimum selector.
    FromOrder {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        order: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Least achievable modulus by backtracking search.
    Search {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        r_cap: u32,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Shuffle the variable order with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ClaimCommon {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    selector: SelectorArg,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    v: usize,
}

#[derive(Subcommand)]
enum ClaimsCmd {
    /// `a ≺ v` propagates to `b ≺ v`.
    C1 {
        #[command(flatten)]
        common: ClaimCommon,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// The nearest sequence vertex is within `p + r` of `v`.
    C2 {
        #[command(flatten)]
        common: ClaimCommon,
        /// Sequence `z0,z1,...`.
        #[arg(long)]
        z: String,
        /// Geodesic from `v` to the nearest `z_k`.
        #[arg(long)]
        geodesic: Option<String>,
    },
    /// Which end window holds the vertex nearest to `v`.
    C3 {
        #[command(flatten)]
        common: ClaimCommon,
        #[arg(long)]
        z: String,
        /// Window width; defaults to 2(r+p)+1.
        #[arg(long)]
        q: Option<u32>,
    },
}

#[derive(Subcommand)]
enum QiCmd {
    /// Check a quasi-isometry certificate (bare, or an `extract` report).
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Args, Clone)]
struct ShapeArg {
    /// segment:L, circle:C or rectangle:WxH.
    #[arg(long)]
    shape: Option<String>,
    /// Sampling step, e.g. 1/2.
    #[arg(long, default_value = "1/2")]
    step: String,
}

#[derive(Args, Clone)]
struct SpaceArg {
    /// Metric sample file; alternative to --shape.
    #[arg(long)]
    sample: Option<PathBuf>,
    #[command(flatten)]
    shape: ShapeArg,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    strategy: Strategy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Auto,
    Farthest,
    Attached,
    Index,
}

#[derive(Subcommand)]
enum NetCmd {
    /// Maximal 2-separated net and its graph.
    Build {
        #[command(flatten)]
        space: SpaceArg,
        /// Write the net graph as an edge list.
        #[arg(long)]
        emit_graph: Option<PathBuf>,
    },
    /// Largeness and distance comparability of the net graph.
    Certify {
        #[command(flatten)]
        space: SpaceArg,
    },
}

#[derive(Subcommand)]
enum OrderCmd {
    /// Least compatibility radius for entourage radius `e`.
    Compat {
        #[command(flatten)]
        graph: GraphArg,
        /// Order file, or `natural`.
        #[arg(long)]
        order: String,
        #[arg(long)]
        e: u32,
        /// Largest radius tried; defaults to the diameter.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Whether every radius-`e` ball is an order interval.
    Interval {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        order: String,
        #[arg(long)]
        e: u32,
    },
}

/// Everything read during a run, hashed in read order.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(args: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for a in args {
            hasher.update(a.as_bytes());
            hasher.update([0]);
        }
        Inputs { hasher }
    }

    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(path.to_string_lossy().as_bytes());
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0]);
        Ok(text)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

struct Outcome {
    payload: Value,
    /// Exit 1: the checked property fails.
    failed: bool,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome { payload, failed: false }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn rational(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn load_metric(inputs: &mut Inputs, arg: &GraphArg) -> anyhow::Result<PathMetric> {
    let graph = match input::parse_generator(&arg.graph) {
        Some(g) => g?,
        None => {
            let path = Path::new(&arg.graph);
            let text = inputs.read(path)?;
            input::graph_from_file(&arg.graph, &text)?
        }
    };
    Ok(PathMetric::new(graph))
}

fn load_order(inputs: &mut Inputs, spec: &str, n: usize) -> anyhow::Result<LinearOrder> {
    if spec == "natural" {
        return Ok(LinearOrder::natural(n));
    }
    let text = inputs.read(Path::new(spec))?;
    Ok(input::parse_order(spec, &text, n)?)
}

fn load_selector(inputs: &mut Inputs, arg: &SelectorArg, n: usize) -> anyhow::Result<TwoSelector> {
    match arg.selector.as_str() {
        "min" | "lexmin" => Ok(id_min_selector(n)),
        "from-order" => {
            let path = arg.order.as_ref().ok_or_else(|| anyhow!("--selector from-order needs --order FILE"))?;
            Ok(order_to_selector(&load_order(inputs, &path.to_string_lossy(), n)?))
        }
        file => {
            let text = inputs.read(Path::new(file))?;
            Ok(input::parse_selector(file, &text, n)?)
        }
    }
}

fn check_vertex(m: &PathMetric, v: usize, what: &str) -> anyhow::Result<()> {
    if v >= m.vertex_count() {
        bail!("{what} {v} is not a vertex (graph has {})", m.vertex_count());
    }
    Ok(())
}

fn vertex_list(m: &PathMetric, source: &str, text: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut col = 1;
    for part in text.split(',') {
        let v: usize = part.trim().parse().map_err(|_| input::ParseError {
            source: source.into(),
            line: 1,
            col,
            msg: format!("expected a vertex id, found `{part}`"),
        })?;
        check_vertex(m, v, "vertex")?;
        out.push(v);
        col += part.chars().count() + 1;
    }
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// First object in `v` shaped like a witness.
fn find_witness(v: &Value) -> Option<Witness> {
    match v {
        Value::Object(map) => {
            if ["a", "b", "hausdorff", "image_distance"].iter().all(|k| map.contains_key(*k)) {
                if let Ok(w) = serde_json::from_value(v.clone()) {
                    return Some(w);
                }
            }
            map.values().find_map(find_witness)
        }
        Value::Array(items) => items.iter().find_map(find_witness),
        _ => None,
    }
}

fn find_cert(v: &Value) -> Option<QuasiIsometryCert> {
    match v {
        Value::Object(map) => {
            if ["coord", "lambda", "c", "d"].iter().all(|k| map.contains_key(*k)) {
                if let Ok(c) = serde_json::from_value(v.clone()) {
                    return Some(c);
                }
            }
            map.values().find_map(find_cert)
        }
        Value::Array(items) => items.iter().find_map(find_cert),
        _ => None,
    }
}

fn read_json(inputs: &mut Inputs, path: &Path) -> anyhow::Result<Value> {
    let text = inputs.read(path)?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(input::ParseError { source: path.display().to_string(), line: e.line(), col: e.column(), msg: e.to_string() })
    })
}

fn witness_json(w: &Witness) -> Value {
    to_value(w)
}

fn selector_summary(m: &PathMetric, f: &TwoSelector, inputs_emit: Option<&PathBuf>) -> anyhow::Result<Value> {
    let md = modulus(m, f);
    if let Some(path) = inputs_emit {
        write_file(path, &input::format_selector(f))?;
    }
    Ok(json!({ "modulus": md.r, "pairs": VertexPair::count(m.vertex_count()) }))
}

fn run_selector(inputs: &mut Inputs, cmd: &SelectorCmd) -> anyhow::Result<Outcome> {
    match cmd {
        SelectorCmd::Modulus { graph, selector } => {
            let m = load_metric(inputs, graph)?;
            let f = load_selector(inputs, selector, m.vertex_count())?;
            let md = modulus(&m, &f);
            let attaining = md.attaining.map(|(a, b)| {
                json!({ "a": a, "b": b, "hausdorff": pair_hausdorff(&m, a, b), "image_distance": md.r })
            });
            // The attaining pair is a witness against r - 1.
            let below = match md.r.checked_sub(1).map(|r| verify_selector(&m, &f, r)) {
                Some(Verification::Witness(w)) => Some(witness_json(&w)),
                _ => None,
            };
            Ok(Outcome::ok(json!({ "r": md.r, "attaining": attaining, "witness_below": below })))
        }
        SelectorCmd::Verify { graph, selector, r, witness } => {
            let m = load_metric(inputs, graph)?;
            let f = load_selector(inputs, selector, m.vertex_count())?;
            if let Some(path) = witness {
                let value = read_json(inputs, path)?;
                let w = find_witness(&value).ok_or_else(|| anyhow!("{}: no witness found", path.display()))?;
                for v in w.a.elements().into_iter().chain(w.b.elements()) {
                    check_vertex(&m, v, "witness vertex")?;
                }
                let recomputed = Witness::checked(&m, &f, *r, w.a, w.b);
                return Ok(Outcome {
                    payload: json!({
                        "r": r,
                        "witness": { "a": w.a, "b": w.b },
                        "hausdorff": pair_hausdorff(&m, w.a, w.b),
                        "image_distance": m.distance(f.choose(w.a), f.choose(w.b)),
                        "violation_confirmed": recomputed.is_some(),
                    }),
                    failed: recomputed.is_none(),
                });
            }
            Ok(match verify_selector(&m, &f, *r) {
                Verification::Holds => Outcome::ok(json!({ "r": r, "verdict": "holds" })),
                Verification::Witness(w) => Outcome {
                    payload: json!({ "r": r, "verdict": "violated", "witness": witness_json(&w) }),
                    failed: true,
                },
            })
        }
        SelectorCmd::Min { graph, emit } => {
            let m = load_metric(inputs, graph)?;
            let f = id_min_selector(m.vertex_count());
            Ok(Outcome::ok(selector_summary(&m, &f, emit.as_ref())?))
        }
        SelectorCmd::FromOrder { graph, order, emit } => {
            let m = load_metric(inputs, graph)?;
            let order = load_order(inputs, &order.to_string_lossy(), m.vertex_count())?;
            let f = order_to_selector(&order);
            Ok(Outcome::ok(selector_summary(&m, &f, emit.as_ref())?))
        }
        SelectorCmd::Search { graph, r_cap, budget, seed, emit } => {
            let m = load_metric(inputs, graph)?;
            let config = SearchConfig {
                node_budget: *budget,
                order: seed.map_or(VariableOrder::MostConstrained, VariableOrder::Shuffled),
                ..SearchConfig::default()
            };
            let outcomes = min_modulus_search(&m, *r_cap, &config)?;
            let per_r: Vec<Value> = outcomes
                .iter()
                .map(|o| match o {
                    SearchOutcome::Feasible { r, stats, .. } => json!({ "r": r, "feasible": true, "stats": stats }),
                    SearchOutcome::Infeasible { r, stats } => json!({ "r": r, "feasible": false, "stats": stats }),
                })
                .collect();
            let best = minimal_modulus(&outcomes);
            if let (Some(path), Some(SearchOutcome::Feasible { selector, .. })) =
                (emit, outcomes.iter().find(|o| o.is_feasible()))
            {
                write_file(path, &input::format_selector(selector))?;
            }
            Ok(Outcome::ok(json!({ "r_cap": r_cap, "minimal_modulus": best, "per_r": per_r })))
        }
    }
}

fn claim_value(outcome: &ClaimOutcome) -> (Value, bool) {
    (to_value(outcome), matches!(outcome, ClaimOutcome::Witness(_)))
}

fn run_claims(inputs: &mut Inputs, cmd: &ClaimsCmd) -> anyhow::Result<Outcome> {
    let common = match cmd {
        ClaimsCmd::C1 { common, .. } | ClaimsCmd::C2 { common, .. } | ClaimsCmd::C3 { common, .. } => common,
    };
    let m = load_metric(inputs, &common.graph)?;
    let f = load_selector(inputs, &common.selector, m.vertex_count())?;
    check_vertex(&m, common.v, "--v")?;
    let (r, p, v) = (common.r, common.p, common.v);
    let (payload, failed) = match cmd {
        ClaimsCmd::C1 { a, b, .. } => {
            check_vertex(&m, *a, "--a")?;
            check_vertex(&m, *b, "--b")?;
            claim_value(&claim1_propagate(&m, &f, r, v, *a, *b, p))
        }
        ClaimsCmd::C2 { z, geodesic, .. } => {
            let z = vertex_list(&m, "--z", z)?;
            let geodesic = geodesic.as_ref().map(|g| vertex_list(&m, "--geodesic", g)).transpose()?;
            claim_value(&claim2_check(&m, &f, &ClaimConfig { v, z, p, r, geodesic }))
        }
        ClaimsCmd::C3 { z, q, .. } => {
            let z = vertex_list(&m, "--z", z)?;
            let q = q.unwrap_or_else(|| claim3_q(r, p));
            let outcome = claim3_side(&m, &f, r, p, q, &z, v);
            (json!({ "q": q, "outcome": to_value(&outcome) }), matches!(outcome, SideOutcome::Witness(_)))
        }
    };
    Ok(Outcome { payload, failed })
}

fn load_space(inputs: &mut Inputs, arg: &SpaceArg) -> anyhow::Result<FiniteMetricSpace> {
    match (&arg.sample, &arg.shape.shape) {
        (Some(path), None) => {
            let text = inputs.read(path)?;
            input::parse_sample(&path.display().to_string(), &text)
        }
        (None, Some(_)) => shape_space(&arg.shape),
        _ => bail!("give exactly one of --sample FILE or --shape SPEC"),
    }
}

fn shape_space(arg: &ShapeArg) -> anyhow::Result<FiniteMetricSpace> {
    let spec = arg.shape.as_deref().ok_or_else(|| anyhow!("--shape is required"))?;
    let shape = input::parse_shape(spec)?;
    let step = input::parse_rational("--step", 1, 1, &arg.step)?;
    Ok(sample_space(shape, step)?)
}

fn net_json(space: &FiniteMetricSpace, net: &Net) -> Value {
    let points: Vec<Value> = net
        .points
        .iter()
        .map(|&i| {
            let pos: Vec<String> = space.positions.get(i).map(|p| p.iter().map(|&x| rational(x)).collect()).unwrap_or_default();
            json!({ "index": i, "position": pos })
        })
        .collect();
    json!(points)
}

fn run_net(inputs: &mut Inputs, cmd: &NetCmd) -> anyhow::Result<Outcome> {
    let space_arg = match cmd {
        NetCmd::Build { space, .. } | NetCmd::Certify { space } => space,
    };
    let space = load_space(inputs, space_arg)?;
    let strategy = match space_arg.strategy {
        Strategy::Auto => NetStrategy::Auto,
        Strategy::Farthest => NetStrategy::FarthestPoint,
        Strategy::Attached => NetStrategy::Attached,
        Strategy::Index => NetStrategy::IndexScan,
    };
    let net = greedy_net_with(&space, strategy);
    let ng = match net_graph(&space, &net) {
        Ok(ng) => ng,
        Err(coarsekit::discretize::DiscretizeError::DisconnectedNetGraph { components }) => {
            return Ok(Outcome {
                payload: json!({ "net": net_json(&space, &net), "disconnected": components }),
                failed: true,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let payload = match cmd {
        NetCmd::Build { emit_graph, .. } => {
            if let Some(path) = emit_graph {
                let text: String = ng.graph.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect();
                write_file(path, &text)?;
            }
            let edges: Vec<Value> = ng
                .witnesses
                .iter()
                .map(|(&(k, l), &x)| json!({ "u": k, "v": l, "witness_sample": x }))
                .collect();
            json!({ "samples": space.len(), "net": net_json(&space, &net), "edges": edges })
        }
        NetCmd::Certify { .. } => {
            let cert = certify_net(&space, &net, &ng.graph);
            json!({
                "samples": space.len(),
                "net_points": net.points.len(),
                "largeness": rational(cert.largeness),
                "separation": cert.separation.map(rational),
                "ambient_per_hop": rational(cert.ambient_per_hop),
                "hops_per_ambient": rational(cert.hops_per_ambient),
                "within_four": cert.within_four,
            })
        }
    };
    let failed = match cmd {
        NetCmd::Certify { .. } => payload["within_four"] == Value::Bool(false),
        NetCmd::Build { .. } => false,
    };
    Ok(Outcome { payload, failed })
}

fn run_order(inputs: &mut Inputs, cmd: &OrderCmd) -> anyhow::Result<Outcome> {
    match cmd {
        OrderCmd::Compat { graph, order, e, cap } => {
            let m = load_metric(inputs, graph)?;
            let order = load_order(inputs, order, m.vertex_count())?;
            let cap = cap.unwrap_or_else(|| m.diameter()).max(*e);
            let rep = min_compat_radius(&m, &order, *e, cap);
            let failed = matches!(rep.result, CompatResult::NotFound(_));
            Ok(Outcome { payload: to_value(&rep), failed })
        }
        OrderCmd::Interval { graph, order, e } => {
            let m = load_metric(inputs, graph)?;
            let order = load_order(inputs, order, m.vertex_count())?;
            let check = is_interval_entourage(&m, &order, *e);
            let failed = matches!(check, IntervalCheck::Counterexample { .. });
            Ok(Outcome { payload: json!({ "e": e, "result": to_value(&check) }), failed })
        }
    }
}

fn run(inputs: &mut Inputs, command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Metric { graph, pairs } => {
            let m = load_metric(inputs, graph)?;
            let mut rows = Vec::new();
            for spec in pairs {
                let vs = vertex_list(&m, "--pairs", spec)?;
                let [u, v] = vs[..] else { bail!("--pairs takes `u,v`, got `{spec}`") };
                let geo = m.geodesic_between(u, v).into_vertices();
                rows.push(json!({ "u": u, "v": v, "distance": m.distance(u, v), "geodesic": geo }));
            }
            let g = m.graph();
            Ok(Outcome::ok(json!({
                "vertex_count": g.vertex_count(),
                "edge_count": g.edge_count(),
                "duplicate_edges": g.duplicate_edges(),
                "diameter": m.diameter(),
                "pairs": rows,
            })))
        }
        Command::Hausdorff { graph, a, b } => {
            let m = load_metric(inputs, graph)?;
            let sa = FiniteSubset::new(vertex_list(&m, "--a", a)?)?;
            let sb = FiniteSubset::new(vertex_list(&m, "--b", b)?)?;
            Ok(Outcome::ok(json!({ "a": sa.vertices(), "b": sb.vertices(), "distance": hausdorff_distance(&m, &sa, &sb) })))
        }
        Command::Selector(cmd) => run_selector(inputs, cmd),
        Command::Claims(cmd) => run_claims(inputs, cmd),
        Command::Extract { graph, selector, r } => {
            let m = load_metric(inputs, graph)?;
            let f = load_selector(inputs, selector, m.vertex_count())?;
            let rep = match r {
                Some(r) => extract_line_with_modulus(&m, &f, *r),
                None => extract_line(&m, &f),
            };
            let failed = matches!(rep.result, ExtractionResult::Falsified { .. });
            let mut payload = to_value(&rep);
            payload["within_declared_bounds"] = to_value(&rep.within_declared_bounds());
            Ok(Outcome { payload, failed })
        }
        Command::Qi(QiCmd::Verify { graph, cert }) => {
            let m = load_metric(inputs, graph)?;
            let value = read_json(inputs, cert)?;
            let cert = find_cert(&value).ok_or_else(|| anyhow!("{}: no certificate found", cert.display()))?;
            if cert.coord.is_empty() {
                bail!("certificate has an empty domain");
            }
            if let Some(&v) = cert.coord.keys().find(|&&v| v >= m.vertex_count()) {
                bail!("certificate vertex {v} is not in the graph");
            }
            let verdict = verify_qi(&m, &cert);
            let summary = json!({
                "domain_size": cert.coord.len(),
                "lambda": rational(cert.lambda),
                "c": cert.c,
                "d": cert.d,
            });
            Ok(Outcome { payload: json!({ "verdict": to_value(&verdict), "certificate": summary }), failed: !verdict.is_valid() })
        }
        Command::Net(cmd) => run_net(inputs, cmd),
        Command::Order(cmd) => run_order(inputs, cmd),
        Command::Sample { sample, out } => {
            let space = shape_space(sample)?;
            write_file(out, &input::format_sample(&space))?;
            Ok(Outcome::ok(json!({ "points": space.len(), "delta": rational(space.delta), "out": out })))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Metric { .. } => "metric",
        Command::Hausdorff { .. } => "hausdorff",
        Command::Selector(s) => match s {
            SelectorCmd::Modulus { .. } => "selector modulus",
            SelectorCmd::Verify { .. } => "selector verify",
            SelectorCmd::Min { .. } => "selector min",
            SelectorCmd::FromOrder { .. } => "selector from-order",
            SelectorCmd::Search { .. } => "selector search",
        },
        Command::Claims(c) => match c {
            ClaimsCmd::C1 { .. } => "claims c1",
            ClaimsCmd::C2 { .. } => "claims c2",
            ClaimsCmd::C3 { .. } => "claims c3",
        },
        Command::Extract { .. } => "extract",
        Command::Qi(_) => "qi verify",
        Command::Net(NetCmd::Build { .. }) => "net build",
        Command::Net(NetCmd::Certify { .. }) => "net certify",
        Command::Order(OrderCmd::Compat { .. }) => "order compat",
        Command::Order(OrderCmd::Interval { .. }) => "order interval",
        Command::Sample { .. } => "sample",
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    inputs_sha256: String,
    outcome: Value,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).filter(|a| a != "--timing").collect();
    let mut inputs = Inputs::new(&args);
    let start = Instant::now();
    let outcome = match run(&mut inputs, &cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = RunReport {
        command: command_name(&cli.command),
        inputs_sha256: inputs.digest(),
        outcome: outcome.payload,
        version: env!("CARGO_PKG_VERSION"),
        timing_ms: cli.timing.then(|| start.elapsed().as_millis()),
    };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(if outcome.failed { 1 } else { 0 })
}
