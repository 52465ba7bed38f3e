use std::io::Read as _;

use a2stab::braid::{braid_eval, AutEq, AutEqInfty, BraidWord, Transporter};
use a2stab::periods::{
    airy_convention, airy_residual, circle_loop, cubic_roots, eval_cubic, exp_period, hypergeom_params,
    hypergeom_residual, integrate_cycle, monodromy_matrix, round_integer, standard_cycles,
};
use a2stab::quadrature::QuadConfig;
use a2stab::render::{graph_svg, layout_positions, region_svg, Layout, RenderSpec};
use a2stab::schwarz::{f_infty_map, f_map, region_classify};
use a2stab::stability::{
    charges_from_cubic, classify_fundamental, cubic_from_stability, f_infty_map_inverse, f_map_inverse,
    g_coordinate, make_stability, point_from_g, reduce_to_fundamental, wall_walk, StabilityPoint,
};
use a2stab::tilting::{exchange_graph, projective_exchange_graph, Heart};
use a2stab::{Error, Level};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{BraidCmd, Command, GraphArgs, GraphFormat, LayoutArg, MapCmd, OdeCmd, PeriodsCmd, RegionCmd, StabCmd};

pub enum Output {
    Value(Value),
    Raw(String),
}

pub enum Failure {
    Parse(String),
    Domain(Error, Value),
}

type Res<T> = Result<T, Failure>;

fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Attaches a context to library errors; malformed braid words count as
/// parse errors.
fn ctx<T>(context: &str, r: a2stab::Result<T>) -> Res<T> {
    r.map_err(|e| match e {
        Error::BraidParse(m) => Failure::Parse(format!("malformed braid word: {m}")),
        e => Failure::Domain(e, json!({"command": context})),
    })
}

pub fn run(cmd: &Command) -> Res<Output> {
    match cmd {
        Command::Braid(c) => braid(c).map(Output::Value),
        Command::Graph(g) => graph(g),
        Command::Periods(c) => periods(c).map(Output::Value),
        Command::Ode(c) => ode(c).map(Output::Value),
        Command::Map(c) => map(c).map(Output::Value),
        Command::Region(RegionCmd::Svg { n, height }) => ctx("region svg", region_svg(*n, *height)).map(Output::Raw),
        Command::Region(RegionCmd::Classify { n, z }) => {
            let q = region_classify(*n, *z);
            Ok(Output::Value(json!({
                "n": n, "z": cx(*z), "verdict": q.verdict, "distance_estimate": q.distance_estimate,
            })))
        }
        Command::Stab(c) => stab(c).map(Output::Value),
    }
}

fn auteq_json(a: &AutEq) -> Value {
    json!({
        "n": a.n,
        "sl2": a.sl2.0,
        "expsum": a.expsum,
        "shift": a.shift,
        "kaction": a.kaction().0,
        "psl2": a.psl2().0 .0,
        "display": a.to_string(),
    })
}

fn braid(c: &BraidCmd) -> Res<Value> {
    let word = |w: &str| -> Res<BraidWord> { ctx("braid", w.parse::<BraidWord>()) };
    match c {
        BraidCmd::Eval { word: w } => {
            let e = braid_eval(&word(w)?);
            let normal = ctx("braid eval", e.to_word())?;
            Ok(json!({"sl2": e.sl2.0, "expsum": e.expsum, "normal_word": normal.to_string()}))
        }
        BraidCmd::Equal { left, right } => {
            let (l, r) = (braid_eval(&word(left)?), braid_eval(&word(right)?));
            Ok(json!({"equal": l == r}))
        }
        BraidCmd::Auteq { n, word: w, shift } => {
            word(w)?;
            let a = ctx("braid auteq", AutEq::from_word(*n, w, *shift))?;
            Ok(auteq_json(&a))
        }
        BraidCmd::Compose { n, left, left_shift, right, right_shift } => {
            word(left)?;
            word(right)?;
            let l = ctx("braid compose", AutEq::from_word(*n, left, *left_shift))?;
            let r = ctx("braid compose", AutEq::from_word(*n, right, *right_shift))?;
            Ok(auteq_json(&ctx("braid compose", l.compose(&r))?))
        }
    }
}

fn graph(g: &GraphArgs) -> Res<Output> {
    let mut spec = RenderSpec::new(g.n, g.radius);
    spec.style.node_size = g.node_size;
    if let Some(l) = g.layout {
        spec.layout = match l {
            LayoutArg::Disc => Layout::Disc,
            LayoutArg::Linear => Layout::Linear,
        };
    }
    ctx("graph", spec.validate())?;
    let graph = if g.projective {
        ctx("graph", projective_exchange_graph(g.n, g.radius))?
    } else {
        ctx("graph", exchange_graph(g.n, g.radius))?
    };
    match g.format.unwrap_or(GraphFormat::Json) {
        GraphFormat::Dot => Ok(Output::Raw(graph.to_dot())),
        GraphFormat::Svg => ctx("graph", graph_svg(&graph, &spec)).map(Output::Raw),
        GraphFormat::Json => {
            let pos = ctx("graph", layout_positions(&graph, spec.layout))?;
            let nodes: Vec<Value> = graph
                .nodes
                .iter()
                .zip(&pos)
                .map(|(v, p)| {
                    json!({
                        "id": v.id, "hash": v.hash, "label": v.heart.label(), "depth": v.depth,
                        "full": v.full, "x": p.0, "y": p.1,
                    })
                })
                .collect();
            let edges: Vec<Value> = graph
                .edges
                .iter()
                .map(|e| json!({"src": e.src, "dst": e.dst, "simple": e.simple, "direction": e.direction}))
                .collect();
            Ok(Output::Value(json!({
                "n": g.n,
                "projective": g.projective,
                "radius": g.radius,
                "node_count": graph.nodes.len(),
                "full_count": graph.full_count(),
                "chain_count": graph.nodes.len() - graph.full_count(),
                "edge_count": graph.edges.len(),
                "nodes": nodes,
                "edges": edges,
            })))
        }
    }
}

fn parse_loop(text: &str) -> Res<Vec<C64>> {
    let pts: Vec<[f64; 2]> =
        serde_json::from_str(text).map_err(|e| Failure::Parse(format!("malformed loop: {e}")))?;
    Ok(pts.into_iter().map(|p| C64::new(p[0], p[1])).collect())
}

fn periods(c: &PeriodsCmd) -> Res<Value> {
    match c {
        PeriodsCmd::Eval { n, a, b, cycle, nodes, tol } => {
            let cfg = QuadConfig { node_count: *nodes, target_tol: *tol, ..QuadConfig::default() };
            ctx("periods eval", cfg.validate())?;
            if !(1..=2).contains(cycle) {
                return Err(Failure::Domain(Error::InvalidSimple(*cycle), json!({"command": "periods eval"})));
            }
            let (value, est_error) = match n {
                Level::Finite(_) => {
                    let roots = ctx("periods eval", cubic_roots(*a, *b))?;
                    let cy = &ctx("periods eval", standard_cycles(*a, *b))?[cycle - 1];
                    let l = eval_cubic(&roots, cy.anchor()).ln();
                    let nu = ctx("periods eval", n.nu())?;
                    let p = ctx("periods eval", integrate_cycle(nu, &roots, cy, l, &cfg))?;
                    (p.value, p.est_error)
                }
                Level::Infinite => {
                    let lo = ctx("periods eval", exp_period(*a, *b, *cycle, &cfg))?;
                    let fine = QuadConfig { node_count: 2 * cfg.node_count, ..cfg };
                    let hi = ctx("periods eval", exp_period(*a, *b, *cycle, &fine))?;
                    (hi, (hi - lo).norm())
                }
            };
            Ok(json!({
                "n": n, "a": cx(*a), "b": cx(*b), "cycle": cycle,
                "value_re": value.re, "value_im": value.im, "est_error": est_error,
            }))
        }
        PeriodsCmd::Monodromy { n, center, radius, points, path } => {
            let path = match path {
                Some(text) => parse_loop(text)?,
                None => circle_loop(*center, *radius, std::f64::consts::PI, *points),
            };
            let m = ctx("periods monodromy", monodromy_matrix(*n, &path))?;
            let (int, dev) = round_integer(&m);
            let mj: Vec<Vec<Value>> = m.iter().map(|r| r.iter().map(|&z| cx(z)).collect()).collect();
            Ok(json!({"n": n, "matrix": mj, "integer_matrix": int, "integer_deviation": dev}))
        }
    }
}

fn ode(c: &OdeCmd) -> Res<Value> {
    match c {
        OdeCmd::Check { n, z } => {
            let (al, be, ga) = ctx("ode check", hypergeom_params(*n))?;
            let r = ctx("ode check", hypergeom_residual(*n, *z))?;
            Ok(json!({"n": n, "z": cx(*z), "alpha": al, "beta": be, "gamma": ga, "residual": r}))
        }
        OdeCmd::Airy { a } => {
            let conv = airy_convention();
            let r = ctx("ode airy", airy_residual(*a))?;
            Ok(json!({"a": cx(*a), "c2": conv.c2, "c1": conv.c1, "residual": r}))
        }
    }
}

fn map(c: &MapCmd) -> Res<Value> {
    match c {
        MapCmd::Eval { n, t, a } => {
            let p = match (n, t, a) {
                (Level::Finite(_), Some(t), None) => ctx("map eval", f_map(*n, *t))?,
                (Level::Infinite, None, Some(a)) => ctx("map eval", f_infty_map(*a))?,
                (Level::Finite(_), _, _) => return Err(Failure::Parse("finite levels take --t only".into())),
                (Level::Infinite, _, _) => return Err(Failure::Parse("n = inf takes --a only".into())),
            };
            let verdict = region_classify(*n, p.z).verdict;
            Ok(json!({
                "n": n, "t_re": p.t.re, "t_im": p.t.im, "z_re": p.z.re, "z_im": p.z.im,
                "branch_tag": p.branch_tag, "verdict": verdict,
            }))
        }
        MapCmd::Inverse { n, z } => {
            let (key, w) = match n {
                Level::Finite(_) => ("t", ctx("map inverse", f_map_inverse(*n, *z))?),
                Level::Infinite => ("a", ctx("map inverse", f_infty_map_inverse(*z))?),
            };
            Ok(json!({"n": n, "z": cx(*z), key: cx(w)}))
        }
    }
}

fn read_point(arg: &str) -> Res<StabilityPoint> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Parse(format!("reading stdin: {e}")))?;
        s
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("reading {path}: {e}")))?
    } else {
        arg.to_string()
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("malformed point: {e}")))?;
    serde_json::from_value(value).map_err(|e| {
        Failure::Domain(Error::NonCanonicalHeart(e.to_string()), json!({"command": "stab", "input": "point"}))
    })
}

fn point_json(p: &StabilityPoint) -> Value {
    serde_json::to_value(p).expect("points serialize")
}

/// Uniform sample from the part of the interior of `R_n` with
/// `|Im z| < 1.2` and `Re z > max((2 - n)/2, -3)`.
pub fn random_interior_g(n: Level, rng: &mut ChaCha8Rng) -> C64 {
    let left = a2stab::schwarz::line_abscissa(n).unwrap_or(-3.0).max(-3.0);
    loop {
        let z = C64::new(rng.gen_range(left..1.0), rng.gen_range(-1.2..1.2));
        let q = region_classify(n, z);
        if q.verdict == a2stab::schwarz::RegionVerdict::Interior && q.distance_estimate > 1e-3 {
            return z;
        }
    }
}

fn stab(c: &StabCmd) -> Res<Value> {
    match c {
        StabCmd::Make { n, g, z1, z2, word, shift, sigma_power, k } => {
            let p = match (g, z1, z2) {
                (Some(g), None, None) => ctx("stab make", point_from_g(*n, *g))?,
                (None, Some(z1), Some(z2)) => {
                    let phi = match n {
                        Level::Finite(_) => {
                            word.parse::<BraidWord>().map_err(|e| Failure::Parse(e.to_string()))?;
                            Transporter::Finite(ctx("stab make", AutEq::from_word(*n, word, *shift))?)
                        }
                        Level::Infinite => {
                            Transporter::Infinite(AutEqInfty { sigma_power: sigma_power + 3 * shift })
                        }
                    };
                    let heart = ctx("stab make", Heart::from_raw(phi, *k))?;
                    ctx("stab make", make_stability(heart, *z1, *z2))?
                }
                _ => return Err(Failure::Parse("give either --g or both --z1 and --z2".into())),
            };
            Ok(point_json(&p))
        }
        StabCmd::Classify(arg) => {
            let p = read_point(&arg.point)?;
            let n = p.level();
            let verdict = ctx("stab classify", classify_fundamental(n, &p))?;
            let g = g_coordinate(&p).ok().map(cx);
            Ok(json!({"n": n, "verdict": verdict, "g": g}))
        }
        StabCmd::Reduce(arg) => {
            let p = read_point(&arg.point)?;
            let n = p.level();
            let r = ctx("stab reduce", reduce_to_fundamental(n, &p))?;
            let g = g_coordinate(&r.sigma0).ok().map(cx);
            Ok(json!({
                "n": n, "phi": r.phi.to_string(), "verdict": r.verdict,
                "sigma0": point_json(&r.sigma0), "g": g,
            }))
        }
        StabCmd::Cubic(arg) => {
            let p = read_point(&arg.point)?;
            let n = p.level();
            let cp = ctx("stab cubic", cubic_from_stability(n, &p))?;
            Ok(json!({"n": n, "a": cx(cp.a), "b": cx(cp.b), "t": cx(cp.t)}))
        }
        StabCmd::Charges { n, a, b } => {
            let cp = a2stab::stability::CubicPoint::new(*n, *a, *b);
            let z = ctx("stab charges", charges_from_cubic(*n, &cp))?;
            Ok(json!({"n": n, "a": cx(*a), "b": cx(*b), "z1": cx(z[0]), "z2": cx(z[1])}))
        }
        StabCmd::Walk { point, z1, z2, steps } => {
            let p = read_point(&point.point)?;
            let q = ctx("stab walk", wall_walk(&p, (*z1, *z2), *steps))?;
            Ok(point_json(&q))
        }
        StabCmd::Roundtrip { n, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for _ in 0..*samples {
                let g = random_interior_g(*n, &mut rng);
                let p = ctx("stab roundtrip", point_from_g(*n, g))?;
                let cp = ctx("stab roundtrip", cubic_from_stability(*n, &p))?;
                let z = ctx("stab roundtrip", charges_from_cubic(*n, &cp))?;
                let want = p.charge_functional();
                let err = (0..2).map(|i| (z[i] - want[i]).norm() / want[i].norm()).fold(0.0, f64::max);
                worst = worst.max(err);
                rows.push(json!({"g": cx(g), "a": cx(cp.a), "b": cx(cp.b), "relative_error": err}));
            }
            Ok(json!({"n": n, "samples": samples, "seed": seed, "max_relative_error": worst, "points": rows}))
        }
    }
}
