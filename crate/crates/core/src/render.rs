//! SVG drawings of exchange graphs on the hyperbolic disc and of the
//! regions `R_n`.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::braid::{ProjectiveClass, Transporter};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::schwarz::{ell_abscissa, line_abscissa};
use crate::tilting::{ExchangeGraph, Heart};

pub const MAX_RADIUS: usize = 10;

/// Base point in the upper half-plane; its stabilizer in `PSL(2, Z)` is
/// trivial.
const BASE_POINT: C64 = C64 { re: 0.17, im: 1.31 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Disc,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub node_size: f64,
    pub full_color: String,
    pub chain_color: String,
    pub edge_color: String,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            node_size: 3.0,
            full_color: "#1f4e79".into(),
            chain_color: "#c55a11".into(),
            edge_color: "#7f7f7f".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub n: Level,
    pub radius: usize,
    pub style: Style,
    pub layout: Layout,
}

impl RenderSpec {
    pub fn new(n: Level, radius: usize) -> Self {
        let layout = if n.is_finite() { Layout::Disc } else { Layout::Linear };
        RenderSpec { n, radius, style: Style::default(), layout }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius > MAX_RADIUS {
            return Err(Error::CapExceeded(format!("radius {} exceeds {MAX_RADIUS}", self.radius)));
        }
        if self.layout == Layout::Disc && !self.n.is_finite() {
            return Err(Error::InfiniteLevel);
        }
        Ok(())
    }
}

fn mobius_disc(m: [[i64; 2]; 2]) -> C64 {
    let z = BASE_POINT;
    let w = (z * m[0][0] as f64 + m[0][1] as f64) / (z * m[1][0] as f64 + m[1][1] as f64);
    (w - C64::i()) / (w + C64::i())
}

/// Point on the geodesic from `p` to `q` at hyperbolic fraction `s`.
pub fn geodesic_point(p: C64, q: C64, s: f64) -> C64 {
    let to0 = |w: C64| (w - p) / (C64::new(1.0, 0.0) - p.conj() * w);
    let from0 = |w: C64| (w + p) / (C64::new(1.0, 0.0) + p.conj() * w);
    let q0 = to0(q);
    let r = q0.norm();
    if r < 1e-300 {
        return p;
    }
    let d = r.atanh() * s;
    from0(q0 / r * d.tanh())
}

fn full_position(phi: &Transporter) -> C64 {
    match phi.projective_class() {
        ProjectiveClass::Psl2(g) => mobius_disc(g.0 .0),
        ProjectiveClass::SigmaMod3(_) => C64::new(0.0, 0.0),
    }
}

/// Disc position of a heart: full hearts sit on the `PSL(2, Z)`-orbit of
/// the base point, chain hearts on the geodesic between the two full
/// hearts that end their chain.
pub fn disc_position(h: &Heart) -> Result<C64> {
    let n = h.level().get()?;
    let p = full_position(&h.phi);
    if h.k == 0 {
        return Ok(p);
    }
    let q = full_position(&h.phi.compose(&Transporter::upsilon(h.level())?)?);
    Ok(geodesic_point(p, q, h.k as f64 / (n - 2) as f64))
}

/// Node positions in `[-1, 1]^2`.
pub fn layout_positions(g: &ExchangeGraph, layout: Layout) -> Result<Vec<(f64, f64)>> {
    match layout {
        Layout::Disc => g
            .nodes
            .iter()
            .map(|v| disc_position(&v.heart).map(|w| (w.re, w.im)))
            .collect(),
        Layout::Linear => {
            // Columns by depth, rows in node order.
            let depth = g.nodes.iter().map(|v| v.depth).max().unwrap_or(0).max(1);
            let mut rows = vec![0usize; depth + 1];
            let mut counts = vec![0usize; depth + 1];
            for v in &g.nodes {
                counts[v.depth] += 1;
            }
            Ok(g.nodes
                .iter()
                .map(|v| {
                    let r = rows[v.depth];
                    rows[v.depth] += 1;
                    let x = -1.0 + 2.0 * v.depth as f64 / depth as f64;
                    let y = -1.0 + 2.0 * (r as f64 + 0.5) / counts[v.depth] as f64;
                    (x, y)
                })
                .collect())
        }
    }
}

fn px(v: f64) -> String {
    format!("{:.4}", 250.0 + 240.0 * v)
}

pub fn graph_svg(g: &ExchangeGraph, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    let pos = layout_positions(g, spec.layout)?;
    let st = &spec.style;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n");
    if spec.layout == Layout::Disc {
        out.push_str("  <circle cx=\"250\" cy=\"250\" r=\"240\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n");
        // Concentric circles at hyperbolic distances 1, 2, 3 from the centre.
        for d in [1.0f64, 2.0, 3.0] {
            let r = (d / 2.0).tanh() * 240.0;
            let _ = writeln!(out, "  <circle cx=\"250\" cy=\"250\" r=\"{r:.4}\" fill=\"none\" stroke=\"#d9d9d9\" stroke-width=\"0.5\"/>");
        }
    }
    for e in &g.edges {
        let (a, b) = (pos[e.src], pos[e.dst]);
        let _ = writeln!(
            out,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"0.6\"/>",
            px(a.0),
            px(-a.1),
            px(b.0),
            px(-b.1),
            st.edge_color
        );
    }
    for (v, p) in g.nodes.iter().zip(&pos) {
        let (color, r) = if v.full {
            (&st.full_color, st.node_size)
        } else {
            (&st.chain_color, st.node_size * 0.6)
        };
        let _ = writeln!(
            out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{r:.4}\" fill=\"{color}\"><title>{}</title></circle>",
            px(p.0),
            px(-p.1),
            v.heart.label()
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Outline of `R_n` in the window `[-h, h]` of imaginary parts.
pub fn region_svg(n: Level, h: f64) -> Result<String> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidPath(format!("window height {h}")));
    }
    let left = line_abscissa(n).unwrap_or(-3.0).min(-0.5) - 0.5;
    let (x0, x1) = (left, 1.25);
    let scale = 480.0 / (x1 - x0).max(2.0 * h);
    let sx = |x: f64| 10.0 + (x - x0) * scale;
    let sy = |y: f64| 10.0 + (h - y) * scale;
    let width = 20.0 + (x1 - x0) * scale;
    let height = 20.0 + 2.0 * h * scale;
    let samples = 200;
    let mut pts = Vec::new();
    for i in 0..=samples {
        let y = -h + 2.0 * h * i as f64 / samples as f64;
        pts.push((ell_abscissa(y.abs()), y));
    }
    let lx = line_abscissa(n).unwrap_or(x0);
    pts.push((lx, h));
    pts.push((lx, -h));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.4}\" height=\"{height:.4}\" viewBox=\"0 0 {width:.4} {height:.4}\">"
    );
    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.4},{:.4}", sx(x), sy(y))).collect();
    let _ = writeln!(out, "  <polygon points=\"{}\" fill=\"#dde8f4\" stroke=\"#1f4e79\" stroke-width=\"1\"/>", path.join(" "));
    let _ = writeln!(
        out,
        "  <line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#000000\" stroke-width=\"0.5\"/>",
        sx(x0),
        sy(0.0),
        sx(x1),
        sy(0.0)
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#000000\" stroke-width=\"0.5\"/>",
        sx(0.0),
        sy(h),
        sx(0.0),
        sy(-h)
    );
    out.push_str("</svg>\n");
    Ok(out)
}
