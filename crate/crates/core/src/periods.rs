//! Twisted periods `int p(x)^nu dx` between roots of `p = x^3 + a x + b`,
//! exponential periods `int e^{p(x)} dx` along pairs of rays, and the
//! differential equations they satisfy.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::Level;
use crate::quadrature::{jacobi_rule, legendre_rule, QuadConfig};

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn discriminant(a: C64, b: C64) -> C64 {
    4.0 * a * a * a + 27.0 * b * b
}

fn check_discriminant(a: C64, b: C64) -> Result<()> {
    let d = discriminant(a, b);
    let scale = (4.0 * a.norm().powi(3)).max(27.0 * b.norm_sqr());
    if !(d.norm() > 1e-12 * scale) || !d.is_finite() {
        return Err(Error::Discriminant(d.norm()));
    }
    Ok(())
}

fn tolerant_cmp(x: &C64, y: &C64) -> std::cmp::Ordering {
    let tol = 1e-12 * (1.0 + x.norm().max(y.norm()));
    if (x.re - y.re).abs() > tol {
        x.re.total_cmp(&y.re)
    } else {
        x.im.total_cmp(&y.im)
    }
}

/// Roots of `x^3 + a x + b`, without the discriminant check, in no
/// particular order.
pub fn raw_roots(a: C64, b: C64) -> [C64; 3] {
    let d0 = -3.0 * a;
    let d1 = 27.0 * b;
    let sq = (d1 * d1 - 4.0 * d0 * d0 * d0).sqrt();
    let c_plus = (d1 + sq) / 2.0;
    let c_minus = (d1 - sq) / 2.0;
    let c3 = if c_plus.norm() >= c_minus.norm() { c_plus } else { c_minus };
    let mut roots = [C64::new(0.0, 0.0); 3];
    if c3.norm() == 0.0 {
        return roots;
    }
    let c = c3.powf(1.0 / 3.0);
    let xi = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut ck = c;
    for r in roots.iter_mut() {
        *r = -(ck + d0 / ck) / 3.0;
        ck *= xi;
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let dp = 3.0 * *r * *r + a;
            if dp.norm() == 0.0 {
                break;
            }
            let step = (*r * *r * *r + a * *r + b) / dp;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    let mean = (roots[0] + roots[1] + roots[2]) / 3.0;
    for r in roots.iter_mut() {
        *r -= mean;
    }
    roots
}

/// Roots sorted lexicographically by (real part, imaginary part).
pub fn cubic_roots(a: C64, b: C64) -> Result<[C64; 3]> {
    check_discriminant(a, b)?;
    let mut roots = raw_roots(a, b);
    roots.sort_by(tolerant_cmp);
    Ok(roots)
}

/// One piece of an integration path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathPiece {
    Segment { from: C64, to: C64 },
    /// `center + radius * e^{i (direction + theta)}` for theta from
    /// `theta0` to `theta1`.
    Arc { center: C64, radius: f64, direction: f64, theta0: f64, theta1: f64 },
}

impl PathPiece {
    pub fn start(&self) -> C64 {
        self.at(0.0)
    }

    pub fn end(&self) -> C64 {
        self.at(1.0)
    }

    pub fn mid(&self) -> C64 {
        self.at(0.5)
    }

    /// Point at fraction `t` of the piece.
    pub fn at(&self, t: f64) -> C64 {
        match *self {
            PathPiece::Segment { from, to } => from + (to - from) * t,
            PathPiece::Arc { center, radius, direction, theta0, theta1 } => {
                center + C64::from_polar(radius, direction + theta0 + (theta1 - theta0) * t)
            }
        }
    }

    /// Smallest distance from sample points of the piece to `z`.
    pub fn distance_to(&self, z: C64) -> f64 {
        match *self {
            PathPiece::Segment { from, to } => {
                let h = to - from;
                let t = ((z - from) / h).re.clamp(0.0, 1.0);
                (from + h * t - z).norm()
            }
            PathPiece::Arc { .. } => (0..=256).map(|k| (self.at(k as f64 / 256.0) - z).norm()).fold(f64::INFINITY, f64::min),
        }
    }
}

/// A path between two roots: indices into the root triple plus pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub from_root: usize,
    pub to_root: usize,
    pub pieces: Vec<PathPiece>,
}

impl Cycle {
    pub fn is_detoured(&self) -> bool {
        self.pieces.len() > 1
    }

    /// Point at which the branch of `p^nu` is anchored.
    pub fn anchor(&self) -> C64 {
        self.pieces[0].mid()
    }
}

/// Relative distance below which a segment is said to pass through the
/// third root.
pub const DETOUR_TOL: f64 = 1e-6;

/// The path from `roots[i]` to `roots[j]`: the straight segment, or, if it
/// passes within [`DETOUR_TOL`] of the third root, the segment with a
/// semicircle around that root. The semicircle goes on the side away from
/// the root, or to the left of travel when the root is on the segment.
pub fn make_cycle(roots: &[C64; 3], i: usize, j: usize) -> Cycle {
    let k = 3 - i - j;
    let (ui, uj, uk) = (roots[i], roots[j], roots[k]);
    let h = uj - ui;
    let sk = 2.0 * (uk - ui) / h - 1.0;
    let straight = Cycle {
        from_root: i,
        to_root: j,
        pieces: vec![PathPiece::Segment { from: ui, to: uj }],
    };
    if sk.im.abs() >= DETOUR_TOL || sk.re.abs() >= 1.0 {
        return straight;
    }
    let r = 0.5 * (uk - ui).norm().min((uk - uj).norm()).min(0.5 * h.norm());
    let dir = h / h.norm();
    let p = ui + h * (1.0 + sk.re) / 2.0;
    let (theta0, theta1) = if sk.im > 0.0 { (-PI, 0.0) } else { (PI, 0.0) };
    Cycle {
        from_root: i,
        to_root: j,
        pieces: vec![
            PathPiece::Segment { from: ui, to: p - dir * r },
            PathPiece::Arc { center: p, radius: r, direction: dir.arg(), theta0, theta1 },
            PathPiece::Segment { from: p + dir * r, to: uj },
        ],
    }
}

/// `gamma_1 = u1 -> u2` and `gamma_2 = u2 -> u3` for sorted roots.
pub fn standard_cycles(a: C64, b: C64) -> Result<[Cycle; 2]> {
    let roots = cubic_roots(a, b)?;
    Ok(cycles_for(&roots))
}

pub(crate) fn cycles_for(roots: &[C64; 3]) -> [Cycle; 2] {
    [make_cycle(roots, 0, 1), make_cycle(roots, 1, 2)]
}

pub fn eval_cubic(roots: &[C64; 3], x: C64) -> C64 {
    (x - roots[0]) * (x - roots[1]) * (x - roots[2])
}

/// `log p` at `x` continued from `(xref, lref)` factor by factor, skipping
/// the roots in `skip`.
fn log_rel(roots: &[C64; 3], x: C64, xref: C64, lref: C64, skip: [Option<usize>; 2]) -> C64 {
    let mut l = lref;
    for (m, u) in roots.iter().enumerate() {
        if skip.contains(&Some(m)) {
            continue;
        }
        l += ((x - u) / (xref - u)).ln();
    }
    l
}

/// The branch of `log w` whose imaginary part is closest to `hint`.
pub(crate) fn log_near(w: C64, hint: Option<C64>) -> C64 {
    let l = w.ln();
    match hint {
        None => l,
        Some(h) => {
            let m = ((h.im - l.im) / (2.0 * PI)).round();
            l + I * (2.0 * PI * m)
        }
    }
}

/// Panels of `[-1, 1]` small compared with their distance to `near`.
fn panels(near: &[C64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(-1.0f64, 1.0f64, 0u32)];
    while let Some((p, q, depth)) = stack.pop() {
        let c = 0.5 * (p + q);
        let ok = near.iter().all(|s| (s - c).norm() >= (q - p));
        if ok || depth > 60 {
            out.push((p, q));
        } else {
            stack.push((c, q, depth + 1));
            stack.push((p, c, depth + 1));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

struct Integrator<'a> {
    roots: &'a [C64; 3],
    nu: f64,
}

impl Integrator<'_> {
    /// Integral over a segment whose branch is fixed by `lmid` at its
    /// midpoint. Endpoints that are roots carry the factor
    /// `(1 +- s)^nu` as quadrature weight.
    fn segment(&self, from: C64, to: C64, sing: [Option<usize>; 2], lmid: C64, nodes: usize) -> C64 {
        let nu = self.nu;
        let h = to - from;
        let mid = from + h * 0.5;
        let near: Vec<C64> = (0..3)
            .filter(|m| !sing.contains(&Some(*m)))
            .map(|m| 2.0 * (self.roots[m] - from) / h - 1.0)
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for (p, q) in panels(&near) {
            let left = sing[0].is_some() && p == -1.0;
            let right = sing[1].is_some() && q == 1.0;
            let rule = jacobi_rule(nodes, if right { nu } else { 0.0 }, if left { nu } else { 0.0 });
            let half = 0.5 * (q - p);
            let mut acc = C64::new(0.0, 0.0);
            for &(r, w) in rule.iter() {
                let s = p + half * (1.0 + r);
                let x = from + h * (0.5 * (1.0 + s));
                let mut f = (nu * log_rel(self.roots, x, mid, lmid, sing)).exp();
                if sing[0].is_some() && !left {
                    f *= (1.0 + s).powf(nu);
                }
                if sing[1].is_some() && !right {
                    f *= (1.0 - s).powf(nu);
                }
                acc += w * f;
            }
            let mut scale = half;
            if left {
                scale *= half.powf(nu);
            }
            if right {
                scale *= half.powf(nu);
            }
            total += acc * scale;
        }
        total * h * 0.5
    }

    fn arc(&self, piece: &PathPiece, lref: C64, nodes: usize) -> C64 {
        let PathPiece::Arc { radius, direction, theta0, theta1, .. } = *piece else {
            unreachable!()
        };
        let xref = piece.mid();
        let rule = legendre_rule(nodes);
        let panels = 8;
        let width = (theta1 - theta0) / panels as f64;
        let mut total = C64::new(0.0, 0.0);
        for k in 0..panels {
            let t0 = theta0 + width * k as f64;
            for &(r, w) in rule.iter() {
                let th = t0 + 0.5 * width * (1.0 + r);
                let e = C64::from_polar(radius, direction + th);
                let x = piece.at((th - theta0) / (theta1 - theta0));
                let f = (self.nu * log_rel(self.roots, x, xref, lref, [None, None])).exp();
                total += w * f * I * e * (0.5 * width);
            }
        }
        total
    }

    /// Integral along a cycle; `lanchor` is `log p` at the cycle anchor.
    fn cycle(&self, cycle: &Cycle, lanchor: C64, nodes: usize) -> C64 {
        let last = cycle.pieces.len() - 1;
        let mut lref = lanchor;
        let mut total = C64::new(0.0, 0.0);
        for (idx, piece) in cycle.pieces.iter().enumerate() {
            let xref = piece.mid();
            if idx > 0 {
                let prev = &cycle.pieces[idx - 1];
                let pend = prev.end();
                let lend = log_rel(self.roots, pend, prev.mid(), lref, [None, None]);
                let ls = log_rel(self.roots, piece.at(0.25), pend, lend, [None, None]);
                lref = log_rel(self.roots, xref, piece.at(0.25), ls, [None, None]);
            }
            total += match *piece {
                PathPiece::Segment { from, to } => {
                    let s0 = (idx == 0).then_some(cycle.from_root);
                    let s1 = (idx == last).then_some(cycle.to_root);
                    self.segment(from, to, [s0, s1], lref, nodes)
                }
                PathPiece::Arc { .. } => self.arc(piece, lref, nodes),
            };
        }
        total
    }
}

/// A computed period with a quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodValue {
    pub value: C64,
    pub est_error: f64,
}

/// Integrates `p^nu` along `cycle` with the branch fixed by `lanchor`, and
/// estimates the error by doubling the node count.
pub fn integrate_cycle(nu: f64, roots: &[C64; 3], cycle: &Cycle, lanchor: C64, cfg: &QuadConfig) -> Result<PeriodValue> {
    cfg.validate()?;
    let integ = Integrator { roots, nu };
    let mut nodes = cfg.node_count;
    let mut prev = integ.cycle(cycle, lanchor, nodes);
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1e-300);
    let scale = scale.powf(3.0 * nu + 1.0);
    for _ in 0..4 {
        nodes *= 2;
        let next = integ.cycle(cycle, lanchor, nodes);
        let err = (next - prev).norm();
        if err <= cfg.target_tol * scale.max(next.norm()) * 10.0 {
            return Ok(PeriodValue { value: next, est_error: err });
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!("twisted period did not settle (nu = {nu})")))
}

fn finite_nu(n: Level) -> Result<f64> {
    n.nu()
}

/// `int_{gamma_i} p(x)^nu dx`, `nu = (n-2)/2`, along the standard cycle
/// `which` (1 or 2) with the principal branch at the path midpoint.
pub fn twisted_period(n: Level, a: C64, b: C64, which: usize) -> Result<C64> {
    let roots = cubic_roots(a, b)?;
    let cycles = cycles_for(&roots);
    let cycle = cycles.get(which.wrapping_sub(1)).ok_or(Error::InvalidSimple(which))?;
    let l = eval_cubic(&roots, cycle.anchor()).ln();
    Ok(integrate_cycle(finite_nu(n)?, &roots, cycle, l, &QuadConfig::default())?.value)
}

/// Both standard twisted periods.
pub fn twisted_periods(n: Level, a: C64, b: C64) -> Result<[C64; 2]> {
    Ok([twisted_period(n, a, b, 1)?, twisted_period(n, a, b, 2)?])
}

/// Roots and branch choices carried along a path in parameter space, so
/// that periods can be continued analytically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodTracker {
    pub n: Level,
    pub a: C64,
    pub b: C64,
    /// Labelled roots; cycle 1 runs from root 0 to root 1, cycle 2 from
    /// root 1 to root 2.
    pub roots: [C64; 3],
    /// `log p` at the anchor of each cycle.
    pub anchors: [C64; 2],
}

impl PeriodTracker {
    /// Starts at `(a, b)` with sorted roots and principal branches.
    pub fn new(n: Level, a: C64, b: C64) -> Result<Self> {
        let roots = cubic_roots(a, b)?;
        Self::with_roots(n, a, b, roots, [None, None])
    }

    /// Starts from an explicit root labelling; `hints` select the branch
    /// of `log p` at each anchor.
    pub fn with_roots(n: Level, a: C64, b: C64, roots: [C64; 3], hints: [Option<C64>; 2]) -> Result<Self> {
        n.nu()?;
        check_discriminant(a, b)?;
        let cycles = cycles_for(&roots);
        let anchors = [0, 1].map(|i| log_near(eval_cubic(&roots, cycles[i].anchor()), hints[i]));
        Ok(PeriodTracker { n, a, b, roots, anchors })
    }

    pub fn cycles(&self) -> [Cycle; 2] {
        cycles_for(&self.roots)
    }

    /// Moves to `(a, b)`, matching roots and branches by continuity. The
    /// step must be small compared with the root separation.
    pub fn step(&mut self, a: C64, b: C64) -> Result<()> {
        check_discriminant(a, b)?;
        let new = raw_roots(a, b);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut costs: Vec<(f64, [usize; 3])> = perms
            .iter()
            .map(|p| {
                let c = (0..3).map(|i| (new[p[i]] - self.roots[i]).norm()).fold(0.0, f64::max);
                (c, *p)
            })
            .collect();
        costs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let sep = (0..3)
            .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
            .map(|(i, j)| (new[i] - new[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if costs[0].0 >= 0.35 * sep {
            return Err(Error::TrackingLoss(format!(
                "root motion {:.3e} is not small against separation {:.3e}",
                costs[0].0, sep
            )));
        }
        let p = costs[0].1;
        let roots = [new[p[0]], new[p[1]], new[p[2]]];
        let old = self.anchors;
        let cycles = cycles_for(&roots);
        self.anchors = [0, 1].map(|i| log_near(eval_cubic(&roots, cycles[i].anchor()), Some(old[i])));
        self.roots = roots;
        self.a = a;
        self.b = b;
        Ok(())
    }

    /// Walks to `(a, b)` along a straight line in `(a, b)` space, in
    /// `steps` equal increments.
    pub fn walk_to(&mut self, a: C64, b: C64, steps: usize) -> Result<()> {
        let (a0, b0) = (self.a, self.b);
        for k in 1..=steps.max(1) {
            let t = k as f64 / steps.max(1) as f64;
            self.step(a0 + (a - a0) * t, b0 + (b - b0) * t)?;
        }
        Ok(())
    }

    pub fn periods(&self) -> Result<[C64; 2]> {
        Ok(self.periods_with_error()?.map(|p| p.value))
    }

    pub fn periods_with_error(&self) -> Result<[PeriodValue; 2]> {
        let nu = self.n.nu()?;
        let cycles = self.cycles();
        let cfg = QuadConfig::default();
        Ok([
            integrate_cycle(nu, &self.roots, &cycles[0], self.anchors[0], &cfg)?,
            integrate_cycle(nu, &self.roots, &cycles[1], self.anchors[1], &cfg)?,
        ])
    }
}

/// Exponential period `int_{delta_i} e^{x^3 + a x + b} dx`: in along the
/// ray of angle `pi`, out along the ray of angle `pi/3` (`which = 1`) or
/// `5 pi/3` (`which = 2`).
pub fn exp_period(a: C64, b: C64, which: usize, cfg: &QuadConfig) -> Result<C64> {
    Ok(exp_moment(a, which, 0, cfg)? * b.exp())
}

pub fn exp_ray_angles(which: usize) -> Result<(f64, f64)> {
    match which {
        1 => Ok((PI, PI / 3.0)),
        2 => Ok((PI, 5.0 * PI / 3.0)),
        _ => Err(Error::InvalidSimple(which)),
    }
}

/// `int_0^R x^k e^{x^3 + a x} dx` along the ray of angle `theta`.
fn ray_integral(a: C64, theta: f64, k: i32, radius: f64, nodes: usize) -> C64 {
    let dir = C64::from_polar(1.0, theta);
    let rule = legendre_rule(nodes);
    let panels = (radius / 0.5).ceil() as usize;
    let width = radius / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..panels {
        let r0 = width * j as f64;
        for &(s, w) in rule.iter() {
            let rho = r0 + 0.5 * width * (1.0 + s);
            let x = dir * rho;
            total += w * x.powi(k) * (x * x * x + a * x).exp();
        }
    }
    total * dir * (0.5 * width)
}

/// `int_{delta_i} x^k e^{x^3 + a x} dx`; the `a`-derivatives of the
/// exponential period at `b = 0`.
pub fn exp_moment(a: C64, which: usize, k: i32, cfg: &QuadConfig) -> Result<C64> {
    cfg.validate()?;
    let (t_in, t_out) = exp_ray_angles(which)?;
    // Integrand modulus on the rays is at most rho^k e^{-rho^3 + |a| rho}.
    let mut radius = cfg.truncation_radius;
    let tail = |r: f64| (k as f64) * r.max(1.0).ln() - r * r * r + a.norm() * r;
    while tail(radius) > cfg.target_tol.ln() - 10.0 {
        radius *= 1.5;
        if radius > 1e3 {
            return Err(Error::NonConvergence("ray truncation radius".into()));
        }
    }
    let eval = |nodes| ray_integral(a, t_out, k, radius, nodes) - ray_integral(a, t_in, k, radius, nodes);
    let lo = eval(cfg.node_count);
    let hi = eval(2 * cfg.node_count);
    if (hi - lo).norm() > 1e3 * cfg.target_tol * (1.0 + hi.norm()) {
        return Err(Error::NonConvergence(format!("exponential period at a = {a}")));
    }
    Ok(hi)
}

/// Both exponential periods.
pub fn exp_periods(a: C64, b: C64) -> Result<[C64; 2]> {
    let cfg = QuadConfig::default();
    Ok([exp_period(a, b, 1, &cfg)?, exp_period(a, b, 2, &cfg)?])
}

/// First and second derivatives of `f` at `z` by Richardson-extrapolated
/// central differences with step `h`.
pub fn richardson_derivatives<F>(mut f: F, z: C64, h: C64) -> Result<(C64, C64, C64)>
where
    F: FnMut(C64) -> Result<C64>,
{
    let f0 = f(z)?;
    let fp1 = f(z + h)?;
    let fm1 = f(z - h)?;
    let fp2 = f(z + h * 0.5)?;
    let fm2 = f(z - h * 0.5)?;
    let d1 = |p: C64, m: C64, s: C64| (p - m) / (2.0 * s);
    let d2 = |p: C64, m: C64, s: C64| (p - 2.0 * f0 + m) / (s * s);
    let a1 = d1(fp1, fm1, h);
    let b1 = d1(fp2, fm2, h * 0.5);
    let a2 = d2(fp1, fm1, h);
    let b2 = d2(fp2, fm2, h * 0.5);
    Ok((f0, b1 + (b1 - a1) / 3.0, b2 + (b2 - a2) / 3.0))
}

/// `(alpha, beta, gamma)` of the hypergeometric equation satisfied by the
/// twisted periods on the slice `a = -3, b = 2(2z - 1)`.
pub fn hypergeom_params(n: Level) -> Result<(f64, f64, f64)> {
    let n = n.get()? as f64;
    Ok(((4.0 - 3.0 * n) / 6.0, (8.0 - 3.0 * n) / 6.0, (3.0 - n) / 2.0))
}

pub fn slice_ab(z: C64) -> (C64, C64) {
    (C64::new(-3.0, 0.0), 2.0 * (2.0 * z - 1.0))
}

fn check_regular(z: C64, margin: f64) -> Result<()> {
    if z.norm() < margin || (z - 1.0).norm() < margin {
        return Err(Error::SingularPoint(format!("z = {z} is a singular point")));
    }
    Ok(())
}

/// Values and first two `z`-derivatives of both periods on the slice,
/// continued from the sorted-root branch at `z`.
pub fn slice_jet(n: Level, z: C64) -> Result<[(C64, C64, C64); 2]> {
    check_regular(z, 1e-6)?;
    let (a, b) = slice_ab(z);
    let base = PeriodTracker::new(n, a, b)?;
    let h = C64::new(0.02 * z.norm().min((z - 1.0).norm()).min(1.0), 0.0);
    let mut out = [(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 2];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = richardson_derivatives(
            |w| {
                let mut t = base.clone();
                let (a, b) = slice_ab(w);
                t.walk_to(a, b, 4)?;
                Ok(t.periods()?[i])
            },
            z,
            h,
        )?;
    }
    Ok(out)
}

/// Normalized residual of the hypergeometric equation
/// `z(1-z) f'' + (gamma - (alpha + beta + 1) z) f' - alpha beta f = 0`,
/// maximized over both periods.
pub fn hypergeom_residual(n: Level, z: C64) -> Result<f64> {
    let (al, be, ga) = hypergeom_params(n)?;
    let jet = slice_jet(n, z)?;
    Ok(jet
        .iter()
        .map(|&(f, d1, d2)| {
            let lhs = z * (1.0 - z) * d2 + (ga - (al + be + 1.0) * z) * d1 - al * be * f;
            lhs.norm() / (1.0 + f.norm() + d1.norm() + d2.norm())
        })
        .fold(0.0, f64::max))
}

/// Coefficients `(c2, c1)` of the Airy-type equation `c2 f'' + c1 a f = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryConvention {
    pub c2: f64,
    pub c1: f64,
}

/// The two candidate conventions.
pub const AIRY_CANDIDATES: [AiryConvention; 2] = [
    AiryConvention { c2: 1.0, c1: -1.0 / 3.0 },
    AiryConvention { c2: 3.0, c1: 1.0 },
];

fn airy_raw(conv: AiryConvention, a: C64, which: usize) -> Result<f64> {
    let cfg = QuadConfig::default();
    let (f, _, d2) = richardson_derivatives(
        |w| exp_period(w, C64::new(0.0, 0.0), which, &cfg),
        a,
        C64::new(0.05, 0.0),
    )?;
    Ok((conv.c2 * d2 + conv.c1 * a * f).norm() / (1.0 + f.norm() + d2.norm()))
}

/// Picks the candidate convention with the smaller residual on a fixed
/// set of sample points.
pub fn calibrate_airy() -> Result<AiryConvention> {
    let samples = [C64::new(1.0, 0.5), C64::new(-0.7, 0.2), C64::new(0.3, -1.1)];
    let mut best = (f64::INFINITY, AIRY_CANDIDATES[0]);
    for conv in AIRY_CANDIDATES {
        let mut worst: f64 = 0.0;
        for a in samples {
            for which in [1, 2] {
                worst = worst.max(airy_raw(conv, a, which)?);
            }
        }
        if worst < best.0 {
            best = (worst, conv);
        }
    }
    Ok(best.1)
}

/// The calibrated convention, computed once.
pub fn airy_convention() -> AiryConvention {
    static CONV: OnceLock<AiryConvention> = OnceLock::new();
    *CONV.get_or_init(|| calibrate_airy().expect("calibration samples are regular"))
}

/// Normalized residual of the calibrated Airy-type equation, maximized
/// over both exponential periods.
pub fn airy_residual(a: C64) -> Result<f64> {
    let conv = airy_convention();
    Ok(airy_raw(conv, a, 1)?.max(airy_raw(conv, a, 2)?))
}

pub type CMat2 = [[C64; 2]; 2];

fn cmat_mul(x: &CMat2, y: &CMat2) -> CMat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn cmat_inv(x: &CMat2) -> Result<CMat2> {
    let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
    if det.norm() < 1e-300 {
        return Err(Error::Degenerate("singular Wronskian".into()));
    }
    Ok([[x[1][1] / det, -x[0][1] / det], [-x[1][0] / det, x[0][0] / det]])
}

/// Continues a solution `(f, f')` of the hypergeometric equation along the
/// segment `z0 -> z1` with classical Runge-Kutta steps.
fn transport(params: (f64, f64, f64), z0: C64, z1: C64, y: [C64; 2]) -> Result<[C64; 2]> {
    let (al, be, ga) = params;
    let rhs = |z: C64, y: [C64; 2]| -> [C64; 2] {
        [y[1], (al * be * y[0] - (ga - (al + be + 1.0) * z) * y[1]) / (z * (1.0 - z))]
    };
    let dist = |z: C64| z.norm().min((z - 1.0).norm());
    let len = (z1 - z0).norm();
    let closest = PathPiece::Segment { from: z0, to: z1 }
        .distance_to(C64::new(0.0, 0.0))
        .min(PathPiece::Segment { from: z0, to: z1 }.distance_to(C64::new(1.0, 0.0)));
    if closest < 1e-3 {
        return Err(Error::SingularPoint("loop passes too close to z = 0 or z = 1".into()));
    }
    let steps = ((len / (0.01 * closest.min(dist(z0)).min(1.0))).ceil() as usize).max(1);
    let h = (z1 - z0) / steps as f64;
    let mut y = y;
    let mut z = z0;
    for _ in 0..steps {
        let k1 = rhs(z, y);
        let k2 = rhs(z + h * 0.5, [y[0] + k1[0] * h * 0.5, y[1] + k1[1] * h * 0.5]);
        let k3 = rhs(z + h * 0.5, [y[0] + k2[0] * h * 0.5, y[1] + k2[1] * h * 0.5]);
        let k4 = rhs(z + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
        for c in 0..2 {
            y[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) * h / 6.0;
        }
        z += h;
    }
    Ok(y)
}

/// Monodromy of the standard periods on the slice `a = -3, b = 2(2z-1)`
/// along a closed polygonal loop in the `z`-line: the matrix `M` with
/// `(f1, f2)` continued around the loop equal to `M (f1, f2)`.
pub fn monodromy_matrix(n: Level, path: &[C64]) -> Result<CMat2> {
    if path.len() < 3 || (path[0] - path[path.len() - 1]).norm() > 1e-9 {
        return Err(Error::InvalidPath("loop must have at least three points and be closed".into()));
    }
    let params = hypergeom_params(n)?;
    let jet = slice_jet(n, path[0])?;
    let start: CMat2 = [[jet[0].0, jet[0].1], [jet[1].0, jet[1].1]];
    let mut end = start;
    for row in end.iter_mut() {
        let mut y = *row;
        for w in path.windows(2) {
            y = transport(params, w[0], w[1], y)?;
        }
        *row = y;
    }
    Ok(cmat_mul(&end, &cmat_inv(&start)?))
}

/// A counterclockwise polygonal circle, closed.
pub fn circle_loop(center: C64, radius: f64, start_angle: f64, points: usize) -> Vec<C64> {
    (0..=points)
        .map(|k| center + C64::from_polar(radius, start_angle + 2.0 * PI * k as f64 / points as f64))
        .collect()
}

/// Rounds a complex matrix to integers, returning it with the largest
/// distance to the rounding.
pub fn round_integer(m: &CMat2) -> ([[i64; 2]; 2], f64) {
    let mut out = [[0i64; 2]; 2];
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let r = m[i][j].re.round();
            out[i][j] = r as i64;
            dev = dev.max((m[i][j] - r).norm());
        }
    }
    (out, dev)
}
