//! The regions `R_n`, `R_inf` and the period-ratio maps onto them.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::Level;
use crate::periods::{exp_periods, log_near, PeriodTracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionVerdict {
    Interior,
    BoundaryLine,
    BoundaryEllPlus,
    BoundaryEllMinus,
    Vertex,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionQuery {
    pub verdict: RegionVerdict,
    /// Signed horizontal distance to the boundary, positive inside.
    pub distance_estimate: f64,
}

pub const REGION_TOL: f64 = 1e-9;

/// Real part of the curve `l+` (or `l-`) at height `|y|`: the solution of
/// `|e^{i pi z} + 1| = 1` (resp. `|e^{-i pi z} + 1| = 1`) in `1/2 < x <= 2/3`.
pub fn ell_abscissa(y: f64) -> f64 {
    (-0.5 * (-PI * y.abs()).exp()).acos() / PI
}

/// Left edge `Re z = (2-n)/2`, absent at infinite level.
pub fn line_abscissa(n: Level) -> Option<f64> {
    n.get().ok().map(|n| (2 - n) as f64 / 2.0)
}

pub fn region_classify(n: Level, z: C64) -> RegionQuery {
    let (x, y) = (z.re, z.im);
    let to_curve = ell_abscissa(y) - x;
    let to_line = line_abscissa(n).map(|l| x - l).unwrap_or(f64::INFINITY);
    let distance_estimate = to_curve.min(to_line);
    let vertex_points = [Some(2.0 / 3.0), line_abscissa(n)];
    let verdict = if vertex_points
        .iter()
        .flatten()
        .any(|&v| (z - C64::new(v, 0.0)).norm() <= REGION_TOL)
    {
        RegionVerdict::Vertex
    } else if to_curve < -REGION_TOL || to_line < -REGION_TOL {
        RegionVerdict::Outside
    } else if to_line <= REGION_TOL {
        RegionVerdict::BoundaryLine
    } else if to_curve <= REGION_TOL {
        if y > 0.0 {
            RegionVerdict::BoundaryEllPlus
        } else {
            RegionVerdict::BoundaryEllMinus
        }
    } else {
        RegionVerdict::Interior
    };
    RegionQuery { verdict, distance_estimate }
}

/// A value of a period-ratio map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub t: C64,
    pub z: C64,
    /// `k` such that the continued logarithm of the period ratio is the
    /// principal one plus `2 pi i k`.
    pub branch_tag: i64,
}

/// Roots of `x^3 - 3x + 2s` at `s = 0`, in cycle order, with the branch
/// of `log p` on the second cycle shifted by `-i pi`.
fn basepoint_tracker(n: Level) -> Result<PeriodTracker> {
    let r3 = 3f64.sqrt();
    let roots = [C64::new(-r3, 0.0), C64::new(0.0, 0.0), C64::new(r3, 0.0)];
    let a = C64::new(-3.0, 0.0);
    let b = C64::new(0.0, 0.0);
    let mut t = PeriodTracker::with_roots(n, a, b, roots, [None, None])?;
    t.anchors[1] = C64::new(t.anchors[1].re, -PI);
    Ok(t)
}

/// Continuation state for the period ratio along a path in `s = sqrt(t)`.
struct RatioWalk {
    tracker: PeriodTracker,
    s: C64,
    logs: [C64; 2],
    nu: f64,
}

impl RatioWalk {
    fn start(n: Level) -> Result<Self> {
        let tracker = basepoint_tracker(n)?;
        let p = tracker.periods()?;
        let nu = n.nu()?;
        // phi2 = e^{-i pi nu} phi1 at the basepoint, by the symmetry x -> -x.
        let l1 = p[0].ln();
        let l2 = C64::new(p[1].norm().ln(), l1.im - PI * nu);
        Ok(RatioWalk {
            tracker,
            s: C64::new(0.0, 0.0),
            logs: [l1, l2],
            nu,
        })
    }

    fn try_step(&mut self, s: C64) -> Result<()> {
        let mut next = self.tracker.clone();
        next.step(C64::new(-3.0, 0.0), 2.0 * s)?;
        let p = next.periods()?;
        let logs = [log_near(p[0], Some(self.logs[0])), log_near(p[1], Some(self.logs[1]))];
        for i in 0..2 {
            if (logs[i].im - self.logs[i].im).abs() > 0.5 {
                return Err(Error::TrackingLoss("period argument jumped".into()));
            }
        }
        for i in 0..2 {
            if (next.anchors[i].im - self.tracker.anchors[i].im).abs() > 0.5 {
                return Err(Error::TrackingLoss("branch jumped".into()));
            }
        }
        self.tracker = next;
        self.logs = logs;
        self.s = s;
        Ok(())
    }

    /// Moves along the straight segment to `target`, halving the step on
    /// tracking trouble.
    fn walk(&mut self, target: C64) -> Result<()> {
        let mut h = 0.05f64;
        while (target - self.s).norm() > 0.0 {
            let gap = (self.s - 1.0).norm().min((self.s + 1.0).norm());
            let size = h * gap.max(1e-3).min(1.0) * (1.0 + self.s.norm());
            let rem = target - self.s;
            let next = if rem.norm() <= size { target } else { self.s + rem / rem.norm() * size };
            match self.try_step(next) {
                Ok(()) => h = (h * 1.5).min(0.05),
                Err(Error::TrackingLoss(_)) if h > 1e-7 => h *= 0.25,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    /// Continued `log((-1)^n phi1/phi2)`.
    fn log_ratio(&self) -> C64 {
        self.logs[0] - self.logs[1] - C64::new(0.0, 2.0 * PI * self.nu)
    }
}

/// Path in `s` from the basepoint for `Im t >= 0`: via `(1 + i)/2`, so
/// that real `t > 1` is reached as a limit from the upper half plane.
fn s_path(t: C64) -> (C64, C64) {
    let s = t.sqrt();
    let s = if s.re < 0.0 { -s } else { s };
    (C64::new(0.5, 0.5), s)
}

fn check_map_parameter(t: C64) -> Result<()> {
    if !t.is_finite() || t.norm() < 1e-12 || (t - 1.0).norm() < 1e-9 {
        return Err(Error::SingularPoint(format!("t = {t} is a singular parameter")));
    }
    Ok(())
}

/// `f_n(t) = (1/(pi i)) log((-1)^n phi1/phi2)` on the slice `a = -3`,
/// `b = 2 sqrt(t)`, continued from `t = 0` where `f_n = (2-n)/2`.
///
/// The upper half `t`-plane goes to the lower half of `R_n`, with
/// `t < 0` on the real segment, `0 < t < 1` on the line `Re z = (2-n)/2`
/// and `t > 1` on `l-`; conjugate parameters give conjugate values.
pub fn f_map(n: Level, t: C64) -> Result<MapPoint> {
    check_map_parameter(t)?;
    if t.im < 0.0 {
        let p = f_map(n, t.conj())?;
        return Ok(MapPoint { t, z: p.z.conj(), branch_tag: -p.branch_tag });
    }
    let mut walk = RatioWalk::start(n)?;
    let (mid, s) = s_path(t);
    walk.walk(mid)?;
    walk.walk(s)?;
    let l = walk.log_ratio();
    let p = walk.tracker.periods()?;
    let sign = if n.get()? % 2 == 0 { 1.0 } else { -1.0 };
    let principal = (sign * p[0] / p[1]).ln();
    let branch_tag = ((l.im - principal.im) / (2.0 * PI)).round() as i64;
    Ok(MapPoint {
        t,
        z: l / C64::new(0.0, PI),
        branch_tag,
    })
}

/// Continued values `((-1)^n phi1, phi2)` on the slice `a = -3`,
/// `b = 2 sqrt(t)`, along the same path as [`f_map`]; their ratio is
/// `exp(pi i f_n(t))`.
pub fn slice_charges(n: Level, t: C64) -> Result<[C64; 2]> {
    if t.norm() < 1e-12 {
        let walk = RatioWalk::start(n)?;
        return Ok([(walk.log_ratio() + walk.logs[1]).exp(), walk.logs[1].exp()]);
    }
    check_map_parameter(t)?;
    if t.im < 0.0 {
        // Continued across t < 0, where z1 = i^(n-2) conj(z2).
        let [z1, z2] = slice_charges(n, t.conj())?;
        let m = match n {
            Level::Finite(k) => C64::new(0.0, 1.0).powu(k - 2),
            Level::Infinite => return Err(Error::InfiniteLevel),
        };
        return Ok([m * z2.conj(), m * z1.conj()]);
    }
    let mut walk = RatioWalk::start(n)?;
    let (mid, s) = s_path(t);
    walk.walk(mid)?;
    walk.walk(s)?;
    let z2 = walk.logs[1].exp();
    Ok([(walk.log_ratio() + walk.logs[1]).exp(), z2])
}

/// The square root of `t` used by [`f_map`] and [`slice_charges`].
pub fn slice_root(t: C64) -> C64 {
    s_path(t).1
}

/// Evaluates `f_n` at several parameters, in order, sharing nothing
/// between evaluations.
pub fn f_map_many(n: Level, ts: &[C64]) -> Result<Vec<MapPoint>> {
    ts.iter().map(|&t| f_map(n, t)).collect()
}

/// `f_inf = (1/(pi i)) log(-phi2/phi1)` for the exponential periods at
/// `(a, 0)`, continued from `a = 0` along the ray to `|a| e^{i theta}` with
/// `theta` the argument of `a` clamped to `[-pi/3, pi/3]`, then along the
/// circle `|a| = const`.
pub fn f_infty_map(a: C64) -> Result<MapPoint> {
    if !a.is_finite() {
        return Err(Error::SingularPoint("non-finite a".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let log_at = |x: C64, hint: Option<C64>| -> Result<C64> {
        let p = exp_periods(x, zero)?;
        Ok(log_near(-p[1] / p[0], hint))
    };
    let r = a.norm();
    let arg = a.arg();
    let th0 = arg.clamp(-PI / 3.0, PI / 3.0);
    let mut prev = log_at(C64::from_polar(r.min(0.25), th0), None)?;
    if r > 0.25 {
        prev = continue_log(&log_at, |s| C64::from_polar(0.25 + (r - 0.25) * s, th0), prev)?;
    }
    if (arg - th0).abs() > 1e-15 {
        prev = continue_log(&log_at, |s| C64::from_polar(r, th0 + (arg - th0) * s), prev)?;
    }
    let l = (-exp_periods(a, zero)?[1] / exp_periods(a, zero)?[0]).ln();
    let branch_tag = ((prev.im - l.im) / (2.0 * PI)).round() as i64;
    Ok(MapPoint { t: a * a * a, z: prev / C64::new(0.0, PI), branch_tag })
}

/// Follows a branch of a logarithm along `path(s)`, `s` in `[0, 1]`, with
/// steps small enough that consecutive values differ by under `0.5`.
fn continue_log<L, P>(log_at: &L, path: P, start: C64) -> Result<C64>
where
    L: Fn(C64, Option<C64>) -> Result<C64>,
    P: Fn(f64) -> C64,
{
    let mut s: f64 = 0.0;
    let mut h: f64 = 1.0 / 16.0;
    let mut cur = start;
    let mut evals = 0usize;
    while s < 1.0 {
        let step = h.min(1.0 - s);
        let next = log_at(path(s + step), Some(cur))?;
        evals += 1;
        if evals > 20_000 {
            return Err(Error::NonConvergence("log continuation".into()));
        }
        let delta = (next - cur).norm();
        if delta > 0.5 && step > 1e-9 {
            h = step / 2.0;
            continue;
        }
        cur = next;
        s += step;
        if delta < 0.1 {
            h = (h * 1.5).min(0.25);
        }
    }
    Ok(cur)
}

/// `f_inf` evaluated with a nonzero `b`; equal to [`f_infty_map`] since the
/// factor `e^b` cancels in the ratio.
pub fn f_infty_map_ab(a: C64, b: C64) -> Result<MapPoint> {
    let cfg = crate::quadrature::QuadConfig::default();
    let p1 = crate::periods::exp_period(a, b, 1, &cfg)?;
    let p2 = crate::periods::exp_period(a, b, 2, &cfg)?;
    let base = f_infty_map(a)?;
    let l = log_near(-p2 / p1, Some(base.z * C64::new(0.0, PI)));
    Ok(MapPoint { t: a * a * a, z: l / C64::new(0.0, PI), branch_tag: base.branch_tag })
}

/// Schwarzian derivative `g'''/g' - (3/2)(g''/g')^2` by five-point
/// differences with one Richardson step.
pub fn schwarzian_fd<F>(mut g: F, t: C64, h: C64) -> Result<C64>
where
    F: FnMut(C64) -> Result<C64>,
{
    let mut derivs = |h: C64| -> Result<(C64, C64, C64)> {
        let f = [g(t - 2.0 * h)?, g(t - h)?, g(t)?, g(t + h)?, g(t + 2.0 * h)?];
        let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
        let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
        let d3 = (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h);
        Ok((d1, d2, d3))
    };
    let (a1, a2, a3) = derivs(h)?;
    let (b1, b2, b3) = derivs(h * 0.5)?;
    let d1 = b1 + (b1 - a1) / 15.0;
    let d2 = b2 + (b2 - a2) / 15.0;
    let d3 = b3 + (b3 - a3) / 3.0;
    if d1.norm() < 1e-12 * (1.0 + d2.norm()) {
        return Err(Error::Degenerate("first derivative vanishes on the stencil".into()));
    }
    Ok(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1))
}

/// `S(g)/a` for the period ratio `g(a) = -phi2(a)/phi1(a) = e^{pi i f_inf}`,
/// estimated at a few sample points; the ratio of two solutions of
/// `3 y'' + a y = 0` has Schwarzian `2a/3`.
pub fn schwarzian_constant() -> Result<C64> {
    let g = |a: C64| -> Result<C64> {
        let p = exp_periods(a, C64::new(0.0, 0.0))?;
        Ok(-p[1] / p[0])
    };
    let samples = [C64::new(0.7, 0.3), C64::new(1.2, -0.4), C64::new(-0.5, 0.9)];
    let mut total = C64::new(0.0, 0.0);
    for a in samples {
        total += schwarzian_fd(g, a, C64::new(0.01, 0.0))? / a;
    }
    Ok(total / samples.len() as f64)
}

/// The exponents `(1/2, (n-1)/2, 1/3)` of `f_n` at `t = 0, 1, inf`.
pub fn vertex_exponents(n: Level) -> Result<(f64, f64, f64)> {
    let n = n.get()? as f64;
    Ok((0.5, (n - 1.0) / 2.0, 1.0 / 3.0))
}

/// Least-squares slope of `log |f(t) - target|` against `log |t|` over
/// the given parameters, with the residual spread of the fit.
pub fn loglog_slope(points: &[(C64, C64)], target: C64) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|(t, _)| t.norm().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, z)| (z - target).norm().ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let spread = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);
    (slope, spread)
}

/// Numerically fitted exponents of `f_n` at `t = 0` (over `t` in
/// `[1e-4, 1e-3]`) and at `t = inf` (over `|t|` in `[1e4, 1e5]`), both
/// approached along the imaginary direction.
pub fn fitted_vertex_exponents(n: Level) -> Result<(f64, f64)> {
    let nn = n.get()? as f64;
    let sample = |lo: f64, hi: f64| -> Result<Vec<(C64, C64)>> {
        (0..8)
            .map(|k| {
                let r = lo * (hi / lo).powf(k as f64 / 7.0);
                let t = C64::new(0.0, r);
                f_map(n, t).map(|p| (t, p.z))
            })
            .collect()
    };
    let near0 = sample(1e-4, 1e-3)?;
    let (s0, e0) = loglog_slope(&near0, C64::new((2.0 - nn) / 2.0, 0.0));
    let far = sample(1e4, 1e5)?;
    let (s1, e1) = loglog_slope(&far, C64::new(2.0 / 3.0, 0.0));
    if e0 > 0.05 || e1 > 0.05 {
        return Err(Error::FitQuality(format!("log-log fit spread {e0:.3e}, {e1:.3e}")));
    }
    Ok((s0, -s1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn region_examples() {
        let n3 = Level::Finite(3);
        assert_eq!(region_classify(n3, c(-0.25, 0.0)).verdict, RegionVerdict::Interior);
        assert_eq!(region_classify(n3, c(2.0 / 3.0, 0.0)).verdict, RegionVerdict::Vertex);
        assert_eq!(region_classify(n3, c(-0.5, 0.0)).verdict, RegionVerdict::Vertex);
        assert_eq!(region_classify(n3, c(0.9, 0.0)).verdict, RegionVerdict::Outside);
        assert_eq!(region_classify(n3, c(-0.5, 0.3)).verdict, RegionVerdict::BoundaryLine);
        assert_eq!(region_classify(n3, c(-0.6, 0.3)).verdict, RegionVerdict::Outside);
        let y = 0.4;
        let x = ell_abscissa(y);
        assert_eq!(region_classify(n3, c(x, y)).verdict, RegionVerdict::BoundaryEllPlus);
        assert_eq!(region_classify(n3, c(x, -y)).verdict, RegionVerdict::BoundaryEllMinus);
        // The curve is where |e^{i pi z} + 1| = 1.
        let w = (c(x, y) * C64::new(0.0, PI)).exp();
        assert!(((w + 1.0).norm() - 1.0).abs() < 1e-12);
        // Far left of the strip is inside for large n and at infinite level.
        assert_eq!(region_classify(Level::Finite(6), c(-1.9, 0.2)).verdict, RegionVerdict::Interior);
        assert_eq!(region_classify(Level::Infinite, c(-40.0, 3.0)).verdict, RegionVerdict::Interior);
    }

    #[test]
    fn region_conjugation_symmetry() {
        for k in 0..400 {
            let z = c(-2.5 + 0.008 * k as f64, 0.37 * ((k * 7) % 11) as f64 - 1.8);
            for n in [Level::Finite(2), Level::Finite(5), Level::Infinite] {
                let v = region_classify(n, z).verdict;
                let w = region_classify(n, z.conj()).verdict;
                let swapped = match w {
                    RegionVerdict::BoundaryEllPlus => RegionVerdict::BoundaryEllMinus,
                    RegionVerdict::BoundaryEllMinus => RegionVerdict::BoundaryEllPlus,
                    other => other,
                };
                assert_eq!(v, swapped);
            }
        }
    }

    #[test]
    fn boundary_sides() {
        for n in [3u32, 4] {
            let lv = Level::Finite(n);
            let line = (2.0 - n as f64) / 2.0;
            let z = f_map(lv, c(-1.7, 0.0)).unwrap().z;
            assert!(z.im.abs() < 1e-6 && z.re > line && z.re < 2.0 / 3.0);
            let z = f_map(lv, c(0.4, 0.0)).unwrap().z;
            assert!((z.re - line).abs() < 1e-6 && z.im < 0.0);
            let z = f_map(lv, c(2.5, 0.0)).unwrap().z;
            assert!((z.re - ell_abscissa(z.im)).abs() < 1e-6 && z.im < 0.0);
        }
    }

    #[test]
    fn reflection_and_interior() {
        let lv = Level::Finite(4);
        for t in [c(0.3, 0.4), c(-2.0, 0.1), c(7.0, 3.0)] {
            let up = f_map(lv, t).unwrap().z;
            let down = f_map(lv, t.conj()).unwrap().z;
            assert!((up - down.conj()).norm() < 1e-9);
            assert_eq!(region_classify(lv, up).verdict, RegionVerdict::Interior);
            assert!(up.im < 0.0);
        }
        assert!(f_map(lv, c(0.0, 0.0)).is_err());
        assert!(f_map(lv, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn infinite_level_map() {
        let z0 = f_infty_map(c(1e-3, 0.0)).unwrap().z;
        assert!((z0 - 2.0 / 3.0).norm() < 1e-3);
        let a = c(0.8, 0.3);
        let z = f_infty_map(a).unwrap().z;
        let zb = f_infty_map_ab(a, c(0.4, -1.3)).unwrap().z;
        assert!((z - zb).norm() < 1e-12);
        assert_eq!(region_classify(Level::Infinite, z).verdict, RegionVerdict::Interior);
        let edge = f_infty_map(C64::from_polar(1.2, PI / 3.0)).unwrap().z;
        assert_eq!(region_classify(Level::Infinite, edge).verdict, RegionVerdict::BoundaryEllMinus);
        let real = f_infty_map(c(1.5, 0.0)).unwrap().z;
        assert!(real.im.abs() < 1e-12 && real.re < 2.0 / 3.0);
    }

    #[test]
    fn schwarzian_closed_form_and_invariance() {
        let h = |a: C64| Ok((a.powf(1.5)).exp());
        let a = c(2.0, 1.0);
        let s = schwarzian_fd(h, a, c(0.02, 0.0)).unwrap();
        let want = -(9.0 * a * a * a + 5.0) / (8.0 * a * a);
        assert!((s - want).norm() < 1e-5 * want.norm(), "{s} {want}");
        let g = |x: C64| Ok((x * x).sin() + x);
        let m = |x: C64| -> Result<C64> { Ok((((x * x).sin() + x) * 2.0 + 1.0) / (((x * x).sin() + x) - 3.0)) };
        let x = c(0.4, 0.3);
        let s1 = schwarzian_fd(g, x, c(0.01, 0.0)).unwrap();
        let s2 = schwarzian_fd(m, x, c(0.01, 0.0)).unwrap();
        assert!((s1 - s2).norm() < 1e-6 * (1.0 + s1.norm()));
        assert!(schwarzian_fd(|_| Ok(c(1.0, 0.0)), x, c(0.01, 0.0)).is_err());
    }

    #[test]
    fn period_ratio_schwarzian() {
        let k = schwarzian_constant().unwrap();
        assert!((k - 2.0 / 3.0).norm() < 1e-3);
    }

    #[test]
    fn exponent_triple() {
        assert_eq!(vertex_exponents(Level::Finite(3)).unwrap(), (0.5, 1.0, 1.0 / 3.0));
        let (e0, e1, e2) = vertex_exponents(Level::Finite(6)).unwrap();
        assert_eq!(e1, 0.5 - (2.0 - 6.0) / 2.0);
        assert_eq!((e0, e2), (0.5, 1.0 / 3.0));
        assert!(vertex_exponents(Level::Infinite).is_err());
    }

    #[test]
    fn slice_charges_continue_across_negative_axis() {
        for k in 2..7 {
            let n = Level::Finite(k);
            for tr in [-3.0, -0.7] {
                let up = slice_charges(n, c(tr, 1e-7)).unwrap();
                let down = slice_charges(n, c(tr, -1e-7)).unwrap();
                for i in 0..2 {
                    assert!((up[i] - down[i]).norm() < 1e-5 * up[i].norm());
                }
                let r = up[0] / up[1];
                let f = f_map(n, c(tr, 1e-7)).unwrap().z;
                assert!((r - (f * c(0.0, PI)).exp()).norm() < 1e-6);
            }
        }
    }
}
