//! Stability conditions in the principal component, the fundamental domain
//! `U_n`, and the correspondence with the unfolding space `(a, b)`.
//!
//! A stability condition is stored as a heart together with the central
//! charges of its two simples and real lifts of their phases, so that phases
//! never depend on a choice of logarithm branch.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::braid::{AutEq, AutEqInfty, Transporter};
use crate::error::{Error, Result};
use crate::lattice::{KClass, Mat2};
use crate::level::Level;
use crate::periods::{exp_periods, twisted_periods};
use crate::schwarz::{f_infty_map, f_map, slice_charges, slice_root};
use crate::tilting::{BaseObject, Heart, ObjectDesc};

/// Tolerance on phases and relative moduli for boundary verdicts.
pub const PHASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "StabilityJson", try_from = "StabilityJson")]
pub struct StabilityPoint {
    pub heart: Heart,
    pub z1: C64,
    pub z2: C64,
    pub lift1: f64,
    pub lift2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum HeartJson {
    Finite {
        sl2: [[i64; 2]; 2],
        expsum: i64,
        shift: i64,
        k: i64,
    },
    Infinite {
        sigma_power: i64,
        k: i64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StabilityJson {
    n: Level,
    heart: HeartJson,
    z1: [f64; 2],
    z2: [f64; 2],
    lift1: f64,
    lift2: f64,
}

impl From<StabilityPoint> for StabilityJson {
    fn from(s: StabilityPoint) -> Self {
        let heart = match s.heart.phi {
            Transporter::Finite(a) => HeartJson::Finite {
                sl2: a.sl2.0,
                expsum: a.expsum,
                shift: a.shift,
                k: s.heart.k,
            },
            Transporter::Infinite(a) => HeartJson::Infinite {
                sigma_power: a.sigma_power,
                k: s.heart.k,
            },
        };
        StabilityJson {
            n: s.level(),
            heart,
            z1: [s.z1.re, s.z1.im],
            z2: [s.z2.re, s.z2.im],
            lift1: s.lift1,
            lift2: s.lift2,
        }
    }
}

impl TryFrom<StabilityJson> for StabilityPoint {
    type Error = Error;

    fn try_from(j: StabilityJson) -> Result<Self> {
        let (phi, k) = match (j.n, j.heart) {
            (Level::Finite(_), HeartJson::Finite { sl2, expsum, shift, k }) => {
                let m = Mat2(sl2);
                if m.det() != 1 || !(0..6).contains(&expsum) {
                    return Err(Error::NonCanonicalHeart("heart transporter is not canonical".into()));
                }
                let a = AutEq { sl2: m, expsum, shift, n: j.n };
                (Transporter::Finite(a), k)
            }
            (Level::Infinite, HeartJson::Infinite { sigma_power, k }) => {
                (Transporter::Infinite(AutEqInfty { sigma_power }), k)
            }
            (n, _) => {
                return Err(Error::NonCanonicalHeart(format!("heart fields do not match level {n}")));
            }
        };
        let heart = Heart::from_raw(phi, k)?;
        if heart != (Heart { phi, k }) {
            return Err(Error::NonCanonicalHeart("heart is not in canonical form".into()));
        }
        let p = StabilityPoint {
            heart,
            z1: C64::new(j.z1[0], j.z1[1]),
            z2: C64::new(j.z2[0], j.z2[1]),
            lift1: j.lift1,
            lift2: j.lift2,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Phase of `z` in `(0, 1]`.
fn standard_lift(z: C64) -> Result<f64> {
    if !z.is_finite() || z.norm() == 0.0 {
        return Err(Error::InvalidCharge(format!("charge {z} vanishes or is not finite")));
    }
    let p = z.arg() / PI;
    if p <= 0.0 {
        return Err(Error::InvalidCharge(format!("charge {z} has phase {p} outside (0, 1]")));
    }
    Ok(p)
}

/// Builds a stability condition on `heart` from the charges of its simples,
/// which must lie in the upper half plane or on the negative real axis.
pub fn make_stability(heart: Heart, z1: C64, z2: C64) -> Result<StabilityPoint> {
    let lift1 = standard_lift(z1)?;
    let lift2 = standard_lift(z2)?;
    let p = StabilityPoint { heart, z1, z2, lift1, lift2 };
    p.validate()?;
    Ok(p)
}

/// An indecomposable semistable object with its charge and phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasedObject {
    pub object: ObjectDesc,
    pub charge: C64,
    pub phase: f64,
}

impl StabilityPoint {
    pub fn level(&self) -> Level {
        self.heart.level()
    }

    fn validate(&self) -> Result<()> {
        for (z, l) in [(self.z1, self.lift1), (self.z2, self.lift2)] {
            if !z.is_finite() || z.norm() == 0.0 {
                return Err(Error::InvalidCharge(format!("charge {z} vanishes or is not finite")));
            }
            if !(l > 0.0 && l <= 1.0) {
                return Err(Error::InvalidCharge(format!("lift {l} outside (0, 1]")));
            }
            let off = (z.arg() / PI - l).rem_euclid(2.0);
            if off.min(2.0 - off) > 1e-7 {
                return Err(Error::InvalidCharge(format!("lift {l} does not match charge {z}")));
            }
        }
        Ok(())
    }

    /// Charges `(Z(S1), Z(S2))` of the standard simples, solved from the
    /// charges and K-classes of this heart's simples.
    pub fn charge_functional(&self) -> [C64; 2] {
        let [c1, c2] = self.heart.simple_classes();
        let det = (c1.coeff_s1 * c2.coeff_s2 - c1.coeff_s2 * c2.coeff_s1) as f64;
        let zs1 = (self.z1 * c2.coeff_s2 as f64 - self.z2 * c1.coeff_s2 as f64) / det;
        let zs2 = (self.z2 * c1.coeff_s1 as f64 - self.z1 * c2.coeff_s1 as f64) / det;
        [zs1, zs2]
    }

    pub fn charge_of(&self, c: KClass) -> C64 {
        let [a, b] = self.charge_functional();
        a * c.coeff_s1 as f64 + b * c.coeff_s2 as f64
    }
}

/// The indecomposable semistable objects of `sigma` up to shift: the two
/// simples, and at a full heart the extension objects allowed by the phase
/// order of the simples.
pub fn semistable_set(sigma: &StabilityPoint) -> Result<Vec<PhasedObject>> {
    sigma.validate()?;
    let h = sigma.heart;
    let [x1, x2] = h.simples();
    let mut out = vec![
        PhasedObject { object: x1, charge: sigma.z1, phase: sigma.lift1 },
        PhasedObject { object: x2, charge: sigma.z2, phase: sigma.lift2 },
    ];
    if h.is_full() {
        let sum = sigma.z1 + sigma.z2;
        let lo = sigma.lift1.min(sigma.lift2);
        let hi = sigma.lift1.max(sigma.lift2);
        let phase = (sum.arg() / PI).clamp(lo, hi);
        if sigma.lift1 >= sigma.lift2 - PHASE_TOL {
            let object = ObjectDesc::new(h.phi, BaseObject::E, 0);
            out.push(PhasedObject { object, charge: sum, phase });
        }
        if h.level() == Level::Finite(2) && sigma.lift2 >= sigma.lift1 - PHASE_TOL {
            let object = ObjectDesc::new(h.phi, BaseObject::F, 0);
            out.push(PhasedObject { object, charge: sum, phase });
        }
    }
    Ok(out)
}

/// Verdict of the fundamental-domain classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UClass {
    CaseAInterior,
    CaseBInterior,
    BoundaryUpsilon,
    BoundarySigma,
    VertexSigma,
    VertexUpsilon,
    Outside,
}

impl UClass {
    pub fn is_interior(self) -> bool {
        matches!(self, UClass::CaseAInterior | UClass::CaseBInterior)
    }
}

/// Charges and phases of `S1`, `S2` (and `E` when semistable) in a
/// stability condition where both simples of the standard heart are
/// semistable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardView {
    pub z1: C64,
    pub z2: C64,
    pub phase1: f64,
    pub phase2: f64,
    pub extension: Option<(C64, f64)>,
}

/// `None` unless `S1` and `S2` are both semistable in `sigma`.
pub fn standard_view(sigma: &StabilityPoint) -> Result<Option<StandardView>> {
    let mut s1 = None;
    let mut s2 = None;
    let mut e = None;
    for p in semistable_set(sigma)? {
        if p.object.transporter.as_shift() != Some(0) {
            continue;
        }
        let m = p.object.shift;
        let value = (p.charge * if m % 2 == 0 { 1.0 } else { -1.0 }, p.phase - m as f64);
        match p.object.base {
            BaseObject::S1 => s1 = Some(value),
            BaseObject::S2 => s2 = Some(value),
            BaseObject::E => e = Some(value),
            BaseObject::F => {}
        }
    }
    Ok(match (s1, s2) {
        (Some((z1, phase1)), Some((z2, phase2))) => Some(StandardView {
            z1,
            z2,
            phase1,
            phase2,
            extension: e,
        }),
        _ => None,
    })
}

/// Locates `sigma` relative to the closure of the fundamental domain `U_n`.
///
/// The heart of `sigma` need not be the standard one: the classifier looks
/// for `S1`, `S2` and `E` among the semistable objects of any heart.
pub fn classify_fundamental(n: Level, sigma: &StabilityPoint) -> Result<UClass> {
    n.check_same(sigma.level())?;
    let Some(v) = standard_view(sigma)? else {
        return Ok(UClass::Outside);
    };
    let (m1, m2) = (v.z1.norm(), v.z2.norm());
    let equal_moduli = (m1.ln() - m2.ln()).abs() <= PHASE_TOL;
    let gap = v.phase2 - v.phase1;
    if let Some((ze, _)) = v.extension {
        if n == Level::Finite(2) && gap.abs() <= PHASE_TOL {
            return Ok(if equal_moduli { UClass::VertexUpsilon } else { UClass::BoundaryUpsilon });
        }
        let me = ze.norm();
        let d1 = (me - m1) / me;
        let d2 = (me - m2) / me;
        if d1 < -PHASE_TOL || d2 < -PHASE_TOL {
            return Ok(UClass::Outside);
        }
        return Ok(match (d1 <= PHASE_TOL, d2 <= PHASE_TOL) {
            (true, true) => UClass::VertexSigma,
            (false, false) => UClass::CaseBInterior,
            _ => UClass::BoundarySigma,
        });
    }
    if gap < -PHASE_TOL {
        return Ok(UClass::Outside);
    }
    let Ok(k) = n.get() else {
        return Ok(UClass::CaseAInterior);
    };
    let half = (k - 2) as f64 / 2.0;
    Ok(if gap > half + PHASE_TOL {
        UClass::Outside
    } else if gap >= half - PHASE_TOL {
        if equal_moduli {
            UClass::VertexUpsilon
        } else {
            UClass::BoundaryUpsilon
        }
    } else {
        UClass::CaseAInterior
    })
}

/// `g(sigma) = (1/(pi i)) log(Z(S1)/Z(S2))`, with the real part taken from
/// the phases of `S1` and `S2`, which must both be semistable.
pub fn g_coordinate(sigma: &StabilityPoint) -> Result<C64> {
    let v = standard_view(sigma)?.ok_or_else(|| {
        Error::NonCanonicalHeart("S1 and S2 are not both semistable; reduce first".into())
    })?;
    Ok(C64::new(v.phase1 - v.phase2, -(v.z1.norm() / v.z2.norm()).ln() / PI))
}

/// The stability condition `phi . sigma`, whose charge on `phi(X)` is the
/// charge of `X` in `sigma`.
pub fn act(phi: &Transporter, sigma: &StabilityPoint) -> Result<StabilityPoint> {
    phi.level().check_same(sigma.level())?;
    let (heart, swapped) = sigma.heart.apply_traced(phi)?;
    Ok(if swapped {
        StabilityPoint {
            heart,
            z1: sigma.z2,
            z2: sigma.z1,
            lift1: sigma.lift2,
            lift2: sigma.lift1,
        }
    } else {
        StabilityPoint { heart, ..*sigma }
    })
}

/// A stability condition with `g_coordinate = g` and `|Z(S2)| = 1`, with
/// `S1` and `S2` semistable: on the standard heart when `Re g >= 0`, and on
/// a chain heart `<S1[k], S2>` when `Re g < 0`.
pub fn point_from_g(n: Level, g: C64) -> Result<StabilityPoint> {
    if !g.is_finite() || g.re >= 1.0 {
        return Err(Error::InvalidCharge(format!("g = {g} is not of the form produced by U_n")));
    }
    if let Ok(k) = n.get() {
        if g.re < (2 - k) as f64 / 2.0 - PHASE_TOL {
            return Err(Error::InvalidCharge(format!("Re g = {} is left of the line", g.re)));
        }
    }
    let modulus = (-PI * g.im).exp();
    let (phase1, phase2, k) = if g.re >= 0.0 {
        let p2 = (1.0 - g.re) / 2.0;
        (p2 + g.re, p2, 0)
    } else {
        let p1 = 0.5 + g.re;
        let k = if p1 > 0.0 { 0 } else { (-p1).floor() as i64 + 1 };
        (p1, 0.5, k)
    };
    let z1 = C64::from_polar(modulus, PI * phase1);
    let z2 = C64::from_polar(1.0, PI * phase2);
    let lift1 = phase1 + k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (heart, swapped) = Heart::from_raw_traced(Transporter::identity(n), k)?;
    let p = if swapped {
        StabilityPoint { heart, z1: z2, z2: sign * z1, lift1: phase2, lift2: lift1 }
    } else {
        StabilityPoint { heart, z1: sign * z1, z2, lift1, lift2: phase2 }
    };
    p.validate()?;
    Ok(p)
}

/// Result of [`reduce_to_fundamental`]: `sigma = act(phi, sigma0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub phi: Transporter,
    pub sigma0: StabilityPoint,
    pub verdict: UClass,
}

/// Elements `g` such that the candidates `phi g` cover every way the
/// semistable objects of a heart `(phi, k)` can be `S1`, `S2` (and `E`).
fn reduction_offsets(n: Level) -> Vec<Transporter> {
    let id = Transporter::identity(n);
    let s = Transporter::sigma(n);
    let s2 = s.compose(&s).expect("same level");
    let mut out = vec![id, s, s2];
    if let Ok(u) = Transporter::upsilon(n) {
        for g in [id, s, s2] {
            out.push(u.compose(&g).expect("same level"));
            out.push(g.compose(&u).expect("same level"));
        }
    }
    out
}

/// Finds `phi` and `sigma0` in the closure of `U_n` with
/// `sigma = act(phi, sigma0)`.
///
/// The semistable objects of `sigma` are images under the heart's
/// transporter of the standard objects, so `phi` is that transporter up to
/// the finitely many symmetries of `{S1, S2, E}` and the second description
/// of a chain heart; each candidate is tested with the classifier. Interior
/// verdicts are preferred, and when the reduced heart is a shift of a
/// standard one the shift is moved into `phi`.
pub fn reduce_to_fundamental(n: Level, sigma: &StabilityPoint) -> Result<Reduction> {
    n.check_same(sigma.level())?;
    let mut best: Option<Reduction> = None;
    for (rep, _) in sigma.heart.representations() {
        for g in reduction_offsets(n) {
            let mut phi = rep.compose(&g)?;
            let mut sigma0 = act(&phi.inverse(), sigma)?;
            if let Some(m) = sigma0.heart.phi.as_shift() {
                if m != 0 {
                    sigma0 = act(&Transporter::shift_by(n, -m), &sigma0)?;
                    phi = phi.compose(&Transporter::shift_by(n, m))?;
                }
            }
            let verdict = classify_fundamental(n, &sigma0)?;
            if verdict == UClass::Outside {
                continue;
            }
            let cand = Reduction { phi, sigma0, verdict };
            match &best {
                Some(b) if b.verdict.is_interior() || !verdict.is_interior() => {}
                _ => best = Some(cand),
            }
        }
    }
    best.ok_or_else(|| {
        Error::CapExceeded(format!(
            "no candidate places the point in the fundamental domain (heart {})",
            sigma.heart.label()
        ))
    })
}

/// A point `(a, b)` of the unfolding space of `x^3`, with its parameter
/// `t = -27 b^2 / (4 a^3)` (finite level) or `t = a^3` (infinite level).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicPoint {
    pub a: C64,
    pub b: C64,
    pub t: C64,
}

impl CubicPoint {
    pub fn new(n: Level, a: C64, b: C64) -> CubicPoint {
        let t = if n.is_finite() { -27.0 * b * b / (4.0 * a * a * a) } else { a * a * a };
        CubicPoint { a, b, t }
    }
}

/// Exponent `(3n - 4)/2` by which the periods scale under `x -> lambda x`.
fn period_weight(n: Level) -> Result<f64> {
    Ok((3 * n.get()? - 4) as f64 / 2.0)
}

/// Central charges `(Z(S1), Z(S2))` attached to `(a, b)`.
///
/// At finite level these are the periods `((-1)^n phi1, phi2)` continued
/// from the slice point `a = -3, b = 0` along the path used by
/// [`f_map`], then rescaled by `lambda^{(3n-4)/2}` (principal power) where
/// `a = -3 lambda^2` and `Re(b / (2 lambda^3)) >= 0`. At infinite level
/// they are `(-phi2, phi1)` for the exponential periods. Both are single
/// branches of a multivalued correspondence.
pub fn charges_from_cubic(n: Level, cubic: &CubicPoint) -> Result<[C64; 2]> {
    let (a, b) = (cubic.a, cubic.b);
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::SingularPoint("non-finite (a, b)".into()));
    }
    if !n.is_finite() {
        let p = exp_periods(a, b)?;
        return Ok([-p[1], p[0]]);
    }
    let disc = 4.0 * a * a * a + 27.0 * b * b;
    let scale = (a.norm().powi(3) + b.norm().powi(2)).max(1e-300);
    if disc.norm() <= 1e-12 * scale {
        return Err(Error::Discriminant(disc.norm()));
    }
    if a.norm() < 1e-12 * scale.cbrt() {
        let p = twisted_periods(n, a, b)?;
        let sign = if n.get()? % 2 == 0 { 1.0 } else { -1.0 };
        return Ok([sign * p[0], p[1]]);
    }
    let mut lambda = (-a / 3.0).sqrt();
    let mut s = b / (2.0 * lambda * lambda * lambda);
    let tie = 1e-12 * s.norm();
    if s.re < -tie || (s.re.abs() <= tie && s.im < 0.0) {
        lambda = -lambda;
        s = -s;
    }
    let zs = slice_charges(n, s * s)?;
    let factor = (period_weight(n)? * lambda.ln()).exp();
    Ok([factor * zs[0], factor * zs[1]])
}

/// Least-squares `c` with `target ~ c * base`.
fn common_factor(target: [C64; 2], base: [C64; 2]) -> C64 {
    (target[0] * base[0].conj() + target[1] * base[1].conj()) / (base[0].norm_sqr() + base[1].norm_sqr())
}

/// Damped Newton iteration for `f(e^u) = target` in the logarithmic
/// variable, with the imaginary part of `u` kept in `im_range` and the
/// derivative taken by a real finite difference.
fn newton_log<F>(f: F, target: C64, seed: C64, im_range: (f64, f64)) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let clamp = |u: C64| C64::new(u.re, u.im.clamp(im_range.0, im_range.1));
    let mut u = clamp(seed);
    let mut val = f(u.exp())?;
    for _ in 0..80 {
        let res = val - target;
        if res.norm() < 1e-12 {
            return Ok(u);
        }
        let h = 1e-6;
        let d = (f((u + h).exp())? - f((u - h).exp())?) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let mut step = -res / d;
        if step.norm() > 1.0 {
            step /= step.norm();
        }
        let mut accepted = false;
        for _ in 0..30 {
            let cand = clamp(u + step);
            if let Ok(v) = f(cand.exp()) {
                if (v - target).norm() < res.norm() {
                    u = cand;
                    val = v;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if (val - target).norm() < 1e-9 {
        return Ok(u);
    }
    Err(Error::NonConvergence(format!("could not invert the period map at {target}")))
}

/// Seeds `(u, f(e^u))` for the Newton inversion, one table per level.
fn seed_table(n: Level) -> Result<Vec<(C64, C64)>> {
    static TABLES: OnceLock<std::sync::Mutex<Vec<(Level, Vec<(C64, C64)>)>>> = OnceLock::new();
    let lock = TABLES.get_or_init(Default::default);
    if let Some((_, v)) = lock.lock().expect("seed table").iter().find(|(m, _)| *m == n) {
        return Ok(v.clone());
    }
    let mut out = Vec::new();
    if n.is_finite() {
        for i in -10..=10 {
            for frac in [0.02, 0.25, 0.5, 0.75, 0.98] {
                let u = C64::new(i as f64, frac * PI);
                if let Ok(p) = f_map(n, u.exp()) {
                    out.push((u, p.z));
                }
            }
        }
    } else {
        for i in -6..=3 {
            for frac in [-0.95, -0.5, 0.0, 0.5, 0.95] {
                let u = C64::new(i as f64 * 0.75, frac * PI / 3.0);
                if let Ok(p) = f_infty_map(u.exp()) {
                    out.push((u, p.z));
                }
            }
        }
    }
    lock.lock().expect("seed table").push((n, out.clone()));
    Ok(out)
}

/// Solves `f(e^u) = target` starting from the nearest seeds.
fn invert_map<F>(n: Level, f: F, target: C64, im_range: (f64, f64)) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut seeds = seed_table(n)?;
    seeds.retain(|(u, _)| u.im >= im_range.0 && u.im <= im_range.1);
    seeds.sort_by(|x, y| (x.1 - target).norm().total_cmp(&(y.1 - target).norm()));
    let mut last = Error::NonConvergence("no seeds".into());
    for (u, _) in seeds.iter().take(4) {
        match newton_log(&f, target, *u, im_range) {
            Ok(u) => return Ok(u),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `t` with `f_n(t) = z`, for `z` in the closure of `R_n` away from the
/// images of `t = 0, 1, infinity`.
pub fn f_map_inverse(n: Level, z: C64) -> Result<C64> {
    let upper = z.im <= 0.0;
    let target = if upper { z } else { z.conj() };
    let f = |t: C64| f_map(n, t).map(|p| p.z);
    let u = invert_map(n, f, target, (0.0, PI))?;
    let t = u.exp();
    Ok(if upper { t } else { t.conj() })
}

/// `a` with `f_inf(a) = z` and `|arg a| <= pi/3`.
pub fn f_infty_map_inverse(z: C64) -> Result<C64> {
    let f = |a: C64| f_infty_map(a).map(|p| p.z);
    invert_map(Level::Infinite, f, z, (-PI / 3.0, PI / 3.0)).map(|u| u.exp())
}

/// A point `(a, b)` whose charges under [`charges_from_cubic`] are those of
/// `sigma`, which must have `S1` and `S2` semistable (reduce it first).
pub fn cubic_from_stability(n: Level, sigma: &StabilityPoint) -> Result<CubicPoint> {
    n.check_same(sigma.level())?;
    let g = g_coordinate(sigma)?;
    let z = sigma.charge_functional();
    if !n.is_finite() {
        let a = f_infty_map_inverse(g)?;
        let p = exp_periods(a, C64::new(0.0, 0.0))?;
        let c = common_factor(z, [-p[1], p[0]]);
        return Ok(CubicPoint::new(n, a, c.ln()));
    }
    let t = f_map_inverse(n, g)?;
    let zs = slice_charges(n, t)?;
    let c = common_factor(z, zs);
    let w = period_weight(n)?;
    let spacing = 2.0 * PI / w;
    let base = c.ln() / w;
    let k = ((-PI - base.im) / spacing).floor() + 1.0;
    let log_lambda = base + C64::new(0.0, k * spacing);
    let lambda = log_lambda.exp();
    let s = slice_root(t);
    let a = -3.0 * lambda * lambda;
    let b = 2.0 * lambda * lambda * lambda * s;
    Ok(CubicPoint { a, b, t })
}

/// Continues `sigma` along the straight path from its central charge to the
/// charge taking the values `target` on the two simples of `sigma`'s heart,
/// in `steps` equal steps. Whenever the phase of a simple leaves `(0, 1]`
/// the heart is tilted at that simple and the charges are re-expressed in
/// the new simples.
pub fn wall_walk(sigma: &StabilityPoint, target: (C64, C64), steps: usize) -> Result<StabilityPoint> {
    sigma.validate()?;
    if steps == 0 {
        return Err(Error::InvalidPath("wall walk needs at least one step".into()));
    }
    let start = sigma.charge_functional();
    let end = {
        let moved = StabilityPoint { z1: target.0, z2: target.1, ..*sigma };
        moved.charge_functional()
    };
    let scale = start[0].norm() + start[1].norm() + end[0].norm() + end[1].norm();
    let mut cur = *sigma;
    for step in 1..=steps {
        let s = step as f64 / steps as f64;
        let zf = [start[0] + (end[0] - start[0]) * s, start[1] + (end[1] - start[1]) * s];
        let eval = |h: &Heart| {
            let [c1, c2] = h.simple_classes();
            let z = |c: KClass| zf[0] * c.coeff_s1 as f64 + zf[1] * c.coeff_s2 as f64;
            (z(c1), z(c2))
        };
        let (n1, n2) = eval(&cur.heart);
        if n1.norm() <= 1e-13 * scale || n2.norm() <= 1e-13 * scale {
            return Err(Error::InvalidPath("a central charge vanishes on the path".into()));
        }
        let mut lifts = [
            cur.lift1 + (n1 / cur.z1).arg() / PI,
            cur.lift2 + (n2 / cur.z2).arg() / PI,
        ];
        let mut heart = cur.heart;
        let mut charges = [n1, n2];
        let mut tilts = 0;
        loop {
            let low = (0..2).filter(|&i| lifts[i] <= 0.0).min_by(|&i, &j| lifts[i].total_cmp(&lifts[j]));
            let high = (0..2).filter(|&i| lifts[i] > 1.0).max_by(|&i, &j| lifts[i].total_cmp(&lifts[j]));
            let (next, pos, delta) = match (low, high) {
                (None, None) => break,
                (Some(i), _) => {
                    let (h, pos) = heart.forward_tilt_traced(i + 1)?;
                    (h, pos, 1.0)
                }
                (None, Some(i)) => {
                    let (h, pos) = heart.backward_tilt_traced(i + 1)?;
                    (h, pos, -1.0)
                }
            };
            let moved = if delta > 0.0 { low } else { high }.expect("chosen");
            tilts += 1;
            if tilts > 64 {
                return Err(Error::InvalidPath("step too coarse: too many tilts in one step".into()));
            }
            let (m1, m2) = eval(&next);
            let carried = lifts[moved] + delta;
            let mut new_lifts = [0.0; 2];
            let new_charges = [m1, m2];
            for j in 0..2 {
                new_lifts[j] = if j + 1 == pos { carried } else { new_charges[j].arg() / PI };
            }
            heart = next;
            charges = new_charges;
            lifts = new_lifts;
        }
        cur = StabilityPoint {
            heart,
            z1: charges[0],
            z2: charges[1],
            lift1: lifts[0],
            lift2: lifts[1],
        };
    }
    cur.validate()?;
    Ok(cur)
}
