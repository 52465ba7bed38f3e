//! Acceptance checks, one line per criterion.

mod common;

use std::collections::HashSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use a2stab::braid::{AutEq, Transporter};
use a2stab::lattice::{twist_kmatrix, Direction, Mat2};
use a2stab::periods::{
    airy_residual, circle_loop, cubic_roots, exp_period, exp_periods, hypergeom_residual, monodromy_matrix,
    richardson_derivatives, round_integer, twisted_periods,
};
use a2stab::quadrature::QuadConfig;
use a2stab::schwarz::{ell_abscissa, f_map, fitted_vertex_exponents, region_classify, schwarzian_fd, RegionVerdict};
use a2stab::stability::*;
use a2stab::tilting::{canonical_heart, exchange_graph, projective_exchange_graph, Heart};
use a2stab::Level;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_interior_g, random_transporter, same_point, Oracle};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fin(n: u32) -> Level {
    Level::Finite(n)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}

fn c1_braid_relations() -> Check {
    for n in 2..=8 {
        for dir in [Direction::Forward, Direction::Inverse] {
            let t1 = twist_kmatrix(fin(n), 1, dir).map_err(|e| e.to_string())?.entries;
            let t2 = twist_kmatrix(fin(n), 2, dir).map_err(|e| e.to_string())?.entries;
            ensure(t1 * t2 * t1 == t2 * t1 * t2, || format!("braid relation fails at n={n}"))?;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            ensure((t1 * t2).pow(3) == Mat2::IDENTITY.scale(sign), || format!("(T1T2)^3 at n={n}"))?;
        }
    }
    Ok("n = 2..8, both twist directions, exact".into())
}

fn c2_canonical_identities() -> Check {
    for n in 2..=8 {
        let lv = fin(n);
        let e = |x: a2stab::Result<AutEq>| x.map_err(|e| e.to_string());
        let shift = |k: i64| e(AutEq::shift_by(lv, k));
        ensure(e(AutEq::sigma(lv))?.pow(3) == shift(1)?, || format!("Sigma^3 at n={n}"))?;
        ensure(e(AutEq::upsilon(lv))?.pow(2) == shift(n as i64 - 2)?, || format!("Upsilon^2 at n={n}"))?;
        ensure(e(AutEq::tau(lv))? == shift(3 * n as i64 - 4)?, || format!("tau at n={n}"))?;
    }
    Ok("Sigma^3 = [1], Upsilon^2 = [n-2], tau = [3n-4] for n = 2..8".into())
}

fn c3_torsor() -> Check {
    let mut report = Vec::new();
    for n in [2u32, 3, 4, 6] {
        let lv = fin(n);
        let g = exchange_graph(lv, 8).map_err(|e| e.to_string())?;
        let full: Vec<_> = g.nodes.iter().filter(|v| v.full).collect();
        let coords: HashSet<Transporter> = full.iter().map(|v| v.heart.phi).collect();
        ensure(coords.len() == full.len(), || format!("repeated coordinate at n={n}"))?;
        for v in &full {
            let h = canonical_heart(lv).apply(&v.heart.phi).map_err(|e| e.to_string())?;
            ensure(h == v.heart, || format!("coordinate does not transport at n={n}"))?;
        }
        for v in g.nodes.iter().filter(|v| v.depth < 8) {
            for i in [1, 2] {
                for next in [v.heart.forward_tilt(i), v.heart.backward_tilt(i)] {
                    let next: Heart = next.map_err(|e| e.to_string())?;
                    ensure(g.nodes.iter().any(|w| w.heart == next), || format!("ball not closed at n={n}"))?;
                }
            }
        }
        let p = projective_exchange_graph(lv, 8).map_err(|e| e.to_string())?;
        let (nodes, edges) = Oracle::new(n as i64).ball(8);
        ensure(p.nodes.len() == nodes && p.edges.len() == edges, || {
            format!("n={n}: graph {}/{} vs group ball {nodes}/{edges}", p.nodes.len(), p.edges.len())
        })?;
        report.push(format!("n={n}: {} full, projective {nodes}/{edges}", full.len()));
    }
    Ok(report.join("; "))
}

fn c4_closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, b) = (c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let Ok(r) = cubic_roots(a, b) else { continue };
        let p = twisted_periods(fin(2), a, b).map_err(|e| e.to_string())?;
        worst = worst.max((p[0] - (r[1] - r[0])).norm()).max((p[1] - (r[2] - r[1])).norm());
    }
    ensure(worst < 1e-12, || format!("n=2 deviation {worst:e}"))?;
    let p = twisted_periods(fin(4), c(-1.0, 0.0), c(0.0, 0.0)).map_err(|e| e.to_string())?;
    let dev = (p[0] - 0.25).norm().max((p[1] + 0.25).norm());
    ensure(dev < 1e-10, || format!("n=4 deviation {dev:e}"))?;
    Ok(format!("n=2 max deviation {worst:.1e}; n=4 (1/4, -1/4) deviation {dev:.1e}"))
}

fn regular_z(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let z = c(rng.gen_range(-1.5..2.5), rng.gen_range(-1.5..1.5));
        if z.norm() > 0.2 && (z - 1.0).norm() > 0.2 {
            return z;
        }
    }
}

fn c5_hypergeometric() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 4, 5, 7] {
        for _ in 0..20 {
            let z = regular_z(&mut rng);
            let r = hypergeom_residual(fin(n), z).map_err(|e| format!("n={n} z={z}: {e}"))?;
            ensure(r < 1e-5, || format!("n={n} z={z}: residual {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("max residual {worst:.1e} over 100 points"))
}

fn c6_airy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a = C64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(-PI..PI));
        let r = airy_residual(a).map_err(|e| e.to_string())?;
        ensure(r < 1e-5, || format!("a={a}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    let cfg = QuadConfig::default();
    let mut second: f64 = 0.0;
    for which in [1, 2] {
        let (_, _, d2) = richardson_derivatives(|a| exp_period(a, c(0.0, 0.0), which, &cfg), c(0.0, 0.0), c(0.05, 0.0))
            .map_err(|e| e.to_string())?;
        second = second.max(d2.norm());
    }
    ensure(second < 1e-6, || format!("|phi''(0)| = {second:e}"))?;
    Ok(format!("max residual {worst:.1e}; |phi''(0)| {second:.1e}"))
}

fn c7_scaling() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 20 {
        let n = [3u32, 4, 5, 6, 8][done % 5];
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lam: f64 = rng.gen_range(0.5..2.0);
        let (Ok(p0), Ok(p1)) = (
            twisted_periods(fin(n), a, b),
            twisted_periods(fin(n), a * lam.powi(4), b * lam.powi(6)),
        ) else {
            continue;
        };
        for i in 0..2 {
            worst = worst.max(rel(p1[i], p0[i] * lam.powi(3 * n as i32 - 4)));
        }
        done += 1;
    }
    ensure(worst < 1e-8, || format!("finite-level scaling deviation {worst:e}"))?;
    let mut worst_inf: f64 = 0.0;
    for _ in 0..20 {
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let base = exp_periods(a, c(0.0, 0.0)).map_err(|e| e.to_string())?;
        let full = exp_periods(a, b).map_err(|e| e.to_string())?;
        for i in 0..2 {
            worst_inf = worst_inf.max(rel(full[i], b.exp() * base[i]));
        }
    }
    ensure(worst_inf < 1e-8, || format!("e^b factorization deviation {worst_inf:e}"))?;
    Ok(format!("weight 3n-4: {worst:.1e}; e^b: {worst_inf:.1e}"))
}

fn c8_monodromy() -> Check {
    let mut report = Vec::new();
    for n in [2u32, 3, 4] {
        let m = monodromy_matrix(fin(n), &circle_loop(c(1.0, 0.0), 0.5, PI, 400)).map_err(|e| e.to_string())?;
        let (int, dev) = round_integer(&m);
        ensure(dev < 1e-5, || format!("n={n}: distance to integers {dev:e}"))?;
        let (tr, det) = Mat2(int).char_poly();
        let mut matched = false;
        for i in [1, 2] {
            for dir in [Direction::Forward, Direction::Inverse] {
                let t = twist_kmatrix(fin(n), i, dir).map_err(|e| e.to_string())?.entries;
                let (ttr, tdet) = t.char_poly();
                matched |= (tr, det) == (ttr, tdet) || (tr, det) == (-ttr, tdet);
            }
        }
        ensure(matched, || format!("n={n}: {int:?} matches no twist"))?;
        report.push(format!("n={n}: {int:?}"));
    }
    Ok(report.join("; "))
}

fn c9_boundary() -> Check {
    let mut report = Vec::new();
    for n in [3u32, 4, 5] {
        let lv = fin(n);
        let line = (2.0 - n as f64) / 2.0;
        let z0 = f_map(lv, c(0.0, 1e-8)).map_err(|e| e.to_string())?.z;
        let zi = f_map(lv, c(0.0, 1e10)).map_err(|e| e.to_string())?.z;
        let (d0, di) = ((z0 - line).norm(), (zi - 2.0 / 3.0).norm());
        ensure(d0 < 2e-3 && di < 2e-3, || format!("n={n}: vertex limits off by {d0:e}, {di:e}"))?;
        let mut side: f64 = 0.0;
        for t in [-5.0, -1.7, -0.3] {
            let z = f_map(lv, c(t, 0.0)).map_err(|e| e.to_string())?.z;
            ensure(z.re > line && z.re < 2.0 / 3.0, || format!("n={n}: t={t} maps to {z}"))?;
            side = side.max(z.im.abs());
        }
        for t in [0.1, 0.4, 0.8] {
            let z = f_map(lv, c(t, 0.0)).map_err(|e| e.to_string())?.z;
            side = side.max((z.re - line).abs());
        }
        for t in [1.3, 2.5, 9.0] {
            let z = f_map(lv, c(t, 0.0)).map_err(|e| e.to_string())?.z;
            side = side.max((z.re - ell_abscissa(z.im.abs())).abs());
        }
        ensure(side < 1e-6, || format!("n={n}: boundary sides off by {side:e}"))?;
        let (s0, s1) = fitted_vertex_exponents(lv).map_err(|e| e.to_string())?;
        ensure((s0 - 0.5).abs() < 0.02 && (s1 - 1.0 / 3.0).abs() < 0.02, || {
            format!("n={n}: slopes {s0}, {s1}")
        })?;
        report.push(format!("n={n}: limits {d0:.1e}/{di:.1e}, sides {side:.1e}, slopes {s0:.3}/{s1:.3}"));
    }
    Ok(report.join("; "))
}

fn c10_schwarzian() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut worst_mob: f64 = 0.0;
    for _ in 0..10 {
        let a = C64::from_polar(rng.gen_range(0.8..3.0), rng.gen_range(-1.0..1.0));
        let g = |x: C64| Ok(x.powf(1.5).exp());
        let s = schwarzian_fd(g, a, c(0.02, 0.0)).map_err(|e| e.to_string())?;
        let want = -(9.0 * a * a * a + 5.0) / (8.0 * a * a);
        worst = worst.max(rel(s, want));
        let (p, q, r, t) = (c(2.0, 1.0), c(-1.0, 0.5), c(0.1, 0.05), c(2.0, 0.0));
        let m = |x: C64| {
            let w = x.powf(1.5).exp();
            Ok((p * w + q) / (r * w + t))
        };
        // Sampled at moderate |a|, with the pole of the Mobius map far from
        // the values of w, so that the differences keep their digits.
        let b = a / a.norm() * rng.gen_range(0.5..1.5);
        let sb = schwarzian_fd(g, b, c(0.02, 0.0)).map_err(|e| e.to_string())?;
        let sm = schwarzian_fd(m, b, c(0.02, 0.0)).map_err(|e| e.to_string())?;
        worst_mob = worst_mob.max((sm - sb).norm() / (1.0 + sb.norm()));
    }
    ensure(worst < 1e-5, || format!("closed form deviation {worst:e}"))?;
    ensure(worst_mob < 1e-6, || format!("Mobius deviation {worst_mob:e}"))?;
    Ok(format!("closed form {worst:.1e}; Mobius {worst_mob:.1e}"))
}

fn levels() -> Vec<Level> {
    vec![fin(2), fin(3), fin(4), fin(5), fin(8), Level::Infinite]
}

fn c11_fundamental_domain() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let err = |e: a2stab::Error| e.to_string();
    let mut checked = 0;
    while checked < 1000 {
        for n in levels() {
            let p = point_from_g(n, random_interior_g(n, &mut rng)).map_err(err)?;
            let phi = random_transporter(n, &mut rng, 6);
            if phi.as_shift().is_some() {
                continue;
            }
            let v = classify_fundamental(n, &act(&phi, &p).map_err(err)?).map_err(err)?;
            ensure(v == UClass::Outside, || format!("{n}: translate by {phi} classified {v:?}"))?;
            checked += 1;
        }
    }
    for n in levels() {
        for _ in 0..200 {
            let g = random_interior_g(n, &mut rng);
            let p = point_from_g(n, g).map_err(err)?;
            let v = classify_fundamental(n, &p).map_err(err)?;
            let back = g_coordinate(&p).map_err(err)?;
            ensure(v.is_interior() && region_classify(n, back).verdict == RegionVerdict::Interior, || {
                format!("{n}: g={g} gives {v:?}")
            })?;
        }
    }
    let mut agree = 0;
    for _ in 0..10_000 {
        let p2 = rng.gen_range(0.01..0.99);
        let p1 = rng.gen_range(p2..1.0);
        let z1 = C64::from_polar(rng.gen_range(0.05..3.0), PI * p1);
        let z2 = C64::from_polar(rng.gen_range(0.05..3.0), PI * p2);
        let ze = z1 + z2;
        let pe = ze.arg() / PI;
        let by_phase = p1 - p2 < pe + 1.0 - p1 && p1 - p2 < p2 + 1.0 - pe;
        let by_modulus = z2.norm() < ze.norm() && z1.norm() < ze.norm();
        if (ze.norm() - z1.norm()).abs().min((ze.norm() - z2.norm()).abs()) < 1e-9 {
            continue;
        }
        ensure(by_phase == by_modulus, || format!("phase and modulus forms disagree at {z1}, {z2}"))?;
        let sigma = make_stability(Heart::canonical(fin(4)), z1, z2).map_err(err)?;
        let v = classify_fundamental(fin(4), &sigma).map_err(err)?;
        ensure((v == UClass::CaseBInterior) == by_modulus, || format!("classifier disagrees at {z1}, {z2}"))?;
        agree += 1;
    }
    let mut reduced = 0;
    while reduced < 1000 {
        for n in levels() {
            let p = point_from_g(n, random_interior_g(n, &mut rng)).map_err(err)?;
            let phi = random_transporter(n, &mut rng, 10);
            let sigma = act(&phi, &p).map_err(err)?;
            let r = reduce_to_fundamental(n, &sigma).map_err(|e| format!("{n}: {e}"))?;
            ensure(same_point(&act(&r.phi, &r.sigma0).map_err(err)?, &sigma), || format!("{n}: round trip"))?;
            ensure(r.verdict != UClass::Outside, || format!("{n}: reduced point outside"))?;
            reduced += 1;
        }
    }
    Ok(format!("{checked} translates outside; {agree} phase/modulus samples; {reduced} reductions"))
}

fn c12_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let err = |e: a2stab::Error| e.to_string();
    let mut worst: f64 = 0.0;
    for n in [fin(2), fin(3), fin(4), fin(5), Level::Infinite] {
        for _ in 0..50 {
            let p = point_from_g(n, random_interior_g(n, &mut rng)).map_err(err)?;
            let cubic = cubic_from_stability(n, &p).map_err(|e| format!("{n}: {e}"))?;
            let z = charges_from_cubic(n, &cubic).map_err(err)?;
            let want = p.charge_functional();
            for i in 0..2 {
                worst = worst.max(rel(z[i], want[i]));
            }
        }
    }
    ensure(worst < 1e-6, || format!("round trip deviation {worst:e}"))?;
    let n = Level::Infinite;
    let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let (mut literal, mut corrected): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let p = point_from_g(n, random_interior_g(n, &mut rng)).map_err(err)?;
        let cubic = cubic_from_stability(n, &p).map_err(err)?;
        let moved = act(&Transporter::sigma(n), &p).map_err(err)?.charge_functional();
        for (acc, db) in [(&mut literal, PI / 3.0), (&mut corrected, -PI / 3.0)] {
            let image = CubicPoint::new(n, omega * cubic.a, cubic.b + c(0.0, db));
            let z = charges_from_cubic(n, &image).map_err(err)?;
            for i in 0..2 {
                *acc = acc.max(rel(z[i], moved[i]));
            }
        }
    }
    ensure(corrected < 1e-6, || format!("Sigma with b - pi i/3 deviates by {corrected:e}"))?;
    let summary = format!(
        "round trip {worst:.1e} (250 points); Sigma vs (e^(2pi i/3) a, b + pi i/3): {literal:.1e}; \
         vs (e^(2pi i/3) a, b - pi i/3): {corrected:.1e}"
    );
    ensure(literal < 1e-6, || summary.clone())?;
    Ok(summary)
}

struct Criterion {
    id: u32,
    name: &'static str,
    run: fn() -> Check,
    /// Known not to hold, with the reason.
    expected_failure: Option<&'static str>,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "braid relations on K0", run: c1_braid_relations, expected_failure: None },
        Criterion { id: 2, name: "canonical-form identities", run: c2_canonical_identities, expected_failure: None },
        Criterion { id: 3, name: "torsor and projective counts", run: c3_torsor, expected_failure: None },
        Criterion { id: 4, name: "closed-form periods", run: c4_closed_forms, expected_failure: None },
        Criterion { id: 5, name: "hypergeometric residuals", run: c5_hypergeometric, expected_failure: None },
        Criterion { id: 6, name: "Airy-type residuals", run: c6_airy, expected_failure: None },
        Criterion { id: 7, name: "scaling covariance", run: c7_scaling, expected_failure: None },
        Criterion { id: 8, name: "monodromy around z = 1", run: c8_monodromy, expected_failure: None },
        Criterion { id: 9, name: "conformal-map boundary behaviour", run: c9_boundary, expected_failure: None },
        Criterion { id: 10, name: "Schwarzian closed form", run: c10_schwarzian, expected_failure: None },
        Criterion { id: 11, name: "fundamental domain", run: c11_fundamental_domain, expected_failure: None },
        Criterion {
            id: 12,
            name: "stability/cubic coherence",
            run: c12_round_trip,
            expected_failure: Some(
                "(e^(2pi i/3) a, b + pi i/3) multiplies the periods by a non-real unit times a \
                 permutation, so it matches Sigma only up to the C-action; the map with b - pi i/3 \
                 is checked instead",
            ),
        },
    ];
    let mut unexpected = 0;
    for cr in &criteria {
        let start = Instant::now();
        let result = (cr.run)();
        let secs = start.elapsed().as_secs_f64();
        match (&result, cr.expected_failure) {
            (Ok(detail), None) => println!("criterion {:>2} PASS {} ({secs:.1}s): {detail}", cr.id, cr.name),
            (Err(detail), None) => {
                unexpected += 1;
                println!("criterion {:>2} FAIL {} ({secs:.1}s): {detail}", cr.id, cr.name);
            }
            (Err(detail), Some(why)) => {
                println!("criterion {:>2} FAIL {} ({secs:.1}s, known): {detail}; {why}", cr.id, cr.name)
            }
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!("criterion {:>2} PASS {} ({secs:.1}s, but expected to fail): {detail}", cr.id, cr.name);
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
