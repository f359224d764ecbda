#![allow(dead_code)]

use std::f64::consts::PI;

use hypersticks::geometry::{
    ball_volume, chord_distance, circle_cover_points, dist, make_stick, segments_intersect,
    side_from_sas, translate_to, triangle_from_sides, DiscPoint, HPoint, Segment, EPS_GEO,
};

pub type Check = Result<(), String>;

fn fail<T: std::fmt::Debug>(what: &str, detail: T) -> Check {
    Err(format!("{what}: {detail:?}"))
}

pub fn isometry(x: HPoint, p: HPoint, q: HPoint) -> Check {
    let before = dist(&p, &q);
    let after = dist(&translate_to(&x, &p), &translate_to(&x, &q));
    if (before - after).abs() < 1e-10 {
        Ok(())
    } else {
        fail("isometry", (x, p, q, before, after))
    }
}

pub fn metric(p: HPoint, q: HPoint, r: HPoint) -> Check {
    let (pq, qp, qr, pr) = (dist(&p, &q), dist(&q, &p), dist(&q, &r), dist(&p, &r));
    if dist(&p, &p) != 0.0 {
        return fail("dist(p, p)", p);
    }
    if (pq - qp).abs() > 1e-12 * pq.max(1.0) {
        return fail("symmetry", (pq, qp));
    }
    if pr > pq + qr + 1e-12 {
        return fail("triangle inequality", (pr, pq, qr));
    }
    Ok(())
}

pub fn chord(rho: f64, phi: f64) -> Check {
    let a = chord_distance(rho, phi);
    let b = dist(&HPoint::new(rho, 0.0), &HPoint::new(rho, phi));
    if (a - b).abs() <= 1e-10 * b.max(1.0) {
        Ok(())
    } else {
        fail("chord distance", (rho, phi, a, b))
    }
}

pub fn circle_cover(rho: f64) -> Check {
    let pts = circle_cover_points(rho);
    let n = pts.len();
    let expect = (PI * rho.sinh()).ceil() as usize;
    if n != expect {
        return fail("cover size", (rho, n, expect));
    }
    if chord_distance(rho, PI / n as f64) >= 1.0 {
        return fail("gap midpoint", rho);
    }
    for k in 0..n {
        let a = &pts[k];
        let b = &pts[(k + 1) % n];
        let gap = (b.theta() - a.theta()).rem_euclid(2.0 * PI);
        let mid = HPoint::new(rho, a.theta() + gap / 2.0);
        if (a.rho() - rho).abs() > 1e-12 {
            return fail("point off the circle", (k, a));
        }
        if dist(&mid, a) >= 1.0 || dist(&mid, b) >= 1.0 {
            return fail("covering radius", (rho, k));
        }
        if rho >= 3.0 && dist(a, &pts[(k + 2) % n]) <= 2.5 {
            return fail("skip-one spacing", (rho, k, dist(a, &pts[(k + 2) % n])));
        }
    }
    Ok(())
}

pub fn triangle(a: f64, b: f64, c: f64) -> Check {
    let t = match triangle_from_sides(a, b, c) {
        Ok(t) => t,
        Err(e) => return fail("triangle rejected", (a, b, c, e)),
    };
    if t.sine_rule_residual() >= 1e-9 {
        return fail("sine rule", (a, b, c, t.sine_rule_residual()));
    }
    if t.angle_sum() >= PI {
        return fail("angle sum", (a, b, c, t.angle_sum()));
    }
    let c2 = side_from_sas(a, b, t.gamma);
    if (c2 - c).abs() > 1e-8 * c.max(1.0) {
        return fail("side from SAS", (a, b, c, c2));
    }
    Ok(())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn ball_volume_quadrature(rho: f64) -> Check {
    let q = simpson(|r| 2.0 * PI * r.sinh(), 0.0, rho, 20_000);
    let v = ball_volume(rho);
    if ((v - q) / q).abs() < 1e-9 {
        Ok(())
    } else {
        fail("ball volume", (rho, v, q))
    }
}

pub fn disc_round_trip(p: HPoint) -> Check {
    let d = p.to_disc();
    let back = match HPoint::from_disc(DiscPoint::new(d.u, d.v).map_err(|e| e.to_string())?) {
        Ok(b) => b,
        Err(e) => return fail("from_disc", e),
    };
    if dist(&p, &back) < 1e-12 {
        Ok(())
    } else {
        fail("disc round trip", (p, back))
    }
}

pub fn stick_endpoints(x: HPoint, phi: f64, length: f64) -> Check {
    let s = make_stick(x, phi, length).map_err(|e| e.to_string())?;
    let e = s.endpoints();
    let (da, db, ab) = (dist(&x, &e.a), dist(&x, &e.b), dist(&e.a, &e.b));
    let tol = 1e-9 * length.max(1.0);
    if (da - length / 2.0).abs() > tol || (db - length / 2.0).abs() > tol || (ab - length).abs() > tol {
        return fail("stick endpoints", (x, phi, length, da, db, ab));
    }
    Ok(())
}

/// Hyperboloid lift of a point given in polar coordinates.
fn lift(p: &HPoint) -> [f64; 3] {
    let (r, t) = (p.rho(), p.theta());
    [r.cosh(), r.sinh() * t.cos(), r.sinh() * t.sin()]
}

/// The point at fraction `t` of the geodesic segment, in the Poincaré disc.
fn along(a: &[f64; 3], b: &[f64; 3], d: f64, t: f64) -> (f64, f64) {
    let (wa, wb) = (((1.0 - t) * d).sinh() / d.sinh(), (t * d).sinh() / d.sinh());
    let x = [0, 1, 2].map(|i| wa * a[i] + wb * b[i]);
    (x[1] / (1.0 + x[0]), x[2] / (1.0 + x[0]))
}

fn disc_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let e = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
    let s = ((1.0 - p.0 * p.0 - p.1 * p.1) * (1.0 - q.0 * q.0 - q.1 * q.1)).sqrt();
    2.0 * (e / s).asinh()
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f(lo).min(f(hi)).min(f1).min(f2)
}

/// Minimum distance between two segments, found by sampling the first at
/// 2000 points and refining; distance along a geodesic to a convex set is
/// convex, so golden-section search is exact up to rounding.
pub fn oracle_min_distance(s1: &Segment, s2: &Segment) -> f64 {
    let (a1, b1, d1) = (lift(&s1.a), lift(&s1.b), dist(&s1.a, &s1.b));
    let (a2, b2, d2) = (lift(&s2.a), lift(&s2.b), dist(&s2.a, &s2.b));
    let to_seg2 = |t: f64| {
        let p = along(&a1, &b1, d1, t);
        golden(|s| disc_distance(p, along(&a2, &b2, d2, s)), 0.0, 1.0)
    };
    const N: usize = 2000;
    let samples: Vec<f64> = (0..N).map(|i| to_seg2(i as f64 / (N - 1) as f64)).collect();
    let best = (0..N).fold(0, |b, i| if samples[i] < samples[b] { i } else { b });
    let lo = best.saturating_sub(1) as f64 / (N - 1) as f64;
    let hi = (best + 1).min(N - 1) as f64 / (N - 1) as f64;
    golden(to_seg2, lo, hi).min(samples[best])
}

/// Whether `segments_intersect` agrees with the oracle; pairs whose oracle
/// distance lies in the margin band are skipped and reported as `None`.
pub fn intersection_agrees(s1: &Segment, s2: &Segment) -> Option<Check> {
    let m = oracle_min_distance(s1, s2);
    if m > EPS_GEO / 10.0 && m < 10.0 * EPS_GEO {
        return None;
    }
    let oracle = m <= EPS_GEO / 10.0;
    let got = segments_intersect(s1, s2).is_some();
    Some(if oracle == got {
        Ok(())
    } else {
        fail("segment intersection", (s1, s2, m, got))
    })
}

pub fn triple_round_trip(rho_prime: f64, varphi: f64, r: f64, length: f64, ray: f64) -> Check {
    use hypersticks::geometry::{hit_triple, stick_from_triple, HitTriple};
    let t = HitTriple { rho_prime, varphi, r };
    let s = stick_from_triple(&t, length, ray);
    let Some(back) = hit_triple(&s, ray) else {
        return fail("stick misses its ray", (t, ray));
    };
    let dphi = (back.varphi - varphi).abs().min(PI - (back.varphi - varphi).abs());
    if (back.rho_prime - rho_prime).abs() > 1e-8 || dphi > 1e-8 || (back.r - r).abs() > 1e-8 {
        return fail("triple round trip", (t, back, ray));
    }
    Ok(())
}
