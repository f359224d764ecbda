//! Segment intersection and the hitting-triple parameterisation of sticks
//! that cross a ray from the origin.
//!
//! Everything is evaluated in the chart of one of the two objects, where it
//! lies on the horizontal axis. A point at local polar position `(d, ψ)` has
//! hyperboloid coordinates `(sinh d cos ψ, sinh d sin ψ, cosh d)`; the two
//! combinations `cosh d ∓ sinh d cos ψ` are rewritten without cancellation
//! so that crossings far out along long sticks keep full precision.

use std::f64::consts::PI;

use super::point::{dist, Frame, HPoint};
use super::stick::{axis_foot, axis_height, distance_to_segment, stick_mod_pi, Segment, Stick};
use super::EPS_GEO;

/// `(t + x, t - x, y)` of the hyperboloid lift of a local point.
#[inline]
fn light_parts(d: f64, dir: f64) -> (f64, f64, f64) {
    let e = (-d).exp();
    let sh = d.sinh();
    let s = (dir / 2.0).sin();
    let c = (dir / 2.0).cos();
    (e + 2.0 * sh * c * c, e + 2.0 * sh * s * s, sh * dir.sin())
}

/// Axis coordinate where the geodesic through two local points crosses the
/// horizontal axis. The points must lie on opposite closed sides of it.
fn axis_crossing(p: (f64, f64), q: (f64, f64)) -> f64 {
    let (pp, pm, py) = light_parts(p.0, p.1);
    let (qp, qm, qy) = light_parts(q.0, q.1);
    let num = qy * pp - py * qp;
    let den = qy * pm - py * qm;
    0.5 * (num / den).ln()
}

/// Smallest `|height|` above the horizontal axis over the geodesic segment
/// joining two local points, returned as `sinh` of that height.
fn min_abs_sinh_height(p: (f64, f64), q: (f64, f64), len: f64) -> f64 {
    let a = p.0.sinh() * p.1.sin();
    let fq = q.0.sinh() * q.1.sin();
    let mut best = a.abs().min(fq.abs());
    if len > 0.0 {
        // sinh(height) along the segment is a cosh t + b sinh t
        let b = (fq - a * len.cosh()) / len.sinh();
        if b.abs() < a.abs() {
            let t = (-b / a).atanh();
            if t > 0.0 && t < len {
                let m = a.signum() * (a * a - b * b).sqrt();
                best = best.min(m.abs());
            }
        }
    }
    best
}

/// Distance between two closed geodesic segments.
pub fn segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    if crossing_point(s1, s2, 0.0).is_some() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (seg, other) in [(s1, s2), (s2, s1)] {
        for p in [other.a, other.b] {
            best = best.min(distance_to_segment(seg, &p));
        }
    }
    // common perpendicular of ultraparallel lines with both feet inside
    let f = s1.frame();
    let len1 = s1.length();
    let p = f.local(&s2.a);
    let q = f.local(&s2.b);
    let len2 = s2.length();
    let a = p.0.sinh() * p.1.sin();
    let fq = q.0.sinh() * q.1.sin();
    if len2 > 0.0 {
        let b = (fq - a * len2.cosh()) / len2.sinh();
        if b.abs() < a.abs() {
            let t = (-b / a).atanh();
            if t > 0.0 && t < len2 {
                let m = s2.frame().global(t, 0.0);
                let (d, dir) = f.local(&m);
                let foot = axis_foot(d, dir);
                if (0.0..=len1).contains(&foot) {
                    best = best.min(axis_height(d, dir).abs());
                }
            }
        }
    }
    best
}

/// Transversal crossing of two segments, allowing `eps` slack at the ends.
fn crossing_point(s1: &Segment, s2: &Segment, eps: f64) -> Option<HPoint> {
    let f = s1.frame();
    let len1 = s1.length();
    let p = f.local(&s2.a);
    let q = f.local(&s2.b);
    let hp = axis_height(p.0, p.1);
    let hq = axis_height(q.0, q.1);
    if hp == 0.0 && hq == 0.0 {
        return None;
    }
    if hp * hq > 0.0 {
        return None;
    }
    let s = axis_crossing(p, q);
    if !s.is_finite() || s < -eps || s > len1 + eps {
        return None;
    }
    let s = s.clamp(0.0, len1);
    Some(f.global(s, 0.0))
}

/// Intersection point of two closed segments, if they meet.
///
/// Collinear overlaps report the midpoint of the overlap. Segments closer
/// than [`EPS_GEO`] count as meeting.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> Option<HPoint> {
    segments_intersect_eps(s1, s2, EPS_GEO)
}

pub fn segments_intersect_eps(s1: &Segment, s2: &Segment, eps: f64) -> Option<HPoint> {
    let f = s1.frame();
    let len1 = s1.length();
    let p = f.local(&s2.a);
    let q = f.local(&s2.b);
    let hp = axis_height(p.0, p.1);
    let hq = axis_height(q.0, q.1);

    if hp.abs() <= eps && hq.abs() <= eps {
        let xp = axis_foot(p.0, p.1);
        let xq = axis_foot(q.0, q.1);
        let lo = xp.min(xq).max(0.0);
        let hi = xp.max(xq).min(len1);
        if lo > hi + eps {
            return None;
        }
        let mid = 0.5 * (lo + hi);
        return Some(if mid >= 0.0 {
            f.global(mid, 0.0)
        } else {
            f.global(-mid, PI)
        });
    }

    if hp * hq <= 0.0 {
        let s = axis_crossing(p, q);
        if s.is_finite() && s >= -eps && s <= len1 + eps {
            return Some(f.global(s.clamp(0.0, len1), 0.0));
        }
    }

    // near-tangency: only possible if segment 2 comes within eps of line 1
    let m = min_abs_sinh_height(p, q, s2.length());
    if m.asinh() > eps {
        return None;
    }
    if segment_distance(s1, s2) <= eps {
        // nearest endpoint pairing
        let mut best = (f64::INFINITY, s2.a);
        for (c, other) in [(s2.a, s1), (s2.b, s1), (s1.a, s2), (s1.b, s2)] {
            let d = distance_to_segment(other, &c);
            if d < best.0 {
                best = (d, c);
            }
        }
        return Some(best.1);
    }
    None
}

/// Intersection of two sticks.
pub fn sticks_intersect(a: &Stick, b: &Stick) -> Option<HPoint> {
    segments_intersect(&a.endpoints(), &b.endpoints())
}

/// Whether two sticks meet, without computing the point.
pub fn sticks_meet(a: &Stick, b: &Stick) -> bool {
    sticks_meet_eps(a, b, EPS_GEO)
}

pub fn sticks_meet_eps(a: &Stick, b: &Stick, eps: f64) -> bool {
    if dist(&a.center(), &b.center()) > 0.5 * (a.length() + b.length()) + eps {
        return false;
    }
    let f = a.frame();
    let half = a.length() / 2.0;
    let eb = b.endpoints();
    let p = f.local(&eb.a);
    let q = f.local(&eb.b);
    let hp = axis_height(p.0, p.1);
    let hq = axis_height(q.0, q.1);
    if hp * hq <= 0.0 && !(hp.abs() <= eps && hq.abs() <= eps) {
        let s = axis_crossing(p, q);
        return s.is_finite() && s.abs() <= half + eps;
    }
    segments_intersect_eps(&a.endpoints(), &eb, eps).is_some()
}

/// A stick crossing the ray from `o` at a reference angle, described by the
/// distance `rho_prime` from `o` to the crossing point, the counterclockwise
/// angle `varphi ∈ [0, π)` between the ray and the stick, and the signed
/// offset `r ∈ [-L/2, L/2]` from the crossing point to the stick's centre
/// (positive when the centre lies in direction `varphi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitTriple {
    pub rho_prime: f64,
    pub varphi: f64,
    pub r: f64,
}

/// Chart at the point of the ray at distance `rho_prime`, oriented along it.
fn ray_frame(rho_prime: f64, ray_angle: f64) -> Frame {
    if rho_prime > 0.0 {
        Frame::new(HPoint::new(rho_prime, ray_angle), 0.0)
    } else {
        Frame::new(HPoint::ORIGIN, ray_angle)
    }
}

/// Where `stick` crosses the ray from `o` at `ray_angle`, as a hitting triple.
///
/// A stick lying along the ray reports the nearest common point, `varphi = 0`.
pub fn hit_triple(stick: &Stick, ray_angle: f64) -> Option<HitTriple> {
    let eps = EPS_GEO;
    let f = Frame::new(HPoint::ORIGIN, ray_angle);
    let ends = stick.endpoints();
    let p = f.local(&ends.a);
    let q = f.local(&ends.b);
    let hp = axis_height(p.0, p.1);
    let hq = axis_height(q.0, q.1);
    let half = stick.length() / 2.0;

    if hp.abs() <= eps && hq.abs() <= eps {
        let xp = axis_foot(p.0, p.1);
        let xq = axis_foot(q.0, q.1);
        let (lo, hi) = (xp.min(xq), xp.max(xq));
        if hi < -eps {
            return None;
        }
        let rho_prime = lo.max(0.0);
        let center = 0.5 * (lo + hi);
        return Some(HitTriple {
            rho_prime,
            varphi: 0.0,
            r: (center - rho_prime).clamp(-half, half),
        });
    }

    let s = if hp * hq <= 0.0 {
        axis_crossing(p, q)
    } else if hp.abs() <= eps {
        axis_foot(p.0, p.1)
    } else if hq.abs() <= eps {
        axis_foot(q.0, q.1)
    } else {
        return None;
    };
    if !s.is_finite() || s < -eps {
        return None;
    }
    let rho_prime = s.max(0.0);
    let at = ray_frame(rho_prime, ray_angle);
    // direction of the end lying on the upper side of the ray
    let (up, h_up) = if hp >= hq { (ends.a, hp) } else { (ends.b, hq) };
    let other = if hp >= hq { ends.b } else { ends.a };
    let (du, dir_up) = at.local(&up);
    let dir = if du > eps && h_up > 0.0 {
        dir_up
    } else {
        let (_, d_other) = at.local(&other);
        d_other + PI
    };
    let varphi = super::stick::line_direction_mod_pi(dir);
    let c = stick.center();
    let (dc, _) = at.local(&c);
    let (_, hc_dir) = f.local(&c);
    let hc = axis_height(f.local(&c).0, hc_dir);
    let r = if hc > 0.0 {
        dc
    } else if hc < 0.0 {
        -dc
    } else {
        0.0
    };
    Some(HitTriple {
        rho_prime,
        varphi,
        r: r.clamp(-half, half),
    })
}

/// Inverse of [`hit_triple`]: the stick of length `length` crossing the ray at
/// `ray_angle` with the given triple.
pub fn stick_from_triple(t: &HitTriple, length: f64, ray_angle: f64) -> Stick {
    let at = ray_frame(t.rho_prime, ray_angle);
    let center = if t.r >= 0.0 {
        at.global(t.r, t.varphi)
    } else {
        at.global(-t.r, t.varphi + PI)
    };
    if t.r == 0.0 {
        // the stick direction at its centre is varphi relative to the ray;
        // convert to the angle against the radial geodesic at the centre
        let base = if t.rho_prime > 0.0 { 0.0 } else { ray_angle };
        return stick_mod_pi(center, t.varphi + base, length);
    }
    let (_, dir_to_cross) = Frame::new(center, 0.0).local(&at.origin);
    stick_mod_pi(center, dir_to_cross, length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_stick;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sticks_through_origin_meet_at_origin() {
        let a = make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap();
        let b = make_stick(HPoint::ORIGIN, PI / 2.0, 2.0).unwrap();
        let x = sticks_intersect(&a, &b).unwrap();
        assert!(x.rho() < 1e-12);
        assert!(sticks_meet(&a, &b));
    }

    #[test]
    fn distant_sticks_do_not_meet() {
        let a = make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap();
        let b = make_stick(HPoint::new(10.0, PI / 2.0), 0.0, 2.0).unwrap();
        assert!(sticks_intersect(&a, &b).is_none());
        assert!(!sticks_meet(&a, &b));
    }

    #[test]
    fn collinear_overlap_reports_midpoint() {
        let a = Segment::new(HPoint::new(1.0, PI), HPoint::new(2.0, 0.0)).unwrap();
        let b = Segment::new(HPoint::new(1.0, 0.0), HPoint::new(3.0, 0.0)).unwrap();
        let x = segments_intersect(&a, &b).unwrap();
        assert_abs_diff_eq!(x.rho(), 1.5, epsilon = 1e-9);
        let y = segments_intersect(&b, &a).unwrap();
        assert_abs_diff_eq!(y.rho(), 1.5, epsilon = 1e-9);
        let c = Segment::new(HPoint::new(2.5, 0.0), HPoint::new(3.0, 0.0)).unwrap();
        assert!(segments_intersect(&a, &c).is_none());
    }

    #[test]
    fn touching_endpoint_counts() {
        // T-junction: b ends exactly on a
        let a = make_stick(HPoint::ORIGIN, 0.0, 4.0).unwrap();
        let b = Segment::new(HPoint::new(1.0, 0.0), HPoint::new(2.0, 1.0)).unwrap();
        assert!(segments_intersect(&a.endpoints(), &b).is_some());
        assert!(segments_intersect(&b, &a.endpoints()).is_some());
    }

    #[test]
    fn ultraparallel_gap() {
        let a = make_stick(HPoint::ORIGIN, 0.0, 4.0).unwrap();
        let b = make_stick(HPoint::new(0.5, PI / 2.0), PI / 2.0, 4.0).unwrap();
        // b is perpendicular to the radial geodesic at distance 0.5: parallel-ish to a
        let d = segment_distance(&a.endpoints(), &b.endpoints());
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn perpendicular_hit() {
        let s = make_stick(HPoint::new(3.0, 0.0), PI / 2.0, 2.0).unwrap();
        let t = hit_triple(&s, 0.0).unwrap();
        assert_abs_diff_eq!(t.rho_prime, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.varphi, PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.r, 0.0, epsilon = 1e-12);
        let back = stick_from_triple(&t, 2.0, 0.0);
        assert_abs_diff_eq!(back.center().rho(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(back.phi(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_hit_at_origin() {
        let s = make_stick(HPoint::ORIGIN, 0.0, 2.0).unwrap();
        let t = hit_triple(&s, 0.0).unwrap();
        assert!((0.0..=1.0).contains(&t.rho_prime));
        assert_eq!(t.varphi, 0.0);
    }

    #[test]
    fn missing_the_ray() {
        let s = make_stick(HPoint::new(3.0, PI), PI / 2.0, 2.0).unwrap();
        assert!(hit_triple(&s, 0.0).is_none());
        assert!(hit_triple(&s, PI).is_some());
    }

    #[test]
    fn endpoint_on_ray_for_extremal_offset() {
        let t = HitTriple {
            rho_prime: 2.0,
            varphi: 1.0,
            r: 1.5,
        };
        let s = stick_from_triple(&t, 3.0, 0.3);
        let e = s.endpoints();
        let on_ray = HPoint::new(2.0, 0.3);
        let d = dist(&e.a, &on_ray).min(dist(&e.b, &on_ray));
        assert!(d < 1e-9, "{d}");
    }
}
