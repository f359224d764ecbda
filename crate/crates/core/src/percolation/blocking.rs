//! Blocking sticks across the positive horizontal axis.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::ClusterLabeling;
use crate::geometry::{
    dist, hit_triple, sticks_meet, Angle, Frame, HPoint, HalfPlane, HitTriple, Side, Stick,
};
use crate::process::StickSample;

/// Whether the triple lies in the class `[k, k+1] × [π/4, 3π/4] × [−L/4, L/4]`.
pub fn in_blocking_class(t: &HitTriple, k: f64, length: f64) -> bool {
    (k..=k + 1.0).contains(&t.rho_prime)
        && (FRAC_PI_4..=3.0 * FRAC_PI_4).contains(&t.varphi)
        && t.r.abs() <= length / 4.0
}

/// The points `x⁺`, `x⁻` at distance `L/8` from the upper and lower ends of
/// a stick crossing the positive axis, and the half-planes beyond the
/// perpendiculars there, on the side away from `o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockingSides {
    pub x_plus: HPoint,
    pub x_minus: HPoint,
    pub h_plus: HalfPlane,
    pub h_minus: HalfPlane,
}

pub fn blocking_sides(stick: &Stick) -> BlockingSides {
    let f = stick.frame();
    let half = stick.length() / 2.0;
    let a = stick.endpoints().a;
    let a_upper = a.theta() < PI;
    // heading towards the upper endpoint
    let up = if a_upper { 0.0 } else { PI };
    let side = |dir: f64| {
        let x = f.global(half - stick.length() / 8.0, dir);
        let (_, back) = Frame::new(x, 0.0).local(&stick.center());
        let fx = Frame::new(x, back + PI);
        let mut h = HalfPlane::facing(&fx, 0.0);
        if h.contains_point(&HPoint::ORIGIN) {
            h = h.complement();
        }
        (x, h)
    };
    let (x_plus, h_plus) = side(up);
    let (x_minus, h_minus) = side(up + PI);
    BlockingSides {
        x_plus,
        x_minus,
        h_plus,
        h_minus,
    }
}

fn inside(h: &HalfPlane, s: &Stick) -> bool {
    let e = s.endpoints();
    h.contains_point(&e.a) && h.contains_point(&e.b)
}

/// Largest distance from `from` reached by the component of `l ∪ {sticks ⊂ H}`
/// containing `l`. Only sticks sharing `l`'s global cluster can belong to it.
fn restricted_reach(
    sample: &StickSample,
    labeling: &ClusterLabeling,
    l: usize,
    h: &HalfPlane,
    from: &HPoint,
) -> f64 {
    let label = labeling.labels[l];
    let pool: Vec<usize> = (0..sample.sticks.len())
        .filter(|&i| i != l && labeling.labels[i] == label && inside(h, &sample.sticks[i]))
        .collect();
    let mut reached = vec![false; pool.len()];
    let mut frontier = vec![l];
    let far = |s: &Stick| dist(from, &s.endpoints().a).max(dist(from, &s.endpoints().b));
    let mut best = far(&sample.sticks[l]);
    while let Some(cur) = frontier.pop() {
        for (p, &i) in pool.iter().enumerate() {
            if !reached[p] && sticks_meet(&sample.sticks[cur], &sample.sticks[i]) {
                reached[p] = true;
                best = best.max(far(&sample.sticks[i]));
                frontier.push(i);
            }
        }
    }
    best
}

/// Finite-depth proxy for the blocking event at offset `k`: some stick of
/// the class has, within both of its far half-planes, a connected
/// continuation reaching distance `depth_radius` from its centre. The
/// stick itself counts, so `depth_radius` should exceed `L/2`.
pub fn blocking_indicator(
    sample: &StickSample,
    labeling: &ClusterLabeling,
    k: f64,
    length: f64,
    depth_radius: f64,
) -> bool {
    for (i, s) in sample.sticks.iter().enumerate() {
        let Some(t) = hit_triple(s, 0.0) else {
            continue;
        };
        if !in_blocking_class(&t, k, length) {
            continue;
        }
        let sides = blocking_sides(s);
        let c = s.center();
        if restricted_reach(sample, labeling, i, &sides.h_plus, &c) >= depth_radius
            && restricted_reach(sample, labeling, i, &sides.h_minus, &c) >= depth_radius
        {
            return true;
        }
    }
    false
}

/// Angles of the disjointness argument for the pair `(l_k, l_{k+4})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkAngles {
    /// Angle at the crossing point of `l_k` between `x_k⁺` and the near ideal
    /// end of the perpendicular, `asin(1/cosh d)`.
    pub alpha_k: f64,
    /// Largest angle at the crossing point of `l_k`, from the axis, under
    /// which the perpendicular at `x⁺_{k+4}` is seen.
    pub beta_k: f64,
    pub upper_contained: bool,
    pub lower_contained: bool,
    pub upper_disjoint: bool,
    pub lower_disjoint: bool,
}

impl HkAngles {
    pub fn verdict(&self) -> bool {
        self.upper_contained && self.lower_contained && self.upper_disjoint && self.lower_disjoint
    }
}

pub fn hk_angles(l_k: &Stick, l_k4: &Stick) -> Option<HkAngles> {
    let t = hit_triple(l_k, 0.0)?;
    hit_triple(l_k4, 0.0)?;
    let a = blocking_sides(l_k);
    let b = blocking_sides(l_k4);
    let upper = HalfPlane::new(Angle::ZERO, Angle::new(PI), Side::Right).ok()?;
    let lower = upper.complement();
    let p = HPoint::new(t.rho_prime, 0.0);
    let alpha_k = (1.0 / dist(&p, &a.x_plus).cosh()).asin();
    let at_p = Frame::new(p, 0.0);
    let (e1, e2) = b.h_plus.boundary();
    let beta_k = at_p.ideal_direction(e1).max(at_p.ideal_direction(e2));
    Some(HkAngles {
        alpha_k,
        beta_k,
        upper_contained: upper.contains(&a.h_plus) && upper.contains(&b.h_plus),
        lower_contained: lower.contains(&a.h_minus) && lower.contains(&b.h_minus),
        upper_disjoint: a.h_plus.disjoint(&b.h_plus),
        lower_disjoint: a.h_minus.disjoint(&b.h_minus),
    })
}

/// Containment of the far half-planes of both sticks in the upper (lower)
/// half-plane and their pairwise disjointness.
pub fn hk_disjointness_check(l_k: &Stick, l_k4: &Stick) -> bool {
    hk_angles(l_k, l_k4).is_some_and(|a| a.verdict())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_stick, stick_from_triple};
    use crate::percolation::build_clusters;
    use crate::process::{ProcessConfig, SampleRegion};
    use std::f64::consts::FRAC_PI_2;

    fn perpendicular(rho: f64, l: f64) -> Stick {
        make_stick(HPoint::new(rho, 0.0), FRAC_PI_2, l).unwrap()
    }

    #[test]
    fn perpendicular_pair_is_disjoint() {
        let l = 40.0;
        for k in 2..8 {
            let a = perpendicular(k as f64 + 0.5, l);
            let b = perpendicular(k as f64 + 4.5, l);
            let ang = hk_angles(&a, &b).unwrap();
            assert!(ang.verdict(), "{ang:?}");
            assert!(ang.beta_k <= PI / 9.0);
            assert!(ang.alpha_k <= 2.0 * (-l / 8.0).exp());
        }
    }

    #[test]
    fn paper_angle_constant() {
        let bound = (2.0 / ((PI / 5.0).sin() * 3f64.cosh())).asin();
        assert!(bound <= PI / 9.0);
    }

    #[test]
    fn empty_sample_blocks_nothing() {
        let c = ProcessConfig::new(1.0, 10.0, 10.0, 0).unwrap();
        let s = StickSample::new(c, SampleRegion::Window, vec![]);
        let lab = build_clusters(&s);
        assert!(!blocking_indicator(&s, &lab, 3.0, 10.0, 12.0));
    }

    #[test]
    fn hand_built_cross_blocks() {
        let l = 10.0;
        let k = 3.0;
        let base = stick_from_triple(
            &HitTriple {
                rho_prime: k + 0.5,
                varphi: FRAC_PI_2,
                r: 0.0,
            },
            l,
            0.0,
        );
        let f = base.frame();
        // collinear continuations beyond both far points
        let up_dir = if base.endpoints().a.theta() < PI { 0.0 } else { PI };
        let ext = |dir: f64| {
            let c = f.global(l / 2.0 - l / 16.0 + l / 2.0, dir);
            let tip = f.global(l / 2.0, dir);
            let (_, d) = Frame::new(c, 0.0).local(&tip);
            make_stick(c, d.rem_euclid(PI) % PI, l).unwrap()
        };
        let sticks = vec![base, ext(up_dir), ext(up_dir + PI)];
        let c = ProcessConfig::new(1.0, l, 30.0, 0).unwrap();
        let s = StickSample::new(c, SampleRegion::Window, sticks);
        let lab = build_clusters(&s);
        assert_eq!(lab.cluster_count, 1);
        assert!(blocking_indicator(&s, &lab, k, l, l));
        assert!(!blocking_indicator(&s, &lab, k, l, 3.0 * l));
        let only = StickSample::new(c, SampleRegion::Window, vec![base]);
        assert!(!blocking_indicator(&only, &build_clusters(&only), k, l, l));
    }
}
