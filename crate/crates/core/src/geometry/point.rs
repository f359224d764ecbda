use std::f64::consts::{PI, TAU};

use super::angle::Angle;
use super::GeometryError;

/// A point of the hyperbolic plane in polar form: `rho` is the distance from
/// the origin `o` and `theta` the counterclockwise angle from the positive
/// horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    rho: f64,
    theta: Angle,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint {
        rho: 0.0,
        theta: Angle::ZERO,
    };

    /// Builds a point, wrapping `theta` into `[0, 2π)`.
    ///
    /// Panics if `rho` is negative or not finite; see [`HPoint::try_new`].
    pub fn new(rho: f64, theta: f64) -> HPoint {
        HPoint::try_new(rho, theta).expect("invalid polar coordinates")
    }

    pub fn try_new(rho: f64, theta: f64) -> Result<HPoint, GeometryError> {
        if !rho.is_finite() || rho < 0.0 || !theta.is_finite() {
            return Err(GeometryError::InvalidPoint { rho, theta });
        }
        Ok(HPoint::from_angle(rho, Angle::new(theta)))
    }

    pub(crate) fn from_angle(rho: f64, theta: Angle) -> HPoint {
        if rho == 0.0 {
            HPoint::ORIGIN
        } else {
            HPoint { rho, theta }
        }
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta.radians()
    }

    #[inline]
    pub fn angle(&self) -> Angle {
        self.theta
    }

    #[inline]
    pub fn is_origin(&self) -> bool {
        self.rho == 0.0
    }

    /// Rotation about the origin.
    pub fn rotated(&self, delta: f64) -> HPoint {
        HPoint::from_angle(self.rho, self.theta.add(delta))
    }

    pub fn to_disc(&self) -> DiscPoint {
        let r = (self.rho / 2.0).tanh();
        let t = self.theta.radians();
        DiscPoint {
            u: r * t.cos(),
            v: r * t.sin(),
        }
    }

    pub fn from_disc(d: DiscPoint) -> Result<HPoint, GeometryError> {
        let n = d.u.hypot(d.v);
        if !n.is_finite() || n >= 1.0 {
            return Err(GeometryError::OutsideDisc { u: d.u, v: d.v });
        }
        if n == 0.0 {
            return Ok(HPoint::ORIGIN);
        }
        Ok(HPoint::from_angle(2.0 * n.atanh(), Angle::new(d.v.atan2(d.u))))
    }
}

/// Poincaré disc coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    pub u: f64,
    pub v: f64,
}

impl DiscPoint {
    pub fn new(u: f64, v: f64) -> Result<DiscPoint, GeometryError> {
        if u.hypot(v) >= 1.0 || !u.is_finite() || !v.is_finite() {
            return Err(GeometryError::OutsideDisc { u, v });
        }
        Ok(DiscPoint { u, v })
    }

    pub fn norm(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// Hyperbolic distance between two points.
///
/// Evaluated through the half-distance form of the cosine law,
/// `sinh²(d/2) = sinh²((ρ₁-ρ₂)/2) + sinh ρ₁ sinh ρ₂ sin²(Δθ/2)`, which has no
/// cancellation for nearby points far from the origin.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    let dtheta = q.theta.diff(p.theta);
    let a = ((p.rho - q.rho) / 2.0).sinh();
    let s = (dtheta / 2.0).sin();
    let h = a * a + p.rho.sinh() * q.rho.sinh() * s * s;
    2.0 * h.sqrt().asinh()
}

/// Distance in the disc model, straight from the metric's closed form.
pub fn disc_dist(a: &DiscPoint, b: &DiscPoint) -> f64 {
    let du = a.u - b.u;
    let dv = a.v - b.v;
    let e2 = du * du + dv * dv;
    let na = 1.0 - (a.u * a.u + a.v * a.v);
    let nb = 1.0 - (b.u * b.u + b.v * b.v);
    (1.0 + 2.0 * e2 / (na * nb)).acosh()
}

/// Area of a hyperbolic disc of radius `rho`: `4π sinh²(ρ/2)`.
pub fn ball_volume(rho: f64) -> f64 {
    let s = (rho / 2.0).sinh();
    4.0 * PI * s * s
}

/// Distance between two points on the circle of radius `rho` separated by the
/// central angle `varphi`.
pub fn chord_distance(rho: f64, varphi: f64) -> f64 {
    2.0 * (rho.sinh() * (varphi / 2.0).sin()).asinh()
}

/// `⌈π sinh ρ⌉` equally spaced points on the circle of radius `rho`, the first
/// at angle 0. Radius-1 balls around them cover the circle.
pub fn circle_cover_points(rho: f64) -> Vec<HPoint> {
    let n = (PI * rho.sinh()).ceil().max(1.0) as usize;
    (0..n)
        .map(|k| HPoint::new(rho, TAU * k as f64 / n as f64))
        .collect()
}

/// Angle at vertex `V1` of a triangle `V0 V1 V2` given the angle `gamma` at
/// `V0` and the two sides `a = |V0 V1|`, `b = |V0 V2|` adjacent to it.
#[inline]
pub(crate) fn vertex_angle(a: f64, b: f64, gamma: f64) -> f64 {
    let s = (gamma / 2.0).sin();
    let y = gamma.sin() * b.sinh();
    let x = (a - b).sinh() + 2.0 * a.cosh() * b.sinh() * s * s;
    y.atan2(x)
}

/// Same as [`vertex_angle`] with `b → ∞`: the angle at `V1` between the side
/// towards `V0` and the ray towards the ideal vertex.
#[inline]
pub(crate) fn vertex_angle_ideal(a: f64, gamma: f64) -> f64 {
    let s = (gamma / 2.0).sin();
    gamma.sin().atan2(-(-a).exp() + 2.0 * a.cosh() * s * s)
}

#[inline]
pub(crate) fn wrap_pi(x: f64) -> f64 {
    // (-π, π]
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y <= -PI {
        y += TAU;
    }
    y
}

/// A local polar chart: the image of the standard chart at `o` under the
/// orientation-preserving isometry taking `o` to `origin` along the geodesic
/// through `o` and `origin`, followed by a rotation by `heading`.
///
/// Local directions are measured counterclockwise from the outward radial
/// direction at `origin` (from the positive horizontal axis when `origin`
/// is `o`), offset by `heading`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: HPoint,
    pub heading: f64,
}

impl Frame {
    pub const CANONICAL: Frame = Frame {
        origin: HPoint::ORIGIN,
        heading: 0.0,
    };

    pub fn new(origin: HPoint, heading: f64) -> Frame {
        Frame { origin, heading }
    }

    /// Local polar coordinates `(distance, direction)` of `p`.
    pub fn local(&self, p: &HPoint) -> (f64, f64) {
        let d = dist(&self.origin, p);
        if d == 0.0 {
            return (0.0, 0.0);
        }
        let dir = if self.origin.is_origin() {
            p.theta()
        } else {
            let dtheta = p.theta.diff(self.origin.theta);
            let beta = vertex_angle(self.origin.rho, p.rho, dtheta.abs());
            if dtheta < 0.0 {
                -(PI - beta)
            } else {
                PI - beta
            }
        };
        (d, wrap_pi(dir - self.heading))
    }

    /// The point at distance `d` from the frame origin in local direction `dir`.
    pub fn global(&self, d: f64, dir: f64) -> HPoint {
        if d == 0.0 {
            return self.origin;
        }
        let psi = wrap_pi(dir + self.heading);
        if self.origin.is_origin() {
            return HPoint::from_angle(d, Angle::new(psi));
        }
        let rc = self.origin.rho;
        let beta = PI - psi.abs();
        let a = ((rc - d) / 2.0).sinh();
        let s = (beta / 2.0).sin();
        let h = a * a + rc.sinh() * d.sinh() * s * s;
        let rho = 2.0 * h.sqrt().asinh();
        let delta = vertex_angle(rc, d, beta);
        let theta = if psi < 0.0 {
            self.origin.theta.add(-delta)
        } else {
            self.origin.theta.add(delta)
        };
        HPoint::from_angle(rho, theta)
    }

    /// Canonical-chart point `p` carried into this frame.
    pub fn to_world(&self, p: &HPoint) -> HPoint {
        self.global(p.rho(), p.theta())
    }

    /// Inverse of [`Frame::to_world`].
    pub fn to_canonical(&self, q: &HPoint) -> HPoint {
        let (d, dir) = self.local(q);
        HPoint::from_angle(d, Angle::new(dir))
    }

    /// Angle at which the ideal point reached from the origin in local
    /// direction `dir` is seen from `o`.
    pub fn ideal_endpoint(&self, dir: f64) -> Angle {
        let psi = wrap_pi(dir + self.heading);
        if self.origin.is_origin() {
            return Angle::new(psi);
        }
        let beta = PI - psi.abs();
        let delta = vertex_angle_ideal(self.origin.rho, beta);
        if psi < 0.0 {
            self.origin.theta.add(-delta)
        } else {
            self.origin.theta.add(delta)
        }
    }

    /// Local direction from the frame origin towards the ideal point seen from
    /// `o` at angle `ideal`.
    pub fn ideal_direction(&self, ideal: Angle) -> f64 {
        let dir = if self.origin.is_origin() {
            ideal.radians()
        } else {
            let dtheta = ideal.diff(self.origin.theta);
            let beta = vertex_angle_ideal(self.origin.rho, dtheta.abs());
            if dtheta < 0.0 {
                -(PI - beta)
            } else {
                PI - beta
            }
        };
        wrap_pi(dir - self.heading)
    }
}

/// The translation `I^x`: the orientation-preserving isometry mapping `o` to
/// `x` that fixes the geodesic through `o` and `x` and its ideal endpoints.
pub fn translate_to(x: &HPoint, p: &HPoint) -> HPoint {
    let frame = Frame::new(*x, -x.theta());
    frame.to_world(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dist_examples() {
        assert_eq!(dist(&HPoint::ORIGIN, &HPoint::ORIGIN), 0.0);
        let p = HPoint::from_disc(DiscPoint::new(0.5, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(dist(&HPoint::ORIGIN, &p), 3f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(p.rho(), 3f64.ln(), epsilon = 1e-14);
        assert_eq!(p.theta(), 0.0);
        let d = dist(&HPoint::new(2.0, 0.0), &HPoint::new(5.0, 0.0));
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn disc_round_trip_rejects_boundary() {
        assert!(DiscPoint::new(0.6, 0.8).is_err());
        assert!(HPoint::from_disc(DiscPoint { u: 1.0, v: 0.0 }).is_err());
        let o = HPoint::ORIGIN.to_disc();
        assert_eq!((o.u, o.v), (0.0, 0.0));
    }

    #[test]
    fn origin_is_canonical() {
        let o = HPoint::new(0.0, 2.5);
        assert_eq!(o.theta(), 0.0);
        assert!(HPoint::try_new(-1.0, 0.0).is_err());
        assert!(HPoint::try_new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn ball_volume_values() {
        assert_eq!(ball_volume(0.0), 0.0);
        assert_abs_diff_eq!(ball_volume(2.0), 17.35539, epsilon = 1e-5);
        assert_abs_diff_eq!(ball_volume(2.0), 2.0 * PI * (2f64.cosh() - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn chord_values() {
        assert_eq!(chord_distance(3.0, 0.0), 0.0);
        assert_abs_diff_eq!(chord_distance(3.0, PI), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chord_distance(3.0, PI / 2.0), 5.3118, epsilon = 1e-4);
        let d = dist(&HPoint::new(3.0, 0.0), &HPoint::new(3.0, PI / 2.0));
        assert_abs_diff_eq!(chord_distance(3.0, PI / 2.0), d, epsilon = 1e-12);
    }

    #[test]
    fn cover_point_count() {
        assert_eq!(circle_cover_points(3.0).len(), 32);
        assert_eq!(circle_cover_points(3.0)[0].theta(), 0.0);
    }

    #[test]
    fn frame_round_trip_far_from_origin() {
        let f = Frame::new(HPoint::new(30.0, 1.2), 0.7);
        for &(d, dir) in &[(0.5, 0.3), (3.0, -2.0), (10.0, 3.0), (1e-6, 1.0)] {
            let p = f.global(d, dir);
            let (d2, dir2) = f.local(&p);
            assert_abs_diff_eq!(d, d2, epsilon = 1e-9);
            assert_abs_diff_eq!(dir, dir2, epsilon = 1e-8);
        }
    }

    #[test]
    fn translation_along_axis_adds() {
        let q = translate_to(&HPoint::new(2.0, 0.0), &HPoint::new(1.0, 0.0));
        assert_abs_diff_eq!(q.rho(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.theta(), 0.0, epsilon = 1e-14);
        let x = HPoint::new(1.3, 2.2);
        let y = translate_to(&x, &HPoint::ORIGIN);
        assert_eq!(y, x);
    }
}
