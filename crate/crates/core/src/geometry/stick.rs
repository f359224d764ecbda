use std::f64::consts::PI;

use super::point::{dist, wrap_pi, Frame, HPoint};
use super::GeometryError;

/// A geodesic segment `l[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: HPoint,
    pub b: HPoint,
}

impl Segment {
    pub fn new(a: HPoint, b: HPoint) -> Result<Segment, GeometryError> {
        if dist(&a, &b) <= 0.0 {
            return Err(GeometryError::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    pub fn length(&self) -> f64 {
        dist(&self.a, &self.b)
    }

    /// Chart with `a` at its origin and `b` on the positive horizontal axis.
    pub fn frame(&self) -> Frame {
        let at_a = Frame::new(self.a, 0.0);
        let (_, dir) = at_a.local(&self.b);
        Frame::new(self.a, dir)
    }

    pub fn midpoint(&self) -> HPoint {
        self.frame().global(self.length() / 2.0, 0.0)
    }
}

/// A stick `l_L(x, φ)`: a segment of length `L` centred at `x`, making the
/// counterclockwise angle `φ ∈ [0, π)` with the geodesic through `o` and `x`.
/// At `x = o` the angle is measured from the horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stick {
    center: HPoint,
    phi: f64,
    length: f64,
    endpoints: Segment,
}

impl Stick {
    pub fn center(&self) -> HPoint {
        self.center
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn endpoints(&self) -> Segment {
        self.endpoints
    }

    /// Chart centred at the stick's midpoint with the stick along the
    /// horizontal axis, `endpoints.a` at `+L/2`.
    pub fn frame(&self) -> Frame {
        Frame::new(self.center, self.phi)
    }

    /// Point at signed offset `t ∈ [-L/2, L/2]` from the centre.
    pub fn point_at(&self, t: f64) -> HPoint {
        if t >= 0.0 {
            self.frame().global(t, 0.0)
        } else {
            self.frame().global(-t, PI)
        }
    }

    /// Largest distance from `o` to a point of the stick (attained at an
    /// endpoint by convexity of the distance function).
    pub fn max_rho(&self) -> f64 {
        self.endpoints.a.rho().max(self.endpoints.b.rho())
    }

    /// Distance from `o` to the closest point of the stick.
    pub fn min_rho(&self) -> f64 {
        distance_to_stick(self, &HPoint::ORIGIN)
    }
}

/// Builds `l_L(x, φ)`.
pub fn make_stick(x: HPoint, phi: f64, length: f64) -> Result<Stick, GeometryError> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(GeometryError::InvalidLength(length));
    }
    if !(0.0..PI).contains(&phi) {
        return Err(GeometryError::InvalidStickAngle(phi));
    }
    let frame = Frame::new(x, phi);
    let a = frame.global(length / 2.0, 0.0);
    let b = frame.global(length / 2.0, PI);
    Ok(Stick {
        center: x,
        phi,
        length,
        endpoints: Segment { a, b },
    })
}

/// Same as [`make_stick`] with any real angle reduced modulo π.
pub(crate) fn stick_mod_pi(x: HPoint, angle: f64, length: f64) -> Stick {
    let mut phi = angle.rem_euclid(PI);
    if phi >= PI {
        phi = 0.0;
    }
    make_stick(x, phi, length).expect("stick length validated by caller")
}

/// Image of a stick given in the canonical chart under the chart `frame`.
pub fn map_stick(frame: &Frame, s: &Stick) -> Stick {
    let c = frame.to_world(&s.center);
    let a = frame.to_world(&s.endpoints.a);
    let (_, dir) = Frame::new(c, 0.0).local(&a);
    stick_mod_pi(c, dir, s.length)
}

/// Coordinate of the foot of the perpendicular from a point at local polar
/// position `(d, dir)` onto the horizontal axis of the chart.
#[inline]
pub(crate) fn axis_foot(d: f64, dir: f64) -> f64 {
    (d.tanh() * dir.cos()).atanh()
}

/// Signed distance from a point at local polar position `(d, dir)` to the
/// horizontal axis; positive above.
#[inline]
pub(crate) fn axis_height(d: f64, dir: f64) -> f64 {
    (d.sinh() * dir.sin()).asinh()
}

/// Distance from `p` to the closed segment `[-half, half]` of the horizontal
/// axis of `frame`.
pub(crate) fn distance_to_axis_segment(frame: &Frame, half: f64, p: &HPoint) -> f64 {
    let (d, dir) = frame.local(p);
    if d == 0.0 {
        return 0.0;
    }
    let foot = axis_foot(d, dir);
    if foot.abs() <= half {
        axis_height(d, dir).abs()
    } else {
        let end = frame.global(half, if foot > 0.0 { 0.0 } else { PI });
        dist(&end, p)
    }
}

/// Distance from `p` to the closed segment `seg`.
pub fn distance_to_segment(seg: &Segment, p: &HPoint) -> f64 {
    let f = seg.frame();
    let (d, dir) = f.local(p);
    if d == 0.0 {
        return 0.0;
    }
    let foot = axis_foot(d, dir);
    if (0.0..=seg.length()).contains(&foot) {
        axis_height(d, dir).abs()
    } else {
        dist(&seg.a, p).min(dist(&seg.b, p))
    }
}

/// Distance from `p` to the closest point of `stick`.
pub fn distance_to_stick(stick: &Stick, p: &HPoint) -> f64 {
    distance_to_axis_segment(&stick.frame(), stick.length / 2.0, p)
}

/// Direction of `p` from `origin` relative to the frame, reduced into `[0, π)`.
pub(crate) fn line_direction_mod_pi(dir: f64) -> f64 {
    let d = wrap_pi(dir).rem_euclid(PI);
    if d >= PI {
        0.0
    } else {
        d
    }
}
