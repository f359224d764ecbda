use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::angle::Angle;
use super::point::{Frame, HPoint};
use super::GeometryError;

/// Which closed side of a boundary geodesic is meant, looking from the first
/// ideal endpoint towards the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A closed half-plane, stored as the arc of the ideal boundary `∂H²` it
/// subtends: the counterclockwise arc from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    start: Angle,
    end: Angle,
}

impl HalfPlane {
    /// The half-plane bounded by the geodesic from ideal point `from` to ideal
    /// point `to`, on the given side.
    pub fn new(from: Angle, to: Angle, side: Side) -> Result<HalfPlane, GeometryError> {
        if to.diff(from) == 0.0 {
            return Err(GeometryError::CoincidentIdealPoints(from.radians()));
        }
        Ok(match side {
            // walking from `from` to `to`, the left side is the arc from
            // `to` counterclockwise back to `from`
            Side::Left => HalfPlane { start: to, end: from },
            Side::Right => HalfPlane { start: from, end: to },
        })
    }

    /// Side of the geodesic through `frame.origin` perpendicular to local
    /// direction `dir`, containing the ray in direction `dir`.
    pub fn facing(frame: &Frame, dir: f64) -> HalfPlane {
        HalfPlane {
            start: frame.ideal_endpoint(dir - FRAC_PI_2),
            end: frame.ideal_endpoint(dir + FRAC_PI_2),
        }
    }

    /// The side of the frame's horizontal axis containing positive heights.
    pub fn above_axis(frame: &Frame) -> HalfPlane {
        HalfPlane {
            start: frame.ideal_endpoint(0.0),
            end: frame.ideal_endpoint(PI),
        }
    }

    /// Ideal endpoints of the boundary geodesic, in arc order.
    pub fn boundary(&self) -> (Angle, Angle) {
        (self.start, self.end)
    }

    pub fn complement(&self) -> HalfPlane {
        HalfPlane {
            start: self.end,
            end: self.start,
        }
    }

    /// Counterclockwise length of the ideal arc, in `(0, 2π)`.
    pub fn arc_length(&self) -> f64 {
        let w = self.end.diff(self.start);
        if w <= 0.0 {
            w + TAU
        } else {
            w
        }
    }

    /// Counterclockwise offset of `t` from `start`, in `[0, 2π)`.
    fn offset(&self, t: Angle) -> f64 {
        let w = t.diff(self.start);
        if w < 0.0 {
            w + TAU
        } else {
            w
        }
    }

    /// Whether the ideal point at angle `t` lies on the closed arc.
    pub fn contains_ideal(&self, t: Angle) -> bool {
        self.offset(t) <= self.arc_length()
    }

    /// Signed Minkowski pairing of `p` with the boundary normal; positive
    /// inside.
    pub fn signed_value(&self, p: &HPoint) -> f64 {
        let t = p.angle();
        let da = t.diff(self.start);
        let db = self.end.diff(t);
        let w = self.arc_length();
        p.rho().sinh() * (db.sin() + da.sin()) - w.sin() * p.rho().cosh()
    }

    pub fn contains_point(&self, p: &HPoint) -> bool {
        if p.is_origin() {
            return self.arc_length() >= PI;
        }
        self.signed_value(p) >= 0.0
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &HalfPlane) -> bool {
        let w = self.arc_length();
        let s = self.offset(other.start);
        s <= w && s + other.arc_length() <= w
    }

    /// Whether the two closed half-planes are disjoint.
    pub fn disjoint(&self, other: &HalfPlane) -> bool {
        let w = self.arc_length();
        let s = self.offset(other.start);
        s > w && s + other.arc_length() < TAU
    }

    /// Smallest angular gap between the two arcs, negative if they overlap.
    pub fn separation(&self, other: &HalfPlane) -> f64 {
        let w = self.arc_length();
        let s = self.offset(other.start);
        let e = s + other.arc_length();
        if s > w && e < TAU {
            (s - w).min(TAU - e)
        } else {
            -1.0
        }
    }
}
