//! Geometry of the hyperbolic plane in polar coordinates.

mod angle;
mod halfplane;
mod intersect;
mod point;
mod stick;
mod trig;

use thiserror::Error;

pub use angle::Angle;
pub use halfplane::{HalfPlane, Side};
pub use intersect::{
    hit_triple, segment_distance, segments_intersect, segments_intersect_eps, stick_from_triple,
    sticks_intersect, sticks_meet, sticks_meet_eps, HitTriple,
};
pub use point::{
    ball_volume, chord_distance, circle_cover_points, disc_dist, dist, translate_to, DiscPoint,
    Frame, HPoint,
};
pub use stick::{distance_to_segment, distance_to_stick, make_stick, map_stick, Segment, Stick};
pub use trig::{ideal_angle_gap, side_from_sas, triangle_from_sides, Triangle};

pub(crate) use stick::{axis_foot, axis_height};

/// Absolute tolerance, in hyperbolic length, of all geometric predicates.
pub const EPS_GEO: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid polar coordinates (rho = {rho}, theta = {theta})")]
    InvalidPoint { rho: f64, theta: f64 },
    #[error("point ({u}, {v}) is not inside the unit disc")]
    OutsideDisc { u: f64, v: f64 },
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("stick length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("stick angle must lie in [0, pi), got {0}")]
    InvalidStickAngle(f64),
    #[error("sides {a}, {b}, {c} violate the strict triangle inequality")]
    NotATriangle { a: f64, b: f64, c: f64 },
    #[error("angles {beta} and {gamma} admit no finite side")]
    NoFiniteGap { beta: f64, gamma: f64 },
    #[error("boundary ideal points coincide at {0}")]
    CoincidentIdealPoints(f64),
}
