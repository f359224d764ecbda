//! Compensated polar angles.
//!
//! A point at hyperbolic radius `rho` moves by roughly `sinh(rho) * dtheta`
//! when its angle changes by `dtheta`, so a plain `f64` angle only resolves
//! positions to about `e^rho * 1e-16`. Angles here carry a second `f64`
//! holding the rounding residue (double-f64 arithmetic), which keeps
//! positional resolution near `e^rho * 1e-32`.

use std::f64::consts::{PI, TAU};

// Low part of 2*pi in double-f64.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// An angle in `[0, 2π)` stored as an unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Angle {
    hi: f64,
    lo: f64,
}

impl Angle {
    pub const ZERO: Angle = Angle { hi: 0.0, lo: 0.0 };

    /// Wraps any finite radian value into `[0, 2π)`.
    pub fn new(radians: f64) -> Angle {
        Angle::from_parts(radians, 0.0)
    }

    fn from_parts(hi: f64, lo: f64) -> Angle {
        let (mut hi, mut lo) = quick_two_sum(hi, lo);
        if !(0.0..TAU).contains(&hi) || (hi == 0.0 && lo < 0.0) {
            let turns = (hi / TAU).floor();
            // hi - turns * 2π in double-f64
            let (p_hi, p_err) = two_prod(turns, TAU);
            let p_lo = p_err + turns * TAU_LO;
            let (s, e) = two_sum(hi, -p_hi);
            let (h, l) = quick_two_sum(s, e + lo - p_lo);
            hi = h;
            lo = l;
            // one correction step for values landing on the boundary
            if hi < 0.0 || (hi == 0.0 && lo < 0.0) {
                let (s, e) = two_sum(hi, TAU);
                let (h, l) = quick_two_sum(s, e + lo + TAU_LO);
                hi = h;
                lo = l;
            } else if hi >= TAU {
                let (s, e) = two_sum(hi, -TAU);
                let (h, l) = quick_two_sum(s, e + lo - TAU_LO);
                hi = h;
                lo = l;
            }
            if hi >= TAU || hi < 0.0 {
                hi = 0.0;
                lo = 0.0;
            }
        }
        Angle { hi, lo }
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.hi
    }

    /// Low-order residue; `radians() + residue()` is the full-precision value.
    #[inline]
    pub fn residue(self) -> f64 {
        self.lo
    }

    /// Rotates counterclockwise by `delta` radians.
    pub fn add(self, delta: f64) -> Angle {
        let (s, e) = two_sum(self.hi, delta);
        Angle::from_parts(s, e + self.lo)
    }

    /// Signed difference `self - other` wrapped to `(-π, π]`, accurate to
    /// full relative precision when the two angles are close.
    pub fn diff(self, other: Angle) -> f64 {
        let (s, e) = two_sum(self.hi, -other.hi);
        let e = e + (self.lo - other.lo);
        let v = s + e;
        if v > PI {
            (s - TAU) + (e - TAU_LO)
        } else if v <= -PI {
            (s + TAU) + (e + TAU_LO)
        } else {
            v
        }
    }

    /// The opposite direction.
    pub fn opposite(self) -> Angle {
        self.add_exact_pi()
    }

    fn add_exact_pi(self) -> Angle {
        let (s, e) = two_sum(self.hi, PI);
        Angle::from_parts(s, e + self.lo + TAU_LO / 2.0)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_into_range() {
        assert_eq!(Angle::new(0.0).radians(), 0.0);
        assert!((Angle::new(-0.5).radians() - (TAU - 0.5)).abs() < 1e-15);
        assert!((Angle::new(7.0).radians() - (7.0 - TAU)).abs() < 1e-15);
        assert!((Angle::new(-13.0).radians() - (-13.0 + 3.0 * TAU)).abs() < 1e-14);
        let a = Angle::new(TAU);
        assert!(a.radians() >= 0.0 && a.radians() < TAU);
    }

    #[test]
    fn small_differences_keep_relative_precision() {
        let base = Angle::new(2.0);
        let moved = base.add(1e-25);
        let d = moved.diff(base);
        assert!((d - 1e-25).abs() < 1e-38, "{d}");
        let back = moved.add(-1e-25);
        assert!(back.diff(base).abs() < 1e-40);
    }

    #[test]
    fn diff_wraps_across_zero() {
        let a = Angle::new(0.1);
        let b = Angle::new(TAU - 0.1);
        assert!((a.diff(b) - 0.2).abs() < 1e-15);
        assert!((b.diff(a) + 0.2).abs() < 1e-15);
        let c = Angle::new(PI);
        assert!((c.diff(Angle::ZERO) - PI).abs() < 1e-15);
    }

    #[test]
    fn opposite_is_half_turn() {
        let a = Angle::new(1.0);
        assert!((a.opposite().diff(a).abs() - PI).abs() < 1e-15);
        assert!((a.opposite().opposite().diff(a)).abs() < 1e-15);
    }
}
