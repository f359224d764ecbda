use std::f64::consts::{FRAC_2_PI, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{ProcessConfig, ProcessError, SampleRegion, StickSample};
use crate::geometry::{
    ball_volume, distance_to_stick, make_stick, map_stick, stick_from_triple, Frame, HPoint,
    HitTriple, Stick,
};
use crate::rng::{role, stream};

/// Poisson variate; zero for a vanishing mean.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

fn check_cap(expected: f64, cap: f64) -> Result<(), ProcessError> {
    if expected > cap || !expected.is_finite() {
        Err(ProcessError::CapExceeded { expected, cap })
    } else {
        Ok(())
    }
}

/// Radius with density `sinh ρ / (cosh S − 1)` on `[0, S]`.
pub fn radial_sample<R: Rng + ?Sized>(rng: &mut R, s: f64) -> f64 {
    // cosh ρ − 1 = U (cosh S − 1), written as sinh(ρ/2) = √U sinh(S/2)
    let u: f64 = rng.random();
    2.0 * (u.sqrt() * (s / 2.0).sinh()).asinh()
}

/// Angle with density `½ sin φ` on `[0, π)`.
pub fn restricted_phi<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let phi = (1.0 - 2.0 * u).acos();
    if phi >= PI {
        0.0
    } else {
        phi
    }
}

fn uniform_phi<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * PI
}

/// Sticks with centres in `B(o, radius)` at intensity `lambda`.
pub fn sample_window_with<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    length: f64,
    radius: f64,
    cap: f64,
) -> Result<Vec<Stick>, ProcessError> {
    let expected = lambda * ball_volume(radius);
    check_cap(expected, cap)?;
    let n = poisson(rng, expected);
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let rho = radial_sample(rng, radius);
        let theta = rng.random::<f64>() * TAU;
        let phi = uniform_phi(rng);
        out.push(make_stick(HPoint::new(rho, theta), phi, length).expect("valid stick"));
    }
    Ok(out)
}

/// All sticks of a realization whose centre lies in `B(o, R_w + L/2)`.
pub fn sample_window(config: &ProcessConfig) -> Result<StickSample, ProcessError> {
    config.validate()?;
    let mut rng = stream(config.seed, &[role::WINDOW]);
    let sticks = sample_window_with(
        &mut rng,
        config.lambda,
        config.length,
        config.sampling_radius(),
        config.max_expected,
    )?;
    Ok(StickSample::new(*config, SampleRegion::Window, sticks))
}

/// Exactly the sticks meeting `B(o, radius)`, without generating the ones
/// whose centre lies in the outer shell but which miss the ball.
///
/// Centres in the shell `(R, R + L/2]` can only qualify when
/// `sinh ρ sin φ ≤ sinh R`; the candidates are drawn by thinning a
/// homogeneous process in `(ρ, θ)` of intensity `λ sinh R`.
pub fn sample_meeting_ball_with<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    length: f64,
    radius: f64,
    cap: f64,
) -> Result<Vec<Stick>, ProcessError> {
    let outer = radius + length / 2.0;
    let shell = outer - radius;
    let sh_r = radius.sinh();
    let expected_inner = lambda * ball_volume(radius);
    let expected_shell = lambda * sh_r * shell * TAU;
    check_cap(expected_inner + expected_shell, cap)?;

    let mut out = sample_window_with(rng, lambda, length, radius, cap)?;
    let n = poisson(rng, expected_shell);
    for _ in 0..n {
        let rho = radius + rng.random::<f64>() * shell;
        let theta = rng.random::<f64>() * TAU;
        let v = 1.0 - rng.random::<f64>();
        let upper: bool = rng.random();
        let accept_u: f64 = rng.random();
        if rho <= radius {
            continue;
        }
        let s = (sh_r / rho.sinh()).min(1.0);
        let a = s.asin();
        if accept_u * (PI / 2.0) * sh_r >= rho.sinh() * a {
            continue;
        }
        let phi = if upper { PI - a * v } else { a * v };
        if !(0.0..PI).contains(&phi) {
            continue;
        }
        let stick = make_stick(HPoint::new(rho, theta), phi, length).expect("valid stick");
        if distance_to_stick(&stick, &HPoint::ORIGIN) <= radius {
            out.push(stick);
        }
    }
    Ok(out)
}

/// All sticks of a realization meeting `B(o, R_w)`.
pub fn sample_meeting_ball(config: &ProcessConfig) -> Result<StickSample, ProcessError> {
    config.validate()?;
    let mut rng = stream(config.seed, &[role::WINDOW]);
    let sticks = sample_meeting_ball_with(
        &mut rng,
        config.lambda,
        config.length,
        config.window_radius,
        config.max_expected,
    )?;
    Ok(StickSample::new(*config, SampleRegion::MeetingBall, sticks))
}

/// Law of the crossing angle in the restricted construction. `Uniform` is a
/// deliberately wrong law kept as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiLaw {
    Sine,
    Uniform,
}

/// A stick crossing the horizontal axis of the canonical chart at signed
/// position `position`, with its hitting triple relative to the ray from
/// `o` through the crossing point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisHit {
    pub position: f64,
    pub triple: HitTriple,
    pub stick: Stick,
}

/// The sticks crossing the segment `[s_min, s_max]` of the horizontal axis,
/// built by the three-step construction: crossing points at rate
/// `(2/π)λL`, angles from `law`, centre offsets uniform in `[−L/2, L/2]`.
/// Hits are sorted by position.
pub fn axis_hits<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    length: f64,
    s_min: f64,
    s_max: f64,
    law: PhiLaw,
    cap: f64,
) -> Result<Vec<AxisHit>, ProcessError> {
    let span = s_max - s_min;
    if span <= 0.0 || lambda <= 0.0 {
        return Ok(Vec::new());
    }
    let expected = FRAC_2_PI * lambda * length * span;
    check_cap(expected, cap)?;
    let n = poisson(rng, expected);
    let mut pos: Vec<f64> = (0..n).map(|_| s_min + rng.random::<f64>() * span).collect();
    pos.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(pos.len());
    for position in pos {
        let varphi = match law {
            PhiLaw::Sine => restricted_phi(rng),
            PhiLaw::Uniform => uniform_phi(rng),
        };
        let r = (rng.random::<f64>() - 0.5) * length;
        let triple = HitTriple {
            rho_prime: position.abs(),
            varphi,
            r,
        };
        let ray = if position < 0.0 { PI } else { 0.0 };
        out.push(AxisHit {
            position,
            triple,
            stick: stick_from_triple(&triple, length, ray),
        });
    }
    Ok(out)
}

/// A stick of a restricted sample with its triple relative to the ray it
/// crosses (the opposite ray when `position < 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedHit {
    pub position: f64,
    pub triple: HitTriple,
    pub stick: Stick,
}

/// The sticks hitting `[0, rho_max]` on the ray at `ray_angle` (or
/// `[−rho_max, rho_max]` along the whole geodesic), placed in world
/// coordinates.
pub fn sample_restricted_with<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    length: f64,
    rho_max: f64,
    ray_angle: f64,
    full_geodesic: bool,
    law: PhiLaw,
    cap: f64,
) -> Result<Vec<RestrictedHit>, ProcessError> {
    let s_min = if full_geodesic { -rho_max } else { 0.0 };
    let hits = axis_hits(rng, lambda, length, s_min, rho_max, law, cap)?;
    let frame = Frame::new(HPoint::ORIGIN, ray_angle);
    Ok(hits
        .into_iter()
        .map(|h| RestrictedHit {
            position: h.position,
            triple: h.triple,
            stick: if ray_angle == 0.0 {
                h.stick
            } else {
                map_stick(&frame, &h.stick)
            },
        })
        .collect())
}

/// All sticks of a realization hitting the ray segment `[0, rho_max]` at
/// `ray_angle`.
pub fn sample_restricted(
    config: &ProcessConfig,
    rho_max: f64,
    ray_angle: f64,
    full_geodesic: bool,
) -> Result<(StickSample, Vec<RestrictedHit>), ProcessError> {
    config.validate()?;
    super::require_positive("rho_max", rho_max)?;
    let mut rng = stream(config.seed, &[role::RESTRICTED]);
    let hits = sample_restricted_with(
        &mut rng,
        config.lambda,
        config.length,
        rho_max,
        ray_angle,
        full_geodesic,
        PhiLaw::Sine,
        config.max_expected,
    )?;
    let sticks = hits.iter().map(|h| h.stick).collect();
    let region = SampleRegion::Restricted {
        rho_max,
        ray_angle,
        full_geodesic,
    };
    Ok((StickSample::new(*config, region, sticks), hits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist, hit_triple};

    #[test]
    fn tiny_intensity_gives_empty_window() {
        let c = ProcessConfig::new(1e-12, 1.0, 1.0, 3).unwrap();
        assert!(sample_window(&c).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let c = ProcessConfig::new(1.0, 30.0, 20.0, 3).unwrap();
        assert!(matches!(
            sample_window(&c),
            Err(ProcessError::CapExceeded { .. })
        ));
        let c = ProcessConfig::new(1.0, 2.0, 2.0, 3).unwrap().with_cap(1.0);
        assert!(sample_window(&c).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let c = ProcessConfig::new(0.5, 2.0, 2.0, 11).unwrap();
        assert_eq!(sample_window(&c).unwrap(), sample_window(&c).unwrap());
        let d = ProcessConfig { seed: 12, ..c };
        assert_ne!(sample_window(&c).unwrap(), sample_window(&d).unwrap());
    }

    #[test]
    fn window_sticks_respect_invariants() {
        let c = ProcessConfig::new(1.0, 2.0, 2.0, 5).unwrap();
        let s = sample_window(&c).unwrap();
        for st in &s.sticks {
            assert!(st.center().rho() <= c.sampling_radius());
            assert!((dist(&st.endpoints().a, &st.endpoints().b) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn meeting_ball_matches_filtered_window() {
        // same law: compare mean counts with the filtered window count
        let (l, r, lambda) = (4.0, 3.0, 0.3);
        let mut a = 0usize;
        let mut b = 0usize;
        let reps = 400;
        for i in 0..reps {
            let mut rng = stream(99, &[i]);
            let w = sample_window_with(&mut rng, lambda, l, r + l / 2.0, 1e9).unwrap();
            a += w
                .iter()
                .filter(|s| distance_to_stick(s, &HPoint::ORIGIN) <= r)
                .count();
            let mut rng = stream(100, &[i]);
            let m = sample_meeting_ball_with(&mut rng, lambda, l, r, 1e9).unwrap();
            assert!(m
                .iter()
                .all(|s| distance_to_stick(s, &HPoint::ORIGIN) <= r + 1e-9));
            b += m.len();
        }
        let (ma, mb) = (a as f64 / reps as f64, b as f64 / reps as f64);
        let se = ((ma + mb) / reps as f64).sqrt();
        assert!((ma - mb).abs() < 4.0 * se, "{ma} {mb} {se}");
    }

    #[test]
    fn restricted_sticks_hit_the_ray() {
        let c = ProcessConfig::new(0.4, 3.0, 5.0, 8).unwrap();
        for angle in [0.0, 1.3, PI, 5.0] {
            let (s, hits) = sample_restricted(&c, 5.0, angle, false).unwrap();
            assert_eq!(s.len(), hits.len());
            for h in &hits {
                let t = hit_triple(&h.stick, angle).expect("hits the ray");
                assert!(t.rho_prime <= 5.0 + 1e-9);
                assert!((t.rho_prime - h.triple.rho_prime).abs() < 1e-9);
                assert!((t.varphi - h.triple.varphi).abs() < 1e-9);
                assert!((t.r - h.triple.r).abs() < 1e-9);
            }
        }
    }
}
