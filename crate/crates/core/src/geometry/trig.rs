use std::f64::consts::PI;

use super::GeometryError;

/// A hyperbolic triangle with sides `a, b, c` and opposite angles
/// `alpha, beta, gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Triangle {
    pub fn angle_sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma
    }

    /// Largest pairwise discrepancy between the ratios `sinh(side)/sin(angle)`.
    pub fn sine_rule_residual(&self) -> f64 {
        let r = [
            self.a.sinh() / self.alpha.sin(),
            self.b.sinh() / self.beta.sin(),
            self.c.sinh() / self.gamma.sin(),
        ];
        let m = r[0].abs().max(r[1].abs()).max(r[2].abs());
        let spread = (r[0] - r[1]).abs().max((r[1] - r[2]).abs()).max((r[0] - r[2]).abs());
        spread / m
    }
}

// Angle opposite `x`, from the half-angle form of the cosine law.
fn opposite_angle(x: f64, y: f64, z: f64) -> f64 {
    let s = 0.5 * (x + y + z);
    let num = ((s - y).sinh() * (s - z).sinh()).sqrt();
    let den = (s.sinh() * (s - x).sinh()).sqrt();
    2.0 * num.atan2(den)
}

/// Solves the triangle with the given side lengths.
pub fn triangle_from_sides(a: f64, b: f64, c: f64) -> Result<Triangle, GeometryError> {
    let ok = [a, b, c].iter().all(|v| v.is_finite() && *v > 0.0)
        && a < b + c
        && b < a + c
        && c < a + b;
    if !ok {
        return Err(GeometryError::NotATriangle { a, b, c });
    }
    Ok(Triangle {
        a,
        b,
        c,
        alpha: opposite_angle(a, b, c),
        beta: opposite_angle(b, c, a),
        gamma: opposite_angle(c, a, b),
    })
}

/// Side opposite the angle `gamma` enclosed by sides `a` and `b`.
pub fn side_from_sas(a: f64, b: f64, gamma: f64) -> f64 {
    let h = ((a - b) / 2.0).sinh().powi(2) + a.sinh() * b.sinh() * (gamma / 2.0).sin().powi(2);
    2.0 * h.sqrt().asinh()
}

/// Length of the finite side of a triangle with two ideal vertices, given
/// the angles `beta` and `gamma` at its finite vertices:
/// `cosh C = (1 + cos β cos γ) / (sin β sin γ)`.
pub fn ideal_angle_gap(beta: f64, gamma: f64) -> Result<f64, GeometryError> {
    let valid = |t: f64| t > 0.0 && t < PI;
    if !valid(beta) || !valid(gamma) || beta + gamma > PI {
        return Err(GeometryError::NoFiniteGap { beta, gamma });
    }
    // cosh C - 1 = 2 cos²((β+γ)/2) / (sin β sin γ)
    let x = ((beta + gamma) / 2.0).cos() / (beta.sin() * gamma.sin()).sqrt();
    Ok(2.0 * x.asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equilateral_unit() {
        let t = triangle_from_sides(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(t.alpha, t.beta, epsilon = 1e-15);
        assert_abs_diff_eq!(t.beta, t.gamma, epsilon = 1e-15);
        // cos α = cosh 1 / (cosh 1 + 1)
        let c1 = 1f64.cosh();
        assert_abs_diff_eq!(t.alpha, (c1 / (c1 + 1.0)).acos(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.alpha, 0.918798, epsilon = 1e-6);
        assert!(t.angle_sum() < PI);
    }

    #[test]
    fn rejects_degenerate_sides() {
        assert!(triangle_from_sides(1.0, 1.0, 2.0).is_err());
        assert!(triangle_from_sides(1.0, 1.0, 0.0).is_err());
        assert!(triangle_from_sides(5.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ideal_gap_values() {
        assert_abs_diff_eq!(ideal_angle_gap(PI / 2.0, PI / 2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ideal_angle_gap(PI / 4.0, PI / 4.0).unwrap(),
            3f64.acosh(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(ideal_angle_gap(PI / 4.0, PI / 4.0).unwrap(), 1.7627, epsilon = 1e-4);
        assert!(ideal_angle_gap(2.0, 1.2).is_err());
        assert!(ideal_angle_gap(0.0, 1.0).is_err());
    }

    #[test]
    fn complementary_angle_bound() {
        for &l in &[20.0f64, 40.0] {
            for k in 0..20 {
                let d = l / 4.0 + k as f64;
                let alpha = (1.0 / d.cosh()).asin();
                assert!(alpha <= 2.0 * (-l / 4.0).exp());
            }
        }
    }
}
