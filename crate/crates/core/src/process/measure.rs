use std::f64::consts::{FRAC_1_PI, PI};

use super::ProcessError;

/// A product box `[ρ′₁, ρ′₂] × [φ₁, φ₂] × [r₁, r₂]` of hitting triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleBox {
    pub rho: (f64, f64),
    pub phi: (f64, f64),
    pub r: (f64, f64),
}

impl TripleBox {
    /// Validates the box against stick length `length`.
    pub fn new(
        rho: (f64, f64),
        phi: (f64, f64),
        r: (f64, f64),
        length: f64,
    ) -> Result<TripleBox, ProcessError> {
        let b = TripleBox { rho, phi, r };
        b.validate(length)?;
        Ok(b)
    }

    pub fn validate(&self, length: f64) -> Result<(), ProcessError> {
        let half = length / 2.0;
        let ok = self.rho.0 >= 0.0
            && self.rho.0 < self.rho.1
            && self.rho.1.is_finite()
            && self.phi.0 >= 0.0
            && self.phi.0 < self.phi.1
            && self.phi.1 <= PI
            && self.r.0 >= -half
            && self.r.0 < self.r.1
            && self.r.1 <= half;
        if ok {
            Ok(())
        } else {
            Err(ProcessError::InvalidBox(format!("{self:?}")))
        }
    }

    pub fn contains(&self, rho_prime: f64, varphi: f64, r: f64) -> bool {
        (self.rho.0..=self.rho.1).contains(&rho_prime)
            && (self.phi.0..=self.phi.1).contains(&varphi)
            && (self.r.0..=self.r.1).contains(&r)
    }

    /// Half-open membership, so that adjacent boxes of a partition never
    /// share a triple.
    pub fn contains_half_open(&self, rho_prime: f64, varphi: f64, r: f64) -> bool {
        rho_prime >= self.rho.0
            && rho_prime < self.rho.1
            && varphi >= self.phi.0
            && varphi < self.phi.1
            && r >= self.r.0
            && r < self.r.1
    }

    /// Splits every side in half, giving 8 disjoint boxes.
    pub fn octants(&self) -> Vec<TripleBox> {
        let mid = |(a, b): (f64, f64)| 0.5 * (a + b);
        let halves = |iv: (f64, f64)| [(iv.0, mid(iv)), (mid(iv), iv.1)];
        let mut out = Vec::with_capacity(8);
        for rho in halves(self.rho) {
            for phi in halves(self.phi) {
                for r in halves(self.r) {
                    out.push(TripleBox { rho, phi, r });
                }
            }
        }
        out
    }
}

/// Measure of the sticks whose hitting triples fall in `b`:
/// `(1/π)(ρ′₂−ρ′₁)(cos φ₁ − cos φ₂)(r₂−r₁)`.
pub fn mu_box(b: &TripleBox) -> f64 {
    FRAC_1_PI * (b.rho.1 - b.rho.0) * (b.phi.0.cos() - b.phi.1.cos()) * (b.r.1 - b.r.0)
}

/// Expected number of sticks hitting a fixed stick: `2λL²/π`.
pub fn offspring_mean(lambda: f64, length: f64) -> f64 {
    2.0 * lambda * length * length / PI
}

/// Measure of one embedding search box, `(√3−1)L²/(32π)`.
pub fn embedding_box_measure(length: f64) -> f64 {
    (3f64.sqrt() - 1.0) * length * length / (32.0 * PI)
}

/// Probability that an embedding search box is occupied:
/// `1 − exp(−λ(√3−1)L²/(32π))`.
pub fn embedding_success_prob(lambda: f64, length: f64) -> f64 {
    -(-lambda * embedding_box_measure(length)).exp_m1()
}

/// Intensity at which the embedding success probability is `1 − e⁻¹`.
pub fn embedding_reference_lambda(length: f64) -> f64 {
    32.0 * PI / ((3f64.sqrt() - 1.0) * length * length)
}

/// Decay rate of the probability that a segment is vacant: `(2/π)λL`.
pub fn alpha_exponent(lambda: f64, length: f64) -> f64 {
    2.0 * lambda * length / PI
}

/// Probability that no stick hits a fixed segment of length `r`.
pub fn vacant_line_prob(lambda: f64, length: f64, r: f64) -> f64 {
    (-alpha_exponent(lambda, length) * r).exp()
}
