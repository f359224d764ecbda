//! The Poisson stick process: configuration, closed-form measures and
//! exact samplers.

mod io;
mod measure;
mod sampler;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Stick;

pub use io::{read_sample, write_sample};
pub use measure::{
    alpha_exponent, embedding_box_measure, embedding_reference_lambda, embedding_success_prob,
    mu_box, offspring_mean, vacant_line_prob, TripleBox,
};
pub use sampler::{
    axis_hits, poisson, radial_sample, restricted_phi, sample_meeting_ball,
    sample_meeting_ball_with, sample_restricted, sample_restricted_with, sample_window,
    sample_window_with, AxisHit, PhiLaw, RestrictedHit,
};

pub use crate::geometry::HitTriple;

/// Default bound on the expected number of sticks a single sampler call may
/// generate.
pub const DEFAULT_MAX_EXPECTED: f64 = 5e7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("expected stick count {expected:.3e} exceeds the cap {cap:.3e}")]
    CapExceeded { expected: f64, cap: f64 },
    #[error("invalid triple box {0}")]
    InvalidBox(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), ProcessError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ProcessError::InvalidParameter {
            name,
            requirement: "positive and finite",
            value,
        })
    }
}

/// Parameters of one realization in the window `B(o, window_radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub lambda: f64,
    pub length: f64,
    pub window_radius: f64,
    pub seed: u64,
    pub max_expected: f64,
}

impl ProcessConfig {
    pub fn new(
        lambda: f64,
        length: f64,
        window_radius: f64,
        seed: u64,
    ) -> Result<ProcessConfig, ProcessError> {
        let c = ProcessConfig {
            lambda,
            length,
            window_radius,
            seed,
            max_expected: DEFAULT_MAX_EXPECTED,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_cap(mut self, max_expected: f64) -> ProcessConfig {
        self.max_expected = max_expected;
        self
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        require_positive("lambda", self.lambda)?;
        require_positive("L", self.length)?;
        require_positive("window radius", self.window_radius)?;
        require_positive("stick cap", self.max_expected)
    }

    /// Radius of the ball holding the centres of all sticks that meet the
    /// window.
    pub fn sampling_radius(&self) -> f64 {
        self.window_radius + self.length / 2.0
    }
}

/// Which part of the process a sample holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleRegion {
    /// All sticks with centre in `B(o, R_w + L/2)`.
    Window,
    /// All sticks meeting `B(o, R_w)`.
    MeetingBall,
    /// All sticks hitting the ray segment `[0, rho_max]` at `ray_angle`
    /// (both directions of the geodesic when `full_geodesic`).
    Restricted {
        rho_max: f64,
        ray_angle: f64,
        full_geodesic: bool,
    },
}

/// One realization of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct StickSample {
    pub config: ProcessConfig,
    pub region: SampleRegion,
    pub sticks: Vec<Stick>,
    pub realized_count: usize,
}

impl StickSample {
    pub fn new(config: ProcessConfig, region: SampleRegion, sticks: Vec<Stick>) -> StickSample {
        let realized_count = sticks.len();
        StickSample {
            config,
            region,
            sticks,
            realized_count,
        }
    }

    pub fn len(&self) -> usize {
        self.sticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sticks.is_empty()
    }
}
