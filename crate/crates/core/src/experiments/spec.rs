//! Experiment specifications as `key=value` lines.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::process::{embedding_reference_lambda, DEFAULT_MAX_EXPECTED};
use crate::rng::fresh_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CrossingCurve,
    LambdaCBisect,
    TwoArmCurve,
    MeasureVerify,
    GwSurvival,
    VacantDecay,
    SubcriticalDomination,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::CrossingCurve,
        ExperimentKind::LambdaCBisect,
        ExperimentKind::TwoArmCurve,
        ExperimentKind::MeasureVerify,
        ExperimentKind::GwSurvival,
        ExperimentKind::VacantDecay,
        ExperimentKind::SubcriticalDomination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CrossingCurve => "crossing_curve",
            ExperimentKind::LambdaCBisect => "lambda_c_bisect",
            ExperimentKind::TwoArmCurve => "two_arm_curve",
            ExperimentKind::MeasureVerify => "measure_verify",
            ExperimentKind::GwSurvival => "gw_survival",
            ExperimentKind::VacantDecay => "vacant_decay",
            ExperimentKind::SubcriticalDomination => "subcritical_domination",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ExperimentError::invalid("kind", format!("unknown experiment kind {s:?}")))
    }
}

/// Intensity grid: a point count spread over `[lambda_min, lambda_max]`, or
/// explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    Count(usize),
    Values(Vec<f64>),
}

impl Grid {
    /// Geometric spacing when `lo > 0`, linear otherwise.
    pub fn points(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Count(1) => vec![hi],
            Grid::Count(n) => {
                let n = *n;
                (0..n)
                    .map(|i| {
                        let t = i as f64 / (n - 1) as f64;
                        if i == n - 1 {
                            hi
                        } else if lo > 0.0 {
                            lo * (hi / lo).powf(t)
                        } else {
                            lo + (hi - lo) * t
                        }
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Count(n) => write!(f, "{n}"),
            Grid::Values(v) => f.write_str(&join(v)),
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

/// One experiment. Keys mirror the command-line flags; unset optional keys
/// take per-kind defaults in [`ExperimentSpec::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub lengths: Vec<f64>,
    pub lambda: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub grid: Option<Grid>,
    pub radii: Vec<f64>,
    pub r_in: Option<f64>,
    pub depth: Option<u32>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub target_p: Option<f64>,
    pub threshold: Option<f64>,
    pub ray_angle: Option<f64>,
    pub control: Option<bool>,
    pub m: Vec<f64>,
    pub max_expected: Option<f64>,
    #[serde(skip)]
    pub out: Option<String>,
}

/// Keys accepted in spec files, in echo order.
pub const KEYS: [&str; 19] = [
    "kind",
    "L",
    "lambda",
    "lambda_min",
    "lambda_max",
    "grid",
    "R",
    "r_in",
    "depth",
    "reps",
    "seed",
    "n",
    "target_p",
    "threshold",
    "ray_angle",
    "control",
    "m",
    "max_expected",
    "out",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ExperimentError> {
    v.trim()
        .parse()
        .map_err(|_| ExperimentError::invalid(key, format!("cannot parse {v:?}")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ExperimentError> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| num(key, s))
        .collect()
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> ExperimentSpec {
        ExperimentSpec {
            kind,
            lengths: Vec::new(),
            lambda: None,
            lambda_min: None,
            lambda_max: None,
            grid: None,
            radii: Vec::new(),
            r_in: None,
            depth: None,
            reps: None,
            seed: None,
            n: None,
            target_p: None,
            threshold: None,
            ray_angle: None,
            control: None,
            m: Vec::new(),
            max_expected: None,
            out: None,
        }
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let v = value.trim();
        match key {
            "kind" => {
                let k: ExperimentKind = v.parse()?;
                if k != self.kind {
                    return Err(ExperimentError::invalid(
                        "kind",
                        format!("spec is for {k}, command runs {}", self.kind),
                    ));
                }
            }
            "L" => self.lengths = list(key, v)?,
            "lambda" => self.lambda = Some(num(key, v)?),
            "lambda_min" => self.lambda_min = Some(num(key, v)?),
            "lambda_max" => self.lambda_max = Some(num(key, v)?),
            "grid" => {
                self.grid = Some(if v.contains(',') || v.contains('.') || v.contains('e') {
                    Grid::Values(list(key, v)?)
                } else if v.is_empty() {
                    Grid::Values(Vec::new())
                } else {
                    Grid::Count(num(key, v)?)
                })
            }
            "R" => self.radii = list(key, v)?,
            "r_in" => self.r_in = Some(num(key, v)?),
            "depth" => self.depth = Some(num(key, v)?),
            "reps" => self.reps = Some(num(key, v)?),
            "seed" => self.seed = Some(num(key, v)?),
            "n" => self.n = Some(num(key, v)?),
            "target_p" => self.target_p = Some(num(key, v)?),
            "threshold" => self.threshold = Some(num(key, v)?),
            "ray_angle" => self.ray_angle = Some(num(key, v)?),
            "control" => self.control = Some(num(key, v)?),
            "m" => self.m = list(key, v)?,
            "max_expected" => self.max_expected = Some(num(key, v)?),
            "out" => self.out = Some(v.to_string()),
            _ => return Err(ExperimentError::invalid(key, "unknown key".to_string())),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (k, v) in parse_lines(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Fills defaults (drawing a fresh seed if none was given) and checks
    /// every parameter.
    pub fn resolve(mut self) -> Result<ExperimentSpec, ExperimentError> {
        use ExperimentKind::*;
        let kind = self.kind;
        if self.lengths.is_empty() {
            self.lengths = match kind {
                CrossingCurve | TwoArmCurve => vec![8.0],
                LambdaCBisect => vec![6.0, 8.0, 10.0, 12.0],
                MeasureVerify => vec![5.0],
                GwSurvival => vec![40.0],
                VacantDecay => vec![10.0],
                SubcriticalDomination => vec![2.0],
            };
        }
        if self.radii.is_empty() {
            self.radii = match kind {
                MeasureVerify => vec![1.0],
                VacantDecay => (1..=8).map(|i| 0.025 * i as f64).collect(),
                GwSurvival | SubcriticalDomination => vec![],
                _ => vec![6.0],
            };
        }
        if matches!(kind, CrossingCurve | LambdaCBisect | TwoArmCurve) {
            self.r_in.get_or_insert(1.0);
        }
        if matches!(kind, CrossingCurve | TwoArmCurve) {
            self.grid.get_or_insert(Grid::Count(16));
        }
        if kind == MeasureVerify {
            self.lambda.get_or_insert(0.5);
            self.n.get_or_insert(100_000);
            self.ray_angle.get_or_insert(0.0);
            self.control.get_or_insert(true);
        }
        if kind == GwSurvival {
            self.depth.get_or_insert(10);
        }
        if kind == LambdaCBisect {
            self.target_p.get_or_insert(0.5);
        }
        if kind == TwoArmCurve {
            self.threshold.get_or_insert(0.05);
        }
        if kind == SubcriticalDomination && self.m.is_empty() && self.lambda.is_none() {
            self.m = vec![0.5, 0.9];
        }
        self.reps.get_or_insert(match kind {
            CrossingCurve | TwoArmCurve => 200,
            LambdaCBisect => 500,
            MeasureVerify => 1,
            GwSurvival => 1000,
            VacantDecay | SubcriticalDomination => 10_000,
        });
        self.max_expected.get_or_insert(DEFAULT_MAX_EXPECTED);
        self.seed.get_or_insert_with(fresh_seed);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        use ExperimentKind::*;
        let pos = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ExperimentError::invalid(key, format!("must be positive, got {v}")))
            }
        };
        for &l in &self.lengths {
            pos("L", l)?;
            if self.kind == GwSurvival && l < crate::percolation::MIN_EMBEDDING_LENGTH {
                return Err(ExperimentError::invalid(
                    "L",
                    format!("must be at least {} for the embedding, got {l}", crate::percolation::MIN_EMBEDDING_LENGTH),
                ));
            }
        }
        for &r in &self.radii {
            pos("R", r)?;
        }
        if matches!(self.kind, CrossingCurve | LambdaCBisect | TwoArmCurve) && self.radii.len() != 1 {
            return Err(ExperimentError::invalid("R", "takes a single value for this experiment".into()));
        }
        if let Some(r_in) = self.r_in {
            pos("r_in", r_in)?;
            if let Some(&r) = self.radii.first() {
                if r_in >= r {
                    return Err(ExperimentError::invalid("r_in", format!("must be below R = {r}, got {r_in}")));
                }
            }
        }
        if let Some(l) = self.lambda {
            pos("lambda", l)?;
        }
        let min_ok = |key: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ExperimentError::invalid(key, format!("must be nonnegative, got {v}")))
            }
        };
        if let Some(v) = self.lambda_min {
            min_ok("lambda_min", v)?;
            if self.kind == LambdaCBisect {
                pos("lambda_min", v)?;
            }
        }
        if let Some(v) = self.lambda_max {
            pos("lambda_max", v)?;
        }
        if let (Some(a), Some(b)) = (self.lambda_min, self.lambda_max) {
            if a >= b {
                return Err(ExperimentError::invalid(
                    "lambda_max",
                    format!("must exceed lambda_min = {a}, got {b}"),
                ));
            }
        }
        match &self.grid {
            Some(Grid::Count(0)) => {
                return Err(ExperimentError::invalid("grid", "needs at least one point".into()))
            }
            Some(Grid::Values(v)) => {
                if v.is_empty() {
                    return Err(ExperimentError::invalid("grid", "is empty".into()));
                }
                for &x in v {
                    min_ok("grid", x)?;
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ExperimentError::invalid("grid", "must be strictly ascending".into()));
                }
            }
            _ => {}
        }
        if self.reps == Some(0) {
            return Err(ExperimentError::invalid("reps", "must be at least 1".into()));
        }
        if self.depth == Some(0) {
            return Err(ExperimentError::invalid("depth", "must be at least 1".into()));
        }
        if self.n == Some(0) {
            return Err(ExperimentError::invalid("n", "must be at least 1".into()));
        }
        for (key, v) in [("target_p", self.target_p), ("threshold", self.threshold)] {
            if let Some(p) = v {
                if !(p > 0.0 && p < 1.0) {
                    return Err(ExperimentError::invalid(key, format!("must lie in (0, 1), got {p}")));
                }
            }
        }
        for &m in &self.m {
            if !(m > 0.0 && m < 1.0) {
                return Err(ExperimentError::invalid("m", format!("must lie in (0, 1), got {m}")));
            }
        }
        if let Some(a) = self.ray_angle {
            if !a.is_finite() {
                return Err(ExperimentError::invalid("ray_angle", format!("must be finite, got {a}")));
            }
        }
        if let Some(c) = self.max_expected {
            pos("max_expected", c)?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("resolved spec")
    }

    pub fn reps(&self) -> usize {
        self.reps.expect("resolved spec")
    }

    pub fn cap(&self) -> f64 {
        self.max_expected.unwrap_or(DEFAULT_MAX_EXPECTED)
    }

    /// Intensity range of the curve or bracket for stick length `l`.
    pub fn lambda_range(&self, l: f64) -> (f64, f64) {
        let (lo, hi) = match self.kind {
            ExperimentKind::TwoArmCurve => (PI / (8.0 * l), 5.0 * 2f64.sqrt() * PI / l),
            _ => (PI / (4.0 * l * l), 2.0 * embedding_reference_lambda(l)),
        };
        (self.lambda_min.unwrap_or(lo), self.lambda_max.unwrap_or(hi))
    }

    pub fn lambda_grid(&self, l: f64) -> Vec<f64> {
        let (lo, hi) = self.lambda_range(l);
        self.grid.clone().unwrap_or(Grid::Count(16)).points(lo, hi)
    }

    /// `key=value` lines of every set key except `out`.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut out = vec![format!("kind={}", self.kind)];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("{k}={v}"));
            }
        };
        let nonempty = |v: &[f64]| (!v.is_empty()).then(|| join(v));
        push("L", nonempty(&self.lengths));
        push("lambda", self.lambda.map(|x| x.to_string()));
        push("lambda_min", self.lambda_min.map(|x| x.to_string()));
        push("lambda_max", self.lambda_max.map(|x| x.to_string()));
        push("grid", self.grid.as_ref().map(|g| g.to_string()));
        push("R", nonempty(&self.radii));
        push("r_in", self.r_in.map(|x| x.to_string()));
        push("depth", self.depth.map(|x| x.to_string()));
        push("reps", self.reps.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("n", self.n.map(|x| x.to_string()));
        push("target_p", self.target_p.map(|x| x.to_string()));
        push("threshold", self.threshold.map(|x| x.to_string()));
        push("ray_angle", self.ray_angle.map(|x| x.to_string()));
        push("control", self.control.map(|x| x.to_string()));
        push("m", nonempty(&self.m));
        push("max_expected", self.max_expected.map(|x| x.to_string()));
        out
    }
}

/// Splits spec text into `(key, value)` pairs.
pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ExperimentError::invalid(
                "spec",
                format!("line {}: expected key=value, got {line:?}", no + 1),
            ));
        };
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(ExperimentError::invalid(k, format!("unknown key on line {}", no + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let mut s = ExperimentSpec::new(ExperimentKind::CrossingCurve);
        s.apply_text("L=6,8\n# note\nR=5\ngrid=0,0.1,0.25\nseed=9\n").unwrap();
        let s = s.resolve().unwrap();
        let mut t = ExperimentSpec::new(ExperimentKind::CrossingCurve);
        t.apply_text(&s.echo_lines().join("\n")).unwrap();
        assert_eq!(t.resolve().unwrap(), s);
    }

    #[test]
    fn validation_names_the_key() {
        let mut s = ExperimentSpec::new(ExperimentKind::CrossingCurve);
        s.set("L", "-3").unwrap();
        let e = s.resolve().unwrap_err();
        assert_eq!(e.key(), Some("L"));
        let mut s = ExperimentSpec::new(ExperimentKind::CrossingCurve);
        s.set("grid", "").unwrap();
        assert_eq!(s.resolve().unwrap_err().key(), Some("grid"));
        let mut s = ExperimentSpec::new(ExperimentKind::GwSurvival);
        s.set("L", "10").unwrap();
        assert_eq!(s.resolve().unwrap_err().key(), Some("L"));
        let mut s = ExperimentSpec::new(ExperimentKind::CrossingCurve);
        assert!(s.set("kind", "gw_survival").is_err());
        assert!(s.set("bogus", "1").is_err());
        assert!(parse_lines("L 5").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(Grid::Count(3).points(0.0, 1.0), vec![0.0, 0.5, 1.0]);
        let g = Grid::Count(3).points(1.0, 4.0);
        assert!((g[1] - 2.0).abs() < 1e-15 && g[2] == 4.0);
        assert_eq!(Grid::Count(1).points(1.0, 4.0), vec![4.0]);
    }
}
