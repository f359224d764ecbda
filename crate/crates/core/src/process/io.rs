//! Plain-text stick samples.
//!
//! ```text
//! # hypersticks stick-sample v1
//! # lambda=0.5 L=2 window_radius=3 seed=7 max_expected=5e7 region=window realized_count=2
//! # center_rho center_theta phi L
//! 1.2345678901234567e0 3.0000000000000000e-1 1.5000000000000000e0 2.0000000000000000e0
//! ```

use std::io::{BufRead, Write};

use super::{ProcessConfig, ProcessError, SampleRegion, StickSample};
use crate::geometry::{make_stick, HPoint};

const MAGIC: &str = "# hypersticks stick-sample v1";

fn region_text(r: &SampleRegion) -> String {
    match r {
        SampleRegion::Window => "window".into(),
        SampleRegion::MeetingBall => "meeting_ball".into(),
        SampleRegion::Restricted {
            rho_max,
            ray_angle,
            full_geodesic,
        } => format!(
            "restricted:{}:{}:{}",
            fmt17(*rho_max),
            fmt17(*ray_angle),
            full_geodesic
        ),
    }
}

fn parse_region(s: &str) -> Result<SampleRegion, ProcessError> {
    let bad = || ProcessError::Parse(format!("unknown region {s:?}"));
    match s {
        "window" => Ok(SampleRegion::Window),
        "meeting_ball" => Ok(SampleRegion::MeetingBall),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 4 || parts[0] != "restricted" {
                return Err(bad());
            }
            Ok(SampleRegion::Restricted {
                rho_max: parts[1].parse().map_err(|_| bad())?,
                ray_angle: parts[2].parse().map_err(|_| bad())?,
                full_geodesic: parts[3].parse().map_err(|_| bad())?,
            })
        }
    }
}

/// 17 significant digits.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sample<W: Write>(sample: &StickSample, mut w: W) -> Result<(), ProcessError> {
    let io = |e: std::io::Error| ProcessError::Io(e.to_string());
    let c = &sample.config;
    writeln!(w, "{MAGIC}").map_err(io)?;
    writeln!(
        w,
        "# lambda={} L={} window_radius={} seed={} max_expected={} region={} realized_count={}",
        fmt17(c.lambda),
        fmt17(c.length),
        fmt17(c.window_radius),
        c.seed,
        fmt17(c.max_expected),
        region_text(&sample.region),
        sample.realized_count
    )
    .map_err(io)?;
    writeln!(w, "# center_rho center_theta phi L").map_err(io)?;
    for s in &sample.sticks {
        writeln!(
            w,
            "{} {} {} {}",
            fmt17(s.center().rho()),
            fmt17(s.center().theta()),
            fmt17(s.phi()),
            fmt17(s.length())
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn read_sample<R: BufRead>(r: R) -> Result<StickSample, ProcessError> {
    let perr = |m: String| ProcessError::Parse(m);
    let mut lines = r.lines();
    let mut next = || -> Result<Option<String>, ProcessError> {
        lines
            .next()
            .transpose()
            .map_err(|e| ProcessError::Io(e.to_string()))
    };
    let magic = next()?.ok_or_else(|| perr("empty input".into()))?;
    if magic.trim() != MAGIC {
        return Err(perr(format!("bad header line {magic:?}")));
    }
    let meta = next()?.ok_or_else(|| perr("missing metadata line".into()))?;
    let meta = meta
        .strip_prefix('#')
        .ok_or_else(|| perr("metadata line must start with #".into()))?;
    let mut cfg = ProcessConfig {
        lambda: f64::NAN,
        length: f64::NAN,
        window_radius: f64::NAN,
        seed: 0,
        max_expected: super::DEFAULT_MAX_EXPECTED,
    };
    let mut region = SampleRegion::Window;
    let mut declared = None;
    for kv in meta.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| perr(format!("bad metadata field {kv:?}")))?;
        let num = |v: &str| v.parse::<f64>().map_err(|_| perr(format!("bad value for {k}: {v}")));
        match k {
            "lambda" => cfg.lambda = num(v)?,
            "L" => cfg.length = num(v)?,
            "window_radius" => cfg.window_radius = num(v)?,
            "max_expected" => cfg.max_expected = num(v)?,
            "seed" => cfg.seed = v.parse().map_err(|_| perr(format!("bad seed {v}")))?,
            "region" => region = parse_region(v)?,
            "realized_count" => {
                declared = Some(
                    v.parse::<usize>()
                        .map_err(|_| perr(format!("bad count {v}")))?,
                )
            }
            _ => return Err(perr(format!("unknown metadata key {k}"))),
        }
    }
    cfg.validate().map_err(|e| perr(e.to_string()))?;
    let mut sticks = Vec::new();
    while let Some(line) = next()? {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<f64> = t
            .split_whitespace()
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| perr(format!("bad stick row {t:?}")))?;
        if f.len() != 4 {
            return Err(perr(format!("stick row needs 4 columns: {t:?}")));
        }
        let center = HPoint::try_new(f[0], f[1]).map_err(|e| perr(e.to_string()))?;
        sticks.push(make_stick(center, f[2], f[3]).map_err(|e| perr(e.to_string()))?);
    }
    let sample = StickSample::new(cfg, region, sticks);
    if let Some(n) = declared {
        if n != sample.realized_count {
            return Err(perr(format!(
                "header declares {n} sticks, found {}",
                sample.realized_count
            )));
        }
    }
    Ok(sample)
}
