//! Result records and their persistence: JSON lines with a schema header,
//! plus a CSV projection for plotting.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{ExperimentError, ExperimentSpec};

pub const SCHEMA: &str = "hypersticks-results/1";
pub const CSV_COLUMNS: &str = "L,lambda,R,estimate,stderr,reps,seed";

/// One estimate at a `(L, λ, R)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultPoint {
    #[serde(rename = "L")]
    pub length: f64,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub extra: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultPoint {
    pub fn new(length: f64, lambda: f64, radius: Option<f64>, reps: usize, seed: u64) -> ResultPoint {
        ResultPoint {
            length,
            lambda,
            radius,
            estimate: None,
            stderr: None,
            reps,
            seed,
            extra: Map::new(),
            error: None,
        }
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> ResultPoint {
        self.extra.insert(key.to_string(), v.into());
        self
    }
}

/// A threshold estimate for one stick length; `scaled` is `λ̂·L²` for the
/// percolation threshold and `λ̂·L` for the uniqueness proxy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    #[serde(rename = "L")]
    pub length: f64,
    pub lambda: f64,
    pub stderr: Option<f64>,
    pub scaled: f64,
    pub scaled_stderr: Option<f64>,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub spec: ExperimentSpec,
    pub points: Vec<ResultPoint>,
    pub thresholds: Vec<Threshold>,
    pub summary: Map<String, Value>,
    pub wall_time_s: f64,
    pub version: String,
}

impl ResultRecord {
    pub fn new(spec: ExperimentSpec) -> ResultRecord {
        ResultRecord {
            spec,
            points: Vec::new(),
            thresholds: Vec::new(),
            summary: Map::new(),
            wall_time_s: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// JSON lines: header, points, thresholds, summary.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = json!({
            "schema": SCHEMA,
            "version": self.version,
            "kind": self.spec.kind,
            "spec": self.spec,
            "wall_time_s": self.wall_time_s,
        });
        writeln!(w, "{header}")?;
        for p in &self.points {
            writeln!(w, "{}", json!({ "point": p }))?;
        }
        for t in &self.thresholds {
            writeln!(w, "{}", json!({ "threshold": t }))?;
        }
        writeln!(w, "{}", json!({ "summary": self.summary }))
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<ResultRecord, ExperimentError> {
        let bad = |m: String| ExperimentError::Io(format!("malformed result file: {m}"));
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| bad("empty".into()))?
            .map_err(|e| ExperimentError::Io(e.to_string()))?;
        let header: Value = serde_json::from_str(&first).map_err(|e| bad(e.to_string()))?;
        if header["schema"] != SCHEMA {
            return Err(bad(format!("unsupported schema {}", header["schema"])));
        }
        let spec: ExperimentSpec =
            serde_json::from_value(header["spec"].clone()).map_err(|e| bad(e.to_string()))?;
        let mut rec = ResultRecord::new(spec);
        rec.version = header["version"].as_str().unwrap_or_default().to_string();
        rec.wall_time_s = header["wall_time_s"].as_f64().unwrap_or(0.0);
        for line in lines {
            let line = line.map_err(|e| ExperimentError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut v: Map<String, Value> =
                serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            if let Some(p) = v.remove("point") {
                rec.points.push(serde_json::from_value(p).map_err(|e| bad(e.to_string()))?);
            } else if let Some(t) = v.remove("threshold") {
                rec.thresholds.push(serde_json::from_value(t).map_err(|e| bad(e.to_string()))?);
            } else if let Some(Value::Object(s)) = v.remove("summary") {
                rec.summary = s;
            } else {
                return Err(bad(line));
            }
        }
        Ok(rec)
    }

    /// Comment lines echoing the resolved spec.
    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![format!("# hypersticks {} v{} {}", self.spec.kind, self.version, SCHEMA)];
        out.extend(self.spec.echo_lines().into_iter().map(|l| format!("# {l}")));
        out
    }

    /// CSV projection: one row per point, headed by the spec echo.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for l in self.header_lines() {
            writeln!(w, "{l}")?;
        }
        writeln!(w, "{CSV_COLUMNS}")?;
        for p in &self.points {
            writeln!(w, "{}", csv_row(p))?;
        }
        Ok(())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:?}"))
}

pub fn csv_row(p: &ResultPoint) -> String {
    format!(
        "{:?},{:?},{},{},{},{},{}",
        p.length,
        p.lambda,
        opt(p.radius),
        opt(p.estimate),
        opt(p.stderr),
        p.reps,
        p.seed
    )
}

/// The CSV and JSONL paths for an `--out` value: a `.jsonl` path pairs with
/// the same stem `.csv`, anything else pairs with `<path>.jsonl` stem.
pub fn output_paths(out: &Path) -> (PathBuf, PathBuf) {
    if out.extension().is_some_and(|e| e == "jsonl") {
        (out.with_extension("csv"), out.to_path_buf())
    } else if out.extension().is_some_and(|e| e == "csv") {
        (out.to_path_buf(), out.with_extension("jsonl"))
    } else {
        let mut j = out.as_os_str().to_owned();
        j.push(".jsonl");
        (out.to_path_buf(), PathBuf::from(j))
    }
}

/// Fails if `path` exists and `force` is off.
pub fn check_writable(path: &Path, force: bool) -> Result<(), ExperimentError> {
    if !force && path.exists() {
        return Err(ExperimentError::invalid(
            "out",
            format!("{} exists; pass --force to overwrite", path.display()),
        ));
    }
    Ok(())
}

fn create(path: &Path, force: bool) -> Result<BufWriter<File>, ExperimentError> {
    let mut o = OpenOptions::new();
    o.write(true);
    if force {
        o.create(true).truncate(true);
    } else {
        o.create_new(true);
    }
    o.open(path)
        .map(BufWriter::new)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
}

/// Writes both files of a record.
pub fn persist(record: &ResultRecord, out: &Path, force: bool) -> Result<(PathBuf, PathBuf), ExperimentError> {
    let (csv, jsonl) = output_paths(out);
    check_writable(&csv, force)?;
    check_writable(&jsonl, force)?;
    let io = |e: std::io::Error| ExperimentError::Io(e.to_string());
    let mut w = create(&jsonl, force)?;
    record.write_jsonl(&mut w).map_err(io)?;
    w.flush().map_err(io)?;
    let mut w = create(&csv, force)?;
    record.write_csv(&mut w).map_err(io)?;
    w.flush().map_err(io)?;
    Ok((csv, jsonl))
}

pub fn load(path: &Path) -> Result<ResultRecord, ExperimentError> {
    let f = File::open(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    ResultRecord::read_jsonl(BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;

    fn sample_record() -> ResultRecord {
        let mut s = ExperimentSpec::new(ExperimentKind::MeasureVerify);
        s.seed = Some(3);
        let s = s.resolve().unwrap();
        let mut r = ResultRecord::new(s);
        let mut p = ResultPoint::new(5.0, 0.5, Some(1.0), 10, 3).with("z", 0.1 + 0.2);
        p.estimate = Some(1.0 / 3.0);
        r.points.push(p);
        r.points.push(ResultPoint::new(5.0, 0.5, None, 0, 3));
        r.thresholds.push(Threshold {
            length: 6.0,
            lambda: 0.3,
            stderr: Some(0.01),
            scaled: 10.8,
            scaled_stderr: None,
            reps: 4,
        });
        r.summary.insert("pass".into(), true.into());
        r.wall_time_s = 1.25;
        r
    }

    #[test]
    fn jsonl_round_trip_is_lossless() {
        let r = sample_record();
        let mut buf = Vec::new();
        r.write_jsonl(&mut buf).unwrap();
        let back = ResultRecord::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_projection() {
        let r = sample_record();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], CSV_COLUMNS);
        assert_eq!(rows[1], "5.0,0.5,1.0,0.3333333333333333,,10,3");
        assert_eq!(rows[2], "5.0,0.5,,,,0,3");
        assert!(text.contains("# seed=3"));
    }

    #[test]
    fn refuses_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let r = sample_record();
        persist(&r, &out, false).unwrap();
        assert!(dir.path().join("run.jsonl").exists());
        let e = persist(&r, &out, false).unwrap_err();
        assert_eq!(e.key(), Some("out"));
        persist(&r, &out, true).unwrap();
        assert_eq!(load(&dir.path().join("run.jsonl")).unwrap(), r);
    }
}
