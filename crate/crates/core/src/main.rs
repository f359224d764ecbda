use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hypersticks::experiments::{
    check_writable, csv_row, gw_tree_seed, load, parse_lines, persist, run_experiment,
    scaling_fit, ExperimentError, ExperimentKind, ExperimentSpec, ResultRecord, CSV_COLUMNS,
};
use hypersticks::percolation::{
    build_clusters, gw_embedding_simulate, two_arm_count, write_labeling, write_tree,
    EmbeddingStart,
};
use hypersticks::process::{
    embedding_reference_lambda, read_sample, sample_meeting_ball, sample_window, write_sample,
    ProcessConfig, ProcessError, StickSample, DEFAULT_MAX_EXPECTED,
};
use hypersticks::rng::fresh_seed;

const CAP_ENV: &str = "HYPERSTICKS_MAX_STICKS";

#[derive(Parser)]
#[command(
    name = "hypersticks",
    version,
    about = "Poisson sticks in the hyperbolic plane: samplers, clusters and Monte Carlo experiments",
    after_help = "Flags mirror spec-file keys (--r-in is r_in). A --spec file holds key=value \
                  lines; flags given on the command line win. HYPERSTICKS_MAX_STICKS overrides \
                  the bound on the expected stick count of a single sampler call."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Stick length(s), comma separated
    #[arg(long = "L", allow_hyphen_values = true)]
    l: Option<String>,
    /// Intensity
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long = "lambda-min", allow_hyphen_values = true)]
    lambda_min: Option<String>,
    #[arg(long = "lambda-max", allow_hyphen_values = true)]
    lambda_max: Option<String>,
    /// Grid point count, or comma-separated intensities
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Outer radius (window radius for sample/clusters; radii list for vacant-decay)
    #[arg(long = "R", allow_hyphen_values = true)]
    r: Option<String>,
    /// Inner radius of the crossing annulus
    #[arg(long = "r-in", allow_hyphen_values = true)]
    r_in: Option<String>,
    /// Tree depth
    #[arg(long, allow_hyphen_values = true)]
    depth: Option<String>,
    /// Replicate count
    #[arg(long, allow_hyphen_values = true)]
    reps: Option<String>,
    /// Run seed; drawn fresh and printed when omitted
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Target number of ray hits for verify-measure
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Crossing frequency level for lambda-c
    #[arg(long = "target-p", allow_hyphen_values = true)]
    target_p: Option<String>,
    /// Two-arm frequency level for the uniqueness proxy
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<String>,
    /// Ray angle for verify-measure
    #[arg(long = "ray-angle", allow_hyphen_values = true)]
    ray_angle: Option<String>,
    /// Run the uniform-angle negative control in verify-measure
    #[arg(long)]
    control: Option<String>,
    /// Offspring means for subcritical
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Output path (CSV and JSONL for experiments)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing output files
    #[arg(long)]
    force: bool,
    /// Spec file of key=value lines
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Worker threads
    #[arg(long, allow_hyphen_values = true)]
    threads: Option<String>,
}

impl Common {
    fn flag_values(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("L", &self.l),
            ("lambda", &self.lambda),
            ("lambda_min", &self.lambda_min),
            ("lambda_max", &self.lambda_max),
            ("grid", &self.grid),
            ("R", &self.r),
            ("r_in", &self.r_in),
            ("depth", &self.depth),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("n", &self.n),
            ("target_p", &self.target_p),
            ("threshold", &self.threshold),
            ("ray_angle", &self.ray_angle),
            ("control", &self.control),
            ("m", &self.m),
        ]
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one realization and write it as text
    Sample {
        #[command(flatten)]
        c: Common,
        /// Keep the sticks meeting B(o, R) instead of those centred in B(o, R + L/2)
        #[arg(long)]
        meeting_ball: bool,
    },
    /// Label the clusters of a sample (read from INPUT or drawn from the flags)
    Clusters {
        #[command(flatten)]
        c: Common,
        input: Option<PathBuf>,
    },
    /// Check sampled hitting triples against the closed-form measure
    VerifyMeasure(Common),
    /// Crossing frequency over an intensity grid
    Crossing(Common),
    /// Bisection estimate of the finite-radius percolation threshold
    LambdaC(Common),
    /// Frequency of two crossing clusters and the uniqueness proxy
    TwoArm(Common),
    /// Survival of the half-plane embedding tree against its Galton–Watson law
    GwSurvival {
        #[command(flatten)]
        c: Common,
        /// Also write tree 0 of the first length as a parent-pointer list
        #[arg(long = "tree-out")]
        tree_out: Option<PathBuf>,
    },
    /// Frequency of a vacant axis segment against exp(−(2/π)λLR)
    VacantDecay(Common),
    /// Cluster size of the rooted stick against the dominating tree
    Subcritical(Common),
    /// Log-log slope of threshold estimates against L
    FitScaling {
        #[command(flatten)]
        c: Common,
        /// Result files: JSONL records or CSV projections
        inputs: Vec<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn flag_of(key: &str) -> String {
    match key {
        "max_expected" => CAP_ENV.to_string(),
        "spec" => "--spec".to_string(),
        k => format!("--{}", k.replace('_', "-")),
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match &e {
            ExperimentError::Invalid { key, message } => {
                Failure::Usage(format!("{}: {message}", flag_of(key)))
            }
            ExperimentError::Process(ProcessError::InvalidParameter { name, .. }) => {
                Failure::Usage(format!("{}: {e}", flag_of(name)))
            }
            _ if e.is_validation() => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Spec-file entries overlaid with command-line flags.
fn gather(c: &Common) -> Result<BTreeMap<String, String>, Failure> {
    let mut m = BTreeMap::new();
    if let Some(p) = &c.spec {
        let text = fs::read_to_string(p)
            .map_err(|e| Failure::Usage(format!("--spec: cannot read {}: {e}", p.display())))?;
        for (k, v) in parse_lines(&text)? {
            m.insert(k, v);
        }
    }
    for (k, v) in c.flag_values() {
        if let Some(v) = v {
            m.insert(k.to_string(), v.clone());
        }
    }
    if let Ok(v) = std::env::var(CAP_ENV) {
        m.insert("max_expected".into(), v);
    }
    Ok(m)
}

fn threads(c: &Common) -> Result<Option<usize>, Failure> {
    c.threads
        .as_deref()
        .map(|t| match t.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Usage(format!("--threads: must be a positive integer, got {t:?}"))),
        })
        .transpose()
}

fn out_path(c: &Common, entries: &BTreeMap<String, String>) -> Option<PathBuf> {
    c.out.clone().or_else(|| entries.get("out").map(PathBuf::from))
}

fn seed_note(entries: &BTreeMap<String, String>, seed: u64) {
    if !entries.contains_key("seed") {
        eprintln!("note: no --seed given, drew seed {seed}");
    }
}

fn run_kind(kind: ExperimentKind, c: &Common) -> Result<ResultRecord, Failure> {
    let entries = gather(c)?;
    let mut spec = ExperimentSpec::new(kind);
    for (k, v) in &entries {
        spec.set(k, v)?;
    }
    let spec = spec.resolve()?;
    seed_note(&entries, spec.seed());
    let out = out_path(c, &entries);
    if let Some(o) = &out {
        let (csv, jsonl) = hypersticks::experiments::output_paths(o);
        check_writable(&csv, c.force)?;
        check_writable(&jsonl, c.force)?;
    }
    let t = threads(c)?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let head = ResultRecord::new(spec.clone()).header_lines();
    for l in &head {
        let _ = writeln!(w, "{l}");
    }
    let _ = w.flush();
    let rec = run_experiment(&spec, t)?;
    let _ = writeln!(w, "{CSV_COLUMNS}");
    for p in &rec.points {
        let _ = writeln!(w, "{}", csv_row(p));
    }
    for th in &rec.thresholds {
        let _ = writeln!(
            w,
            "# threshold L={:?} lambda_hat={:?} stderr={} scaled={:?} scaled_stderr={} reps={}",
            th.length,
            th.lambda,
            th.stderr.map_or("".into(), |s| format!("{s:?}")),
            th.scaled,
            th.scaled_stderr.map_or("".into(), |s| format!("{s:?}")),
            th.reps
        );
    }
    for (k, v) in &rec.summary {
        let _ = writeln!(w, "# {k}={v}");
    }
    let failed: Vec<&str> = rec.points.iter().filter_map(|p| p.error.as_deref()).collect();
    if let Some(e) = failed.first() {
        eprintln!("warning: {} point(s) failed: {e}", failed.len());
    }
    let _ = writeln!(w, "# wall_time_s={:.3}", rec.wall_time_s);
    if let Some(o) = &out {
        let (csv, jsonl) = persist(&rec, o, c.force)?;
        eprintln!("wrote {} and {}", csv.display(), jsonl.display());
    }
    Ok(rec)
}

fn get<T: std::str::FromStr>(
    m: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, Failure> {
    match m.get(key) {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{}: cannot parse {v:?}", flag_of(key)))),
    }
}

fn single_f64(m: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, Failure> {
    if m.get(key).is_some_and(|v| v.contains(',')) {
        return Err(Failure::Usage(format!("{}: takes a single value", flag_of(key))));
    }
    get(m, key, default)
}

fn process_config(m: &BTreeMap<String, String>) -> Result<ProcessConfig, Failure> {
    let lambda = single_f64(m, "lambda", 0.5)?;
    let l = single_f64(m, "L", 5.0)?;
    let r = single_f64(m, "R", 3.0)?;
    let seed = match m.get("seed") {
        Some(_) => get(m, "seed", 0u64)?,
        None => fresh_seed(),
    };
    let cap = get(m, "max_expected", DEFAULT_MAX_EXPECTED)?;
    let name = |n: &str| match n {
        "window radius" => "--R".to_string(),
        "stick cap" => CAP_ENV.to_string(),
        n => flag_of(n),
    };
    let c = ProcessConfig::new(lambda, l, r, seed).map_err(|e| match &e {
        ProcessError::InvalidParameter { name: n, .. } => Failure::Usage(format!("{}: {e}", name(n))),
        _ => Failure::Usage(e.to_string()),
    })?;
    let c = c.with_cap(cap);
    c.validate().map_err(|e| Failure::Usage(format!("{CAP_ENV}: {e}")))?;
    seed_note(m, seed);
    Ok(c)
}

fn draw(c: &ProcessConfig, meeting_ball: bool) -> Result<StickSample, Failure> {
    let s = if meeting_ball {
        sample_meeting_ball(c)
    } else {
        sample_window(c)
    };
    s.map_err(|e| Failure::Runtime(e.to_string()))
}

fn writer(out: Option<&Path>, force: bool) -> Result<Box<dyn Write>, Failure> {
    match out {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            check_writable(p, force)?;
            let f = File::create(p).map_err(|e| io_fail(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn cmd_sample(c: &Common, meeting_ball: bool) -> Result<(), Failure> {
    let m = gather(c)?;
    let cfg = process_config(&m)?;
    let out = out_path(c, &m);
    if let Some(p) = &out {
        check_writable(p, c.force)?;
    }
    let s = draw(&cfg, meeting_ball)?;
    let mut w = writer(out.as_deref(), c.force)?;
    write_sample(&s, &mut w).map_err(|e| Failure::Runtime(e.to_string()))?;
    w.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
    if let Some(p) = &out {
        println!(
            "# sample lambda={} L={} R={} seed={} sticks={} -> {}",
            cfg.lambda,
            cfg.length,
            cfg.window_radius,
            cfg.seed,
            s.len(),
            p.display()
        );
    }
    Ok(())
}

fn cmd_clusters(c: &Common, input: Option<&Path>) -> Result<(), Failure> {
    let m = gather(c)?;
    let sample = match input {
        Some(p) => {
            let f = File::open(p).map_err(|e| io_fail(p, e))?;
            read_sample(BufReader::new(f)).map_err(|e| io_fail(p, e))?
        }
        None => draw(&process_config(&m)?, false)?,
    };
    let out = out_path(c, &m);
    if let Some(p) = &out {
        check_writable(p, c.force)?;
    }
    let r = sample.config.window_radius;
    let r_in = single_f64(&m, "r_in", 1.0f64.min(r / 2.0))?;
    if !(r_in > 0.0 && r_in < r) {
        return Err(Failure::Usage(format!("--r-in: must lie in (0, R = {r}), got {r_in}")));
    }
    let lab = build_clusters(&sample);
    let sizes = lab.sizes();
    let mut w = writer(out.as_deref(), c.force)?;
    let cfg = &sample.config;
    let io = |e: io::Error| Failure::Runtime(e.to_string());
    writeln!(
        w,
        "# hypersticks clusters lambda={} L={} R={} seed={} sticks={}",
        cfg.lambda,
        cfg.length,
        r,
        cfg.seed,
        sample.len()
    )
    .map_err(io)?;
    writeln!(
        w,
        "# clusters={} largest={} crossing_clusters(r_in={r_in})={}",
        lab.cluster_count,
        sizes.iter().max().copied().unwrap_or(0),
        two_arm_count(&sample, &lab, r_in, r)
    )
    .map_err(io)?;
    write_labeling(&lab, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

fn threshold_points(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        let rec = load(path)?;
        return Ok(rec.thresholds.iter().map(|t| (t.length, t.lambda)).collect());
    }
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| io_fail(path, e))?;
    let headers = rd.headers().map_err(|e| io_fail(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Usage(format!("{}: no {name} column", path.display())))
    };
    let (cl, cx) = (col("L")?, col("lambda")?);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| io_fail(path, e))?;
        let num = |i: usize| {
            row.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Failure::Usage(format!("{}: bad row {row:?}", path.display())))
        };
        out.push((num(cl)?, num(cx)?));
    }
    Ok(out)
}

fn cmd_fit(c: &Common, inputs: &[PathBuf]) -> Result<(), Failure> {
    if inputs.is_empty() {
        return Err(Failure::Usage("inputs: give at least one result file".into()));
    }
    let m = gather(c)?;
    let out = out_path(c, &m);
    let mut pts = Vec::new();
    for p in inputs {
        pts.extend(threshold_points(p)?);
    }
    let fit = scaling_fit(&pts)?;
    let mut w = writer(out.as_deref(), c.force)?;
    let io = |e: io::Error| Failure::Runtime(e.to_string());
    let names: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    writeln!(w, "# hypersticks fit_scaling inputs={}", names.join(",")).map_err(io)?;
    writeln!(w, "L,lambda").map_err(io)?;
    for (l, x) in &pts {
        writeln!(w, "{l:?},{x:?}").map_err(io)?;
    }
    writeln!(w, "slope,{:?}", fit.slope).map_err(io)?;
    writeln!(w, "stderr,{:?}", fit.stderr).map_err(io)?;
    w.flush().map_err(io)
}

fn cmd_verify(c: &Common) -> Result<(), Failure> {
    let rec = run_kind(ExperimentKind::MeasureVerify, c)?;
    println!("box  rho             phi             count      expected    z");
    for (k, p) in rec.points.iter().enumerate() {
        let b = &p.extra["box"];
        println!(
            "{k:<4} [{:.3},{:.3}]  [{:.3},{:.3}]  {:<10} {:<11.1} {:+.3}",
            b[0][0].as_f64().unwrap_or(0.0),
            b[0][1].as_f64().unwrap_or(0.0),
            b[1][0].as_f64().unwrap_or(0.0),
            b[1][1].as_f64().unwrap_or(0.0),
            p.estimate.unwrap_or(0.0),
            p.extra["expected"].as_f64().unwrap_or(0.0),
            p.extra["z"].as_f64().unwrap_or(0.0)
        );
    }
    let pass = rec.summary["pass"].as_bool().unwrap_or(false);
    println!(
        "{} chi2={:.3} p={:.4}",
        if pass { "PASS" } else { "FAIL" },
        rec.summary["chi2"],
        rec.summary["p_value"].as_f64().unwrap_or(0.0)
    );
    let control_ok = match rec.summary.get("control_fails") {
        Some(v) => {
            let rejected = v.as_bool().unwrap_or(false);
            println!(
                "negative control (uniform angle): {} chi2={:.3}",
                if rejected { "rejected as expected" } else { "NOT rejected" },
                rec.summary["control_chi2"]
            );
            rejected
        }
        None => true,
    };
    if pass && control_ok {
        Ok(())
    } else {
        Err(Failure::Runtime("measure verification failed".into()))
    }
}

fn cmd_gw(c: &Common, tree_out: Option<&Path>) -> Result<(), Failure> {
    if let Some(p) = tree_out {
        check_writable(p, c.force)?;
    }
    let rec = run_kind(ExperimentKind::GwSurvival, c)?;
    if let Some(p) = tree_out {
        let s = &rec.spec;
        let l = s.lengths[0];
        let lambda = s.lambda.unwrap_or_else(|| embedding_reference_lambda(l));
        let tree = gw_embedding_simulate(
            lambda,
            l,
            s.depth.unwrap_or(10),
            gw_tree_seed(s.seed(), l, 0),
            EmbeddingStart::Stick,
        )
        .map_err(|e| Failure::Runtime(e.to_string()))?;
        let mut w = writer(Some(p), c.force)?;
        write_tree(&tree, &mut w).map_err(|e| io_fail(p, e))?;
        w.flush().map_err(|e| io_fail(p, e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Sample { c, meeting_ball } => cmd_sample(c, *meeting_ball),
        Cmd::Clusters { c, input } => cmd_clusters(c, input.as_deref()),
        Cmd::VerifyMeasure(c) => cmd_verify(c),
        Cmd::Crossing(c) => run_kind(ExperimentKind::CrossingCurve, c).map(|_| ()),
        Cmd::LambdaC(c) => run_kind(ExperimentKind::LambdaCBisect, c).map(|_| ()),
        Cmd::TwoArm(c) => run_kind(ExperimentKind::TwoArmCurve, c).map(|_| ()),
        Cmd::GwSurvival { c, tree_out } => cmd_gw(c, tree_out.as_deref()),
        Cmd::VacantDecay(c) => run_kind(ExperimentKind::VacantDecay, c).map(|_| ()),
        Cmd::Subcritical(c) => run_kind(ExperimentKind::SubcriticalDomination, c).map(|_| ()),
        Cmd::FitScaling { c, inputs } => cmd_fit(c, inputs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
