use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypersticks"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPERSTICKS_MAX_STICKS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn negative_length_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["crossing", "--L", "-3"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("--L"), "{msg}");
}

#[test]
fn bad_numbers_name_their_flag() {
    let d = tempfile::tempdir().unwrap();
    for (flag, value) in [("--reps", "x"), ("--lambda", "-1"), ("--r-in", "9"), ("--threads", "0")] {
        let o = run(d.path(), &["crossing", "--L", "4", "--R", "3", "--grid", "2", flag, value]);
        assert_eq!(o.status.code(), Some(2), "{flag}");
        assert!(stderr(&o).contains(flag), "{flag}: {}", stderr(&o));
    }
}

#[test]
fn unknown_subcommand_exits_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["bogus"]).status.code(), Some(2));
}

#[test]
fn missing_seed_is_drawn_and_echoed() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["crossing", "--L", "4", "--R", "3", "--grid", "2", "--reps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("# seed=")).expect("seed echoed");
    let seed: u64 = line["# seed=".len()..].parse().unwrap();
    assert!(stderr(&o).contains(&seed.to_string()));
}

#[test]
fn refuses_to_overwrite_without_force() {
    let d = tempfile::tempdir().unwrap();
    let args = ["crossing", "--L", "4", "--R", "3", "--grid", "2", "--reps", "3", "--seed", "9", "--out", "r.jsonl"];
    assert_eq!(run(d.path(), &args).status.code(), Some(0));
    let first = std::fs::read(d.path().join("r.csv")).unwrap();
    let o = run(d.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--out"));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(run(d.path(), &forced).status.code(), Some(0));
    assert_eq!(std::fs::read(d.path().join("r.csv")).unwrap(), first);
    let jsonl = std::fs::read_to_string(d.path().join("r.jsonl")).unwrap();
    assert!(jsonl.lines().next().unwrap().contains("hypersticks-results/1"));
}

#[test]
fn spec_file_composes_with_flags() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("s.txt"), "L=4\nR=3\nreps=5\ngrid=2\nseed=1\n").unwrap();
    let o = run(d.path(), &["crossing", "--spec", "s.txt", "--reps", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# reps=7"));
    assert!(out.contains("# seed=1"));
    assert!(out.contains("# L=4.0"));
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("4.0,")).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",7,1")));

    std::fs::write(d.path().join("bad.txt"), "L=4\nwidth=3\n").unwrap();
    let o = run(d.path(), &["crossing", "--spec", "bad.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_respects_the_cap_override() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hypersticks"))
        .args(["sample", "--L", "2", "--lambda", "1", "--R", "5", "--seed", "1"])
        .current_dir(d.path())
        .env("HYPERSTICKS_MAX_STICKS", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = run(d.path(), &["sample", "--L", "2", "--lambda", "0.1", "--R", "2", "--seed", "1", "--out", "s.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.path().join("s.txt")).unwrap();
    let sample = hypersticks::process::read_sample(text.as_bytes()).unwrap();
    assert_eq!(sample.config.seed, 1);
}

#[test]
fn fit_scaling_prints_slope_and_stderr() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("t.csv"), "L,lambda\n4,0.5\n8,0.125\n16,0.03125\n").unwrap();
    let o = run(d.path(), &["fit-scaling", "t.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let tail: Vec<&str> = out.lines().rev().take(2).collect();
    assert_eq!(tail[1], "slope,-2.0");
    assert!(tail[0].starts_with("stderr,"));

    std::fs::write(d.path().join("two.csv"), "L,lambda\n4,0.5\n8,0.125\n").unwrap();
    assert_eq!(run(d.path(), &["fit-scaling", "two.csv"]).status.code(), Some(2));
}

#[test]
fn verify_measure_passes_at_small_n() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["verify-measure", "--n", "5000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}
