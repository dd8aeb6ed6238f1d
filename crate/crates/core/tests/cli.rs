use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::process::Command;

use tro::harness::read_records;

fn tro(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tro")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn run_in(dir: &Path, name: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    let (code, err) = tro(&full);
    assert!(code == 0, "tro {args:?} exited {code}: {err}");
    (code, std::fs::read(out.join("records.csv")).unwrap())
}

#[test]
fn sweep_is_byte_identical_across_runs_and_jobs() {
    let d = tempfile::tempdir().unwrap();
    let (_, a) = run_in(d.path(), "a", &["sweep", "--seed", "5"]);
    let (_, b) = run_in(d.path(), "b", &["sweep", "--seed", "5", "--jobs", "1"]);
    let (_, c) = run_in(d.path(), "c", &["sweep", "--seed", "5", "--jobs", "4"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (_, other) = run_in(d.path(), "d", &["sweep", "--seed", "6"]);
    assert_ne!(a, other);
}

#[test]
fn sweep_has_one_value_per_set_and_theta() {
    let d = tempfile::tempdir().unwrap();
    run_in(d.path(), "s", &["sweep"]);
    let recs = read_records(&d.path().join("s/records.csv")).unwrap();
    let values: Vec<_> = recs.iter().filter(|r| r.metric == "value").collect();
    assert_eq!(values.len(), 4 * 101);
    let cells: HashSet<_> = values.iter().map(|r| (r.set.clone(), r.theta.map(f64::to_bits))).collect();
    assert_eq!(cells.len(), 4 * 101);
    assert!(recs.iter().all(|r| r.metric != "error"));
}

#[test]
fn sets_flag_restricts_output() {
    let d = tempfile::tempdir().unwrap();
    run_in(d.path(), "s", &["sweep", "--sets", "a,c", "--problem", "portfolio"]);
    let recs = read_records(&d.path().join("s/records.csv")).unwrap();
    let sets: HashSet<_> = recs.iter().map(|r| r.set.as_str()).collect();
    assert_eq!(sets, HashSet::from(["a", "c"]));
    assert!(recs.iter().all(|r| r.problem == "portfolio"));
}

#[test]
fn bias_aggregates_recompute_from_raw_values() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("small.cfg");
    std::fs::write(&cfg, "replications = 12\nthetas = 0:0.25:1\nbootstrap = 200\n").unwrap();
    run_in(d.path(), "b", &["bias", "--config", cfg.to_str().unwrap(), "--sets", "a,b"]);
    let recs = read_records(&d.path().join("b/records.csv")).unwrap();
    let mut raw: HashMap<(String, u64), Vec<f64>> = HashMap::new();
    let mut seeds = HashSet::new();
    for r in recs.iter().filter(|r| r.metric == "value") {
        raw.entry((r.set.clone(), r.theta.unwrap().to_bits())).or_default().push(r.value);
        seeds.insert((r.rep.unwrap(), r.seed.unwrap()));
    }
    assert_eq!(raw.len(), 2 * 5);
    // one sample per replication, shared across sets and θ
    let by_rep: HashMap<_, _> = seeds.iter().cloned().collect();
    assert_eq!(by_rep.len(), 12);
    assert_eq!(by_rep.values().collect::<HashSet<_>>().len(), 12);
    for r in recs.iter().filter(|r| r.rep.is_none() && (r.metric == "mean" || r.metric == "std")) {
        let v = &raw[&(r.set.clone(), r.theta.unwrap().to_bits())];
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let want = if r.metric == "mean" {
            m
        } else {
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        };
        assert!((r.value - want).abs() <= 1e-12 * want.abs().max(1.0), "{} {:?}", r.metric, r.theta);
    }
}

#[test]
fn bad_config_exits_two_with_line_number() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.cfg");
    std::fs::write(&cfg, "seed = 3\n\n[set]\nid = a\nkind = ellipse\n").unwrap();
    let (code, err) = tro(&["sweep", "--config", cfg.to_str().unwrap(), "--out", d.path().join("o").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(tro(&["frobnicate"]).0, 2);
    assert_eq!(tro(&["sweep", "--sets", "z"]).0, 2);
    assert_eq!(tro(&["--help"]).0, 0);
}

#[test]
fn manifest_records_schema_and_config() {
    let d = tempfile::tempdir().unwrap();
    run_in(d.path(), "p", &["props"]);
    let text = std::fs::read_to_string(d.path().join("p/manifest.txt")).unwrap();
    assert!(text.contains("schema = experiment,problem,set,N,theta,rep,seed,metric,value"));
    assert!(text.contains("check_failures = 0"));
}
