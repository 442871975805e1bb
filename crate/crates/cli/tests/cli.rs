use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zoo_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zoo-lab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("ZOO_LAB_OUT")
        .output()
        .expect("spawn zoo-lab")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const SAMPLE: &[&str] = &["sample", "--graph", "tree(3)", "--law", "worm(power(2.5))", "--lambda", "0.4", "--volume-cap", "50", "--radius", "4", "--seed", "9"];

#[test]
fn sample_is_byte_identical_across_runs_and_threads() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(zoo_lab(a.path(), SAMPLE).status.success());
    let mut two = SAMPLE.to_vec();
    two.extend(["--threads", "2"]);
    assert!(zoo_lab(b.path(), &two).status.success());
    let ca = fs::read(a.path().join("occupied.csv")).unwrap();
    assert_eq!(ca, fs::read(b.path().join("occupied.csv")).unwrap());
    assert!(ca.starts_with(b"vertex,multiplicity\n"));
    let m = manifest(a.path());
    assert_eq!(m["command"], "sample");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["volume_cap"], "50");
}

#[test]
fn sweep_csv_repeats_under_the_same_seed() {
    let args = ["sweep", "--graph", "tree(3)", "--law", "singleton", "--volume-cap", "1", "--grid", "0.5:1.0:3", "--trials", "40", "--radius", "5", "--seed", "3"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(zoo_lab(a.path(), &args).status.success());
    assert!(zoo_lab(b.path(), &args).status.success());
    let s = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(s, fs::read_to_string(b.path().join("sweep.csv")).unwrap());
    assert_eq!(s.lines().next(), Some("lambda,crossing_prob,ci_lo,ci_hi,trials"));
    assert_eq!(s.lines().count(), 4);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# growth\nb = 40\nc = 10\ntrials = 200\nseed = 4\n").unwrap();
    let out = dir.path().join("out");
    let o = zoo_lab(&out, &["growth-harness", "--config", cfg.to_str().unwrap(), "--model", "deterministic"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("growth.json")).unwrap()).unwrap();
    assert_eq!(g["record"]["survival"]["value"], 1.0);
    assert_eq!(manifest(&out)["seed"], 4);
}

#[test]
fn constants_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = zoo_lab(dir.path(), &["constants", "--graph", "tree(4)"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degree"], 4);
    assert_eq!(v["cheeger"], 2.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zoo_lab(dir.path(), &["no-such-command"]).status.code(), Some(2));
    let bad = zoo_lab(dir.path(), &["growth-harness", "--b", "10", "--c", "6"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
    let missing = zoo_lab(dir.path(), &["sample", "--graph", "tree(3)"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = dir.path().join("x.cfg");
    fs::write(&unknown, "graph = tree(3)\nbogus = 1\n").unwrap();
    let o = zoo_lab(dir.path(), &["constants", "--config", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2: unknown key `bogus`"));
    let huge = zoo_lab(dir.path(), &["sample", "--graph", "tree(5)", "--law", "singleton", "--lambda", "1", "--volume-cap", "1", "--radius", "40"]);
    assert_eq!(huge.status.code(), Some(3));
}
