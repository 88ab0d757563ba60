use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sht"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["gen", "--out", s(&out)];
    args.extend_from_slice(extra);
    let res = sht(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

fn report_without_wall(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("wall_ms");
    v
}

#[test]
fn gen_writes_k_nonzeros() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "x.txt", &["--n", "8", "--k", "3", "--model", "exact", "--mag-max", "10", "--seed", "1"]);
    let text = fs::read_to_string(f).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "8");
    assert_eq!(lines[1], "sparse");
    assert_eq!(lines.len() - 2, 3);
    for l in &lines[2..] {
        let v: f64 = l.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(v.abs() >= 1.0 && v.abs() <= 10.0 && v.fract() == 0.0);
    }
}

#[test]
fn gen_is_deterministic_and_zero_noise_is_exact() {
    let dir = TempDir::new().unwrap();
    let base = ["--n", "10", "--k", "4", "--seed", "7"];
    let a = gen(&dir, "a.txt", &base);
    let b = gen(&dir, "b.txt", &base);
    let mut noisy = base.to_vec();
    noisy.extend_from_slice(&["--model", "noisy", "--noise-l1", "0"]);
    let c = gen(&dir, "c.txt", &noisy);
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    assert_eq!(a, fs::read(c).unwrap());
}

#[test]
fn invalid_flags_exit_one() {
    let res = sht(&["gen", "--n", "8"]);
    assert_eq!(code(&res), 1);
    assert!(!res.stderr.is_empty());
    let res = sht(&["gen", "--n", "8", "--k", "2", "--model", "weird", "--out", "/dev/null"]);
    assert_eq!(code(&res), 1);
    let res = sht(&["gen", "--n", "0", "--k", "2", "--out", "/dev/null"]);
    assert_eq!(code(&res), 1);
}

#[test]
fn transform_matches_definition() {
    let dir = TempDir::new().unwrap();
    let x = path(&dir, "x.txt");
    fs::write(&x, "2\nsparse\n0 1\n3 2\n").unwrap();
    let out = path(&dir, "xh.txt");
    let res = sht(&["transform", "--input", s(&x), "--scale", "integer", "--out", s(&out)]);
    assert_eq!(code(&res), 0);
    // x̂(j) = x(0) + (−1)^{popcount(3 & j)}·2
    assert_eq!(fs::read_to_string(out).unwrap(), "2\ndense\n3\n-1\n-1\n3\n");
}

#[test]
fn exact_certified_recovery_reports_exact() {
    let dir = TempDir::new().unwrap();
    let x = gen(&dir, "x.txt", &["--n", "10", "--k", "4", "--seed", "3"]);
    let rep = path(&dir, "report.json");
    let res = sht(&[
        "recover", "--input", s(&x), "--k", "4", "--condenser", "certified", "--mode", "det",
        "--mag-max", "1000", "--report", s(&rep),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["ratio"], 0.0);
    assert_eq!(v["command"], "recover");
    assert_eq!(v["config"]["condenser"], "certified");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let text = fs::read_to_string(&rep).unwrap();
    let pos: Vec<usize> = ["\"n\"", "\"k\"", "\"mode\"", "\"queries\"", "\"exact\"", "\"wall_ms\"", "\"command\"", "\"config\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
}

#[test]
fn lhl_with_det_is_rejected() {
    let dir = TempDir::new().unwrap();
    let x = gen(&dir, "x.txt", &["--n", "10", "--k", "2", "--seed", "3"]);
    let res = sht(&["recover", "--input", s(&x), "--k", "2", "--condenser", "lhl", "--eps", "0.5", "--mode", "det"]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("2^n"));
}

#[test]
fn randomized_run_repeats() {
    let dir = TempDir::new().unwrap();
    let x = gen(&dir, "x.txt", &["--n", "10", "--k", "2", "--seed", "5"]);
    let args = [
        "recover", "--input", s(&x), "--k", "2", "--condenser", "lhl", "--eps", "0.5", "--mode",
        "rand", "--q", "16", "--seed", "11", "--mag-max", "1000",
    ];
    let a = sht(&args);
    let b = sht(&args);
    assert_eq!(code(&a), code(&b));
    assert_eq!(
        report_without_wall(&String::from_utf8_lossy(&a.stdout)),
        report_without_wall(&String::from_utf8_lossy(&b.stdout))
    );
    let v = report_without_wall(&String::from_utf8_lossy(&a.stdout));
    assert_eq!(v["mode"], "rand");
    assert_eq!(v["config"]["q"], 16);
}

#[test]
fn truncated_run_breaches_guarantee() {
    let dir = TempDir::new().unwrap();
    let x = gen(&dir, "x.txt", &["--n", "10", "--k", "16", "--seed", "9"]);
    let desc = path(&dir, "c.txt");
    let res = sht(&["condenser", "--n", "10", "--k", "1", "--out", s(&desc)]);
    assert_eq!(code(&res), 0);
    // one iteration on a family sized for k = 1 cannot reach the exact answer
    let res = sht(&["recover", "--input", s(&x), "--k", "16", "--descriptor", s(&desc), "--s0", "1", "--mag-max", "1000"]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stdout));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["exact"], false);
    assert_eq!(v["ratio"], serde_json::Value::Null);
}

#[test]
fn sketch_from_descriptor() {
    let dir = TempDir::new().unwrap();
    let x = gen(&dir, "x.txt", &["--n", "8", "--k", "2", "--seed", "1"]);
    let desc = path(&dir, "c.txt");
    let res = sht(&["condenser", "--n", "8", "--k", "2", "--family-seed", "4", "--out", s(&desc)]);
    assert_eq!(code(&res), 0);
    assert!(String::from_utf8_lossy(&res.stdout).starts_with("certified n=8 r=5 D=8"));
    let out = path(&dir, "y.txt");
    let res = sht(&["sketch", "--input", s(&x), "--descriptor", s(&desc), "--out", s(&out)]);
    assert_eq!(code(&res), 0);
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("8 5 8 1\n"));
    assert_eq!(text.lines().count(), 1 + 8 * 9 * 32);
}

#[test]
fn verify_certified_self_check_passes() {
    let res = sht(&["verify", "--condenser", "certified", "--n", "8", "--k", "1", "--family-seed", "3", "--mode", "sampled"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stdout));
    assert!(String::from_utf8_lossy(&res.stdout).contains("PASS"));
}

#[test]
fn verify_lhl_universality() {
    let res = sht(&["verify", "--condenser", "lhl", "--check", "universality", "--n", "6", "--r", "3"]);
    assert_eq!(code(&res), 0);
    let out = String::from_utf8_lossy(&res.stdout);
    assert!(out.contains("max collision prob 0.125"), "{out}");
    assert!(out.contains("PASS"));
}

#[test]
fn verify_duplicated_seeds_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let desc = path(&dir, "dup.txt");
    // both seeds drop bit 3, so {0, 8} shares every neighbor
    fs::write(&desc, "certified 4 3 2\n1 0.25 0\n1 2 4\n1 2 4\n").unwrap();
    let res = sht(&["verify", "--descriptor", s(&desc), "--k", "1", "--max-set", "2", "--eps", "0.25"]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));
    let out = String::from_utf8_lossy(&res.stdout);
    assert!(out.contains("FAIL") && out.contains("witness {"), "{out}");
}

#[test]
fn verify_budget_exceeded_exits_one() {
    let res = sht(&["verify", "--condenser", "certified", "--n", "12", "--k", "2", "--budget", "1000"]);
    assert_eq!(code(&res), 1);
}

#[test]
fn bench_counts_match_plan() {
    let res = sht(&["bench", "--sweep", "n", "--from", "10", "--to", "12", "--k", "2", "--repeats", "2"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let out = String::from_utf8_lossy(&res.stdout);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row[4], row[5]);
        let (q, bound): (u64, u64) = (row[4].parse().unwrap(), row[6].parse().unwrap());
        assert!(q <= bound);
    }
}
