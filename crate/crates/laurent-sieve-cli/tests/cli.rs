//! End-to-end behavior of the `laurent-sieve` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_laurent-sieve"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("LAURENT_SIEVE_THREADS", t),
        None => cmd.env_remove("LAURENT_SIEVE_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_flag_is_usage_error_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = bin(&["cf", "--bogus", "--out", path_str(&out)], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn eps_out_of_range_is_usage_error() {
    for eps in ["0", "0.34", "-1"] {
        let o = bin(&["k-verify", "--eps", eps], None);
        assert_eq!(o.status.code(), Some(2), "eps={eps}");
    }
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = bin(&["cf"], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn k_verify_example_passes_with_witness_table() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (dir.path().join("k.json"), dir.path().join("k.csv"));
    let o = bin(&["k-verify", "--q", "7", "--alpha", "golden", "--eps", "0.1", "--degf", "3..5", "--out", path_str(&out), "--csv", path_str(&csv)], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = report(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["pass"], true);
    let names: Vec<&str> = doc["records"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.iter().any(|n| n.starts_with("k/conv-")));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["N", "pi", "norm_dist_exponent", "exponent_ratio"]);
    let rows = rdr.records().count();
    assert!(rows > 0);
    assert_eq!(rows, doc["witnesses"].as_array().unwrap().len());
}

#[test]
fn lfunc_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.json");
    let o = bin(&["lfunc", "--q", "7", "--f", "T^2+1", "--out", path_str(&out)], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = report(&out);
    assert!(doc["records"].as_array().unwrap().iter().any(|r| r["name"].as_str().unwrap().contains("chi=")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# cf run\nq = 5\nalpha = \"lacunary\"\ndegf = 1..12\n").unwrap();
    let out = dir.path().join("c.json");
    let o = bin(&["cf", "--config", path_str(&conf), "--q", "3", "--out", path_str(&out)], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cmd = &report(&out)["command"];
    assert_eq!(cmd["q"], "3");
    assert_eq!(cmd["alpha"], "lacunary");
    assert_eq!(cmd["degf"], "1..12");
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(bin(&["cf", "--config", path_str(&conf)], None).status.code(), Some(2));
}

#[test]
fn reports_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["suite", "--only", "1,2,7,14"],
        vec!["k-verify", "--degf", "3..4", "--n", "4..6"],
        vec!["quad-verify", "--qh", "4"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for t in ["1", "2"] {
            let (out, csv) = (dir.path().join(format!("{i}-{t}.json")), dir.path().join(format!("{i}-{t}.csv")));
            let mut a = args.clone();
            a.extend(["--out", path_str(&out), "--csv", path_str(&csv)]);
            let o = bin(&a, Some(t));
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            bytes.push((std::fs::read(&out).unwrap(), std::fs::read(&csv).unwrap()));
        }
        assert!(bytes[0] == bytes[1], "{args:?} differs between 1 and 2 threads");
    }
}

#[test]
fn timings_are_opt_in() {
    let o = bin(&["cf"], None);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["records"].as_array().unwrap().iter().all(|r| r["runtime"].is_null()));
    let o = bin(&["cf", "--timings"], None);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["records"].as_array().unwrap().iter().all(|r| r["runtime"].is_number()));
}

#[test]
fn empty_selection_fails() {
    let o = bin(&["chars", "--degf", "9..9", "--gate", "10"], None);
    assert_ne!(o.status.code(), Some(0));
}
