use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn arv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arv")).args(args).output().expect("run arv")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const PHI1: &str = "F(x <= 5 && G[0,1](x <= 3 && y > 6))\n";
const TRACE: &str = "x,y\n4,2\n5,3\n2,7\n3,8\n";

#[test]
fn monitor_final_json() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "phi.stl", PHI1);
    let bad = write(d.path(), "bad.csv", "x,y\n9,9\n");
    let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&bad), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["rho"], -6.0);
    assert_eq!(v["satisfied"], false);
    assert_eq!(v["d_phi"], 6.0);
}

#[test]
fn infinities_are_strings_in_json() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "u.stl", "G(a >= 5 && a < 5)\n");
    let t = write(d.path(), "t.csv", "a\n1\n2\n");
    let run = |semiring| {
        let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&t), "--json", "--semiring", semiring]);
        serde_json::from_str::<serde_json::Value>(stdout(&o).trim()).unwrap()
    };
    let v = run("minmax");
    assert_eq!(v["rho"], "-inf");
    assert_eq!(v["d_phi"], "inf");
    // boolean zero is 1
    let v = run("boolean");
    assert_eq!(v["rho"], "-inf");
    assert_eq!(v["d_phi"], 1.0);
}

#[test]
fn prefix_series_round_trips() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "phi.stl", PHI1);
    let t = write(d.path(), "t.csv", TRACE);
    let out = d.path().join("series.csv");
    for semiring in ["boolean", "minmax", "tropical"] {
        let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&t), "--semiring", semiring, "--prefix-series", s(&out), "--json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let last: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        let mut r = csv::Reader::from_path(&out).unwrap();
        assert_eq!(r.headers().unwrap(), vec!["t", "rho", "satisfied"]);
        let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 4);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[0].parse::<usize>().unwrap(), i);
            let rho: f64 = row[1].parse().unwrap();
            let sat: bool = row[2].parse().unwrap();
            // a satisfied prefix never has negative robustness
            assert!(!sat || rho >= 0.0);
        }
        let final_rho: f64 = rows[3][1].parse().unwrap();
        assert_eq!(serde_json::json!(final_rho), last["rho"]);
        assert_eq!(rows[3][2].parse::<bool>().unwrap(), last["satisfied"].as_bool().unwrap());
    }
}

#[test]
fn prefix_series_to_stdout() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "phi.stl", PHI1);
    let t = write(d.path(), "t.csv", TRACE);
    let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&t), "--mode", "prefix-series"]);
    assert_eq!(stdout(&o), "t,rho,satisfied\n0,-4,false\n1,-3,false\n2,1,true\n3,0,true\n");
}

#[test]
fn batch_writes_one_file_per_trace() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "phi.stl", PHI1);
    let a = write(d.path(), "a.csv", TRACE);
    let b = write(d.path(), "b.csv", "x,y\n9,9\n");
    let out = d.path().join("series");
    for mode in [&[][..], &["--sequential"][..]] {
        let mut args = vec!["monitor", "--spec", s(&spec), "--trace", s(&a), "--trace", s(&b), "--prefix-series", s(&out)];
        args.extend_from_slice(mode);
        let o = arv(&args);
        assert!(o.status.success());
        let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
        assert!(lines[0].ends_with("a.csv: rho = 0 (satisfied), d_phi = 0, d_not_phi = 0"), "{lines:?}");
        assert!(lines[1].contains("rho = -6 (violated)"));
        assert_eq!(fs::read_to_string(out.join("b.csv")).unwrap(), "t,rho,satisfied\n0,-6,false\n");
        assert!(out.join("a.csv").exists());
    }
}

#[test]
fn sre_spec() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "e.sre", "#lang sre\nT ; <x <= 3 && y >= 6>[1,1] ; T\n");
    let t = write(d.path(), "t.csv", TRACE);
    let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&t)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(satisfied)"));
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let t = write(d.path(), "t.csv", TRACE);
    let cases = [("F (x <= ", 2), ("F z <= 1", 3), ("F Y x <= 1", 4), ("G(x <= 1 S y >= 2)", 4)];
    for (src, code) in cases {
        let spec = write(d.path(), "s.stl", src);
        let o = arv(&["monitor", "--spec", s(&spec), "--trace", s(&t)]);
        assert_eq!(o.status.code(), Some(code), "{src}");
    }
    let spec = write(d.path(), "p.stl", "F Y x <= 1");
    let o = arv(&["translate", "--spec", s(&spec)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("operator `Y`"));

    let spec = write(d.path(), "ok.stl", "F x <= 1");
    let ragged = write(d.path(), "r.csv", "x,y\n1\n");
    assert_eq!(arv(&["monitor", "--spec", s(&spec), "--trace", s(&ragged)]).status.code(), Some(2));
    let missing = d.path().join("missing.csv");
    assert_eq!(arv(&["monitor", "--spec", s(&spec), "--trace", s(&missing)]).status.code(), Some(1));
}

#[test]
fn translate_writes_dot_and_json() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "phi.stl", PHI1);
    let dot = d.path().join("a.dot");
    let json = d.path().join("a.json");
    let o = arv(&["translate", "--spec", s(&spec), "--dot", s(&dot), "--json", s(&json)]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph automaton {"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["locations"], 3);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("3 locations, 4 transitions"));
}

#[test]
fn vpd_minimized_and_raw() {
    let p = "x <= 3 && x <= 5";
    assert_eq!(stdout(&arv(&["vpd", "--valuation", "x=6", "--predicate", p])), "3\n");
    assert_eq!(stdout(&arv(&["vpd", "--valuation", "x=6", "--predicate", p, "--raw"])), "4\n");
    assert_eq!(stdout(&arv(&["vpd", "--valuation", "x=6", "--predicate", p, "--semiring", "minmax"])), "3\n");
    assert_eq!(arv(&["vpd", "--valuation", "x=6", "--predicate", "z <= 1"]).status.code(), Some(3));
    assert_eq!(arv(&["vpd", "--valuation", "x6", "--predicate", p]).status.code(), Some(2));
}

#[test]
fn fixtures_all_pass() {
    let o = arv(&["fixtures"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 45);
    assert!(!out.contains("FAIL"));
}

#[test]
fn oracle_small_run() {
    let o = arv(&["oracle", "--shrink", "50", "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("total mismatches: 0\n"));
}
