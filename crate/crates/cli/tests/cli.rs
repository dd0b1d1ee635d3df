use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_matdisc"));
    c.env_remove("MATDISC_WORKERS");
    c
}

fn tmp(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn gen_then_solve_round_trip() {
    let inst = tmp("rt.mdi.json");
    let report = tmp("rt.json");
    let o = run(&["gen", "--family", "rank1-lower", "--n", "8", "--out", inst.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let loaded = matdisc::instance::load(&inst).unwrap();
    assert_eq!((loaded.n, loaded.m), (8, 8));

    let o = run(&["solve", "--instance", inst.to_str().unwrap(), "--brute-check", "--seed", "3", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let x: Vec<f64> = serde_json::from_value(v["x"].clone()).unwrap();
    assert_eq!(x.len(), 8);
    assert!(x.iter().all(|s| s.abs() == 1.0));
    let value = v["value"].as_f64().unwrap();
    let exact = matdisc::bounds::eval_discrepancy(&loaded, &x, loaded.q).unwrap();
    assert!((value - exact).abs() < 1e-12);
    assert!(v["brute_force"]["value"].as_f64().unwrap() <= value + 1e-12);
}

#[test]
fn over_bound_exits_two() {
    let o = run(&["solve", "--family", "coordinate", "--n", "4", "--c-max", "1e-6", "--out", tmp("ob.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_config_exits_one() {
    let cfg = tmp("bad.json");
    std::fs::write(&cfg, r#"{"subcommand": "bounds", "bogus": 1}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(1));

    std::fs::write(&cfg, r#"{"bounds": {"n": [4], "nope": true}}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "bounds"]).status.code(), Some(1));

    std::fs::write(&cfg, r#"{"subcommand": "measure"}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "bounds"]).status.code(), Some(1));

    assert_eq!(run(&["solve", "--family", "no-such-family", "--n", "4"]).status.code(), Some(1));
}

#[test]
fn flags_override_config() {
    let cfg = tmp("merge.json");
    let out = tmp("merge.csv");
    std::fs::write(&cfg, r#"{"subcommand": "bounds", "seed": 5, "bounds": {"n": [4, 16], "m": [4]}}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "bounds", "--m", "16"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    let nm: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(nm, [("4".into(), "16".into()), ("16".into(), "16".into())]);

    let mut echo = out.into_os_string();
    echo.push(".config.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(echo).unwrap()).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["command"]["bounds"]["m"], serde_json::json!([16]));
}

#[test]
fn bounds_table_values() {
    let o = run(&["bounds", "--n", "16", "--m", "16"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let header: Vec<String> = csv::Reader::from_reader(text.as_bytes()).headers().unwrap().iter().map(String::from).collect();
    let rows = csv_rows(&text);
    let col = |name: &str| rows[0][header.iter().position(|h| h == name).unwrap()].parse::<f64>().unwrap();
    assert_eq!(col("spencer"), (16.0 * 2f64.ln()).sqrt());
    assert_eq!(col("matrix_spencer_conj"), 4.0);
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--family", "random", "--n", "8,12", "--r", "1", "--seeds", "2", "--seed", "11", "--rule", "lowrank"];
    let a = run(&args);
    let b = run(&[&args[..], &["--workers", "1"]].concat());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let rows = csv_rows(&String::from_utf8(a.stdout).unwrap());
    assert_eq!(rows.len(), 4);
}

#[test]
fn netcheck_and_export() {
    let out = tmp("net.csv");
    let export = tmp("net.json");
    let o = run(&[
        "netcheck", "--m", "4", "--h", "1", "--n", "4", "--trials", "50", "--lemma-trials", "50",
        "--export", export.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
    let starts = matdisc::entropy_net::starts_from_json(&std::fs::read_to_string(&export).unwrap()).unwrap();
    assert_eq!(starts.len(), 165);

    let o = run(&["mdcheck", "--m", "4", "--n", "4", "--runs", "5", "--starts", export.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
