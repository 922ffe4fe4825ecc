use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hyperpack-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperpack")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn analyze_fan_pair() {
    let o = run(&["analyze", &fixture("fan_pair.json")]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["gcd"], 1);
    assert_eq!(v["sigma"], "1/6");
    assert_eq!(v["realisations"], 2);
    let t = run(&["analyze", &fixture("fan_pair.json"), "--format", "table"]);
    assert_eq!(code(&t), 0);
    assert!(String::from_utf8_lossy(&t.stdout).contains("Upper bound"));
}

#[test]
fn cycle_check_exit_codes() {
    let o = run(&["cycle-check", "--k", "3", "--s", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["gcd"], Value::Null);
    assert_eq!(code(&run(&["cycle-check", "--k", "2", "--s", "3"])), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["--bogus"])), 64);
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["analyze"])), 64);
    assert_eq!(code(&run(&["--threads", "0", "cycle-check", "--k", "3", "--s", "2"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn domain_and_io_errors() {
    assert_eq!(code(&run(&["analyze", "/nonexistent/pattern.json"])), 2);
    let dir = scratch("domain");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"k\": 3, \"vertices\": [\"a\"]").unwrap();
    assert_eq!(code(&run(&["analyze", bad.to_str().unwrap()])), 2);
    let host = dir.join("small.json");
    std::fs::write(&host, "{\"complete\": [24, 36, 36]}").unwrap();
    let o = run(&["pack", "--algorithm", "nearly-balanced", "--pattern", &fixture("k112.json"), "--host", host.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn pack_verify_round_trip() {
    let dir = scratch("pack");
    let cert = dir.join("lop.json");
    let args = [
        "pack",
        "--algorithm",
        "lopsided",
        "--pattern",
        &fixture("k122.json"),
        "--host",
        &fixture("host_lopsided.json"),
        "--out",
        cert.to_str().unwrap(),
    ];
    assert_eq!(code(&run(&args)), 0);
    let first = std::fs::read(&cert).unwrap();
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(first, std::fs::read(&cert).unwrap(), "re-running changed the certificate");
    let o = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["perfect"], true);
    assert_eq!(v["copies"], 120);

    // dropping a copy leaves a valid but imperfect packing
    let mut doc = read_json(&cert);
    doc["copies"].as_array_mut().unwrap().pop();
    let short = dir.join("short.json");
    std::fs::write(&short, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["verify", short.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["valid"], true);

    // duplicating a copy makes it invalid
    let mut doc = read_json(&cert);
    let c = doc["copies"][0].clone();
    doc["copies"].as_array_mut().unwrap().push(c);
    std::fs::write(&short, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["verify", short.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["valid"], false);
}

#[test]
fn cover_host_and_search() {
    let dir = scratch("cover");
    let host = dir.join("cover.json");
    let o = run(&["construct", "cover", "--pattern", &fixture("c32.json"), "--n", "8", "--out", host.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side = read_json(&dir.join("cover.obstruction.json"));
    assert_eq!(side["claimed_codegree"], side["min_codegree"]);
    let o = run(&["search", "decide", "--pattern", &fixture("c32.json"), "--host", host.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["verdict"], "none");
}

#[test]
fn search_budget_and_trivial_none() {
    let dir = scratch("unknown");
    let edge = dir.join("edge.json");
    std::fs::write(&edge, r#"{"k": 3, "vertices": ["x", "y", "z"], "edges": [["x", "y", "z"]]}"#).unwrap();
    let host = dir.join("k3_13.json");
    let names: Vec<String> = (1..=13).map(|i| format!("\"{i}\"")).collect();
    let mut edges = Vec::new();
    for a in 1..=13 {
        for b in a + 1..=13 {
            for c in b + 1..=13 {
                edges.push(format!("[\"{a}\",\"{b}\",\"{c}\"]"));
            }
        }
    }
    std::fs::write(&host, format!("{{\"k\":3,\"vertices\":[{}],\"edges\":[{}]}}", names.join(","), edges.join(","))).unwrap();
    // 13 vertices cannot be split into triples, which needs no search nodes
    let o = run(&["search", "decide", "--pattern", edge.to_str().unwrap(), "--host", host.to_str().unwrap(), "--node-budget", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["verdict"], "none");
    let o = run(&["search", "decide", "--pattern", &fixture("k112.json"), "--host", &fixture("k3_12.json"), "--node-budget", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json_out(&o)["verdict"], "unknown");
}

#[test]
fn out_dir_and_stable_bytes() {
    let dir = scratch("outdir");
    let run_in = |name: &str| {
        Command::new(env!("CARGO_BIN_EXE_hyperpack"))
            .env("HYPERPACK_OUT_DIR", &dir)
            .args(["analyze", &fixture("k147.json"), "--out", name])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run_in("a.json")), 0);
    assert_eq!(code(&run_in("b.json")), 0);
    let a = std::fs::read(dir.join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.join("b.json")).unwrap());
    let stdout = run(&["analyze", &fixture("k147.json")]);
    assert_eq!(a, stdout.stdout);
}

#[test]
fn balance_full_report() {
    let o = run(&[
        "balance",
        "--pattern",
        &fixture("k147.json"),
        "--host",
        &fixture("host_k147_blowup.json"),
        "--sa",
        "0-1,2-3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    for s in v["final_sizes"].as_array().unwrap() {
        assert_eq!(s.as_u64().unwrap() % 108, 0);
    }
}

#[test]
fn lattice_commands() {
    for p in ["2", "3", "5"] {
        let o = run(&["lattice", "increment", "--p", p]);
        assert_eq!(code(&o), 0);
        assert_eq!(json_out(&o)["holds"], true);
    }
    let o = run(&["lattice", "p1", "--p", "2", "--graph", &fixture("c32.json")]);
    assert_eq!(json_out(&o)["holds"], false);
}
