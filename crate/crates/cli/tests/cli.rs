use std::process::{Command, Output};

use serde_json::Value;

fn khf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khf"))
        .args(args)
        .env_remove("KHF_CROSSING_CAP")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = khf(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";

#[test]
fn json_schema() {
    let (v, code) = json(&["kh", "--pd", TREFOIL]);
    assert_eq!(code, 0);
    for k in ["tool_version", "command", "inputs", "results", "verdict"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(v["command"], "kh");
    assert_eq!(v["verdict"], "ok");
    assert!(v["results"][0]["summary"].as_str().unwrap().ends_with("total 6"));
}

#[test]
fn reduced_unknot() {
    let (v, _) = json(&["reduced", "--fixture", "unknot", "--basepoint", "1"]);
    assert_eq!(v["results"][0]["summary"], "{(0,0):1} total 1");
}

#[test]
fn bar_natan_rank_of_hopf() {
    let (v, code) = json(&["bn", "--fixture", "hopf"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn spectral_pages_listed() {
    let (v, _) = json(&["ss", "--fixture", "trefoil", "--theory", "kh", "--pages", "3"]);
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    // pages stop once the sequence has collapsed, here at E2
    assert_eq!(names, ["E0", "E1", "E2", "limit"]);
    assert_eq!(v["results"][3]["data"][0], 2);
}

#[test]
fn verify_passes_and_exits_zero() {
    for check in ["splitting", "basepoint", "skein", "twin-arrows", "relations", "kunneth"] {
        let (v, code) = json(&["verify", check, "--fixture", "figure-eight"]);
        assert_eq!((code, v["verdict"].as_str().unwrap()), (0, "pass"), "{check}");
    }
}

#[test]
fn kunneth_with_a_second_summand() {
    let (v, code) = json(&["verify", "kunneth", "--fixture", "trefoil", "--with", "figure-eight"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["data"]["pass"], true);
}

#[test]
fn mutation_from_explicit_tangle() {
    let (v, code) = json(&[
        "verify", "mutation", "--fixture", "kt", "--tangle", "1,12,10,15", "--crossings", "0,1,2,3,4", "--axis", "z",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
}

#[test]
fn mutate_prints_a_diagram() {
    let out = khf(&["mutate", "--fixture", "kt", "--tangle", "1,12,10,15", "--crossings", "0,1,2,3,4", "--axis", "x"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] bracket"));
}

#[test]
fn plugin_input() {
    let asset = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/assets/twin_arrows_hopf.toml");
    let (v, code) = json(&["verify", "twin-arrows", "--plugin", asset]);
    assert_eq!(code, 0, "{v}");
    let (v, _) = json(&["ss", "--plugin", asset, "--theory", "plugin"]);
    assert_eq!(v["inputs"]["theory"], "hopf-diagonal");
}

#[test]
fn failing_check_exits_one() {
    let text = "diagram = \"X(4,1,3,2) X(2,3,1,4)\"\nrelation = \"X^2\"\nbasepoints = [4]\n\
[[face]]\nsource = \"00\"\ntarget = \"11\"\nrows = [\"0000\", \"0100\", \"0000\", \"0000\"]\n";
    let path = std::env::temp_dir().join(format!("khf-cli-test-{}.toml", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let (v, code) = json(&["verify", "twin-arrows", "--plugin", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn errors_and_usage() {
    assert_eq!(khf(&["kh", "--pd", "X(1,2"]).status.code(), Some(3));
    assert_eq!(khf(&["kh", "--fixture", "nope"]).status.code(), Some(3));
    assert_eq!(khf(&["kh"]).status.code(), Some(2));
    assert_eq!(khf(&["verify", "mutation", "--fixture", "trefoil"]).status.code(), Some(3));
}

#[test]
fn cap_from_flag_and_environment() {
    assert_eq!(khf(&["kh", "--fixture", "trefoil", "--cap", "2"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_khf"))
        .args(["kh", "--fixture", "trefoil"])
        .env("KHF_CROSSING_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
