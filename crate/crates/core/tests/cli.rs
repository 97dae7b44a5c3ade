use std::path::PathBuf;
use std::process::Command;

use toric_bott::cli::run;
use toric_bott::fan::Fan;

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-bott")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[&str]) -> toric_bott::cli::Output {
    run(std::iter::once("toric-bott").chain(args.iter().copied()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-bott-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn machine(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "machine"]);
    let out = in_process(&full);
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

#[test]
fn fan_commands() {
    let p2 = scratch("p2.json");
    let p2s = p2.to_str().unwrap();
    let (code, _, _) = bin(&["fan", "builtin", "--name", "projective_space", "--dim", "2", "--out", p2s]);
    assert_eq!(code, 0);
    assert_eq!(Fan::from_json(&std::fs::read_to_string(&p2).unwrap()).unwrap().n_rays(), 3);

    let p3 = scratch("p3.json");
    in_process(&["fan", "builtin", "--name", "projective_space", "--dim", "3", "--out", p3.to_str().unwrap()]);
    let (code, v) = machine(&["fan", "validate", "--fan", p3.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!((v["smooth"].as_bool(), v["complete"].as_bool()), (Some(true), Some(true)));

    let bl = scratch("bl.json");
    let (code, v) = machine(&["fan", "blowup", "--fan", p2s, "--cone", "0,1", "--out", bl.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["n_rays"], 4);
    assert_eq!(v["new_ray"], serde_json::json!([1, 1]));
    assert_eq!(Fan::from_json(&std::fs::read_to_string(&bl).unwrap()).unwrap().n_rays(), 4);

    let product = in_process(&[
        "fan", "builtin", "--name", "product", "--factor", "builtin:projective_space:1", "--factor", "suite:P1",
    ]);
    assert_eq!(product.code, 0);
}

#[test]
fn invalid_and_malformed_fans() {
    let incomplete = scratch("incomplete.json");
    std::fs::write(&incomplete, r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2]]}"#).unwrap();
    assert_eq!(bin(&["fan", "validate", "--fan", incomplete.to_str().unwrap()]).0, 1);
    let garbage = scratch("garbage.json");
    std::fs::write(&garbage, r#"{"dim":2,"rays":[[1,0,0]],"max_cones":[]}"#).unwrap();
    assert_eq!(bin(&["fan", "validate", "--fan", garbage.to_str().unwrap()]).0, 2);
    assert_eq!(bin(&["fan", "validate", "--fan", "/nonexistent/fan.json"]).0, 2);
    assert_eq!(in_process(&["fan", "builtin", "--name", "grassmannian", "--dim", "2"]).code, 2);
    assert_eq!(in_process(&["fan", "blowup", "--fan", "suite:P2", "--cone", "0"]).code, 2);
}

#[test]
fn vanishing_exit_codes() {
    let (code, out, _) = bin(&["vanishing", "check", "--fan", "suite:P2", "--divisor", "2,0,0", "--logset", "0"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, err) = bin(&["vanishing", "check", "--fan", "suite:P2", "--divisor", "0,0,0", "--logset", "0"]);
    assert_eq!(code, 3);
    assert!(err.contains("ample"));
    let (code, v) = machine(&["vanishing", "check", "--fan", "suite:P2", "--divisor", "0,0,0", "--unchecked"]);
    assert_eq!(code, 0);
    assert_eq!(v["dims"][1], serde_json::json!([0, 1, 0]));
    assert_eq!(v["hypothesis"], "infeasible");
    let (code, v) = machine(&["vanishing", "check", "--fan", "suite:F1", "--divisor", r#"{"coeffs":["3/1",1,2,1]}"#, "--logset", "1,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(in_process(&["vanishing", "check", "--fan", "suite:P2", "--divisor", "1,0"]).code, 2);
    assert_eq!(in_process(&["vanishing", "check", "--fan", "suite:P2", "--divisor", "1/2,0,0"]).code, 2);
}

#[test]
fn certificates_round_trip_through_files() {
    let cert = scratch("cert.json");
    let cs = cert.to_str().unwrap();
    let (code, v) = machine(&["vanishing", "certify", "--fan", "suite:F1", "--divisor", "2,1,2,1", "--logset", "1", "--out", cs]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(bin(&["vanishing", "check-cert", "--fan", "suite:F1", "--cert", cs]).0, 0);
    assert_eq!(bin(&["vanishing", "check-cert", "--fan", "suite:F2", "--cert", cs]).0, 1);

    let tampered = std::fs::read_to_string(&cert).unwrap().replacen("\"LeafTrivialLog\"", "\"Bogus\"", 1);
    let bad = scratch("bad.json");
    std::fs::write(&bad, tampered).unwrap();
    assert_eq!(bin(&["vanishing", "check-cert", "--fan", "suite:F1", "--cert", bad.to_str().unwrap()]).0, 2);

    let (code, v) = machine(&["vanishing", "cross-validate", "--fan", "suite:F1", "--divisor", "2,1,2,1", "--logset", "1,3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["agree"], true);
}

#[test]
fn cohomology_and_modes() {
    let (code, v) = machine(&["cohomology", "--fan", "suite:P2", "--spec", r#"{"p":0,"logset":[],"twist":[2,0,0]}"#]);
    assert_eq!((code, v["dims"].clone()), (0, serde_json::json!([6, 0, 0])));
    let (_, v) = machine(&["cohomology", "--fan", "suite:P1", "--spec", r#"{"p":0,"logset":[],"twist":[-2,0]}"#]);
    assert_eq!(v["dims"], serde_json::json!([0, 1]));
    let (_, v) = machine(&["cohomology", "--fan", "suite:P2", "--spec", r#"{"p":2,"logset":[0,1,2],"twist":[0,-1,-1]}"#]);
    assert_eq!(v["dims"], serde_json::json!([0, 0, 0]));

    let spec = r#"{"p":1,"logset":[1],"twist":[1,-2,0,1]}"#;
    let (_, chamber) = machine(&["cohomology", "--fan", "suite:F1", "--spec", spec, "--weights"]);
    let (_, boxed) = machine(&["cohomology", "--fan", "suite:F1", "--spec", spec, "--weights", "--mode", "box", "--box-bound", "4"]);
    assert_eq!(chamber["dims"], boxed["dims"]);
    assert_eq!(chamber["weight_support"], boxed["weight_support"]);

    assert_eq!(in_process(&["cohomology", "--fan", "suite:P1", "--spec", spec, "--mode", "box"]).code, 2);
    assert_eq!(in_process(&["cohomology", "--fan", "suite:P1", "--spec", spec, "--box-bound", "2"]).code, 2);
}

#[test]
fn counterexample_commands() {
    let (code, v) = machine(&["counterexample", "--degree", "8"]);
    assert_eq!((code, v["bott_fails"].as_bool()), (0, Some(true)));
    let (_, v) = machine(&["counterexample", "--degree", "7"]);
    assert_eq!(v["bott_fails"], false);
    let (_, v) = machine(&["counterexample", "--scan", "1..10"]);
    assert_eq!(v["minimal_failing_degree"], 8);
    assert_eq!(v["reports"].as_array().unwrap().len(), 10);
    assert_eq!(bin(&["counterexample", "--degree", "0"]).0, 2);
    assert_eq!(bin(&["counterexample"]).0, 2);
}

#[test]
fn suite_aggregates_codes() {
    let (code, v) = machine(&["suite", "--fans", "P1,P2", "--check", "hodge"]);
    assert_eq!(code, 0);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    // one log set on P^2 fails the chart condition and is counted as skipped
    assert_eq!(runs[1]["exit_codes"], serde_json::json!([{"code": 0, "count": 7}, {"code": 2, "count": 1}]));
    let (code, v) = machine(&["suite", "--fans", "P2", "--check", "euler", "--samples", "30", "--seed", "9", "--threads", "2"]);
    assert_eq!((code, v["seed"].as_u64()), (0, Some(9)));
    assert_eq!(in_process(&["suite", "--fans", "P9"]).code, 2);
}

fn numbers(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars().chain([' ']) {
        if ch.is_ascii_digit() || (ch == '-' && cur.is_empty()) || (ch == '/' && !cur.is_empty()) {
            cur.push(ch);
        } else {
            if cur.chars().any(|c| c.is_ascii_digit()) {
                out.push(cur.clone());
            }
            cur.clear();
        }
    }
    out.sort();
    out
}

#[test]
fn table_and_machine_carry_the_same_numbers() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["fan", "builtin", "--name", "hirzebruch", "--a", "2"],
        vec!["fan", "validate", "--fan", "suite:Bl2P2"],
        vec!["vanishing", "check", "--fan", "suite:P2", "--divisor", "2,0,0", "--logset", "0"],
        vec!["vanishing", "check", "--fan", "suite:P2", "--divisor", "0,0,0", "--unchecked"],
        vec!["vanishing", "certify", "--fan", "suite:F1", "--divisor", "2,1,2,1", "--logset", "1"],
        vec!["vanishing", "cross-validate", "--fan", "suite:P2", "--divisor", "1,1,0"],
        vec!["cohomology", "--fan", "suite:F1", "--spec", r#"{"p":1,"logset":[1],"twist":[1,-2,0,1]}"#, "--weights"],
        vec!["counterexample", "--scan", "1..12"],
        vec!["counterexample", "--degree", "9"],
        vec!["suite", "--fans", "P1", "--samples", "5"],
    ];
    for cmd in commands {
        let table = in_process(&cmd);
        let mut m = cmd.clone();
        m.extend(["--format", "machine"]);
        let json = in_process(&m);
        assert_eq!(table.code, json.code, "{cmd:?}");
        assert!(!table.stdout.is_empty(), "{cmd:?}");
        serde_json::from_str::<serde_json::Value>(&json.stdout).unwrap();
        assert_eq!(numbers(&table.stdout), numbers(&json.stdout), "{cmd:?}\n{}", table.stdout);
    }
}

#[test]
fn help_lists_exit_codes() {
    let (code, out, _) = bin(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Exit codes") && out.contains("infeasible"));
}
