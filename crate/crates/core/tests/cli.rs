use std::process::Command;

use serde_json::Value;

const P2: &str = r#"{"n":2,"p":{"0":0,"1":0,"2":0,"3":2}}"#;
const P2SYS: &str = r#"{"elements":["1","2"],"rows":[{"coeffs":[1,0],"rhs":0,"kind":"geq"},{"coeffs":[0,1],"rhs":0,"kind":"geq"},{"coeffs":[1,1],"rhs":2,"kind":"eq"}]}"#;
const D2: &str = r#"{"nodes":["s","t"],"arcs":[["s","t"],["s","t"]],"m":{"s":-2,"t":2}}"#;

fn dctk(args: &[&str], threads: &str) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dctk")).args(args).env("DCTK_THREADS", threads).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run(args: &[&str]) -> (i32, Value) {
    let (code, text) = dctk(args, "1");
    let v = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(text.trim()).unwrap() };
    (code, v)
}

#[test]
fn conjugate_of_square() {
    let (code, text) = dctk(&["conjugate", "--phi", r#"{"form":"quadratic","a":1}"#, "--ell", "3"], "1");
    assert_eq!((code, text.trim()), (0, r#"{"value":2}"#));
}

#[test]
fn minimize_mconvex_p2() {
    let dir = std::env::temp_dir().join(format!("dctk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (p, sq) = (dir.join("p2.json"), dir.join("sq.json"));
    std::fs::write(&p, P2).unwrap();
    std::fs::write(&sq, r#"{"square_sum":2}"#).unwrap();
    let (code, v) = run(&["minimize", "mconvex", "--instance", p.to_str().unwrap(), "--phi", sq.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 2);
    assert_eq!(v["witness"], serde_json::json!([1, 1]));
    assert_eq!(v["dual"]["w_star"], serde_json::json!([3, 3]));
}

#[test]
fn infeasible_flow_reports_hoffman_set() {
    let inst = r#"{"nodes":["s","t"],"arcs":[["s","t"]],"m":{"s":1,"t":-1}}"#;
    let (code, v) = run(&["minimize", "flow", "--instance", inst]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "INFEASIBLE");
    assert_eq!(v["witness_set"], serde_json::json!(["t"]));
}

#[test]
fn flow_certificates() {
    let (code, v) = run(&["minimize", "flow", "--instance", D2]);
    assert_eq!((code, v["value"].clone(), v["verified"].clone()), (0, 2.into(), true.into()));
    let (code, _) = run(&["certify", "flow", "--instance", D2, "--flow", "1,1", "--potential", "0,2"]);
    assert_eq!(code, 0);
    let (code, v) = run(&["certify", "flow", "--instance", D2, "--flow", "2,0", "--potential", "0,2"]);
    assert_eq!((code, v["status"].clone()), (5, "CRITERIA_VIOLATED".into()));
}

#[test]
fn certify_mconvex_violation() {
    let (code, _) = run(&["certify", "mconvex", "--instance", P2, "--point", "1,1", "--weight", "3,3"]);
    assert_eq!(code, 0);
    let (code, v) = run(&["certify", "mconvex", "--instance", P2, "--point", "0,2", "--weight", "3,3"]);
    assert_eq!(code, 5);
    assert!(v["error"].as_str().unwrap().contains("element 1"));
}

#[test]
fn boxtdi_minimize_and_probe() {
    let (code, v) = run(&["minimize", "boxtdi", "--system", P2SYS, "--window", "0..2"]);
    assert_eq!((code, v["value"].clone(), v["verified"].clone()), (0, 2.into(), true.into()));
    let (code, _) = run(&["certify", "boxtdi", "--system", P2SYS, "--point", "1,1", "--multipliers", "0,0,3"]);
    assert_eq!(code, 0);
    let (code, v) = run(&["probe", "boxtdi", "--system", P2SYS, "--window", "0..4", "--dilation", "2"]);
    assert_eq!((code, v["box_integer"].clone()), (0, true.into()));
}

#[test]
fn inverse_worked_example() {
    let (code, v) = run(&["inverse", "--system", P2SYS, "--target", "2,0", "--deviation", r#"{"l1":[3,1]}"#]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["value"], 2);
    assert_eq!(v["report"]["dual_value"], 2);
}

#[test]
fn m2_split() {
    let inst = format!(r#"{{"p1":{P2},"p2":{{"n":2,"p":[0,1,0,2]}}}}"#);
    let (code, v) = run(&["minimize", "m2", "--instance", &inst, "--w-window", "±3"]);
    assert_eq!((code, v["value"].clone(), v["report"]["dual_value"].clone()), (0, 2.into(), 2.into()));
}

#[test]
fn invalid_input_exits_4() {
    assert_eq!(run(&["conjugate", "--phi", r#"{"form":"nope"}"#, "--ell", "1"]).0, 4);
    assert_eq!(run(&["minimize"]).0, 4);
    assert_eq!(run(&["minimize", "mconvex", "--instance", "/nonexistent/p.json"]).0, 4);
    assert_eq!(dctk(&["selftest"], "0").0, 4);
}

#[test]
fn selftest_is_deterministic_across_thread_counts() {
    let (code, a) = dctk(&["selftest"], "1");
    assert_eq!(code, 0, "{a}");
    let (_, b) = dctk(&["selftest"], "4");
    assert_eq!(a, b);
    let (_, one) = dctk(&["selftest", "--seed", "7"], "1");
    let (_, again) = dctk(&["selftest", "--seed", "7"], "1");
    assert_eq!(one, again);
}

#[test]
fn json_out_writes_the_same_text() {
    let path = std::env::temp_dir().join(format!("dctk-out-{}.json", std::process::id()));
    let (_, text) = dctk(&["conjugate", "--phi", r#"{"form":"quadratic","a":2}"#, "--ell", "5", "--json-out", path.to_str().unwrap()], "1");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}
