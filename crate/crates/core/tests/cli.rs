use std::process::{Command, Output};

use serde_json::Value;

fn genjacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genjacobi")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn identity15_report_golden() {
    let out = genjacobi(&["--deterministic", "verify", "identity15", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = r#"{
  "tool": "genjacobi 0.1.0",
  "seed": 0,
  "scenario_digest": "97ed62629647dec401d790eb5c56cc0e2246424f5edd29a6a40343b73759ce49",
  "results": [
    {
      "identity": "1.5:p=3",
      "verdict": "verified",
      "trials": 1,
      "witness": null,
      "millis": 0,
      "stats": {
        "bracket_tuples": 4,
        "exploratory": false
      }
    }
  ]
}
"#;
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn bracket_expand_prints_signed_tuples() {
    let out = genjacobi(&["--output", "text", "bracket", "expand", "--tuple", "i,j,k", "--positions", "1,2,3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "+ (i,j,k) - (i,k,j) - (j,k,i) + (k,j,i)\n");
    let out = genjacobi(&["bracket", "expand", "--tuple", "i,j,k", "--positions", "2,3"]);
    let v = json(&out);
    assert_eq!(v["result"], "+ (i,j,k) - (i,k,j)");
    assert_eq!(v["coefficient_sum"], 0);
    let out = genjacobi(&["bracket", "expand", "--tuple", "i,j", "--positions", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jacobi_symbolic_p4() {
    let out = genjacobi(&["verify", "jacobi", "--p", "4", "--mode", "symbolic"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"][0]["verdict"], "verified");
    assert_eq!(v["results"][0]["stats"]["residual_terms"], 0);
}

#[test]
fn jacobi_matrix_needs_seed_and_verifies() {
    let out = genjacobi(&["verify", "jacobi", "--p", "4", "--mode", "matrix", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
    let out = genjacobi(&["--seed", "7", "--trials", "20", "verify", "jacobi", "--p", "4", "--mode", "matrix", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"][0]["trials"], 20);
}

#[test]
fn cyclic_identities_and_antisymmetry() {
    let out = genjacobi(&["--seed", "2", "verify", "cyclic", "--ring", "cross3"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = json(&out)["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["identity"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, ["1.2", "1.3", "1.4"]);
    let out = genjacobi(&["--seed", "2", "verify", "antisymmetry", "--ring", "matrix3", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn flat_geometry_all_verified() {
    let out = genjacobi(&["--seed", "1", "verify", "geometry", "--scenario", &scenario("flat_geometry.scenario"), "--all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert!(results.len() >= 10);
    assert!(results.iter().all(|r| r["verdict"] == "verified"));
}

#[test]
fn geometry_subset_in_text() {
    let out = genjacobi(&[
        "--seed",
        "4",
        "--output",
        "text",
        "verify",
        "geometry",
        "--scenario",
        &scenario("random_geometry.scenario"),
        "--identities",
        "2.2,2.7,2.8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with("3 verified, 0 violated\n"), "{text}");
}

#[test]
fn perturbed_transport_fails_consistency() {
    let out = genjacobi(&[
        "--seed",
        "5",
        "--output",
        "text",
        "verify",
        "transport",
        "--scenario",
        &scenario("perturbed_transport.scenario"),
        "--identities",
        "3.20",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("VIOLATED  3.20"), "{text}");
    assert!(text.contains("witness: {"), "{text}");
}

#[test]
fn consistent_transport_selected_identities() {
    let out = genjacobi(&[
        "--seed",
        "5",
        "verify",
        "transport",
        "--scenario",
        &scenario("consistent_transport.scenario"),
        "--identities",
        "3.15,3.20,4.7,4.11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
    assert_eq!(v["scenario_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_byte_stable() {
    let args = [
        "--seed",
        "9",
        "--deterministic",
        "verify",
        "transport",
        "--scenario",
        &scenario("random_transport.scenario"),
        "--identities",
        "3.2,4.4,4.10",
    ];
    let first = genjacobi(&args);
    let second = genjacobi(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scenario");
    std::fs::write(&bad, "kind = geometry\ndim = 2\n[gamma]\n1,1,2 = x1 +* 2\n").unwrap();
    let out = genjacobi(&["--seed", "1", "verify", "geometry", "--scenario", bad.to_str().unwrap(), "--all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4, column 13"), "{}", stderr(&out));

    let out = genjacobi(&["--seed", "1", "verify", "transport", "--scenario", &scenario("consistent_transport.scenario"), "--identities", "9.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("9.9"));

    let out = genjacobi(&["--seed", "1", "verify", "transport", "--scenario", &scenario("flat_geometry.scenario"), "--all"]);
    assert_eq!(out.status.code(), Some(2));

    let out = genjacobi(&["verify", "jacobi"]);
    assert_eq!(out.status.code(), Some(2));
}
