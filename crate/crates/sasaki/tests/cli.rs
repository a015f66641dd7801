//! End-to-end checks of the command-line interface: exit codes, JSON shape
//! and byte-level reproducibility.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sasaki"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sasaki"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn build_reports_dimensions_and_passes() {
    let out = run(&["build", "sp:1", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["results"]["dims"]["g"], 10);
    assert_eq!(v["results"]["dims"]["h"], 3);
    assert_eq!(v["results"]["dims"]["m"], 7);
    assert_eq!(v["results"]["jacobi_pass"], true);
}

#[test]
fn build_e6_dimensions() {
    let out = run(&["build", "e6", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["dims"]["g"], 78);
    assert_eq!(v["results"]["dims"]["h"], 35);
    assert_eq!(v["results"]["dims"]["m"], 43);
}

#[test]
fn sp0_is_refused_with_usage_exit_code() {
    let out = run(&["build", "sp:0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n >= 1"), "stderr: {err}");
}

#[test]
fn dims_reports_the_dimension_triple() {
    let out = run(&["dims", "g2", "all", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["bilinear"]["dimension"], 63);
    assert_eq!(v["results"]["lambda2"]["dimension"], 30);
    assert_eq!(v["results"]["lambda3"]["dimension"], 10);
}

#[test]
fn dims_su4_has_the_larger_triple() {
    let out = run(&["dims", "su:4", "all", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["bilinear"]["dimension"], 99);
    assert_eq!(v["results"]["lambda2"]["dimension"], 45);
    assert_eq!(v["results"]["lambda3"]["dimension"], 13);
}

#[test]
fn e8_lambda3_refusal_has_budget_exit_code() {
    let out = run(&["dims", "e8", "lambda3"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("budget"), "stderr: {err}");
}

#[test]
fn budget_env_var_overrides_and_force_bypasses() {
    let out = run_env(&["dims", "sp:1", "bilinear"], &[("SASAKI_BUDGET", "10")]);
    assert_eq!(out.status.code(), Some(3));
    let out = run_env(
        &["dims", "sp:1", "bilinear", "--force", "--json"],
        &[("SASAKI_BUDGET", "10")],
    );
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["bilinear"]["dimension"], 63);
}

#[test]
fn classify_distinguished_connection_on_the_sphere() {
    let out = run(&[
        "classify",
        "sp:1",
        "--a",
        "4",
        "--b",
        "2,0,0,0,2,0,0,0,2",
        "--json",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let flags = &v["results"]["flags"];
    assert_eq!(flags["einstein"], true);
    assert_eq!(flags["parallelizes_reeb"], true);
    assert_eq!(flags["phi_compatible"], true);
    assert_eq!(v["results"]["gamma"], -2.0);
}

#[test]
fn classify_canonical_connection_parallel_but_not_einstein() {
    let out = run(&[
        "classify",
        "sp:1",
        "--a",
        "0",
        "--b",
        "2,0,0,0,2,0,0,0,2",
        "--json",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let flags = &v["results"]["flags"];
    assert_eq!(flags["parallel_torsion"], true);
    assert_eq!(flags["einstein"], false);
}

#[test]
fn classify_distinguished_connection_above_dim_7() {
    let out = run(&[
        "classify",
        "sp:2",
        "--a",
        "4",
        "--b",
        "2,0,0,0,2,0,0,0,2",
        "--json",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let flags = &v["results"]["flags"];
    assert_eq!(flags["einstein"], false);
    assert_eq!(flags["s_einstein"], true);
}

#[test]
fn classify_rejects_malformed_matrices() {
    let out = run(&["classify", "sp:1", "--a", "0", "--b", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", "sp:1", "--a", "0", "--b", "1,2,x,0,0,0,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    // c outside the SU family is a usage error
    let out = run(&["classify", "sp:1", "--c", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_residuals_stay_below_tolerance() {
    for space in ["so:7", "su:3"] {
        let out = run(&["sweep", space, "--count", "100", "--seed", "7", "--json"]);
        assert!(out.status.success(), "{space}");
        let v = json_of(&out);
        for key in [
            "s_tensor_vs_closed_form",
            "sym_ricci_vs_closed_form",
            "scalar_vs_closed_form",
        ] {
            let r = v["residuals"][key].as_f64().unwrap();
            assert!(r <= 1e-6, "{space} {key}: {r}");
        }
    }
}

#[test]
fn empty_sweep_succeeds() {
    let out = run(&["sweep", "sp:1", "--count", "0", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["pass"], true);
}

#[test]
fn identical_seed_and_inputs_give_byte_identical_json() {
    let a = run(&["dims", "su:3", "all", "--json", "--seed", "7"]);
    let b = run(&["dims", "su:3", "all", "--json", "--seed", "7"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "JSON output must be byte-identical");
    let c = run(&["sweep", "sp:1", "--count", "20", "--seed", "3", "--json"]);
    let d = run(&["sweep", "sp:1", "--count", "20", "--seed", "3", "--json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn emit_basis_writes_kernel_files() {
    let dir = std::env::temp_dir().join("sasaki_emit_basis_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("basis.json");
    let out = run(&[
        "dims",
        "sp:1",
        "lambda3",
        "--emit-basis",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let content: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let basis = content["lambda3"]["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 10);
    assert_eq!(basis[0].as_array().unwrap().len(), 35); // C(7,3)
    std::fs::remove_file(&path).ok();
}
