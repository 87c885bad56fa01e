use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn freecore(args: &[&str], files: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_freecore"));
    cmd.args(args).env_remove("FREECORE_PRIME_BOUND");
    for f in files {
        cmd.arg(data(f));
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn geometric_qubits_against_ii1_factor() {
    let o = freecore(
        &["centralizer"],
        &["geometric_qubits.json", "ii1_factor.json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("⋆_{γ∈Γ}(M₂)^γ  [atomic-nontracial-vs-ii1-factor]"),
        "{out}"
    );
    assert!(out.contains("γ = 3/2: amplification 3/2"));
}

#[test]
fn structural_lines_carry_anchors() {
    let o = freecore(&["centralizer"], &["skewed_m2.json", "hyperfinite.json"]);
    for line in stdout(&o).lines().filter(|l| !l.starts_with("  ")) {
        assert!(
            line.ends_with(']') && line.contains("  ["),
            "no anchor on {line:?}"
        );
    }
}

#[test]
fn core_trace_table() {
    let o = freecore(
        &["core", "--height", "1"],
        &["skewed_m2.json", "tracial_m2.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for row in ["Tr(e_1) = 1", "Tr(e_2) = 1/2", "Tr(e_1/2) = 2"] {
        assert!(out.contains(row), "missing {row} in {out}");
    }
}

#[test]
fn two_by_two_pair_is_rejected() {
    let o = freecore(&["compute"], &["c2_half.json", "c2_half.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(dim(M₁),dim(M₂)) ≠ (2,2)"));
}

#[test]
fn tracial_core_is_unsupported() {
    let o = freecore(&["core"], &["tracial_m2.json", "hyperfinite.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = freecore(&["centralizer"], &["c2_half.json", "ii1_factor.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("[structure-theorem-hypotheses]"));
}

#[test]
fn machine_output_is_deterministic_json() {
    for cmd in ["compute", "core", "centralizer", "sd"] {
        let a = freecore(
            &[cmd, "--format", "machine"],
            &["skewed_m2.json", "full_iii.json"],
        );
        let b = freecore(
            &[cmd, "--format", "machine"],
            &["skewed_m2.json", "full_iii.json"],
        );
        assert_eq!(a.status.code(), Some(0), "{cmd}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["command"], cmd);
    }
}

#[test]
fn machine_errors_are_json() {
    let o = freecore(
        &["compute", "--format", "machine"],
        &["c2_half.json", "c2_half.json"],
    );
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["anchor"], "standing-dimension-assumption");
}

#[test]
fn fdim_of_scenario_with_oracle() {
    let o = freecore(&["fdim", "--oracle"], &["two_index_scenario.json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("r = 3/4"));
    assert!(out.contains("oracle PASS: sequential composition"));
}

#[test]
fn fdim_of_algebra() {
    let o = freecore(&["fdim", "--format", "machine"], &["abelian_two.json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // 1 − (7/10)² − (3/10)²
    assert_eq!(v["result"]["fdim"], "21/50");
}

#[test]
fn gamma_choice_flag() {
    let o = freecore(
        &["fdim", "--gamma-choice", "explicit:1/4"],
        &["two_index_scenario.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = freecore(
        &["fdim", "--gamma-choice", "explicit:1/3"],
        &["two_index_scenario.json"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = freecore(
        &["fdim", "--gamma-choice", "largest"],
        &["two_index_scenario.json"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_check_runs_everything() {
    let o = freecore(
        &["oracle-check"],
        &[
            "two_index_scenario.json",
            "abelian_three.json",
            "abelian_two.json",
            "skewed_m2.json",
            "tracial_m2.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(!out.contains("FAIL"));
    assert!(out.contains("fdim additivity"));
    assert!(out.contains("trace law"));
}

#[test]
fn prime_bound_from_environment() {
    let run = |bound: &str| {
        Command::new(env!("CARGO_BIN_EXE_freecore"))
            .arg("sd")
            .arg(data("skewed_m2.json"))
            .arg(data("full_iii.json"))
            .env("FREECORE_PRIME_BOUND", bound)
            .output()
            .unwrap()
    };
    assert_eq!(run("100").status.code(), Some(0));
    let low = run("2");
    assert_eq!(low.status.code(), Some(2));
    assert!(stderr(&low).contains("factorization bound"));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn missing_file_is_a_validation_error() {
    let o = freecore(&["sd"], &["no_such_file.json", "hyperfinite.json"]);
    assert_eq!(o.status.code(), Some(2));
}
