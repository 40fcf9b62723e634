//! End-to-end tests of the binary: exit codes, determinism, output schemas.

use serde_json::Value;
use std::process::{Command, Output};
use wschub_core::gkm::MomentGraph;
use wschub_core::poly::Poly;
use wschub_core::schubert::build_ordinary_basis;
use wschub_core::weighted::{build_weighted_from_ordinary, weighted_constants_gkm, WeightSystem};

fn wschub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wschub"))
        .args(args)
        .env_remove("WSCHUB_MAX_VERTICES")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "constants", "--n", "4", "--d", "2", "--weights", "3,1,4,1", "--a", "2", "--lambda",
        "2,3", "--format", "json",
    ];
    let a = wschub(&args);
    let b = wschub(&args);
    assert_eq!(code_of(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());

    let args = [
        "basis", "--n", "4", "--d", "2", "--weights", "0,1,2,3", "--ordinary",
        "--symbolic-denominators",
    ];
    let a = wschub(&args);
    let b = wschub(&args);
    assert_eq!(code_of(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    // wrong number of weights
    let out = wschub(&["constants", "--n", "4", "--d", "2", "--weights", "1,2"]);
    assert_eq!(code_of(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 4 weights"));

    // not a d-subset of {1..n}
    let out = wschub(&[
        "constants", "--n", "4", "--d", "2", "--weights", "0,0,0,0", "--lambda", "9,9",
    ]);
    assert_eq!(code_of(&out), 2);

    // d must satisfy 0 < d < n
    let out = wschub(&["basis", "--n", "3", "--d", "3", "--weights", "0,0,0"]);
    assert_eq!(code_of(&out), 2);

    // kawasaki needs at least one positive b_i
    let out = wschub(&["kawasaki", "--b", ""]);
    assert_ne!(code_of(&out), 0);
    let out = wschub(&["kawasaki", "--b", "0,1"]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn vertex_cap_exits_3() {
    let out = wschub(&[
        "basis", "--n", "6", "--d", "3", "--weights", "0,0,0,0,0,0", "--max-vertices", "10",
    ]);
    assert_eq!(code_of(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    // the environment variable is honored ...
    let out = Command::new(env!("CARGO_BIN_EXE_wschub"))
        .args(["basis", "--n", "6", "--d", "3", "--weights", "0,0,0,0,0,0"])
        .env("WSCHUB_MAX_VERTICES", "10")
        .output()
        .expect("binary runs");
    assert_eq!(code_of(&out), 3);

    // ... and the flag overrides it
    let out = Command::new(env!("CARGO_BIN_EXE_wschub"))
        .args([
            "basis", "--n", "4", "--d", "2", "--weights", "0,0,0,0", "--max-vertices", "10",
        ])
        .env("WSCHUB_MAX_VERTICES", "2")
        .output()
        .expect("binary runs");
    assert_eq!(code_of(&out), 0);
}

#[test]
fn check_passes_and_corruption_fails() {
    let out = wschub(&["check", "--n", "3", "--d", "1", "--weights", "0,0,0"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("PASS gkm-membership"));
    assert!(text.contains("PASS stanley-reisner"));
    assert!(text.contains("PASS degeneration"));
    assert!(!text.contains("FAIL"));

    let out = wschub(&[
        "check", "--n", "4", "--d", "2", "--weights", "0,1,2,3", "--corrupt-table",
    ]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).contains("FAIL"));
}

#[test]
fn kawasaki_values_and_schema() {
    let out = wschub(&["kawasaki", "--b", "2,3,4", "--format", "json"]);
    assert_eq!(code_of(&out), 0);
    let doc: Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(doc["b"], serde_json::json!([2, 3, 4]));
    assert_eq!(doc["l"], serde_json::json!(["1", "12", "24"]));
    assert_eq!(doc["multiples"], serde_json::json!(["1/1", "3/1", "2/1"]));

    let out = wschub(&["kawasaki", "--b", "1,1,2"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("k=1: l_k = 1, multiple = 1"));
    assert!(text.contains("k=2: l_k = 2, multiple = 1"));
    assert!(text.contains("k=3: l_k = 2, multiple = 1"));

    let out = wschub(&["kawasaki", "--b", "1,1,1", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(doc["l"], serde_json::json!(["1", "1", "1"]));
}

#[test]
fn constants_json_schema_round_trips() {
    let out = wschub(&[
        "constants", "--n", "4", "--d", "2", "--weights", "3,1,4,1", "--a", "2", "--lambda",
        "2,3", "--mu", "1,4", "--format", "json",
    ]);
    assert_eq!(code_of(&out), 0);
    let doc: Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(
        doc["space"],
        serde_json::json!({"n": 4, "d": 2, "weights": [3, 1, 4, 1], "a": 2})
    );

    // recompute the same row in-process and compare entry for entry
    let graph = MomentGraph::new(4, 2).unwrap();
    let ws = WeightSystem::new(vec![3, 1, 4, 1], 2).unwrap();
    let basis =
        build_weighted_from_ordinary(&build_ordinary_basis(&graph).unwrap(), &ws).unwrap();
    let lam = graph.vertex_index(&wschub_core::combinat::IndexSet::parse(4, "2,3").unwrap());
    let mu = graph.vertex_index(&wschub_core::combinat::IndexSet::parse(4, "1,4").unwrap());
    let row = weighted_constants_gkm(&basis, lam.unwrap(), mu.unwrap()).unwrap();

    let constants = doc["constants"].as_array().expect("constants array");
    assert!(!constants.is_empty());
    let mut seen = 0;
    for entry in constants {
        assert_eq!(entry["lambda"], "2,3");
        assert_eq!(entry["mu"], "1,4");
        assert!(entry["nonneg"].is_boolean());
        assert!(entry["wu_expansion"].is_object());
        let p = Poly::from_json(&entry["value"]).expect("value parses back");
        let nu = wschub_core::combinat::IndexSet::parse(4, entry["nu"].as_str().unwrap())
            .expect("nu parses");
        let ni = graph.vertex_index(&nu).expect("nu is a vertex");
        assert_eq!(p, row[ni]);
        seen += 1;
    }
    // nonzero entries only; the rest of the row really is zero
    let nonzero = row.iter().filter(|p| !p.is_zero()).count();
    assert_eq!(seen, nonzero);
}

#[test]
fn out_flag_matches_stdout() {
    let path = std::env::temp_dir().join(format!("wschub-cli-{}.json", std::process::id()));
    let args = [
        "constants", "--n", "4", "--d", "2", "--weights", "0,1,2,3", "--lambda", "1,2",
        "--mu", "3,4", "--format", "json",
    ];
    let direct = wschub(&args);
    assert_eq!(code_of(&direct), 0);
    let mut file_args: Vec<&str> = args.to_vec();
    file_args.push("--out");
    let p = path.to_str().unwrap().to_string();
    file_args.push(&p);
    let via_file = wschub(&file_args);
    assert_eq!(code_of(&via_file), 0);
    assert!(via_file.stdout.is_empty());
    let written = std::fs::read(&path).expect("file written");
    std::fs::remove_file(&path).ok();
    assert_eq!(written, direct.stdout);
}
