use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn labs_pce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labs-pce")).args(args).env_remove("LABS_PCE_OUT_DIR").output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_campaign(dir: &Path) -> String {
    let path = dir.join("campaign.json");
    let spec = serde_json::json!({
        "campaigns": [
            { "solver": "tabu", "config": {}, "sizes": [7, 9, 11], "runs_per_size": 3, "base_seed": 5 },
            {
                "solver": "pce",
                "config": { "qubits": 3, "layers": 4, "pauli_mode": "anticommuting", "alpha": 4.5, "beta": 15.0 },
                "sizes": [7],
                "runs_per_size": 2,
                "base_seed": 5
            }
        ]
    });
    std::fs::write(&path, spec.to_string()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn eval_reports_energy_and_merit() {
    let doc = json_stdout(&labs_pce(&["eval", "--sequence", "+++++--++-+-+"]));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "eval");
    assert_eq!(doc["result"]["energy"], 6);
    assert!((doc["result"]["merit_factor"].as_f64().unwrap() - 169.0 / 12.0).abs() < 1e-12);
}

#[test]
fn exact_finds_barker_13() {
    let doc = json_stdout(&labs_pce(&["exact", "--n", "13"]));
    assert_eq!(doc["result"]["optimal_energy"], 6);
    assert_eq!(doc["result"]["canonical_optima"].as_array().unwrap().len(), 1);
}

#[test]
fn shot_bound_and_crossover_examples() {
    let args = ["shot-bound", "--n", "1", "--alpha", "1", "--beta", "1", "--epsilon", "1", "--delta", "0.7357588823428847"];
    assert_eq!(json_stdout(&labs_pce(&args))["result"]["shots"], 8);
    let args = ["crossover", "--cq", "100", "--bq", "1.2", "--cc", "1", "--bc", "1.3"];
    assert_eq!(json_stdout(&labs_pce(&args))["result"]["n_star"], 58);
}

#[test]
fn exit_codes_distinguish_input_and_runtime_errors() {
    assert_eq!(labs_pce(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(labs_pce(&["eval", "--sequence", "+x+"]).status.code(), Some(2));
    assert_eq!(labs_pce(&["exact", "--n", "40"]).status.code(), Some(2));
    assert_eq!(labs_pce(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("out.json");
    let status = labs_pce(&["eval", "--sequence", "+++", "--out", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn out_dir_variable_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_labs-pce"))
        .args(["eval", "--sequence", "+++", "--out", "nested/eval.json"])
        .env("LABS_PCE_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("nested/eval.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["energy"], 5);
}

#[test]
fn bench_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_campaign(dir.path());
    let records = dir.path().join("runs.jsonl");
    let csv = dir.path().join("runs.csv");
    let args = ["bench", "--config", &config, "--out", records.to_str().unwrap(), "--csv", csv.to_str().unwrap()];
    assert!(labs_pce(&args).status.success());

    let text = std::fs::read_to_string(&records).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 11);
    assert!(lines.iter().all(|r| r["tts"].as_u64().is_some()));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().next(), Some("N,tts,solver,seed,target"));
    assert_eq!(csv_text.lines().count(), 12);

    let fit = labs_pce(&["fit", "--in", records.to_str().unwrap(), "--solver", "tabu"]);
    let doc = json_stdout(&fit);
    assert_eq!(doc["command"], "fit");
    assert_eq!(doc["result"]["sizes"], serde_json::json!([7, 9, 11]));
    assert!(doc["result"]["b"].as_f64().unwrap().is_finite());

    // mixed solvers without a filter is an input error
    assert_eq!(labs_pce(&["fit", "--in", records.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bench_output_is_byte_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_campaign(dir.path());
    let run = |workers: &str| labs_pce(&["bench", "--config", &config, "--workers", workers]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("3"));
    assert_eq!(one, run("1"));
}

#[test]
fn pauli_gen_partition_and_sampled_sets() {
    let doc = json_stdout(&labs_pce(&["pauli-gen", "--qubits", "3", "--partition"]));
    let classes = doc["result"].as_array().unwrap();
    assert_eq!(classes.len(), 9);
    let doc = json_stdout(&labs_pce(&["pauli-gen", "--qubits", "3", "--count", "7", "--seed", "4"]));
    assert_eq!(doc["result"]["members"].as_array().unwrap().len(), 7);
}
