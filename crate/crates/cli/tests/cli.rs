//! End-to-end runs of the binary against the bundled model files.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_groupshift"));
    // Keep runs hermetic: the ambient environment must not change budgets.
    cmd.env_remove("GROUPSHIFT_BUDGET");
    cmd
}

fn model(name: &str) -> String {
    format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn validates_every_bundled_model() {
    for name in ["golden-mean.json", "checkerboard.json", "heisenberg.json", "free-group.json"] {
        let out = run(&["validate", &model(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout_of(&out));
        assert!(stdout_of(&out).starts_with("model ok:"), "{name}");
    }
}

#[test]
fn z_analysis_reports_nonempty_and_empty() {
    let out = run(&["solve", "z", "--model", &model("golden-mean.json"), "--sft", "golden-mean"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with("nonempty, minimal period 1\n"), "{}", stdout_of(&out));

    let out = run(&["solve", "z", "--model", &model("golden-mean.json"), "--sft", "empty"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).starts_with("empty\n"), "{}", stdout_of(&out));

    let out = run(&["solve", "z", "--model", &model("golden-mean.json"), "--sft", "two-periodic"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with("nonempty, minimal period 2\n"), "{}", stdout_of(&out));
}

#[test]
fn periodic_certificate_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let cert_path = cert.to_str().unwrap();

    let out = run(&[
        "solve", "periodic",
        "--model", &model("checkerboard.json"),
        "--sft", "checkerboard",
        "--max-index", "4",
        "--out", cert_path,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("stabilizer index: 2"), "{text}");
    assert!(text.contains("period lattice: [[1,1],[0,2]]"), "{text}");

    let out = run(&[
        "verify",
        "--model", &model("checkerboard.json"),
        "--sft", "checkerboard",
        "--cert", cert_path,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).starts_with("ACCEPTED:"));

    // Tampering must be caught.
    let tampered = std::fs::read_to_string(cert_path)
        .unwrap()
        .replace("\"stabilizer_index\": 2", "\"stabilizer_index\": 4");
    std::fs::write(cert_path, tampered).unwrap();
    let out = run(&[
        "verify",
        "--model", &model("checkerboard.json"),
        "--sft", "checkerboard",
        "--cert", cert_path,
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout_of(&out));
    assert!(stdout_of(&out).starts_with("REJECTED:"));
}

#[test]
fn ball_search_certifies_emptiness_with_exit_one() {
    let out = run(&[
        "solve", "ball",
        "--model", &model("golden-mean.json"),
        "--sft", "empty",
        "--radius", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.starts_with("EMPTY (certified at radius 1)\n"), "{text}");

    let out = run(&[
        "solve", "ball",
        "--model", &model("golden-mean.json"),
        "--sft", "golden-mean",
        "--radius", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("certificate: legal-ball"));
}

#[test]
fn budget_flag_overrides_environment() {
    let out = bin()
        .args([
            "solve", "periodic",
            "--model", &model("golden-mean.json"),
            "--sft", "empty",
            "--max-index", "8",
        ])
        .env("GROUPSHIFT_BUDGET", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).starts_with("INCONCLUSIVE (budget 7 nodes)"), "{}", stdout_of(&out));

    let out = bin()
        .args([
            "solve", "periodic",
            "--model", &model("golden-mean.json"),
            "--sft", "empty",
            "--max-index", "8",
            "--budget", "5",
        ])
        .env("GROUPSHIFT_BUDGET", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).starts_with("INCONCLUSIVE (budget 5 nodes)"), "{}", stdout_of(&out));
}

#[test]
fn quotient_exhaustion_is_inconclusive_not_negative() {
    let out = run(&[
        "solve", "periodic",
        "--model", &model("golden-mean.json"),
        "--sft", "empty",
        "--max-index", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stdout_of(&out)
            .starts_with("INCONCLUSIVE (no strongly periodic point through quotients of index at most 3)"),
        "{}",
        stdout_of(&out)
    );
}

#[test]
fn input_errors_exit_three() {
    let out = run(&["solve", "z", "--model", &model("golden-mean.json"), "--sft", "missing"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["solve", "nonsense"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn transfer_and_extension_pipelines_run_from_the_cli() {
    let out = run(&[
        "solve", "transfer",
        "--model", &model("golden-mean.json"),
        "--sft", "golden-mean",
        "--subgroup", "two-z",
        "--direction", "to-overgroup",
        "--max-index", "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("pipeline: transfer-to-overgroup"));

    let out = run(&[
        "solve", "extension",
        "--model", &model("heisenberg.json"),
        "--sft", "checkerboard",
        "--hom", "drop-center",
        "--max-index", "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("pipeline: extension-push"), "{text}");
    assert!(text.contains("stabilizer index: 2"), "{text}");
}

#[test]
fn free_group_search_uses_supplied_quotients() {
    let out = run(&[
        "solve", "periodic",
        "--model", &model("free-group.json"),
        "--sft", "golden-f2",
        "--quotient", "a-parity",
        "--max-index", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("certificate: periodic-point"));
}

#[test]
fn construct_output_reloads_as_an_sft() {
    let dir = tempfile::tempdir().unwrap();
    let block = dir.path().join("block.json");
    let out = run(&[
        "construct", "higher-block",
        "--model", &model("golden-mean.json"),
        "--sft", "golden-mean",
        "--subgroup", "three-z",
        "--out", block.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("block cells: 0 1 2 3"));

    // The JSON payload is the SFT format itself: wrapping it in a model file
    // must validate.
    let sft: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&block).unwrap()).unwrap();
    let wrapped = serde_json::json!({"sfts": {"block": sft}});
    let model_path = dir.path().join("wrapped.json");
    std::fs::write(&model_path, wrapped.to_string()).unwrap();
    let out = run(&["validate", model_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
}

#[test]
fn locked_shift_witness_verifies_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let locked = dir.path().join("locked.json");
    let out = run(&[
        "construct", "locked",
        "--model", &model("checkerboard.json"),
        "--subgroup", "evens",
        "--out", locked.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));

    let sft: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&locked).unwrap()).unwrap();
    let wrapped = serde_json::json!({"sfts": {"locked": sft}});
    let model_path = dir.path().join("locked-model.json");
    std::fs::write(&model_path, wrapped.to_string()).unwrap();

    let out = run(&[
        "solve", "periodic",
        "--model", model_path.to_str().unwrap(),
        "--sft", "locked",
        "--max-index", "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("stabilizer index: 4"), "{}", stdout_of(&out));
}

#[test]
fn reports_and_payloads_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &str| {
        vec![
            "solve".to_string(),
            "periodic".into(),
            "--model".into(),
            model("checkerboard.json"),
            "--sft".into(),
            "checkerboard".into(),
            "--max-index".into(),
            "4".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let first = bin().args(args(a.to_str().unwrap())).output().unwrap();
    let second = bin().args(args(b.to_str().unwrap())).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c1 = run(&[
        "construct", "higher-block",
        "--model", &model("golden-mean.json"),
        "--sft", "golden-mean",
        "--subgroup", "three-z",
        "--format", "json",
    ]);
    let c2 = run(&[
        "construct", "higher-block",
        "--model", &model("golden-mean.json"),
        "--sft", "golden-mean",
        "--subgroup", "three-z",
        "--format", "json",
    ]);
    assert_eq!(c1.stdout, c2.stdout);
    assert!(!c1.stdout.is_empty());
}
