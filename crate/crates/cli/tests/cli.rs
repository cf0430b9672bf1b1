use std::process::Command;

fn mforge(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mforge"))
        .args(args)
        .env_remove("MFORGE_Q")
        .env_remove("MFORGE_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn build_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let first = mforge(&["build", "--space", "w5", "--q", "2", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert!(String::from_utf8_lossy(&first.stdout).contains("63 points"));
    assert_eq!(code(&mforge(&["build", "--space", "w5", "--q", "2", "--out", b.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(json["schema"], "geom/1");
}

#[test]
fn unsupported_field_order_is_a_usage_error() {
    assert_eq!(code(&mforge(&["build", "--q", "7"])), 2);
    assert_eq!(code(&mforge(&["verify", "--q", "4", "--suite", "axioms"])), 2);
    assert_eq!(code(&mforge(&["verify", "--suite", "nonsense"])), 2);
}

#[test]
fn corrupted_cache_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w5.json");
    assert_eq!(code(&mforge(&["build", "--out", path.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted = text.replacen("[0,", "[1,", 1);
    assert_ne!(corrupted, text);
    std::fs::write(&path, corrupted).unwrap();
    let out = mforge(&["verify", "--suite", "axioms", "--cache", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&path, "{ truncated").unwrap();
    assert_eq!(code(&mforge(&["verify", "--suite", "axioms", "--cache", path.to_str().unwrap()])), 2);
}

#[test]
fn cache_for_another_space_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w5.json");
    assert_eq!(code(&mforge(&["build", "--out", path.to_str().unwrap()])), 0);
    assert_eq!(
        code(&mforge(&["verify", "--suite", "axioms", "--q", "3", "--cache", path.to_str().unwrap()])),
        2
    );
}

#[test]
fn verify_gq_elations_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let out = mforge(&["verify", "--suite", "gq-elations", "--q", "2", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(
        code(&mforge(&[
            "verify",
            "--suite",
            "gq-elations",
            "--q",
            "2",
            "--jobs",
            "1",
            "--out",
            b.to_str().unwrap()
        ])),
        0
    );
    let strip = |p: &std::path::Path| -> Vec<serde_json::Value> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_ms");
                v
            })
            .collect()
    };
    let (ra, rb) = (strip(&a), strip(&b));
    assert_eq!(ra, rb);
    assert!(ra.iter().all(|r| r["schema"] == "report/1" && r["result"] == "pass"));
    assert_eq!(ra.iter().filter(|r| r["claim"] == "gq.first-kind").count(), 180);
}

#[test]
fn verify_h3_passes() {
    let out = mforge(&["verify", "--suite", "h3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["claims"]["h3.rigidity"]["pass"], 1);
}

#[test]
fn report_exit_code_follows_content() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    assert_eq!(code(&mforge(&["verify", "--suite", "h3", "--out", path.to_str().unwrap()])), 0);
    assert_eq!(code(&mforge(&["report", path.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let failed = text.replacen("\"result\":\"pass\",\"witnesses\":[]", "\"result\":\"fail\",\"witnesses\":[\"planted\"]", 1);
    assert_ne!(failed, text);
    std::fs::write(&path, failed).unwrap();
    let out = mforge(&["report", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("planted"));
    assert_eq!(code(&mforge(&["report", dir.path().join("missing").to_str().unwrap()])), 2);
}

#[test]
fn env_overrides_flags_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_mforge"))
        .args(["verify", "--suite", "axioms"])
        .env("MFORGE_Q", "7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
