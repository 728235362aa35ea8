use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drift-gauntlet"))
        .current_dir(dir)
        .env_remove("DRIFT_GAUNTLET_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn nullspace_reports_dimension_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["nullspace", "--scheme", "sliding:2", "--n", "6"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["has_nonconstant"], true);
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);

    let out = run(dir.path(), &["nullspace", "--scheme", "sliding:1", "--n", "5"]);
    assert_eq!(json(&out)["has_nonconstant"], false);

    // No window pair fits into the stream.
    assert_eq!(
        code(&run(dir.path(), &["nullspace", "--scheme", "sliding:10", "--n", "5"])),
        2
    );
}

#[test]
fn generate_writes_a_certified_stream() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate",
            "--scheme",
            "fixed:150,100",
            "--n",
            "1000",
            "--binarize",
            "-o",
            "s.jsonl",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stream = std::fs::read_to_string(dir.path().join("s.jsonl")).unwrap();
    assert_eq!(stream.lines().count(), 1001);
    let record: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.jsonl.profile.json")).unwrap()).unwrap();
    assert_eq!(record["certificate"]["is_adversarial"], true);

    let out = run(
        dir.path(),
        &[
            "verify",
            "--profile",
            "s.jsonl.profile.json",
            "--scheme",
            "fixed:150,100",
        ],
    );
    assert_eq!(json(&out)["verdict"], "adversarial");
    // The stream file carries the same weights.
    let out = run(
        dir.path(),
        &["verify", "--profile", "s.jsonl", "--scheme", "fixed:150,100"],
    );
    assert_eq!(json(&out)["verdict"], "adversarial");
}

#[test]
fn generate_refuses_impossible_requests() {
    let dir = tempfile::tempdir().unwrap();
    // sliding(1) forces every sample mean to agree: only constants remain.
    assert_eq!(
        code(&run(
            dir.path(),
            &["generate", "--scheme", "sliding:1", "--n", "10", "-o", "s.jsonl"]
        )),
        2
    );
    assert_eq!(
        code(&run(dir.path(), &["generate", "--scheme", "sliding:2", "--n", "10"])),
        4
    );
    assert_eq!(
        code(&run(
            dir.path(),
            &["generate", "--scheme", "hopping:3", "--n", "10", "-o", "s.jsonl"]
        )),
        4
    );
    assert_eq!(code(&run(dir.path(), &["generate", "--n", "10", "-o", "s.jsonl"])), 4);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 4);
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn detector_alerts_only_where_the_profile_is_visible() {
    let dir = tempfile::tempdir().unwrap();
    let gen = [
        "generate",
        "--family",
        "periodic:50,25",
        "--n",
        "300",
        "--intensity",
        "20",
        "-o",
        "p.jsonl",
    ];
    assert_eq!(code(&run(dir.path(), &gen)), 0);
    let detect = |scheme: &str| {
        run(
            dir.path(),
            &[
                "detect",
                "p.jsonl",
                "--scheme",
                scheme,
                "--stride",
                "5",
                "--permutations",
                "199",
                "--theta",
                "0.01",
            ],
        )
    };
    let hidden = detect("sliding:50");
    assert_eq!(code(&hidden), 0, "{}", String::from_utf8_lossy(&hidden.stderr));
    assert!(json(&hidden)["alarms"].as_array().unwrap().is_empty());
    let seen = detect("growing:25,25");
    assert_eq!(code(&seen), 3);
    assert!(!json(&seen)["alarms"].as_array().unwrap().is_empty());

    let combined = run(
        dir.path(),
        &[
            "combine",
            "p.jsonl",
            "--scheme",
            "sliding:50",
            "--scheme",
            "growing:25,25",
            "--stride",
            "5",
            "--permutations",
            "199",
            "--theta",
            "0.01",
            "--format",
            "csv",
        ],
    );
    assert_eq!(code(&combined), 3);
    assert!(String::from_utf8_lossy(&combined.stdout).starts_with("pair_start,pair_end,mmd2,p\n"));
}

#[test]
fn verify_checks_profile_functions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("f.json"),
        r#"{"family":"constant_after","a":100.0,"head":{"shape":"steps","values":[1.0,0.0,0.0,1.0]},"c":0.5}"#,
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--function", "f.json", "--scheme", "growing:100,100"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["verdict"], "kernel member");

    std::fs::write(
        dir.path().join("g.json"),
        r#"{"family":"constant_after","a":100.0,"head":{"shape":"steps","values":[1.0,0.0,0.0,1.0]},"c":0.7}"#,
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "--function", "g.json", "--scheme", "growing:100,100"],
    );
    assert_eq!(json(&out)["verdict"], "not a kernel member");
}

#[test]
fn seed_comes_from_flag_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let generate = |seed_env: Option<&str>, args: &[&str], out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_drift-gauntlet"));
        cmd.current_dir(dir.path()).env_remove("DRIFT_GAUNTLET_SEED");
        if let Some(s) = seed_env {
            cmd.env("DRIFT_GAUNTLET_SEED", s);
        }
        let status = cmd
            .args(args)
            .args(["generate", "--family", "rand-const:10", "--n", "40", "-o", out])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let default = generate(None, &[], "a.jsonl");
    let explicit = generate(None, &["--seed", "1729"], "b.jsonl");
    let env = generate(Some("5"), &[], "c.jsonl");
    let flag_wins = generate(Some("5"), &["--seed", "1729"], "d.jsonl");
    assert_eq!(default, explicit);
    assert_ne!(default, env);
    assert_eq!(default, flag_wins);
}
