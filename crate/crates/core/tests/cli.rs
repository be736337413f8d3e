mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;

fn typebench(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_typebench"));
    cmd.args(args).env_remove("TYPEBENCH_ORACLE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Config plus adapters file for the given mock modes, in `dir`.
fn write_config(dir: &Path, modes: &[&str]) -> PathBuf {
    let adapters: Vec<_> = modes
        .iter()
        .map(|m| serde_json::to_value(common::mock_adapter(m, m, *m == "shuffle-ranked")).unwrap())
        .collect();
    fs::write(
        dir.join("adapters.json"),
        serde_json::to_string_pretty(&adapters).unwrap(),
    )
    .unwrap();
    let config = json!({
        "corpus": common::seed_corpus_dir(),
        "adapters": "adapters.json",
        "out": "out",
        "jobs": 4,
        "profile": "seed",
    });
    let path = dir.join("config.json");
    fs::write(&path, config.to_string()).unwrap();
    path
}

#[test]
fn bench_writes_every_stage_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &["perfect", "drop-fp", "shuffle-ranked"]);
    let out = typebench(&["bench", "--config", config.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let root = dir.path().join("out");
    for rel in [
        "run/records.json",
        "translate/perfect.json",
        "translate/drop-fp.json",
        "analyze/results.json",
        "report.md",
        "report.csv",
        "report.json",
    ] {
        assert!(root.join(rel).is_file(), "{rel}");
    }
    let results: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("report.json")).unwrap()).unwrap();
    let perfect = results["tools"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["tool"] == "perfect")
        .unwrap();
    assert_eq!(perfect["totals"]["exact"], perfect["totals"]["annotations"]);
    assert_eq!(perfect["sound"], perfect["snippet_count"]);
    let md = fs::read_to_string(root.join("report.md")).unwrap();
    assert!(md.contains("| shuffle-ranked | 3 |"));
}

#[test]
fn stages_rerun_to_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &["perfect", "partial"]);
    let config = config.to_str().unwrap();
    let out = typebench(&["bench", "--config", config], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let read = |name: &str| fs::read(dir.path().join("out").join(name)).unwrap();
    let before: Vec<Vec<u8>> = ["report.md", "report.csv", "report.json"]
        .iter()
        .map(|n| read(n))
        .collect();
    for stage in ["translate", "analyze", "report"] {
        let out = typebench(&[stage, "--config", config], &[]);
        assert!(out.status.success(), "{stage}: {}", stderr(&out));
    }
    let after: Vec<Vec<u8>> = ["report.md", "report.csv", "report.json"]
        .iter()
        .map(|n| read(n))
        .collect();
    assert_eq!(before, after);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &["perfect"]);
    let other = dir.path().join("elsewhere");
    let out = typebench(
        &[
            "bench",
            "--config",
            config.to_str().unwrap(),
            "--out",
            other.to_str().unwrap(),
            "--format",
            "md",
            "--top-n",
            "1,2",
        ],
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(other.join("report.md").is_file());
    assert!(!other.join("report.csv").exists());
}

#[test]
fn missing_corpus_exits_1_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = typebench(&["validate", "--corpus", "/no/such/corpus"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/no/such/corpus"), "{}", stderr(&out));
    assert!(stderr(&out).contains("stage validate"));

    let config = write_config(dir.path(), &["perfect"]);
    let out = typebench(
        &[
            "bench",
            "--config",
            config.to_str().unwrap(),
            "--corpus",
            "/no/such/corpus",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_adapter_binary_exits_2_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut ghost = common::mock_adapter("ghost", "perfect", false);
    ghost.invocation[0] = "typebench-no-such-binary".into();
    let adapters = vec![common::mock_adapter("perfect", "perfect", false), ghost];
    fs::write(
        dir.path().join("adapters.json"),
        serde_json::to_string(&adapters).unwrap(),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = typebench(
        &[
            "bench",
            "--corpus",
            common::seed_corpus_dir().to_str().unwrap(),
            "--adapters",
            dir.path().join("adapters.json").to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("tool ghost"), "{}", stderr(&out));
    assert!(
        !out_dir.join("run/perfect").exists(),
        "a tool ran before the check"
    );
}

#[test]
fn bad_adapters_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("adapters.json"),
        r#"[{"name": "x", "mode": "command", "invocation": ["sh"], "bogus": 1}]"#,
    )
    .unwrap();
    let out = typebench(
        &[
            "run",
            "--corpus",
            common::seed_corpus_dir().to_str().unwrap(),
            "--adapters",
            dir.path().join("adapters.json").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_checks_profiles() {
    let corpus = common::seed_corpus_dir();
    let ok = typebench(
        &[
            "validate",
            "--corpus",
            corpus.to_str().unwrap(),
            "--profile",
            "seed",
        ],
        &[],
    );
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("snippets"));
    let full = typebench(
        &[
            "validate",
            "--corpus",
            corpus.to_str().unwrap(),
            "--profile",
            "full",
        ],
        &[],
    );
    assert_eq!(full.status.code(), Some(1));
}

#[test]
fn validate_rejects_any_in_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::synthetic::full_scale_corpus();
    corpus.write_to(dir.path()).unwrap();
    let gt = dir.path().join("args/s00/main_gt.json");
    let text = fs::read_to_string(&gt).unwrap();
    let first_type = text.find("\"type\": [\n      \"").unwrap() + "\"type\": [\n      \"".len();
    let end = first_type + text[first_type..].find('"').unwrap();
    fs::write(&gt, format!("{}Any{}", &text[..first_type], &text[end..])).unwrap();
    let out = typebench(&["validate", "--corpus", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("args/s00"), "{}", stderr(&out));
}

#[test]
fn trace_without_oracle_exits_2() {
    let out = typebench(&["trace", "."], &[("PATH", "/nonexistent")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("TYPEBENCH_ORACLE"));
}

#[test]
fn trace_delegates_to_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let oracle = dir.path().join("oracle");
    let log = dir.path().join("args.txt");
    common::write_executable(
        &oracle,
        &format!(
            "#!/bin/sh\necho \"$@\" > {}\n[ \"$2\" != bad ]\n",
            log.display()
        ),
    );
    let env = [("TYPEBENCH_ORACLE", oracle.to_str().unwrap())];
    let out = typebench(&["trace", "snip", "--out", "o.json", "--verify"], &env);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(&log).unwrap(),
        "trace snip --out o.json --verify\n"
    );
    let out = typebench(&["trace", "bad"], &env);
    assert_eq!(out.status.code(), Some(1));
}
