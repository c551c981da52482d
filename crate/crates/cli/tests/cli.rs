use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn linky(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linky"))
        .args(args)
        .env_remove("LINKY_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = linky(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    linky(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn line_count(path: &Path) -> usize {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .count()
}

/// A data dir with the demo dataset and both demo solutions imported.
fn demo_workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path()).to_string();
    let manifest = demo().join("manifest.json");
    ok(&["--data-dir", &d, "ingest", "--manifest", s(&manifest)]);
    for f in ["ulink.ndjson", "cnl.ndjson"] {
        ok(&["--data-dir", &d, "import", s(&demo().join("solutions").join(f))]);
    }
    dir
}

#[test]
fn ingest_reports_record_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "--data-dir",
        s(dir.path()),
        "ingest",
        "--manifest",
        s(&demo().join("manifest.json")),
    ]);
    for (label, file) in [
        ("identities", "identities.ndjson"),
        ("edges", "edges.ndjson"),
        ("posts", "posts.ndjson"),
        ("ground_truth", "ground_truth.ndjson"),
    ] {
        let want = format!("{label}: {}", line_count(&demo().join(file)));
        assert!(out.lines().any(|l| l == want), "missing `{want}` in\n{out}");
    }
}

#[test]
fn bad_input_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    assert_eq!(code(&["--data-dir", d, "ingest", "--manifest", "/nonexistent/m.json"]), 2);
    assert_eq!(code(&["--data-dir", d, "list"]), 2);

    let ws = demo_workspace();
    let d = s(ws.path());
    assert_eq!(code(&["--data-dir", d, "baseline", "--source", "myspace", "--target", "twitter"]), 2);
    assert_eq!(code(&["--data-dir", d, "evaluate", "--method", "nope"]), 2);
    let dup = demo().join("solutions/ulink.ndjson");
    assert_eq!(code(&["--data-dir", d, "import", s(&dup)]), 2);
    assert_eq!(code(&["--data-dir", d, "import", "--replace", s(&dup)]), 0);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&["--bogus"]), 1);
    assert_eq!(code(&["list"]), 1, "data dir is required");
    assert_eq!(code(&["diff", "--data-dir", "/tmp", "a", "b", "--criterion", "best"]), 1);
    for sub in [
        "ingest", "baseline", "import", "export", "evaluate", "diff", "list", "generate",
        "extract-truth", "serve",
    ] {
        assert_eq!(code(&[sub, "--help"]), 0, "{sub} --help");
    }
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn generate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&[
            "generate", "--seed", "7", "--n-users", "300", "--mutation-rate", "0.2", "--out",
            s(dir.path()),
        ]);
    }
    let mut files: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    files.sort();
    assert!(files.len() >= 4);
    for f in files {
        let x = std::fs::read(a.path().join(&f)).unwrap();
        let y = std::fs::read(b.path().join(&f)).unwrap();
        assert_eq!(x, y, "{f:?} differs");
    }
}

#[test]
fn synthetic_identity_usernames_give_perfect_baseline() {
    let data = tempfile::tempdir().unwrap();
    let ws = tempfile::tempdir().unwrap();
    ok(&["generate", "--seed", "1", "--n-users", "2000", "--out", s(data.path())]);
    let d = s(ws.path());
    ok(&["--data-dir", d, "ingest", "--manifest", s(&data.path().join("manifest.json"))]);
    let out = ok(&[
        "--data-dir", d, "baseline", "--source", "twitter", "--target", "foursquare",
    ]);
    assert!(out.contains("n_evaluated: 2000"), "{out}");
    assert!(out.contains("prec@1: 1.000"), "{out}");
    assert!(out.contains("mrr: 1.000"), "{out}");

    let stored = ws.path().join("solutions/baseline-3gram.ndjson");
    let first = std::fs::read(&stored).unwrap();
    ok(&["--data-dir", d, "baseline", "--source", "twitter", "--target", "foursquare"]);
    assert_eq!(std::fs::read(&stored).unwrap(), first);

    let exported = ok(&["--data-dir", d, "export", "--method", "baseline-3gram"]);
    assert_eq!(exported.as_bytes(), first.as_slice());
}

#[test]
fn evaluate_json_matches_stored_report() {
    let ws = demo_workspace();
    let d = s(ws.path());
    let out = ok(&["--data-dir", d, "evaluate", "--method", "ulink", "--format", "json"]);
    let stored = std::fs::read_to_string(ws.path().join("reports/ulink.json")).unwrap();
    assert_eq!(out, stored);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n_evaluated"], 5);
    assert!((v["prec_at_1"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((v["mrr"].as_f64().unwrap() - 0.9).abs() < 1e-12);

    let text = ok(&["--data-dir", d, "evaluate", "--method", "cnl"]);
    assert!(text.contains("prec@1: 0.600") && text.contains("mrr: 0.800"), "{text}");
}

#[test]
fn diff_prints_usernames() {
    let ws = demo_workspace();
    let d = s(ws.path());
    assert_eq!(
        ok(&["--data-dir", d, "diff", "ulink", "cnl"]),
        "bernard_soon\njoelle_lee\n"
    );
    assert_eq!(ok(&["--data-dir", d, "diff", "cnl", "ulink"]), "roy_lee87\n");
    assert_eq!(ok(&["--data-dir", d, "diff", "ulink", "ulink"]), "");

    let json = ok(&["--data-dir", d, "diff", "ulink", "cnl", "--criterion", "topk:3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["criterion"], "topk:3");
    assert!(v["entries"].is_array());
}

#[test]
fn list_shows_every_method() {
    let ws = demo_workspace();
    let d = s(ws.path());
    ok(&["--data-dir", d, "baseline", "--source", "foursquare", "--target", "twitter"]);
    let text = ok(&["--data-dir", d, "list"]);
    let ids: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ids, ["baseline-3gram", "cnl", "ulink"]);
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["--data-dir", d, "list", "--format", "json"])).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 3);
}

#[test]
fn data_dir_falls_back_to_environment() {
    let ws = demo_workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_linky"))
        .args(["evaluate", "--method", "ulink"])
        .env("LINKY_DATA_DIR", ws.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("prec@1: 0.800"));
}

#[test]
fn extract_truth_from_bios() {
    let data = tempfile::tempdir().unwrap();
    let ws = tempfile::tempdir().unwrap();
    ok(&[
        "generate", "--seed", "3", "--n-users", "200", "--declare-rate", "1", "--out",
        s(data.path()),
    ]);
    let manifest = data.path().join("manifest.json");
    let mut m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    m.as_object_mut().unwrap().remove("ground_truth");
    m.as_object_mut().unwrap().remove("counts");
    std::fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();

    let d = s(ws.path());
    let out = ok(&["--data-dir", d, "ingest", "--manifest", s(&manifest)]);
    assert!(out.contains("ground_truth: 0"), "{out}");
    let out = ok(&[
        "--data-dir", d, "extract-truth", "--source", "twitter", "--target", "foursquare",
    ]);
    assert!(out.contains("ground-truth links added: 200"), "{out}");
    let again = ok(&[
        "--data-dir", d, "extract-truth", "--source", "twitter", "--target", "foursquare",
    ]);
    assert!(again.contains("ground-truth links added: 0"), "{again}");
    let out = ok(&["--data-dir", d, "baseline", "--source", "twitter", "--target", "foursquare"]);
    assert!(out.contains("prec@1: 1.000"), "{out}");
}
