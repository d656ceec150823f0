use std::process::{Command, Output};

fn hurstab(args: &[&str], cache: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurstab"))
        .args(args)
        .env("HURSTAB_CACHE", cache)
        .output()
        .unwrap()
}

#[test]
fn orbit_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = hurstab(&["orbits", "--group", "sym:3", "--class", "rep:transposition", "--k", "1..4"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('k'))
        .map(|l| l.split('\t').nth(1).unwrap())
        .collect();
    assert_eq!(counts, ["3", "5", "6", "6"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| hurstab(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["selftest"]), 0);
    assert_eq!(code(&["stability", "--frobnicate"]), 64);
    assert_eq!(code(&["orbits", "--group", "sym:3", "--class", "rep:transposition"]), 64);
    assert_eq!(code(&["stability", "--group", "sym:3", "--class", "rep:transposition", "--stabiliser", "(1 2 3)"]), 65);
    assert_eq!(code(&["stability", "--group", "sym:3", "--class", "rep:transposition", "--coeff", "Fp:4"]), 65);
    assert_eq!(
        code(&["stability", "--group", "sym:3", "--class", "rep:transposition", "--kmax", "9", "--mem-limit", "1M"]),
        3
    );
    let missing = dir.path().join("nope").join("report.tsv");
    assert_eq!(code(&["selftest", "--out", missing.to_str().unwrap()]), 74);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"group": "cyclic:2", "class": "elems:[1]", "imax": 1, "kmax": 4, "coeff": "Q"}"#,
    )
    .unwrap();
    let out = hurstab(
        &["stability", "--config", config.to_str().unwrap(), "--kmax", "5", "--format", "json", "--no-cache"],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["kmax"], 5);
    assert_eq!(doc["config"]["coeff"], "Q");
    assert_eq!(doc["result"]["report"]["k_max"], 5);
    std::fs::write(&config, r#"{"grup": "cyclic:2"}"#).unwrap();
    let out = hurstab(&["stability", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn corrupted_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["stability", "--group", "sym:3", "--class", "rep:transposition", "--imax", "1", "--kmax", "4", "--format", "json"];
    let first = hurstab(&args, dir.path());
    assert_eq!(first.status.code(), Some(0));
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replacen("Z", "Q", 1)).unwrap();
    }
    let second = hurstab(&args, dir.path());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_file_and_tsv_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.tsv");
    let out = hurstab(
        &["homology", "--group", "sym:3", "--class", "rep:transposition", "--k", "2..3", "--out", path.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# hurstab"));
    assert!(text.contains("2\t0\tZ^5"));
    assert!(text.contains("3\t1\tZ^9"));
}

#[test]
fn degree_of_a_kunneth_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("k.json");
    std::fs::write(
        &spec,
        r#"{"hy": {"summands": [{"degree": 0, "rank": 1}]},
            "hz": {"summands": [{"degree": 0, "rank": 1}, {"degree": 1, "rank": 1}]},
            "i": 2, "k_max": 6}"#,
    )
    .unwrap();
    let out = hurstab(&["degree", "--kunneth", spec.to_str().unwrap(), "--format", "json"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["degree"]["degree"]["Finite"], 2);
    assert_eq!(doc["result"]["extension"]["passed"], true);
}

#[test]
fn monodromy_check_default_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = hurstab(&["monodromy-check", "--seed", "3"], dir.path());
    assert!(out.status.success());
    let again = hurstab(&["monodromy-check", "--seed", "3"], dir.path());
    assert_eq!(out.stdout, again.stdout);
}
