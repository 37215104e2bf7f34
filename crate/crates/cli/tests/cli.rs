use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cosetvir"))
}

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn run(args: &[&str]) -> Run {
    let out = bin().env_remove("COSETVIR_CACHE").args(args).output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fixture_outputs_match_golden_files() {
    let cases: [(&[&str], &str); 4] = [
        (&["--output", "json", "kac", "weights", "--p", "7"], "kac_weights_p7.json"),
        (&["--output", "json", "tower", "build", "--k", "2"], "tower_k2.json"),
        (&["--output", "json", "certify", "--k", "2"], "certify_k2.json"),
        (&["--output", "json", "braid", "r", "--p", "8", "--key", "3,3,3,3,3,3"], "braid_r_p8.json"),
    ];
    for (args, file) in cases {
        let a = run(args);
        assert_eq!(a.code, 0, "{args:?}: {}", a.stderr);
        assert_eq!(a.stdout, golden(file), "{args:?}");
        assert_eq!(run(args).stdout, a.stdout);
    }
}

#[test]
fn json_documents_carry_a_schema() {
    for args in [
        vec!["--output", "json", "kac", "weights", "--p", "5"],
        vec!["--output", "json", "fuse", "--p", "7", "1,3", "1,5"],
        vec!["--output", "json", "gko", "--m", "6", "--eps", "0", "--n", "0"],
        vec!["--output", "json", "braid", "matrix", "--k", "1", "--ext", "3,3,3,3"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert!(v["schema"].as_str().unwrap().starts_with("cosetvir/"), "{args:?}");
    }
}

#[test]
fn fuse_and_gko_tables() {
    let r = run(&["fuse", "--p", "7", "1,3", "1,3"]);
    assert_eq!(r.stdout.trim(), "(1,3) x (1,3) = (1,1) + (1,3) + (1,5)");
    let r = run(&["--output", "json", "gko", "--m", "6", "--eps", "0", "--n", "0"]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["summands"][1].to_string(), "[7,9,7,2]");
}

#[test]
fn tower_table_uses_grouped_notation() {
    let r = run(&["tower", "build", "--k", "2"]);
    assert!(r.stdout.contains("U(2,0) = [0,0]_1 + [2,5/4]_1 + [4,19/4]_1 + [6,21/2]_1"), "{}", r.stdout);
}

#[test]
fn certify_exit_codes() {
    assert_eq!(run(&["certify", "--k", "1"]).code, 0);
    let r = run(&["certify", "--k", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("INCONCLUSIVE"));
    let r = run(&["certify", "--k", "2", "--zero-element", "3,3,3"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("(3,3,3)"));
    assert_eq!(run(&["certify", "--k", "1", "--zero-key", "5,3,3,5,3,5"]).code, 2);
    assert_eq!(run(&["certify", "--k", "1", "--zero-key", "1,1,1,1,1,1"]).code, 1);
}

#[test]
fn certify_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let r = run(&["certify", "--k", "2", "--json", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "UNIQUE");
    assert_eq!(v["elements"].as_array().unwrap().len(), 11);
}

#[test]
fn errors_carry_their_category() {
    let cases: [(&[&str], &str); 6] = [
        (&["certify", "--k", "9"], "bound"),
        (&["kac", "weights", "--p", "1"], "input"),
        (&["braid", "r", "--p", "8", "--key", "3,3,3,3,3,4"], "input"),
        (&["fuse", "--p", "7", "9,1", "1,1"], "input"),
        (&["braid", "r", "--p", "8", "--key", "3,3"], "parse"),
        (&["--max-precision", "32", "certify", "--k", "1"], "config"),
    ];
    for (args, cat) in cases {
        let r = run(args);
        assert_eq!(r.code, 1, "{args:?}");
        assert!(r.stderr.starts_with(&format!("error [{cat}]")), "{args:?}: {}", r.stderr);
    }
    let r = run(&["--output", "json", "certify", "--k", "12"]);
    let v: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(v["error"]["category"], "bound");
    let r = run(&["cache", "info"]);
    assert!(r.stderr.starts_with("error [cache]"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "max_k = 1\noutput = \"json\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let r = run(&["--config", c, "certify", "--k", "2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bound"));
    let r = run(&["--config", c, "--max-k", "2", "tower", "build", "--k", "2"]);
    assert_eq!(r.code, 0);
    assert!(serde_json::from_str::<Value>(&r.stdout).is_ok());
    std::fs::write(&cfg, "max_precision_bits = 10\n").unwrap();
    assert_eq!(run(&["--config", c, "kac", "weights", "--p", "5"]).code, 1);
}

#[test]
fn cache_is_advisory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["--output", "json", "certify", "--k", "3"];
    let plain = run(&args).stdout;
    let mut with = vec!["--cache-dir", d];
    with.extend(args);
    let cold = run(&with);
    assert_eq!(cold.stdout, plain);
    let files: Vec<_> = std::fs::read_dir(d).unwrap().collect();
    assert_eq!(files.len(), 1);
    let warm = run(&with);
    assert_eq!(warm.stdout, plain);
    assert!(warm.stderr.is_empty(), "{}", warm.stderr);

    // corrupt every value: the cache is rejected with a warning and results do not change
    let path = dir.path().join("rcache-p9.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for e in v["entries"].as_array_mut().unwrap() {
        e[1] = serde_json::json!({"order": 1, "terms": [[0, 5, 1]]});
    }
    std::fs::write(&path, v.to_string()).unwrap();
    let bad = run(&with);
    assert_eq!(bad.stdout, plain);
    assert!(bad.stderr.contains("warning [cache]"), "{}", bad.stderr);

    std::fs::write(&path, "not json").unwrap();
    assert_eq!(run(&with).stdout, plain);

    let info = run(&["--cache-dir", d, "cache", "info"]);
    assert!(info.stdout.contains("rcache-p9.json"));
    run(&["--cache-dir", d, "cache", "clear"]);
    assert_eq!(std::fs::read_dir(d).unwrap().count(), 0);

    // the environment variable supplies the default
    let out = bin().env("COSETVIR_CACHE", d).args(["braid", "r", "--p", "7", "--key", "3,3,3,3,3,3"]).output().unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("rcache-p7.json").exists());
}

#[test]
fn in_process_runner_matches_the_binary() {
    let args = ["cosetvir", "--output", "json", "kac", "weights", "--p", "7"];
    let out = cosetvir_cli::run(args);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, golden("kac_weights_p7.json"));
    assert_eq!(cosetvir_cli::run(["cosetvir", "--help"]).code, 0);
}
