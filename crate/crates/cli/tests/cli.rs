use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gkmforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// A temporary directory holding every bundled example document.
fn examples() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("ex");
    let o = run(&["ingest", "examples", ex.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (dir, ex)
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cp1_class_passes_the_gkm_check() {
    let (_t, ex) = examples();
    let c = write(
        &ex,
        "c.json",
        r#"{"schema":"gkm-forge/1","kind":"classes","group":{"free_rank":1},"theory":"K",
            "classes":[{"N":{"terms":[{"exp":[0],"coeff":1}]},"S":{"terms":[{"exp":[1],"coeff":1}]}}]}"#,
    );
    let o = run(&["gkm", "check", "--graph", &p(&ex, "cp1.json"), "--class", &c]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("all edges divisible"));

    let bad = write(
        &ex,
        "bad.json",
        r#"{"schema":"gkm-forge/1","kind":"classes","group":{"free_rank":1},"theory":"K",
            "classes":[{"N":{"terms":[{"exp":[0],"coeff":1}]},"S":{"terms":[{"exp":[0],"coeff":2}]}}]}"#,
    );
    let o = run(&["gkm", "check", "--graph", &p(&ex, "cp1.json"), "--class", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not divisible"));
}

#[test]
fn orbit_section_is_the_roots_of_unity() {
    let (_t, ex) = examples();
    let o = run(&[
        "sheaf",
        "section",
        "--model",
        &p(&ex, "orbit4-model.json"),
        "--bundle",
        &p(&ex, "orbit4-line.json"),
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let values: Vec<&str> = out
        .lines()
        .filter_map(|l| l.split_once("[o] "))
        .map(|(_, v)| v.split(" + O(").next().unwrap())
        .collect();
    assert_eq!(values, ["1", "ζ4", "-1", "-ζ4"]);
}

#[test]
fn bad_covers_exit_one_with_witnesses() {
    let (_t, ex) = examples();
    for c in 2..=4 {
        let o = run(&["cover", "verify", "--cover", &p(&ex, &format!("bad-cover-c{c}.json"))]);
        assert_eq!(code(&o), 1, "condition {c}");
        assert!(stdout(&o).contains(&format!("condition {c}")), "{}", stdout(&o));
    }
    let o = run(&["--json", "cover", "verify", "--cover", &p(&ex, "bad-cover-c3.json")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"][0]["condition"], 3);
    assert_eq!(v["violations"][0]["witness"], serde_json::json!([[2]]));

    // a ball of radius 1/2 is rejected as input, not reported as a violation
    let text = std::fs::read_to_string(ex.join("bad-cover-c4.json")).unwrap();
    let half = write(&ex, "half.json", &text.replace("\"3/8\"", "\"1/2\""));
    let o = run(&["cover", "verify", "--cover", &half]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
}

#[test]
fn built_covers_verify() {
    let (t, ex) = examples();
    let pts = write(
        &ex,
        "pts.json",
        r#"{"schema":"gkm-forge/1","kind":"points","group":{"free_rank":2},
            "points":[["0","0"],["1/2","1/2"],["1/3","1/12"]]}"#,
    );
    let cover = p(t.path(), "cover.json");
    let o = run(&["cover", "build", "--samples", &pts, "--model", &p(&ex, "cp2-model.json"), "-o", &cover]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["cover", "verify", "--cover", &cover]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn input_errors_exit_two_with_a_location() {
    let t = tempfile::tempdir().unwrap();
    let g = write(
        t.path(),
        "g.json",
        r#"{"schema":"gkm-forge/1","kind":"graph","group":{"free_rank":1},
            "vertices":["N","S"],"edges":[{"u":"N","v":"S","w":[0]}]}"#,
    );
    let o = run(&["gkm", "dims", "--graph", &g]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/edges/0/w"));

    let o = run(&["ingest", "validate", &p(t.path(), "missing.json")]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["latt", "annihilator", "--group", "1", "--point", "1/0"])), 2);
}

#[test]
fn reports_are_deterministic_and_self_describing() {
    let (_t, ex) = examples();
    let args = ["--json", "--cutoff", "3", "sheaf", "stalk", "--model", &p(&ex, "cp2-model.json"), "--point", "1/2,1/2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["cutoff"], 3);
    assert_eq!(v["window"], 3);
    assert_eq!(v["dimensions"], serde_json::json!([2, 5, 8, 11]));
    let text = run(&["--window", "2", "gkm", "dims", "--graph", &p(&ex, "cp2.json")]);
    assert!(stdout(&text).starts_with("# gkm dims (cutoff 6, window 2)"));
}

#[test]
fn fans_convert_to_graphs() {
    let (t, ex) = examples();
    let out = p(t.path(), "g.json");
    assert_eq!(code(&run(&["ingest", "fan", "--file", &p(&ex, "fan-p1xp1.json"), "--out", &out])), 0);
    let o = run(&["gkm", "dims", "--graph", &out, "--max-degree", "2"]);
    assert!(stdout(&o).contains("[1, 4, 8]"));
    let prod = run(&["gkm", "product", &p(&ex, "cp1.json"), &p(&ex, "cp1.json")]);
    let v: Value = serde_json::from_str(&stdout(&prod)).unwrap();
    assert_eq!(v["kind"], "graph");
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn normalize_is_idempotent() {
    let (t, ex) = examples();
    for name in ["cp2-model.json", "presentation-cp2.json", "orbit3-line.json"] {
        let out = p(t.path(), name);
        assert_eq!(code(&run(&["ingest", "normalize", &p(&ex, name), "-o", &out])), 0);
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(ex.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn predicates_and_divisions_use_exit_one_for_false() {
    let prec = ["latt", "prec", "--group", "1", "--collection", "[[[2]]]"];
    let o = run(&[&prec[..], &["--alpha", "0", "--beta", "1/2"]].concat());
    assert_eq!((code(&o), stdout(&o).lines().last().unwrap()), (0, "true"));
    let o = run(&[&prec[..], &["--alpha", "1/3", "--beta", "0"]].concat());
    assert_eq!(code(&o), 1);
    let f = r#"{"terms":[{"exp":[0],"coeff":1},{"exp":[2],"coeff":-1}]}"#;
    assert_eq!(code(&run(&["algebra", "euler", "--group", "1", "--laurent", f, "--weight", "1"])), 0);
    let g = r#"{"terms":[{"exp":[0],"coeff":1},{"exp":[2],"coeff":1}]}"#;
    let o = run(&["algebra", "euler", "--group", "1", "--laurent", g, "--weight", "-1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let o = bin().env("GKMFORGE_THREADS", "1").args(["selftest", "--only", "5"]).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = bin().env("GKMFORGE_THREADS", "zero").args(["selftest", "--only", "9"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("10 of 10 criteria passed"));
}
