use std::path::Path;
use std::process::{Command, Output};

use tamedom_cli::Report;

fn tamedom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamedom"))
        .args(args)
        .env_remove("TAMEDOM_HARD_CAP_POINTS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn untimed_json(path: &str) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let reports: Vec<Report> = serde_json::from_str(&text).unwrap();
    let reports: Vec<Report> = reports.iter().map(Report::untimed).collect();
    serde_json::to_string_pretty(&reports).unwrap()
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let names = ["random-graph-noncomm", "dlop-invbar-noncomm", "monoid-equality"];
    let mut args = vec!["run"];
    args.extend(names);
    args.extend(["--json", a.to_str().unwrap()]);
    assert_eq!(code(&tamedom(&args)), 0);
    let mut args = vec!["run", "--parallel"];
    args.extend(names);
    args.extend(["--json", b.to_str().unwrap()]);
    assert_eq!(code(&tamedom(&args)), 0);
    let (a, b) = (untimed_json(a.to_str().unwrap()), untimed_json(b.to_str().unwrap()));
    assert!(a == b, "reports differ between runs");
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&tamedom(&["run", "random-graph-noncomm", "--json", p])), 0);
    assert_eq!(code(&tamedom(&["verify", p])), 0);

    // A report claiming a pass it did not earn.
    let mut r: Report = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    r.claims[0].pass = !r.claims[0].pass;
    let bad = write(dir.path(), "bad.json", &serde_json::to_string(&r).unwrap());
    assert_eq!(code(&tamedom(&["verify", &bad])), 1);

    let junk = write(dir.path(), "junk.json", "{\"scenario\": 1}");
    assert_eq!(code(&tamedom(&["verify", &junk])), 2);
}

#[test]
fn run_errors_exit_with_two() {
    assert_eq!(code(&tamedom(&["run", "no-such-scenario"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_tamedom"))
        .args(["run", "random-graph-noncomm"])
        .env("TAMEDOM_HARD_CAP_POINTS", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("TAMEDOM_HARD_CAP_POINTS"));
    let o = Command::new(env!("CARGO_BIN_EXE_tamedom"))
        .args(["run", "counterexample-wd"])
        .env("TAMEDOM_HARD_CAP_POINTS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn user_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "graph.thy",
        "theory graph\nrelation E 2\nsymmetric E\nirreflexive E\n",
    );
    write(
        dir.path(),
        "graph.sch",
        "type lonely over graph vars x\nE(x,*) := false\n\ntype social over graph vars y\nE(y,*) := true\n",
    );
    let good = write(
        dir.path(),
        "good.toml",
        r#"
name = "user-graph"
theory = "graph.thy"
schemas = "graph.sch"

[[claim]]
kind = "refute-all-equidominance"
left = "lonely"
right = "social"
base = 1

[[claim]]
kind = "weakly-orthogonal"
left = "lonely"
right = "social"
expect = "refuted"
"#,
    );
    let json = dir.path().join("out.json");
    let o = tamedom(&["run", &good, "--json", json.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&tamedom(&["verify", json.to_str().unwrap()])), 0);

    // The same pair is not equidominant, so expecting that fails.
    let wrong = write(
        dir.path(),
        "wrong.toml",
        "name = \"w\"\ntheory = \"random-graph\"\n[[claim]]\nkind = \"equidominance\"\nleft = \"p\"\nright = \"q\"\nbase = 0\n",
    );
    assert_eq!(code(&tamedom(&["run", &wrong])), 1);

    let unknown = write(
        dir.path(),
        "unknown.toml",
        "name = \"u\"\ntheory = \"random-graph\"\n[[claim]]\nkind = \"domination\"\nleft = \"p\"\nright = \"nope\"\n",
    );
    assert_eq!(code(&tamedom(&["run", &unknown])), 2);
}

#[test]
fn theory_validation() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.thy", "theory t\nrelation E 2\nsymmetric E\n");
    let o = tamedom(&["theory", "validate", &ok]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("relation E 2"));
    let bad = write(dir.path(), "bad.thy", "theory t\nrelation E 2\nrelation E 2\n");
    assert_eq!(code(&tamedom(&["theory", "validate", &bad])), 1);
}

#[test]
fn schema_validation() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "ok.sch",
        "type p over random-graph vars x\ninternal !E(x,x)\nE(x,*) := false\n",
    );
    assert_eq!(code(&tamedom(&["schema", "validate", &ok])), 0);
    let incomplete = write(
        dir.path(),
        "inc.sch",
        "type p over counterexample vars x\nR2(x,*) := true\n",
    );
    let o = tamedom(&["schema", "validate", &incomplete, "--json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v[0]["failures"].as_array().unwrap().is_empty());
}
