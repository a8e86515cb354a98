use std::io::Write;
use std::process::{Command, Output, Stdio};

const FIG1: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json");

fn tfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("tfa-cli-{}-{name}", std::process::id()))
}

#[test]
fn estimate_worked_observations() {
    let o = tfa(&["estimate", FIG1, "--obs", "a@1,a@3", "--time", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x2 x3\n");

    let o = tfa(&["estimate", FIG1, "--obs", "", "--time", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x0 x2\n");
}

#[test]
fn estimate_json_is_sorted() {
    let o = tfa(&["estimate", FIG1, "--obs", "a@1", "--time", "1", "--json"]);
    assert_eq!(
        stdout(&o),
        "{\"anchor\":\"1.0\",\"discrete\":[\"x2\",\"x3\",\"x4\"],\"extended\":[[\"x2\",\"[0,0]\"],[\"x3\",\"[0,0]\"],[\"x4\",\"[0,1]\"]]}\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(tfa(&["estimate", FIG1, "--obs", "a@0.5", "--time", "1"]).status.code(), Some(1));
    assert_eq!(tfa(&["estimate", FIG1, "--obs", "a@x", "--time", "1"]).status.code(), Some(64));
    assert_eq!(tfa(&["estimate", FIG1, "--obs", "a@2,a@1", "--time", "3"]).status.code(), Some(64));
    assert_eq!(tfa(&["estimate", FIG1, "--obs", "b@1", "--time", "3"]).status.code(), Some(64));
    assert_eq!(tfa(&["estimate", FIG1, "--time", "abc"]).status.code(), Some(64));
    assert_eq!(tfa(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(tfa(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_reports_diagnostics() {
    assert_eq!(stdout(&tfa(&["validate", FIG1, "--require-ro"])), "ok\n");

    let text = std::fs::read_to_string(FIG1).unwrap();
    let path = temp("open-guard.json");
    std::fs::write(&path, text.replace("\"[1,3]\", \"reset\": \"[1,1]\"", "\"(1,3)\", \"reset\": \"[1,1]\"")).unwrap();
    let o = tfa(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("(x0,c,x1)"), "{}", stdout(&o));

    let path = temp("not-ro.json");
    std::fs::write(&path, text.replace("\"[1,3]\", \"reset\": \"[0,1]\"", "\"[1,3]\", \"reset\": \"id\"")).unwrap();
    assert_eq!(tfa(&["validate", path.to_str().unwrap()]).status.code(), Some(0));
    let o = tfa(&["validate", path.to_str().unwrap(), "--require-ro"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("(x1,a,x4)"));
}

#[test]
fn zones_and_za() {
    let o = tfa(&["zones", FIG1, "--state", "x0"]);
    assert_eq!(stdout(&o), "x0: [0,0] (0,1) [1,1] (1,3] (3,inf)\n");

    let dot = temp("za.dot");
    let o = tfa(&["za", FIG1, "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("23 extended states\n"));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("style=dashed"));
}

#[test]
fn reach_prints_witness() {
    let o = tfa(&["reach", FIG1, "--from", "x0", "--to", "x4", "--duration", "4"]);
    let out = stdout(&o);
    assert!(out.starts_with("yes\nwitness: (x0,"), "{out}");
    let o = tfa(&["reach", FIG1, "--from", "x2", "--to", "x4", "--duration", "4"]);
    assert_eq!(stdout(&o), "no\n");
}

#[test]
fn watch_streams_queries() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tfa"))
        .args(["watch", FIG1])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"query 0\nobs a 1\nquery 2\nnonsense\nobs a 3\nquery 3.5\nquery 4\nquit\nquery 5\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x0 x2\nx2 x3 x4\nx2\nx2 x3\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn observer_writes_json() {
    let path = temp("observer.json");
    let o = tfa(&["observer", FIG1, "--horizon", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5 observer states, horizon 4\n");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["horizon"], 4);
    assert_eq!(v["states"][0]["cells"].as_array().unwrap().len(), 9);
}

#[test]
fn oracle_agrees_on_worked_example() {
    let o = tfa(&["oracle", FIG1, "--obs", "a@1,a@3", "--time", "4"]);
    assert_eq!(stdout(&o), "x2 x3\n");
    assert_eq!(tfa(&["oracle", FIG1, "--obs", "a@1.25", "--time", "4"]).status.code(), Some(64));
}

#[test]
fn fuzz_is_deterministic() {
    let a = tfa(&["fuzz", "--states", "3", "--trials", "4", "--seed", "9"]);
    let b = tfa(&["fuzz", "--states", "3", "--trials", "4", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines = stdout(&a);
    assert!(lines.lines().count() >= 4);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "agree");
    }
}
