use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn nabla(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nabla"))
        .args(args)
        .output()
        .expect("binary runs");
    let mut text = String::from_utf8(out.stdout).unwrap();
    text.push_str(&String::from_utf8(out.stderr).unwrap());
    (out.status.code().unwrap(), text)
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn check_valid_formula_lists_all_states() {
    let (code, out) = nabla(&["check", &path("abs.dyn"), "p -> G p"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("{a, b}"), "{out}");
}

#[test]
fn check_invalid_formula_fails() {
    let (code, out) = nabla(&["--json", "check", &path("cyc2.dyn"), "p"]);
    assert_eq!(code, 1);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["holds"], false);
    assert_eq!(json["satisfying"], serde_json::json!(["s0"]));
}

#[test]
fn check_at_state() {
    assert_eq!(nabla(&["check", &path("cyc2.dyn"), "X p", "--state", "s1"]).0, 0);
    assert_eq!(nabla(&["check", &path("cyc2.dyn"), "X p", "--state", "s0"]).0, 1);
    assert_eq!(nabla(&["check", &path("cyc2.dyn"), "X p", "--state", "nope"]).0, 2);
}

#[test]
fn bipartite_and_language_examples() {
    let cyc2 = path("cyc2.dyn");
    assert_eq!(nabla(&["check", &cyc2, "zip(p; ~p) | zip(~p; p)"]).0, 0);
    let dfa = path("dfa.dyn");
    assert_eq!(nabla(&["check", &dfa, "eat(/(xx)*/; acc; ~acc)", "--state", "e"]).0, 0);
    assert_eq!(nabla(&["check", &dfa, "eat(/(xx)*/; acc; true)", "--state", "o"]).0, 1);
}

#[test]
fn operator_on_wrong_time_is_an_error() {
    let (code, out) = nabla(&["check", &path("dfa.dyn"), "zip(acc; acc)"]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(nabla(&["check", &path("abs.dyn"), "p &"]).0, 2);
    assert_eq!(nabla(&["check", &path("missing.dyn"), "p"]).0, 2);
    assert_eq!(nabla(&["synthesize", "--mode", "linear", &path("abs.dyn")]).0, 2);
    assert_eq!(nabla(&["bogus"]).0, 2);
    assert_eq!(nabla(&["axioms", &path("chain.kf"), "--scheme", "K"]).0, 2);
}

#[test]
fn synthesize_linear_gap_exits_3() {
    let (code, out) = nabla(&["synthesize", "--mode", "linear", &path("bad.kf")]);
    assert_eq!(code, 3);
    assert!(out.contains(r#"["a", "b"]"#), "{out}");
    let (code, out) = nabla(&["--json", "synthesize", "--mode", "linear", &path("bad.kf")]);
    assert_eq!(code, 3);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["exit"], 3);
}

#[test]
fn synthesize_invertible_needs_symmetry() {
    let (code, out) = nabla(&["synthesize", "--mode", "invertible", &path("chain.kf")]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn synthesize_output_parses_back() {
    let (code, out) = nabla(&["synthesize", "--mode", "general", &path("bad.kf")]);
    assert_eq!(code, 0);
    let sys = nabla::io::parse_system(&out).unwrap();
    let fr = nabla::io::parse_frame(&std::fs::read_to_string(fixture("bad.kf")).unwrap()).unwrap();
    assert!(nabla::synthesis::verify_synthesis(&fr, &sys).unwrap());
}

#[test]
fn axioms_counter_valuations() {
    let (code, out) = nabla(&["axioms", &path("chain.kf"), "--scheme", "5"]);
    assert_eq!(code, 1);
    assert!(out.contains("A={a}"), "{out}");
    let (code, out) = nabla(&["axioms", &path("fork.kf"), "--scheme", ".3"]);
    assert_eq!(code, 1);
    assert!(out.contains("A={y} B={z} at x"), "{out}");
    assert_eq!(nabla(&["axioms", &path("chain.kf"), "--scheme", "4"]).0, 0);
    assert_eq!(nabla(&["axioms", &path("chain.kf"), "--scheme", "T", "--bound", "1"]).0, 2);
}

#[test]
fn classify_json() {
    let (code, out) = nabla(&["--json", "classify", &path("bad.kf")]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["preorder"]["holds"], true);
    assert_eq!(json["transient-scc-singleton"]["holds"], false);
}

#[test]
fn bisim_and_distinguish() {
    let (code, out) = nabla(&["bisim", &path("abs.dyn"), "--view", "orbit"]);
    assert_eq!(code, 0);
    assert_eq!(out, "block 0: {a}\nblock 1: {b}\n");
    let (code, out) = nabla(&["distinguish", &path("cyc2.dyn"), "--view", "step", "s0", "s1"]);
    assert_eq!((code, out.trim()), (0, "p"));
    assert_eq!(nabla(&["distinguish", &path("rot3.dyn"), "--view", "trajectory", "r1", "r1"]).0, 1);
    assert_eq!(nabla(&["bisim", &path("rot3.dyn"), "--view", "step", "--at", "-1"]).0, 0);
}

#[test]
fn orbit_verify_roundtrip() {
    assert_eq!(nabla(&["orbit", &path("abs.dyn"), "b"]), (0, "{b}\n".into()));
    assert_eq!(nabla(&["verify", &path("free2.dyn")]).0, 0);
    for mode in ["general", "linear"] {
        assert_eq!(nabla(&["roundtrip", &path("chain.kf"), "--mode", mode]).0, 0);
    }
    assert_eq!(nabla(&["roundtrip", &path("clique2.kf"), "--mode", "invertible"]).0, 0);
}

#[test]
fn deterministic_output() {
    let args = ["--json", "bisim", &path("xx.dyn"), "--view", "multi"];
    assert_eq!(nabla(&args), nabla(&args));
}
