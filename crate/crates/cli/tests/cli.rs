use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use ckah::dot::parse_dot;
use ckah::poset::{iso, to_poset};
use ckah::term::parse_pomset;
use ckah_cli::{EXIT_DIFFERENT, EXIT_EQUIVALENT, EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR};

fn ckah(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckah"))
        .args(args)
        .env_remove("CKAH_MAX_LANGUAGE")
        .env_remove("CKAH_MAX_ITERATIONS")
        .env_remove("CKAH_OMEGA_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ckah-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes() {
    assert_eq!(
        ckah(&["check", "a;b", "a;b"]).status.code(),
        Some(EXIT_EQUIVALENT)
    );
    assert_eq!(
        ckah(&["check", "a*", "a*;a*"]).status.code(),
        Some(EXIT_EQUIVALENT)
    );
    assert_eq!(
        ckah(&["check", "a", "b"]).status.code(),
        Some(EXIT_DIFFERENT)
    );
    let cut = ckah(&[
        "check",
        "a||b",
        "b||a",
        "--hyp",
        "exch",
        "--max-iterations",
        "1",
    ]);
    assert_eq!(cut.status.code(), Some(EXIT_INCONCLUSIVE));
    assert!(stdout(&cut).contains("reason:"));
    assert_eq!(
        ckah(&["check", "a;(b", "a"]).status.code(),
        Some(EXIT_INPUT_ERROR)
    );
    assert_eq!(ckah(&["check", "a"]).status.code(), Some(EXIT_INPUT_ERROR));
    assert_eq!(ckah(&["frobnicate"]).status.code(), Some(EXIT_INPUT_ERROR));
    assert_eq!(
        ckah(&["check", "{o}", "{o}"]).status.code(),
        Some(EXIT_INPUT_ERROR)
    );
}

#[test]
fn syntax_errors_point_at_the_offset() {
    let o = ckah(&["check", "a;;b", "a"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("a;;b"), "{err}");
    assert!(err.contains("  ^"), "{err}");
}

#[test]
fn observation_examples() {
    let o = ckah(&["check", "{o};a;{!o}", "0", "--hyp", "obs"]);
    assert_eq!(o.status.code(), Some(EXIT_DIFFERENT));
    assert!(stdout(&o).contains("witness: @{o};a;@{}"));
    let o = ckah(&["check", "{o}+{!o}", "{T}", "--hyp", "obs", "--cross-check"]);
    assert_eq!(o.status.code(), Some(EXIT_EQUIVALENT));
    assert!(!stdout(&o).contains("cross-check: FAIL"));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &[
            "check",
            "(a||b);(c||d)",
            "(a;c)||(b;d)",
            "--hyp",
            "exch",
            "--cross-check",
        ][..],
        &["closure", "{o}||{p};a", "--hyp", "obs"][..],
    ] {
        let first = ckah(args);
        let second = ckah(args);
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.stderr, second.stderr);
    }
}

#[test]
fn closure_lists_the_exchange_closure() {
    let o = ckah(&["closure", "a||b", "--hyp", "exch"]);
    assert_eq!(o.status.code(), Some(EXIT_EQUIVALENT));
    let lines: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.contains(':'))
        .map(String::from)
        .collect();
    assert_eq!(lines, ["a||b", "a;b", "b;a"]);
}

#[test]
fn dot_files_reparse_to_the_listed_pomsets() {
    let dir = scratch("dot");
    let o = ckah(&[
        "closure",
        "(a||b);c||d",
        "--hyp",
        "exch",
        "--dot",
        dir.to_str().unwrap(),
    ]);
    let listed: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.contains(':'))
        .map(String::from)
        .collect();
    assert!(listed.len() > 5);
    for (i, line) in listed.iter().enumerate() {
        let text = fs::read_to_string(dir.join(format!("closure-{i:04}.dot"))).unwrap();
        let back = parse_dot(&text).unwrap();
        assert!(
            iso(&back, &to_poset(&parse_pomset(line).unwrap())),
            "{line}"
        );
    }
    let w = ckah(&[
        "check",
        "a||b",
        "a;b",
        "--hyp",
        "exch",
        "--dot",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(w.status.code(), Some(EXIT_DIFFERENT));
    let back = parse_dot(&fs::read_to_string(dir.join("witness.dot")).unwrap()).unwrap();
    assert!(iso(&back, &to_poset(&parse_pomset("a||b").unwrap())));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn environment_overrides_budgets() {
    let o = Command::new(env!("CARGO_BIN_EXE_ckah"))
        .args(["check", "a||b||c", "c||b||a", "--hyp", "exch"])
        .env("CKAH_MAX_LANGUAGE", "5")
        .output()
        .unwrap();
    let text = stdout(&o);
    assert!(text.contains("max-language=5"), "{text}");
    assert!(text.contains("language-size budget exhausted"), "{text}");
    assert_eq!(o.status.code(), Some(EXIT_INCONCLUSIVE));
    let flag = ckah(&["check", "a", "a", "--max-language", "9"]);
    assert!(stdout(&flag).contains("max-language=9"));
}

#[test]
fn hypothesis_files() {
    let dir = scratch("hyp");
    let path = dir.join("h.txt");
    fs::write(&path, "# exchange plus one rule\nexch\na <= b\n").unwrap();
    let o = ckah(&["closure", "b||c", "--hyp-file", path.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(
        text.contains("\na;c\n") && text.contains("\nc;b\n"),
        "{text}"
    );
    fs::write(&path, "a <= b*\n").unwrap();
    assert_eq!(
        ckah(&["closure", "a", "--hyp-file", path.to_str().unwrap()])
            .status
            .code(),
        Some(EXIT_INPUT_ERROR)
    );
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn witness_flag_prints_dot() {
    let o = ckah(&["check", "a", "b", "--witness"]);
    assert!(stdout(&o).contains("digraph pomset {"));
}
