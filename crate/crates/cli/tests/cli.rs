use std::path::PathBuf;
use std::process::Command;

use diaglog_cli::run;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares against the golden file; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

fn diaglog(args: &[&str]) -> (String, i32) {
    let out = run(std::iter::once("diaglog").chain(args.iter().copied()));
    (out.stdout, out.code)
}

#[test]
fn demo_mp_matches_golden() {
    let (text, code) = diaglog(&["demo", "mp"]);
    assert_eq!(code, 0);
    assert!(text.contains("B provable: yes"));
    assert_golden("demo_mp.txt", &text);
    let (json, code) = diaglog(&["demo", "mp", "--format", "json"]);
    assert_eq!(code, 0);
    assert_golden("demo_mp.json", &json);
}

#[test]
fn demo_seqprod_matches_golden() {
    let (text, code) = diaglog(&["demo", "seqprod"]);
    assert_eq!(code, 0);
    assert!(text.contains("= (5, 2, 20)"));
    assert_golden("demo_seqprod.txt", &text);
    let (json, _) = diaglog(&["demo", "seqprod", "--format", "json"]);
    assert_golden("demo_seqprod.json", &json);
}

#[test]
fn evaluation_order_is_observable() {
    let (left, c1) = diaglog(&[
        "eval",
        "tests/fixtures/order.prog",
        "--order",
        "left",
        "--format",
        "json",
    ]);
    let (right, c2) = diaglog(&[
        "eval",
        "tests/fixtures/order.prog",
        "--order",
        "right",
        "--format",
        "json",
    ]);
    assert_eq!((c1, c2), (0, 0));
    assert_ne!(left, right);
    assert_golden("eval_left.json", &left);
    assert_golden("eval_right.json", &right);
    let (text, _) = diaglog(&["eval", "-e", "x := 1; x + 2", "--state", "x=0"]);
    assert_golden("eval_seq.txt", &text);
}

#[test]
fn eval_rejects_undeclared_variables() {
    let out = run(["diaglog", "eval", "-e", "y := 1", "--state", "x=0"]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("unknown variable `y`"),
        "{}",
        out.stderr
    );
}

#[test]
fn entailment_verdicts() {
    assert_eq!(
        diaglog(&[
            "entail",
            "tests/fixtures/compose.dl",
            "--morphism",
            "composition"
        ]),
        ("composition: confirmed\n".into(), 0)
    );
    assert_eq!(
        diaglog(&["entail", "tests/fixtures/compose.dl", "--morphism", "bare"]),
        ("bare: refuted\n".into(), 1)
    );
    assert_eq!(
        diaglog(&["entail", "tests/fixtures/mp.dl"]),
        ("tau: confirmed\n".into(), 0)
    );
}

#[test]
fn saturate_prove_and_translate_match_golden() {
    let (text, code) = diaglog(&["saturate", "tests/fixtures/compose.dl", "--spec", "Path"]);
    assert_eq!(code, 0);
    assert_golden("saturate_path.txt", &text);
    let (text, code) = diaglog(&["prove", "tests/fixtures/mp.dl", "--spec", "H"]);
    assert_eq!(code, 0);
    assert_golden("prove_mp.txt", &text);
    let (text, code) = diaglog(&["translate", "tests/fixtures/assign.dl", "--via", "near"]);
    assert_eq!(code, 0);
    assert_golden("translate_near.txt", &text);
    let (text, _) = diaglog(&[
        "translate",
        "tests/fixtures/assign.dl",
        "--via",
        "far",
        "--format",
        "json",
    ]);
    assert_golden("translate_far.json", &text);
}

#[test]
fn a_proof_without_a_match_is_a_domain_failure() {
    let (text, code) = diaglog(&[
        "prove",
        "tests/fixtures/mp.dl",
        "--spec",
        "H1",
        "--proof",
        "derive_b",
    ]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("no match"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = std::env::temp_dir().join(format!("diaglog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.dl");
    std::fs::write(&empty, "").unwrap();
    let out = run(["diaglog".as_ref(), "check".as_ref(), empty.as_os_str()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("parse error at 1:1"), "{}", out.stderr);
    assert_eq!(run(["diaglog", "check", "no/such/file.dl"]).code, 2);
    assert_eq!(run(["diaglog", "frobnicate"]).code, 2);
    assert_eq!(
        run([
            "diaglog",
            "translate",
            "tests/fixtures/assign.dl",
            "--via",
            "sideways"
        ])
        .code,
        2
    );
}

#[test]
fn check_summarizes_files() {
    let (text, code) = diaglog(&["check", "tests/fixtures/mp.dl", "tests/fixtures/compose.dl"]);
    assert_eq!(code, 0);
    assert_golden("check.txt", &text);
}

#[test]
fn the_binary_is_deterministic_and_sets_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_diaglog");
    let runs: Vec<_> = (0..2)
        .map(|_| {
            Command::new(bin)
                .args(["demo", "mp", "--format", "json"])
                .output()
                .unwrap()
        })
        .collect();
    assert_eq!(runs[0].stdout, runs[1].stdout);
    assert_eq!(runs[0].status.code(), Some(0));
    let bad = Command::new(bin)
        .args(["entail", "tests/fixtures/compose.dl", "--morphism", "bare"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
