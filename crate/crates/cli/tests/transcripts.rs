//! Golden transcripts: exact stdout and exit code per invocation.

use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn rule(name: &str) -> String {
    root()
        .join("corpus")
        .join(format!("{name}.rule"))
        .display()
        .to_string()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pzl(args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_pzl"))
        .args(args)
        .current_dir(root())
        .env_remove("PZL_NODE_BUDGET")
        .output()
        .expect("binary runs");
    Out {
        code: o.status.code().expect("exit code"),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

#[test]
fn check_shipped_rule() {
    let o = pzl(&["check", "corpus/slitherlink.rule"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "corpus/slitherlink.rule: ok, puzzle \"slitherlink\", 1 structure(s), 4 constraint(s), 0 warning(s)\n");
}

#[test]
fn check_reports_warning_with_position() {
    let o = pzl(&["check", "--puzzle", "hitori"]);
    assert_eq!(o.code, 0);
    let first = o.stdout.lines().next().unwrap();
    assert!(
        first.starts_with("corpus/hitori.rule: warning[W101] "),
        "{first}"
    );
    assert!(!first.contains(" 0:0:"), "{first}");
}

#[test]
fn check_bad_rule_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rule");
    std::fs::write(
        &bad,
        "puzzle \"bad\"\nconstraint forall c in B(C): solution(q) == 1\n",
    )
    .unwrap();
    let o = pzl(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert_eq!(o.stdout, "");
    assert!(
        o.stderr.contains("error[E003] 2:1: unbound variable `q`"),
        "{}",
        o.stderr
    );
    let syntax = dir.path().join("syntax.rule");
    std::fs::write(&syntax, "puzzle \"s\"\nconstraint forall : 1\n").unwrap();
    assert_eq!(
        pzl(&["count", syntax.to_str().unwrap(), "--size", "2x2"]).code,
        2
    );
}

#[test]
fn count_slitherlink_2x2() {
    let o = pzl(&[
        "count",
        "corpus/slitherlink.rule",
        "--size",
        "2x2",
        "--engine",
        "exhaustive",
    ]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "13\n"));
    let o = pzl(&[
        "count", "--puzzle", "sudoku", "--size", "4x4", "--limit", "10",
    ]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "10\n"));
}

#[test]
fn corpus_verify_sudoku() {
    let o = pzl(&[
        "corpus-verify",
        "sudoku",
        "--size",
        "4x4",
        "--count",
        "5",
        "--seed",
        "7",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let expected: String = (1..=5)
        .map(|k| format!("sudoku 4x4 board {k}: pass\n"))
        .chain(["sudoku 4x4: 5/5 passed\n".into()])
        .collect();
    assert_eq!(o.stdout, expected);
}

#[test]
fn gen_writes_board_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("boards");
    let args = [
        "gen",
        "--puzzle",
        "sudoku",
        "--size",
        "4x4",
        "--seed",
        "1",
        "--limit",
        "2",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = pzl(&args);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with(
        "board 1\n+ + + + +\n 1 2 3 4 \n+ + + + +\n 3 4 1 2 \n+ + + + +\n 2 1 4 3 \n+ + + + +\n 4 3 2 1 \n+ + + + +\n"
    ));
    assert!(o
        .stdout
        .ends_with("2 board(s), constructive engine, seed 1\n"));
    let file = out.join("sudoku-4x4-1-1.json");
    let r = pzl(&["render", file.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(o.stdout.contains(&r.stdout));
    // Byte-identical output on a second run.
    assert_eq!(pzl(&args).stdout, o.stdout);
}

#[test]
fn problem_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let o = pzl(&[
        "problem",
        &rule("slitherlink"),
        "--size",
        "3x3",
        "--seed",
        "3",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(
        o.stdout.ends_with("unique, 29 value(s) hidden, 2 nodes\n"),
        "{}",
        o.stdout
    );
    let r = pzl(&["render", p.to_str().unwrap()]);
    assert!(o.stdout.starts_with(&r.stdout));
    let v = pzl(&[
        "verify",
        &rule("slitherlink"),
        "--problem",
        p.to_str().unwrap(),
    ]);
    assert_eq!((v.code, v.stdout.as_str()), (0, "unique\n"));

    // Thinning kept only clues it could not drop, so hiding one more
    // shown cell leaves several answers.
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let presented = doc["presented"].as_object_mut().unwrap();
    let key = presented
        .iter()
        .find(|(k, v)| k.starts_with("c(") && v.as_str() != Some("undecided"))
        .unwrap()
        .0
        .clone();
    presented.insert(key, "undecided".into());
    let q = dir.path().join("q.json");
    std::fs::write(&q, doc.to_string()).unwrap();
    let v = pzl(&[
        "verify",
        &rule("slitherlink"),
        "--problem",
        q.to_str().unwrap(),
    ]);
    assert_eq!(v.code, 1);
}

#[test]
fn exit_codes_for_error_paths() {
    // Size requirements unmet.
    assert_eq!(
        pzl(&["count", "--puzzle", "sudoku", "--size", "3x3"]).code,
        3
    );
    // Budget exhausted.
    assert_eq!(
        pzl(&[
            "count",
            "--puzzle",
            "slitherlink",
            "--size",
            "3x3",
            "--node-budget",
            "10"
        ])
        .code,
        3
    );
    let o = Command::new(env!("CARGO_BIN_EXE_pzl"))
        .args(["count", "--puzzle", "slitherlink", "--size", "3x3"])
        .env("PZL_NODE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    // Malformed size, unknown puzzle, missing file, wrong engine.
    assert_eq!(
        pzl(&["count", "--puzzle", "sudoku", "--size", "4y4"]).code,
        2
    );
    assert_eq!(pzl(&["corpus-verify", "nurikabe"]).code, 2);
    assert_eq!(pzl(&["check", "no/such.rule"]).code, 2);
    assert_eq!(
        pzl(&[
            "count",
            "--puzzle",
            "slitherlink",
            "--size",
            "2x2",
            "--engine",
            "constructive"
        ])
        .code,
        2
    );
    assert_eq!(pzl(&["count", "--puzzle", "slitherlink"]).code, 2);
    // Fully hidden cells leave several answers: non-unique.
    assert_eq!(
        pzl(&["problem", "--puzzle", "sukoro", "--size", "3x3"]).code,
        1
    );
    // Black cells cannot be presented.
    assert_eq!(
        pzl(&["problem", "--puzzle", "hitori", "--size", "3x3"]).code,
        1
    );
    // No completed board at all.
    let dir = tempfile::tempdir().unwrap();
    let none = dir.path().join("none.rule");
    std::fs::write(&none, "puzzle \"none\"\nconstraint 1 == 2\n").unwrap();
    let o = pzl(&["gen", none.to_str().unwrap(), "--size", "2x2"]);
    assert_eq!((o.code, o.stdout.as_str()), (3, ""));
}

#[test]
fn help_exits_0() {
    let o = pzl(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("corpus-verify"));
}
