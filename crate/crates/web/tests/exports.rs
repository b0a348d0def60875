use pzl_web::{check_rule, corpus_entries, count, generate, oracle_check, problem, render_board};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn slitherlink() -> String {
    let list = parse(corpus_entries());
    let e = list
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "slitherlink")
        .unwrap();
    e["rule"].as_str().unwrap().to_string()
}

#[test]
fn corpus_listing() {
    let list = parse(corpus_entries());
    assert_eq!(list.as_array().unwrap().len(), 11);
}

#[test]
fn checking() {
    assert_eq!(parse(check_rule(&slitherlink()))["ok"], true);
    let bad = parse(check_rule("puzzle \"b\"\nconstraint solution(q) == 1"));
    assert_eq!(bad["ok"], false);
    assert_eq!(bad["diagnostics"][0]["line"], 2);
}

#[test]
fn counting_and_errors() {
    assert_eq!(parse(count(&slitherlink(), "2x2"))["count"], 13);
    assert!(parse(count(&slitherlink(), "2by2"))["error"].is_string());
    assert!(parse(count("puzzle", "2x2"))["error"].is_string());
}

#[test]
fn generate_render_and_check() {
    let g = parse(generate(&slitherlink(), "3x3", 4));
    let doc = g["board"].to_string();
    assert_eq!(parse(render_board(&doc))["text"], g["text"]);
    assert_eq!(parse(oracle_check("slitherlink", &doc))["pass"], true);
    assert_eq!(parse(oracle_check("sudoku", &doc))["pass"], false);
    // Same seed, same board.
    assert_eq!(parse(generate(&slitherlink(), "3x3", 4)), g);
}

#[test]
fn problems() {
    let p = parse(problem(&slitherlink(), "3x3", 3));
    assert_eq!(p["problem"]["certificate"]["count"], 1);
    assert!(p["text"].as_str().unwrap().contains('.'));
}
